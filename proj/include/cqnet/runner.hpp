// runner.hpp: named scenarios, transmission ratios, peak extraction and table output

#pragma once

#include "cqnet/dynamics.hpp"
#include "cqnet/model.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

namespace cqnet::runner {

using qla::DensityMatrix;

/// A named scalar function of a state, e.g. "C_33'", "Q_21'", "tau1_2",
/// "tangle_ub_1", "purity", "delta".
struct Measure {
    std::string name;
    std::function<double(const DensityMatrix&)> eval;
};

/// Throws std::invalid_argument for unknown descriptors or labels that do
/// not fit the register (`network` false means a single chain).
Measure parse_measure(std::string_view descriptor, int sites_per_chain, bool network);

struct ScenarioSpec {
    std::string name = "custom";
    std::vector<model::InitialKind> initials{model::InitialKind::psi_a};
    std::vector<double> theta_list{0.7853981633974483};
    std::vector<double> gamma_list{0.0};
    model::GammaUnits gamma_units = model::GammaUnits::absolute;
    double t_max_lambda = 20.0;
    int samples = 800;
    std::vector<std::string> columns;
    bool single_chain = false;
    /// Used when `initials` holds InitialKind::custom.
    std::optional<DensityMatrix> custom_state;

    void validate() const;
};

/// Preset for fig2 … fig9. Throws std::invalid_argument for unknown names
/// (including "transmission", which has its own entry point).
ScenarioSpec scenario_preset(std::string_view name);

struct Record {
    std::string initial;
    double theta = 0.0;
    double gamma = 0.0;
    double lambda_t = 0.0;
    std::vector<double> values;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<Record> rows;
};

/// One record per (initial, θ, γ, sample) in declaration order.
Table run_scenario(const ScenarioSpec& spec, const model::NetworkConfig& cfg,
                   const dynamics::IntegratorConfig& icfg = {});

struct TransmissionOptions {
    double t_max_lambda = 20.0;
    int samples = 800;
    dynamics::IntegratorConfig integrator;
};

struct TransmissionResult {
    double ratio = 0.0;              // max_t C_dst(t) / C_src(0)
    double peak_lambda_t = 0.0;
    double ratio_at_transfer = 0.0;  // at λt = 2π/3
};

/// Throws std::invalid_argument if the source pair starts unentangled.
TransmissionResult transmission_ratio(const model::InitialStateSpec& initial, const model::NetworkConfig& cfg,
                                      std::pair<int, int> src, std::pair<int, int> dst,
                                      const TransmissionOptions& opts = {});

/// Ratio table for |Ψ>_a and |Ψ>_b over `thetas` at the config's γ.
Table transmission_table(const std::vector<double>& thetas, const model::NetworkConfig& cfg,
                         const TransmissionOptions& opts = {});

struct PeakEvent {
    int series = 0;  // index into the input series
    double time_lambda = 0.0;
    double value = 0.0;
    int simultaneous_group = 0;
};

/// Interior local maxima above `threshold`, refined by three-point
/// quadratic interpolation and ordered in time; events within
/// `group_window` of a group's first event share its group id.
std::vector<PeakEvent> peak_sequence(const std::vector<std::vector<double>>& series,
                                     const std::vector<double>& lambda_times, double threshold = 1e-4,
                                     double group_window = 0.02);

/// Maximum of a sampled curve refined by quadratic interpolation: (time, value).
std::pair<double, double> interpolated_max(const std::vector<double>& values, const std::vector<double>& times);

void write_csv(std::ostream& out, const Table& table);
void write_jsonl(std::ostream& out, const Table& table);

/// "%.12g" formatting used by both writers.
std::string format_number(double v);

}  // namespace cqnet::runner
