#include "cqnet/runner.hpp"

#include "cqnet/correlations.hpp"
#include "cqnet/davies.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace cqnet::runner {

namespace {

using model::InitialKind;
using model::NetworkConfig;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::pair<int, int> parse_pair(std::string_view label, int n, bool network)
{
    std::pair<int, int> p;
    try {
        p = model::pair_indices(label, n);
    } catch (const std::out_of_range& e) {
        throw std::invalid_argument(e.what());
    }
    if (!network && (p.first >= n || p.second >= n)) {
        throw std::invalid_argument("pair '" + std::string(label) + "' is outside a single chain");
    }
    return p;
}

int parse_site(std::string_view label, int n, bool network)
{
    int s = 0;
    try {
        s = model::site_index(label, n);
    } catch (const std::out_of_range& e) {
        throw std::invalid_argument(e.what());
    }
    if (!network && s >= n) throw std::invalid_argument("site '" + std::string(label) + "' is outside a single chain");
    return s;
}

DensityMatrix pair_state(const DensityMatrix& rho, std::pair<int, int> p)
{
    const std::array<int, 2> keep{p.first, p.second};
    return qla::reduce(rho, keep);
}

bool chains_identical(const NetworkConfig& cfg)
{
    for (int s = 0; s < cfg.sites_per_chain; ++s) {
        if (cfg.rate(s) != cfg.rate(s + cfg.sites_per_chain)) return false;
    }
    return true;
}

// Evolves on the network (factorized when possible) or on one chain.
class Evolver {
public:
    Evolver(const NetworkConfig& cfg, bool single_chain, const dynamics::IntegratorConfig& icfg)
        : cfg_(cfg), single_(single_chain), icfg_(icfg), lambda_(model::effective_coupling(cfg))
    {
        const NetworkConfig chain_cfg = cfg.single_chain();
        const auto h_chain = model::build_effective_chain_hamiltonian(chain_cfg);
        if (single_) {
            spec_ = davies::make_generator(h_chain, chain_cfg);
        } else if (chains_identical(cfg)) {
            propagator_.emplace(davies::make_generator(h_chain, chain_cfg), icfg, lambda_);
        } else {
            spec_ = davies::make_generator(model::build_network_hamiltonian(cfg), cfg);
        }
    }

    [[nodiscard]] double lambda() const { return lambda_; }

    /// Fills the propagator cache so later `run` calls only read it.
    void prepare(const std::vector<double>& times)
    {
        if (propagator_) propagator_->propagators(times);
    }

    dynamics::Trajectory run(const DensityMatrix& rho0, const std::vector<double>& times)
    {
        if (propagator_) return dynamics::evolve_factorized(rho0, *propagator_, times, icfg_, lambda_);
        return dynamics::evolve(rho0, spec_, times, icfg_, lambda_);
    }

private:
    NetworkConfig cfg_;
    bool single_;
    dynamics::IntegratorConfig icfg_;
    double lambda_;
    davies::GeneratorSpec spec_;
    std::optional<dynamics::ChainPropagator> propagator_;
};

std::string initial_name(InitialKind k)
{
    return model::to_string(k);
}

}  // namespace

// --------------------------- measures ---------------------------------------

Measure parse_measure(std::string_view descriptor, int n, bool network)
{
    const std::string name(descriptor);
    if (name == "purity") return {name, [](const DensityMatrix& r) { return qla::purity(r); }};
    if (name == "trace") return {name, [](const DensityMatrix& r) { return r.matrix().trace().real(); }};
    if (name == "S") return {name, [](const DensityMatrix& r) { return corr::entanglement_sum(r, 0); }};
    if (name == "delta" || name == "ssa_slack") {
        if (network || n != 3) throw std::invalid_argument("measure '" + name + "' needs a three-site single chain");
        if (name == "delta") return {name, [](const DensityMatrix& r) { return corr::delta_fanchini(r).delta; }};
        return {name, [](const DensityMatrix& r) { return corr::delta_fanchini(r).ssa_slack; }};
    }

    const auto cut = name.rfind('_');
    if (cut == std::string::npos || cut + 1 >= name.size()) {
        throw std::invalid_argument("unknown measure '" + name + "'");
    }
    const std::string kind = name.substr(0, cut);
    const std::string label = name.substr(cut + 1);

    if (kind == "C" || kind == "E" || kind == "Q" || kind == "CC" || kind == "MI") {
        const auto p = parse_pair(label, n, network);
        if (kind == "C") return {name, [p](const DensityMatrix& r) { return corr::concurrence(pair_state(r, p)); }};
        if (kind == "E") {
            return {name, [p](const DensityMatrix& r) {
                        return corr::eof_from_concurrence(corr::concurrence(pair_state(r, p)));
                    }};
        }
        if (kind == "Q") return {name, [p](const DensityMatrix& r) { return corr::quantum_discord(pair_state(r, p)); }};
        if (kind == "CC") {
            return {name, [p](const DensityMatrix& r) { return corr::classical_correlation(pair_state(r, p)).value; }};
        }
        return {name, [p](const DensityMatrix& r) { return corr::mutual_information(pair_state(r, p)); }};
    }

    const int s = parse_site(label, n, network);
    if (kind == "tau1") return {name, [s](const DensityMatrix& r) { return corr::one_tangle(r, s); }};
    if (kind == "pop") {
        return {name, [s](const DensityMatrix& r) {
                    const std::array<int, 1> keep{s};
                    return qla::partial_trace(r, keep).matrix()(1, 1).real();
                }};
    }
    if (kind == "tangle") {
        return {name, [s](const DensityMatrix& r) {
                    if (qla::purity(r) < 1.0 - 1e-8) return kNaN;
                    return corr::tangle_pure(r, s);
                }};
    }
    if (kind == "tangle_ub") return {name, [s](const DensityMatrix& r) { return corr::tangle_bounds(r, s).upper_raw; }};
    if (kind == "tangle_lb") return {name, [s](const DensityMatrix& r) { return corr::tangle_bounds(r, s).lower_raw; }};
    throw std::invalid_argument("unknown measure '" + name + "'");
}

// --------------------------- scenarios --------------------------------------

void ScenarioSpec::validate() const
{
    if (samples < 2) throw std::invalid_argument("scenario: samples must be >= 2");
    if (!(t_max_lambda > 0.0)) throw std::invalid_argument("scenario: t_max_lambda must be positive");
    if (initials.empty() || theta_list.empty() || gamma_list.empty()) {
        throw std::invalid_argument("scenario: initial, theta and gamma lists must be non-empty");
    }
    for (double g : gamma_list) {
        if (!(g >= 0.0)) throw std::invalid_argument("scenario: gamma must be non-negative");
    }
    for (double t : theta_list) {
        if (!std::isfinite(t)) throw std::invalid_argument("scenario: theta must be finite");
    }
    for (auto k : initials) {
        const bool chain_kind = k == InitialKind::psi1_chain || k == InitialKind::psi2_chain;
        if (chain_kind != single_chain && k != InitialKind::custom) {
            throw std::invalid_argument("scenario: initial state does not match the register");
        }
        if (k == InitialKind::psi_a || k == InitialKind::psi_b) {
            for (double t : theta_list) {
                if (!(t >= 0.0 && t <= std::numbers::pi / 2 + 1e-12)) {
                    throw std::invalid_argument("scenario: theta must lie in [0, pi/2]");
                }
            }
        }
        if (k == InitialKind::custom && !custom_state) throw std::invalid_argument("scenario: custom state missing");
    }
    if (columns.empty()) throw std::invalid_argument("scenario: no output columns");
}

ScenarioSpec scenario_preset(std::string_view name)
{
    constexpr double pi = std::numbers::pi;
    ScenarioSpec s;
    s.name = std::string(name);
    if (name == "fig2") {
        s.initials = {InitialKind::psi_a};
        s.theta_list = {pi / 4, pi / 3, pi / 8};
        s.gamma_list = {0.01};
        s.t_max_lambda = 20.0;
        s.columns = {"C_33'"};
    } else if (name == "fig3") {
        s.initials = {InitialKind::psi_a};
        s.theta_list = {pi / 4};
        s.gamma_list = {0.0};
        s.t_max_lambda = 12.0;
        s.columns = {"tau1_1", "tau1_2", "tau1_3"};
    } else if (name == "fig4") {
        s.initials = {InitialKind::psi_a};
        s.theta_list = {pi / 4};
        s.gamma_list = {0.0};
        s.t_max_lambda = 20.0;
        s.columns = {"C_11'", "C_22'", "C_33'"};
    } else if (name == "fig5") {
        s.initials = {InitialKind::psi_b};
        s.theta_list = {pi / 4};
        s.gamma_list = {0.05, 0.5};
        s.t_max_lambda = 20.0;
        s.columns = {"E_33'", "Q_33'"};
    } else if (name == "fig6") {
        s.initials = {InitialKind::rho_eq20};
        s.theta_list = {0.0};
        s.gamma_list = {0.01};
        s.t_max_lambda = 20.0;
        s.columns = {"CC_21'", "Q_21'", "E_21'", "MI_21'"};
    } else if (name == "fig7") {
        s.initials = {InitialKind::psi_b};
        s.theta_list = {pi / 4, pi / 3, pi / 8};
        s.gamma_list = {0.0};
        s.t_max_lambda = 12.0;
        s.columns = {"tangle_1"};
    } else if (name == "fig8") {
        s.initials = {InitialKind::psi_b};
        s.theta_list = {pi / 4};
        s.gamma_list = {0.01};
        s.t_max_lambda = 12.0;
        s.columns = {"tangle_ub_1", "tangle_lb_1", "purity"};
    } else if (name == "fig9") {
        s.initials = {InitialKind::psi1_chain, InitialKind::psi2_chain};
        s.theta_list = {0.0};
        s.gamma_list = {0.01};
        s.t_max_lambda = 12.0;
        s.columns = {"delta", "ssa_slack"};
        s.single_chain = true;
    } else {
        throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
    }
    return s;
}

Table run_scenario(const ScenarioSpec& spec, const NetworkConfig& cfg, const dynamics::IntegratorConfig& icfg)
{
    spec.validate();
    cfg.validate();
    const int n = cfg.sites_per_chain;
    std::vector<Measure> measures;
    for (const auto& c : spec.columns) measures.push_back(parse_measure(c, n, !spec.single_chain));

    Table table;
    for (const auto& m : measures) table.columns.push_back(m.name);

    const double lambda = model::effective_coupling(cfg);
    const auto times = dynamics::uniform_times(spec.t_max_lambda, spec.samples, lambda);

    for (double gamma : spec.gamma_list) {
        const NetworkConfig gcfg = cfg.with_gamma(gamma, spec.gamma_units);
        Evolver evolver(gcfg, spec.single_chain, icfg);
        evolver.prepare(times);

        struct Job {
            InitialKind kind;
            double theta;
        };
        std::vector<Job> jobs;
        for (auto kind : spec.initials) {
            for (double theta : spec.theta_list) jobs.push_back({kind, theta});
        }
        std::vector<std::future<std::vector<Record>>> results;
        for (const auto& job : jobs) {
            results.push_back(std::async(std::launch::async, [&, job]() {
                const NetworkConfig state_cfg = spec.single_chain ? gcfg.single_chain() : gcfg;
                model::InitialStateSpec init{job.kind, job.theta, spec.custom_state};
                const DensityMatrix rho0 = model::build_initial_state(init, state_cfg);
                const auto traj = evolver.run(rho0, times);
                std::vector<Record> rows;
                for (std::size_t i = 0; i < traj.states.size(); ++i) {
                    Record r{initial_name(job.kind), job.theta, gamma, traj.lambda_times[i], {}};
                    for (const auto& m : measures) r.values.push_back(m.eval(traj.states[i]));
                    rows.push_back(std::move(r));
                }
                return rows;
            }));
        }
        for (auto& f : results) {
            auto rows = f.get();
            table.rows.insert(table.rows.end(), std::make_move_iterator(rows.begin()),
                              std::make_move_iterator(rows.end()));
        }
    }
    return table;
}

// --------------------------- transmission -----------------------------------

std::pair<double, double> interpolated_max(const std::vector<double>& values, const std::vector<double>& times)
{
    if (values.empty() || values.size() != times.size()) throw std::invalid_argument("interpolated_max: bad input");
    const auto it = std::max_element(values.begin(), values.end());
    const std::size_t i = static_cast<std::size_t>(it - values.begin());
    if (i == 0 || i + 1 == values.size()) return {times[i], values[i]};
    // parabola through three (uniformly spaced) samples
    const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
    const double h = times[i + 1] - times[i];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom >= 0.0) return {times[i], y1};
    const double off = 0.5 * (y0 - y2) / denom;
    return {times[i] + off * h, y1 - 0.25 * (y0 - y2) * off};
}

namespace {

TransmissionResult transmission_with(Evolver& evolver, const model::InitialStateSpec& initial,
                                     const NetworkConfig& cfg, std::pair<int, int> src, std::pair<int, int> dst,
                                     const TransmissionOptions& opts)
{
    const DensityMatrix rho0 = model::build_initial_state(initial, cfg);
    const double c0 = corr::concurrence(pair_state(rho0, src));
    if (c0 <= 1e-12) throw std::invalid_argument("transmission_ratio: source pair is not entangled initially");

    const double lambda = evolver.lambda();
    const auto times = dynamics::uniform_times(opts.t_max_lambda, opts.samples, lambda);
    const auto traj = evolver.run(rho0, times);
    const auto series = dynamics::scalar_series(
        traj, [dst](const DensityMatrix& r) { return corr::concurrence(pair_state(r, dst)); });
    // earliest of the (periodically repeated) maxima
    auto [t_peak, c_peak] = interpolated_max(series, traj.lambda_times);
    for (const auto& e : peak_sequence({series}, traj.lambda_times)) {
        if (e.value >= c_peak - 1e-4) {
            t_peak = e.time_lambda;
            c_peak = std::max(c_peak, e.value);
            break;
        }
    }

    const std::vector<double> transfer{0.0, 2.0 * std::numbers::pi / 3.0 / lambda};
    const auto at_transfer = evolver.run(rho0, transfer);
    const double c_transfer = corr::concurrence(pair_state(at_transfer.states.back(), dst));
    return {c_peak / c0, t_peak, c_transfer / c0};
}

}  // namespace

TransmissionResult transmission_ratio(const model::InitialStateSpec& initial, const NetworkConfig& cfg,
                                      std::pair<int, int> src, std::pair<int, int> dst,
                                      const TransmissionOptions& opts)
{
    cfg.validate();
    Evolver evolver(cfg, false, opts.integrator);
    return transmission_with(evolver, initial, cfg, src, dst, opts);
}

Table transmission_table(const std::vector<double>& thetas, const NetworkConfig& cfg, const TransmissionOptions& opts)
{
    const int n = cfg.sites_per_chain;
    const auto src = model::pair_indices("11'", n);
    const auto dst = model::pair_indices(std::to_string(n) + std::to_string(n) + "'", n);
    Table table;
    table.columns = {"ratio_max", "ratio_at_transfer"};
    cfg.validate();
    Evolver evolver(cfg, false, opts.integrator);
    for (auto kind : {InitialKind::psi_a, InitialKind::psi_b}) {
        for (double theta : thetas) {
            const auto r = transmission_with(evolver, {kind, theta, std::nullopt}, cfg, src, dst, opts);
            table.rows.push_back({initial_name(kind), theta, cfg.gamma.front(), r.peak_lambda_t,
                                  {r.ratio, r.ratio_at_transfer}});
        }
    }
    return table;
}

// --------------------------- peaks ------------------------------------------

std::vector<PeakEvent> peak_sequence(const std::vector<std::vector<double>>& series,
                                     const std::vector<double>& lambda_times, double threshold, double group_window)
{
    std::vector<PeakEvent> events;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& v = series[k];
        if (v.size() != lambda_times.size()) throw std::invalid_argument("peak_sequence: series length mismatch");
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
            const std::vector<double> local{v[i - 1], v[i], v[i + 1]};
            const std::vector<double> t{lambda_times[i - 1], lambda_times[i], lambda_times[i + 1]};
            const auto [tp, vp] = interpolated_max(local, t);
            if (vp <= threshold) continue;
            events.push_back({static_cast<int>(k), tp, vp, 0});
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const PeakEvent& a, const PeakEvent& b) { return a.time_lambda < b.time_lambda; });
    int group = -1;
    double group_start = -std::numeric_limits<double>::infinity();
    for (auto& e : events) {
        if (e.time_lambda - group_start > group_window) {
            ++group;
            group_start = e.time_lambda;
        }
        e.simultaneous_group = group;
    }
    return events;
}

// --------------------------- output -----------------------------------------

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(std::ostream& out, const Table& table)
{
    out << "initial,theta,gamma,lambda_t";
    for (const auto& c : table.columns) out << ',' << c;
    out << '\n';
    for (const auto& r : table.rows) {
        out << r.initial << ',' << format_number(r.theta) << ',' << format_number(r.gamma) << ','
            << format_number(r.lambda_t);
        for (double v : r.values) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_jsonl(std::ostream& out, const Table& table)
{
    const auto num = [](double v) -> nlohmann::ordered_json {
        if (!std::isfinite(v)) return nullptr;
        return std::stod(format_number(v));
    };
    for (const auto& r : table.rows) {
        nlohmann::ordered_json j;
        j["initial"] = r.initial;
        j["theta"] = num(r.theta);
        j["gamma"] = num(r.gamma);
        j["lambda_t"] = num(r.lambda_t);
        for (std::size_t k = 0; k < table.columns.size(); ++k) j[table.columns[k]] = num(r.values[k]);
        out << j.dump() << '\n';
    }
}

}  // namespace cqnet::runner
