// correlations.hpp: entanglement, discord and monogamy measures

#pragma once

#include "cqnet/qla.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cqnet::corr {

using qla::DensityMatrix;
using qla::PureState;

/// Which qubit of a two-qubit state is measured.
enum class Side { A, B };

/// Projector pair {|b><b|, I − |b><b|} with
/// |b> = cos(polar/2)|G> + e^{i azimuth} sin(polar/2)|E>.
struct MeasurementBasis {
    double polar = 0.0;    // [0, π]
    double azimuth = 0.0;  // [0, 2π)
};

struct ClassicalCorrelation {
    double value = 0.0;
    MeasurementBasis basis;
};

/// Wootters concurrence. Throws std::invalid_argument unless 4-dimensional.
double concurrence(const DensityMatrix& rho_ab);

double binary_entropy(double x);
/// Entanglement of formation from concurrence; throws outside [0, 1].
double eof_from_concurrence(double c);

/// S(ρ_A) + S(ρ_B) − S(ρ_AB) in bits for a two-qubit state.
double mutual_information(const DensityMatrix& rho_ab);

/// Σ_k p_k S(ρ^k) of the unmeasured qubit after projecting `measured`.
double conditional_entropy(const DensityMatrix& rho_ab, Side measured, const MeasurementBasis& basis);

/// Maximum over projective measurements on `measured` of S(unmeasured) −
/// conditional entropy: 64×128 grid scan plus Nelder–Mead refinement.
ClassicalCorrelation classical_correlation(const DensityMatrix& rho_ab, Side measured = Side::B);

double quantum_discord(const DensityMatrix& rho_ab, Side measured = Side::B);

enum class OneTangleMode { det, purity };

/// 4 det ρ_i or 2(1 − Tr ρ_i²) of the single-qubit reduction at `site`.
double one_tangle(const DensityMatrix& rho, int site, OneTangleMode mode = OneTangleMode::det);

/// Σ_{x ≠ ref} C²(ρ_{ref,x}).
double pairwise_concurrence_sq_sum(const DensityMatrix& rho, int ref_site);

/// One-tangle of `ref_site` minus all squared pairwise concurrences.
/// Throws std::invalid_argument if purity < 1 − 1e-8.
double tangle_pure(const DensityMatrix& psi, int ref_site);
double tangle_pure(const PureState& psi, int ref_site);

struct TangleBounds {
    double lower_raw = 0.0;
    double upper_raw = 0.0;
    double lower = 0.0;  // clamped at zero
    double upper = 0.0;
};

/// Upper bound uses 2(1 − Tr ρ_i²), lower bound 2(Tr ρ² − Tr ρ_i²); both
/// minus the pairwise Σ C².
TangleBounds tangle_bounds(const DensityMatrix& rho, int ref_site);

/// Residual of the monogamy inequality was negative beyond tolerance.
class MonogamyViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// 4 det ρ_ref − Σ_partners C²; throws MonogamyViolation below −1e-9.
double monogamy_residual(const DensityMatrix& psi, int ref_site);
double monogamy_residual(const PureState& psi, int ref_site);

/// Σ of squared pairwise concurrences between `ref_site` and every other site.
double entanglement_sum(const DensityMatrix& psi, int ref_site = 0);
double entanglement_sum(const PureState& psi, int ref_site = 0);

struct DeltaResult {
    double delta = 0.0;      // E12 + E13 − Q12 − Q13
    double ssa_slack = 0.0;  // S12 + S13 − S2 − S3 − Δ
};

/// For a three-qubit state; discords of pairs (1,2) and (1,3) measure the
/// partner qubit by default, the orientation for which Δ vanishes on pure states.
DeltaResult delta_fanchini(const DensityMatrix& rho_123, Side measured = Side::B);

struct PairReport {
    std::pair<int, int> pair;
    double concurrence = 0.0;
    double eof = 0.0;
    double mutual_info = 0.0;
    double classical_corr = 0.0;
    double discord = 0.0;
};

struct CorrelationReport {
    std::vector<PairReport> pairs;
    std::vector<double> one_tangles;
    std::optional<double> tangle;  // when the state is pure
    TangleBounds tangle_bounds;
    std::optional<double> monogamy_residual;
    std::optional<double> delta;   // three-qubit states only
};

CorrelationReport correlation_report(const DensityMatrix& rho, const std::vector<std::pair<int, int>>& pairs,
                                     int ref_site = 0, Side measured = Side::B);

}  // namespace cqnet::corr
