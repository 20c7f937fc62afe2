// dynamics.hpp: time integration of the master equation

#pragma once

#include "cqnet/davies.hpp"
#include "cqnet/model.hpp"
#include "cqnet/qla.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace cqnet::dynamics {

using qla::DensityMatrix;
using qla::Matrix;

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = 0.01;  // in units of 1/λ
    double trace_guard = 1e-7;

    void validate() const;
};

/// Trace left the guard band during `evolve`.
class TraceDriftError : public std::runtime_error {
public:
    TraceDriftError(long step, double deviation);
    long step;
    double deviation;
};

/// Step-size control could not meet the tolerances.
class ToleranceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    std::vector<double> times;         // ns
    std::vector<double> lambda_times;  // dimensionless λt
    std::vector<DensityMatrix> states;
    model::NetworkConfig config;
    model::InitialStateSpec initial;
};

using SparseMatrix = Eigen::SparseMatrix<qla::cplx>;

/// Generator in sparse form: ρ̇ = −i(H_eff ρ − ρ H_eff†) + Σ L ρ L†, with
/// H_eff = H − (i/2) Σ γ A†A and L = √γ A.
class SparseGenerator {
public:
    explicit SparseGenerator(const davies::GeneratorSpec& spec);

    [[nodiscard]] int dim() const { return static_cast<int>(h_eff_.rows()); }
    [[nodiscard]] Matrix apply(const Matrix& rho) const;
    /// Column-major vectorized superoperator (vec(AXB) = (Bᵀ⊗A) vec X).
    [[nodiscard]] SparseMatrix superoperator() const;

private:
    SparseMatrix h_eff_;
    SparseMatrix h_eff_adj_;
    std::vector<SparseMatrix> jumps_;
    std::vector<SparseMatrix> jumps_adj_;
};

/// Dormand–Prince 5(4) on a matrix-valued ODE, sampling at `times` (the
/// first entry is the initial time). `post_step` may project each accepted
/// state; `step_index` counts accepted steps.
using MatrixRhs = std::function<Matrix(const Matrix&)>;
using PostStep = std::function<void(Matrix&, long step_index)>;
std::vector<Matrix> integrate(const MatrixRhs& rhs, const Matrix& y0, const std::vector<double>& times,
                              double rel_tol, double abs_tol, double max_step, const PostStep& post_step = {});

/// Direct evolution of the full register. `sample_times` in ns, ascending,
/// starting at 0; `lambda` converts max_step and fills λt.
Trajectory evolve(const DensityMatrix& rho0, const davies::GeneratorSpec& spec, const std::vector<double>& sample_times,
                  const IntegratorConfig& icfg, double lambda);

/// Propagator superoperators Φ_t of one chain, memoized per sample time.
class ChainPropagator {
public:
    ChainPropagator(const davies::GeneratorSpec& chain_spec, IntegratorConfig icfg, double lambda);

    [[nodiscard]] int chain_dim() const { return dim_; }
    /// Φ_t for every requested time (ns, ascending, from 0).
    const std::vector<Matrix>& propagators(const std::vector<double>& times);

private:
    SparseMatrix super_;
    IntegratorConfig icfg_;
    double lambda_;
    int dim_;
    std::map<std::vector<double>, std::vector<Matrix>> cache_;
};

/// Extracts the one-chain generator of a two-chain network generator.
/// Throws std::invalid_argument if the generator couples the chains or the
/// two chains differ.
davies::GeneratorSpec chain_generator_from_network(const davies::GeneratorSpec& net, int chain_dim);

/// (Φ_t ⊗ Φ_t) ρ0 in chain-blocked order.
Matrix apply_product_map(const Matrix& phi, const Matrix& rho0);

Trajectory evolve_factorized(const DensityMatrix& rho0, const davies::GeneratorSpec& chain_spec,
                             const std::vector<double>& sample_times, const IntegratorConfig& icfg, double lambda);
Trajectory evolve_factorized(const DensityMatrix& rho0, ChainPropagator& propagator,
                             const std::vector<double>& sample_times, const IntegratorConfig& icfg, double lambda);

std::vector<double> scalar_series(const Trajectory& traj, const std::function<double(const DensityMatrix&)>& f);

/// `count` uniform sample times (ns) spanning λt ∈ [0, t_max_lambda].
std::vector<double> uniform_times(double t_max_lambda, int count, double lambda);

}  // namespace cqnet::dynamics
