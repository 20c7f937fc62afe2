#include "cqnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cqnet::dynamics {

namespace {

using qla::cplx;

constexpr double kPruneRel = 1e-15;
constexpr int kVectorizeBelow = 16;

SparseMatrix to_sparse(const Matrix& m)
{
    const double cut = kPruneRel * std::max(qla::max_abs(m), 1e-300);
    SparseMatrix s = m.sparseView(1.0, cut);
    s.makeCompressed();
    return s;
}

// Dormand–Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

void validate_times(const std::vector<double>& times)
{
    if (times.empty()) throw std::invalid_argument("sample times must not be empty");
    if (times.front() != 0.0) throw std::invalid_argument("sample times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("sample times must be strictly increasing");
    }
}

qla::Tolerance trajectory_tolerance(const IntegratorConfig& icfg)
{
    return {1e-10, icfg.trace_guard, std::max(1e-9, icfg.trace_guard)};
}

}  // namespace

void IntegratorConfig::validate() const
{
    if (!(rel_tol > 0.0 && abs_tol > 0.0 && max_step > 0.0 && trace_guard > 0.0)) {
        throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    }
    if (max_step > 0.1) throw std::invalid_argument("IntegratorConfig: max_step must not exceed 0.1/lambda");
}

TraceDriftError::TraceDriftError(long step_, double deviation_)
    : std::runtime_error("trace drift " + std::to_string(deviation_) + " beyond guard at step " +
                         std::to_string(step_)),
      step(step_), deviation(deviation_)
{
}

// --------------------------- SparseGenerator --------------------------------

SparseGenerator::SparseGenerator(const davies::GeneratorSpec& spec)
{
    spec.validate();
    const Matrix& h = spec.hamiltonian.matrix();
    Matrix h_eff = h;
    for (const auto& c : spec.channels) {
        const Matrix& a = c.jump.matrix();
        h_eff -= cplx(0.0, 0.5 * c.rate) * (a.adjoint() * a);
        const Matrix l = std::sqrt(c.rate) * a;
        jumps_.push_back(to_sparse(l));
        jumps_adj_.push_back(to_sparse(l.adjoint()));
    }
    h_eff_ = to_sparse(h_eff);
    h_eff_adj_ = to_sparse(h_eff.adjoint());
}

Matrix SparseGenerator::apply(const Matrix& rho) const
{
    const Matrix left = h_eff_ * rho;
    const Matrix right = rho * h_eff_adj_;
    Matrix out = cplx(0.0, -1.0) * (left - right);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        const Matrix tmp = jumps_[k] * rho;
        out.noalias() += tmp * jumps_adj_[k];
    }
    return out;
}

SparseMatrix SparseGenerator::superoperator() const
{
    const int d = dim();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix h_eff = Matrix(h_eff_);
    Matrix l = cplx(0.0, -1.0) * qla::kron(id, h_eff) + cplx(0.0, 1.0) * qla::kron(h_eff.conjugate(), id);
    for (const auto& j : jumps_) {
        const Matrix jd = Matrix(j);
        l += qla::kron(jd.conjugate(), jd);
    }
    return to_sparse(l);
}

// --------------------------- integrator -------------------------------------

std::vector<Matrix> integrate(const MatrixRhs& rhs, const Matrix& y0, const std::vector<double>& times,
                              double rel_tol, double abs_tol, double max_step, const PostStep& post_step)
{
    validate_times(times);
    std::vector<Matrix> out;
    out.reserve(times.size());
    out.push_back(y0);
    if (times.size() == 1) return out;

    Matrix y = y0;
    Matrix k1 = rhs(y);
    double t = 0.0;
    double h = std::min(max_step, times[1]);
    long accepted = 0;

    for (std::size_t s = 1; s < times.size(); ++s) {
        const double target = times[s];
        while (t < target) {
            const double remaining = target - t;
            // land exactly on the sample, avoiding a sliver step afterwards
            double step = std::min(h, remaining);
            if (remaining - step < 1e-12 * std::max(1.0, target)) step = remaining;
            if (step <= 1e-14 * std::max(1.0, target)) {
                throw ToleranceError("integrate: step size underflow at t = " + std::to_string(t));
            }

            const Matrix k2 = rhs(y + step * a21 * k1);
            const Matrix k3 = rhs(y + step * (a31 * k1 + a32 * k2));
            const Matrix k4 = rhs(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
            const Matrix k5 = rhs(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Matrix k6 = rhs(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            Matrix y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Matrix k7 = rhs(y_new);
            const Matrix err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double err_norm = 0.0;
            for (Eigen::Index j = 0; j < y.cols(); ++j) {
                for (Eigen::Index i = 0; i < y.rows(); ++i) {
                    const double scale = abs_tol + rel_tol * std::max(std::abs(y(i, j)), std::abs(y_new(i, j)));
                    err_norm = std::max(err_norm, std::abs(err(i, j)) / scale);
                }
            }
            if (!std::isfinite(err_norm)) throw ToleranceError("integrate: non-finite error estimate");

            const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
            if (err_norm <= 1.0) {
                t = (step == remaining) ? target : t + step;
                ++accepted;
                if (post_step) {
                    post_step(y_new, accepted);
                    y = std::move(y_new);
                    k1 = rhs(y);
                } else {
                    y = std::move(y_new);
                    k1 = k7;
                }
                // a clipped landing step should not shrink the next trial step
                if (step == h || factor < 1.0) h = std::min(max_step, step * factor);
            } else {
                h = step * std::max(factor, 0.2);
            }
        }
        out.push_back(y);
    }
    return out;
}

Trajectory evolve(const DensityMatrix& rho0, const davies::GeneratorSpec& spec, const std::vector<double>& sample_times,
                  const IntegratorConfig& icfg, double lambda)
{
    icfg.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("evolve: lambda must be positive");
    if (rho0.dim() != spec.hamiltonian.dim()) throw std::invalid_argument("evolve: state and generator dimensions differ");
    validate_times(sample_times);

    const SparseGenerator gen(spec);
    const double guard = icfg.trace_guard;
    const PostStep project = [guard](Matrix& m, long step) {
        m = (0.5 * (m + m.adjoint())).eval();
        const double tr = m.trace().real();
        const double dev = std::abs(tr - 1.0);
        if (dev >= guard) throw TraceDriftError(step, dev);
        m /= tr;
    };
    const int d = rho0.dim();
    std::vector<Matrix> mats;
    if (d <= kVectorizeBelow) {
        // small registers: one superoperator product per stage is cheaper
        const Matrix super = Matrix(gen.superoperator());
        const PostStep project_vec = [&project, d](Matrix& v, long step) {
            Matrix m = Eigen::Map<const Matrix>(v.data(), d, d);
            project(m, step);
            v = Eigen::Map<const Matrix>(m.data(), d * d, 1);
        };
        const Matrix v0 = Eigen::Map<const Matrix>(rho0.matrix().data(), d * d, 1);
        auto vecs = integrate([&super](const Matrix& v) { return Matrix(super * v); }, v0, sample_times,
                              icfg.rel_tol, icfg.abs_tol, icfg.max_step / lambda, project_vec);
        for (const auto& v : vecs) mats.emplace_back(Eigen::Map<const Matrix>(v.data(), d, d));
    } else {
        mats = integrate([&gen](const Matrix& r) { return gen.apply(r); }, rho0.matrix(), sample_times, icfg.rel_tol,
                         icfg.abs_tol, icfg.max_step / lambda, project);
    }

    Trajectory traj;
    traj.times = sample_times;
    const auto tol = trajectory_tolerance(icfg);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        traj.lambda_times.push_back(sample_times[i] * lambda);
        if (i == 0) traj.states.push_back(rho0);
        else traj.states.emplace_back(qla::Operator(mats[i], rho0.dims()), tol);
    }
    return traj;
}

// --------------------------- factorized path --------------------------------

ChainPropagator::ChainPropagator(const davies::GeneratorSpec& chain_spec, IntegratorConfig icfg, double lambda)
    : super_(SparseGenerator(chain_spec).superoperator()), icfg_(icfg), lambda_(lambda),
      dim_(chain_spec.hamiltonian.dim())
{
    icfg_.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("ChainPropagator: lambda must be positive");
}

const std::vector<Matrix>& ChainPropagator::propagators(const std::vector<double>& times)
{
    if (auto it = cache_.find(times); it != cache_.end()) return it->second;
    // all d² basis matrices |i><j| evolve together as the columns of Φ
    const int n = dim_ * dim_;
    const SparseMatrix& l = super_;
    auto phis = integrate([&l](const Matrix& y) { return Matrix(l * y); }, Matrix::Identity(n, n), times,
                          icfg_.rel_tol, icfg_.abs_tol, icfg_.max_step / lambda_);
    return cache_.emplace(times, std::move(phis)).first->second;
}

davies::GeneratorSpec chain_generator_from_network(const davies::GeneratorSpec& net, int chain_dim)
{
    net.validate();
    const int d = chain_dim;
    if (net.hamiltonian.dim() != d * d) throw std::invalid_argument("chain_generator_from_network: dimension mismatch");
    const qla::Dims two{d, d};
    const Matrix id = Matrix::Identity(d, d);
    const auto tol_of = [](const Matrix& m) { return 1e-10 * std::max(1.0, qla::max_abs(m)); };

    // H = H1⊗I + I⊗H2 with the trace split evenly
    const Matrix& h = net.hamiltonian.matrix();
    const std::vector<int> first{0}, second{1};
    const cplx shift = h.trace() / static_cast<double>(d * d) / 2.0;
    const Matrix h1 = qla::partial_trace(h, two, first) / static_cast<double>(d) - shift * id;
    const Matrix h2 = qla::partial_trace(h, two, second) / static_cast<double>(d) - shift * id;
    if (qla::max_abs(h - qla::kron(h1, id) - qla::kron(id, h2)) > tol_of(h)) {
        throw std::invalid_argument("chain_generator_from_network: Hamiltonian couples the chains");
    }
    if (qla::max_abs(h1 - h2) > tol_of(h)) {
        throw std::invalid_argument("chain_generator_from_network: chains have different Hamiltonians");
    }

    const qla::Dims& net_dims = net.hamiltonian.dims();
    const std::size_t half = net_dims.size() / 2;
    qla::Dims chain_dims(net_dims.begin(), net_dims.begin() + static_cast<long>(half));
    if (net_dims.size() % 2 != 0 || qla::product(chain_dims) != d) chain_dims = {d};
    davies::GeneratorSpec chain{qla::Operator(h1, chain_dims), {}};
    std::vector<davies::DaviesChannel> second_chain;
    for (const auto& c : net.channels) {
        const Matrix& a = c.jump.matrix();
        const Matrix x1 = qla::partial_trace(a, two, first) / static_cast<double>(d);
        const Matrix x2 = qla::partial_trace(a, two, second) / static_cast<double>(d);
        if (qla::max_abs(a - qla::kron(x1, id)) <= tol_of(a)) {
            chain.channels.push_back({c.site, c.bohr_frequency, qla::Operator(x1, chain.hamiltonian.dims()), c.rate});
        } else if (qla::max_abs(a - qla::kron(id, x2)) <= tol_of(a)) {
            second_chain.push_back({c.site, c.bohr_frequency, qla::Operator(x2, chain.hamiltonian.dims()), c.rate});
        } else {
            throw std::invalid_argument("chain_generator_from_network: jump operator acts on both chains");
        }
    }
    // the second chain must carry the same dissipator
    const auto superop = [](const davies::GeneratorSpec& s) {
        davies::GeneratorSpec only_d{qla::Operator::zero(s.hamiltonian.dims()), s.channels};
        return Matrix(SparseGenerator(only_d).superoperator());
    };
    davies::GeneratorSpec other{chain.hamiltonian, second_chain};
    const Matrix l1 = superop(chain), l2 = superop(other);
    if (qla::max_abs(l1 - l2) > tol_of(l1)) {
        throw std::invalid_argument("chain_generator_from_network: chains have different dissipators");
    }
    return chain;
}

Matrix apply_product_map(const Matrix& phi, const Matrix& rho0)
{
    const int d2 = static_cast<int>(phi.rows());
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
    if (d * d != d2 || rho0.rows() != d2) throw std::invalid_argument("apply_product_map: dimension mismatch");
    // X[(c1,d1),(c2,d2)] = ρ0[(c1 c2),(d1 d2)], column-major pair index c + d·k
    Matrix x(d2, d2);
    for (int c1 = 0; c1 < d; ++c1)
        for (int e1 = 0; e1 < d; ++e1)
            for (int c2 = 0; c2 < d; ++c2)
                for (int e2 = 0; e2 < d; ++e2) x(c1 + d * e1, c2 + d * e2) = rho0(c1 * d + c2, e1 * d + e2);
    const Matrix y = phi * x * phi.transpose();
    Matrix out(d2, d2);
    for (int c1 = 0; c1 < d; ++c1)
        for (int e1 = 0; e1 < d; ++e1)
            for (int c2 = 0; c2 < d; ++c2)
                for (int e2 = 0; e2 < d; ++e2) out(c1 * d + c2, e1 * d + e2) = y(c1 + d * e1, c2 + d * e2);
    return out;
}

Trajectory evolve_factorized(const DensityMatrix& rho0, ChainPropagator& propagator,
                             const std::vector<double>& sample_times, const IntegratorConfig& icfg, double lambda)
{
    icfg.validate();
    const int d = propagator.chain_dim();
    if (rho0.dim() != d * d) throw std::invalid_argument("evolve_factorized: state is not a two-chain state");
    validate_times(sample_times);
    const auto& phis = propagator.propagators(sample_times);

    Trajectory traj;
    traj.times = sample_times;
    const auto tol = trajectory_tolerance(icfg);
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        traj.lambda_times.push_back(sample_times[i] * lambda);
        if (i == 0) {
            traj.states.push_back(rho0);
            continue;
        }
        Matrix m = apply_product_map(phis[i], rho0.matrix());
        m = (0.5 * (m + m.adjoint())).eval();
        const double tr = m.trace().real();
        const double dev = std::abs(tr - 1.0);
        if (dev >= icfg.trace_guard) throw TraceDriftError(static_cast<long>(i), dev);
        m /= tr;
        traj.states.emplace_back(qla::Operator(std::move(m), rho0.dims()), tol);
    }
    return traj;
}

Trajectory evolve_factorized(const DensityMatrix& rho0, const davies::GeneratorSpec& chain_spec,
                             const std::vector<double>& sample_times, const IntegratorConfig& icfg, double lambda)
{
    ChainPropagator propagator(chain_spec, icfg, lambda);
    return evolve_factorized(rho0, propagator, sample_times, icfg, lambda);
}

std::vector<double> scalar_series(const Trajectory& traj, const std::function<double(const DensityMatrix&)>& f)
{
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) out.push_back(f(s));
    return out;
}

std::vector<double> uniform_times(double t_max_lambda, int count, double lambda)
{
    if (count < 2) throw std::invalid_argument("uniform_times: need at least two samples");
    if (!(t_max_lambda > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("uniform_times: window must be positive");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = t_max_lambda * i / (count - 1) / lambda;
    return out;
}

}  // namespace cqnet::dynamics
