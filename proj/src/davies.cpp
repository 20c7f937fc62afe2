#include "cqnet/davies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cqnet::davies {

namespace {

constexpr double kGroupingTol = 1e-9;

int qubit_count(int dim)
{
    int n = 0;
    while ((1 << n) < dim) ++n;
    if ((1 << n) != dim) throw std::invalid_argument("davies: register dimension is not a power of two");
    return n;
}

Register register_of(const Operator& h, const model::NetworkConfig& cfg)
{
    const int n = qubit_count(h.dim());
    if (n == cfg.sites_per_chain) return Register::chain;
    if (n == cfg.total_sites()) return Register::network;
    throw std::invalid_argument("davies: Hamiltonian dimension matches neither a chain nor the network");
}

double spectral_scale(const qla::Spectrum& spec)
{
    if (spec.values.size() == 0) return 0.0;
    const double span = spec.values.maxCoeff() - spec.values.minCoeff();
    return std::max(span, spec.values.cwiseAbs().maxCoeff());
}

// Cluster representative for each distinct value; input need not be sorted.
std::vector<double> cluster(std::vector<double> values, double tol)
{
    std::sort(values.begin(), values.end());
    std::vector<double> reps;
    std::vector<int> counts;
    for (double v : values) {
        if (!reps.empty() && v - reps.back() / counts.back() <= tol) {
            reps.back() += v;
            ++counts.back();
        } else {
            reps.push_back(v);
            counts.push_back(1);
        }
    }
    for (std::size_t i = 0; i < reps.size(); ++i) reps[i] /= counts[i];
    return reps;
}

int nearest(const std::vector<double>& reps, double v, double tol)
{
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (std::abs(reps[i] - v) <= tol) return static_cast<int>(i);
    }
    return -1;
}

// All frequency components of one coupling operator in the eigenbasis.
struct Decomposition {
    std::vector<double> frequencies;
    std::vector<Matrix> parts;
};

Decomposition decompose(const qla::Spectrum& spec, const Matrix& coupling)
{
    const Eigen::Index n = spec.values.size();
    const double tol = kGroupingTol * std::max(spectral_scale(spec), 1e-300);
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) diffs.push_back(spec.values(j) - spec.values(i));
    }
    Decomposition out;
    out.frequencies = cluster(std::move(diffs), tol);

    const Matrix in_eig = spec.vectors.adjoint() * coupling * spec.vectors;
    std::vector<Matrix> masked(out.frequencies.size(), Matrix::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            // |φ_i><φ_i| a |φ_j><φ_j| oscillates at ω = λ_j − λ_i
            const int k = nearest(out.frequencies, spec.values(j) - spec.values(i), 2.0 * tol);
            masked[k](i, j) = in_eig(i, j);
        }
    }
    for (auto& m : masked) out.parts.push_back(spec.vectors * m * spec.vectors.adjoint());
    return out;
}

}  // namespace

void GeneratorSpec::validate() const
{
    const Matrix& h = hamiltonian.matrix();
    if (!qla::is_hermitian(h, 1e-10 * std::max(1.0, qla::max_abs(h)))) {
        throw std::invalid_argument("GeneratorSpec: Hamiltonian is not Hermitian");
    }
    for (const auto& c : channels) {
        if (c.jump.dim() != hamiltonian.dim()) throw std::invalid_argument("GeneratorSpec: channel dimension mismatch");
        if (c.rate < 0.0) throw std::invalid_argument("GeneratorSpec: negative channel rate");
    }
}

std::vector<double> bohr_frequencies(const qla::Spectrum& spec, double rel_tol)
{
    const Eigen::Index n = spec.values.size();
    const double scale = spectral_scale(spec);
    if (n == 0 || scale == 0.0) return {};
    const double tol = rel_tol * scale;
    std::vector<double> diffs;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = spec.values(j) - spec.values(i);
            if (d > tol) diffs.push_back(d);
        }
    }
    return cluster(std::move(diffs), tol);
}

Operator site_lowering_operator(const model::NetworkConfig& cfg, int site, Register reg)
{
    const int n = reg == Register::chain ? cfg.sites_per_chain : cfg.total_sites();
    if (site < 0 || site >= n) throw std::out_of_range("site_lowering_operator: site out of range");
    return Operator(cfg.kappa * qla::embed(qla::lowering(), site, n), qla::Dims(n, 2));
}

std::vector<DaviesChannel> decompose_all_frequencies(const Operator& h, const model::NetworkConfig& cfg, int site)
{
    const Register reg = register_of(h, cfg);
    const qla::Spectrum spec = qla::hermitian_eigendecomposition(h);
    const Operator a = site_lowering_operator(cfg, site, reg);
    const Decomposition dec = decompose(spec, a.matrix());
    std::vector<DaviesChannel> out;
    for (std::size_t k = 0; k < dec.frequencies.size(); ++k) {
        out.push_back({site, dec.frequencies[k], Operator(dec.parts[k], h.dims()), cfg.rate(site)});
    }
    return out;
}

std::vector<DaviesChannel> build_davies_channels(const Operator& h, const model::NetworkConfig& cfg)
{
    const Register reg = register_of(h, cfg);
    const qla::Spectrum spec = qla::hermitian_eigendecomposition(h);
    const double scale = spectral_scale(spec);
    const double tol = kGroupingTol * scale;
    const int n_sites = qubit_count(h.dim());

    std::vector<DaviesChannel> out;
    for (int site = 0; site < n_sites; ++site) {
        const double rate = cfg.rate(site);
        if (rate == 0.0) continue;
        const Operator a = site_lowering_operator(cfg, site, reg);
        const Decomposition dec = decompose(spec, a.matrix());
        for (std::size_t k = 0; k < dec.frequencies.size(); ++k) {
            // zero temperature: only downward transitions with ω > 0
            if (dec.frequencies[k] <= tol) continue;
            if (qla::max_abs(dec.parts[k]) <= 1e-12 * cfg.kappa) continue;
            out.push_back({site, dec.frequencies[k], Operator(dec.parts[k], h.dims()), rate});
        }
    }
    return out;
}

std::vector<DaviesChannel> build_local_channels(const Operator& h, const model::NetworkConfig& cfg)
{
    const Register reg = register_of(h, cfg);
    const int n_sites = qubit_count(h.dim());
    std::vector<DaviesChannel> out;
    for (int site = 0; site < n_sites; ++site) {
        const double rate = cfg.rate(site);
        if (rate == 0.0) continue;
        out.push_back({site, 0.0, site_lowering_operator(cfg, site, reg), rate});
    }
    return out;
}

GeneratorSpec make_generator(const Operator& h, const model::NetworkConfig& cfg)
{
    GeneratorSpec spec{h, build_davies_channels(h, cfg)};
    spec.validate();
    return spec;
}

Matrix lindblad_rhs(const Matrix& rho, const GeneratorSpec& spec)
{
    const Matrix& h = spec.hamiltonian.matrix();
    if (rho.rows() != h.rows() || rho.cols() != h.cols()) {
        throw std::invalid_argument("lindblad_rhs: dimension mismatch (state " + std::to_string(rho.rows()) +
                                    ", generator " + std::to_string(h.rows()) + ")");
    }
    const qla::cplx minus_i(0.0, -1.0);
    Matrix out = minus_i * (h * rho - rho * h);
    for (const auto& c : spec.channels) {
        const Matrix& a = c.jump.matrix();
        if (a.rows() != h.rows()) throw std::invalid_argument("lindblad_rhs: channel dimension mismatch");
        const Matrix ada = a.adjoint() * a;
        out += c.rate * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
    }
    return out;
}

Operator lindblad_rhs(const DensityMatrix& rho, const GeneratorSpec& spec)
{
    return Operator(lindblad_rhs(rho.matrix(), spec), rho.dims());
}

}  // namespace cqnet::davies
