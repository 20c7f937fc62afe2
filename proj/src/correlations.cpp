#include "cqnet/correlations.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

namespace cqnet::corr {

namespace {

using qla::cplx;
using qla::Matrix;

constexpr int kPolarGrid = 64;
constexpr int kAzimuthGrid = 128;
constexpr double kEntropyTol = 1e-7;
constexpr double kRoundoffClip = 1e-10;
constexpr double kTangleFloor = 1e-9;

void require_two_qubits(const DensityMatrix& rho, const char* who)
{
    if (rho.dim() != 4) throw std::invalid_argument(std::string(who) + ": expected a two-qubit state");
}

int qubit_count(const DensityMatrix& rho)
{
    int n = 0;
    while ((1 << n) < rho.dim()) ++n;
    if ((1 << n) != rho.dim()) throw std::invalid_argument("expected a qubit register");
    return n;
}

// entropy (bits) of a 2×2 Hermitian PSD block normalized by its trace
double qubit_entropy(cplx m00, cplx m01, double m11_re, double trace)
{
    const double a = m00.real() / trace;
    const double d = m11_re / trace;
    const double b = std::abs(m01) / trace;
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * b);
    const double p = std::clamp(0.5 * (a + d + disc), 0.0, 1.0);
    return binary_entropy(p);
}

struct Point {
    double x, y, f;
};

// Nelder–Mead in two dimensions starting from a simplex around `start`.
Point nelder_mead(const std::function<double(double, double)>& f, double x0, double y0, double step)
{
    std::array<Point, 3> s{{{x0, y0, 0.0}, {x0 + step, y0, 0.0}, {x0, y0 + step, 0.0}}};
    for (auto& p : s) p.f = f(p.x, p.y);
    for (int iter = 0; iter < 4000; ++iter) {
        std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.f < b.f; });
        const double spread = s[2].f - s[0].f;
        const double size = std::max(std::hypot(s[1].x - s[0].x, s[1].y - s[0].y),
                                     std::hypot(s[2].x - s[0].x, s[2].y - s[0].y));
        if (spread < 1e-3 * kEntropyTol && size < 1e-9) break;
        if (size < 1e-12) break;
        const double cx = 0.5 * (s[0].x + s[1].x), cy = 0.5 * (s[0].y + s[1].y);
        const auto at = [&](double t) {
            Point p{cx + t * (s[2].x - cx), cy + t * (s[2].y - cy), 0.0};
            p.f = f(p.x, p.y);
            return p;
        };
        const Point r = at(-1.0);
        if (r.f < s[0].f) {
            const Point e = at(-2.0);
            s[2] = e.f < r.f ? e : r;
        } else if (r.f < s[1].f) {
            s[2] = r;
        } else {
            const Point c = r.f < s[2].f ? at(-0.5) : at(0.5);
            if (c.f < std::min(r.f, s[2].f)) {
                s[2] = c;
            } else {
                for (int k = 1; k < 3; ++k) {
                    s[k].x = 0.5 * (s[k].x + s[0].x);
                    s[k].y = 0.5 * (s[k].y + s[0].y);
                    s[k].f = f(s[k].x, s[k].y);
                }
            }
        }
    }
    return *std::min_element(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.f < b.f; });
}

MeasurementBasis canonical(double polar, double azimuth)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    polar = std::fmod(polar, two_pi);
    if (polar < 0.0) polar += two_pi;
    if (polar > std::numbers::pi) {
        polar = two_pi - polar;
        azimuth += std::numbers::pi;
    }
    azimuth = std::fmod(azimuth, two_pi);
    if (azimuth < 0.0) azimuth += two_pi;
    return {polar, azimuth};
}

double sum_sq_from(const DensityMatrix& rho, int ref_site, int n)
{
    double sum = 0.0;
    for (int x = 0; x < n; ++x) {
        if (x == ref_site) continue;
        const std::array<int, 2> keep{ref_site, x};
        const double c = concurrence(qla::reduce(rho, keep));
        sum += c * c;
    }
    return sum;
}

void require_site(const DensityMatrix& rho, int site)
{
    if (site < 0 || site >= static_cast<int>(rho.dims().size())) throw std::out_of_range("site index out of range");
}

}  // namespace

// --------------------------- concurrence / EoF ------------------------------

double concurrence(const DensityMatrix& rho_ab)
{
    require_two_qubits(rho_ab, "concurrence");
    // α_i are the singular values of √ρ (σy⊗σy) √ρ*, which keeps full
    // absolute precision for the vanishing α_i of near-pure states
    const Matrix yy = qla::kron(qla::sigma_y(), qla::sigma_y());
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_ab.matrix());
    qla::RealVector root = es.eigenvalues();
    for (int i = 0; i < 4; ++i) {
        if (root(i) < -kRoundoffClip) throw std::domain_error("concurrence: density matrix is not positive");
        root(i) = std::sqrt(std::max(0.0, root(i)));
    }
    const Matrix sqrt_rho = es.eigenvectors() * root.cast<qla::cplx>().asDiagonal() * es.eigenvectors().adjoint();
    Eigen::JacobiSVD<Matrix> svd(sqrt_rho * yy * sqrt_rho.conjugate());
    const auto alpha = svd.singularValues();  // decreasing
    return std::clamp(alpha(0) - alpha(1) - alpha(2) - alpha(3), 0.0, 1.0);
}

double binary_entropy(double x)
{
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double eof_from_concurrence(double c)
{
    if (c < 0.0 || c > 1.0) throw std::invalid_argument("eof_from_concurrence: concurrence outside [0, 1]");
    return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

// --------------------------- discord ----------------------------------------

double mutual_information(const DensityMatrix& rho_ab)
{
    require_two_qubits(rho_ab, "mutual_information");
    const std::array<int, 1> a{0}, b{1};
    return qla::von_neumann_entropy(qla::partial_trace(rho_ab, a)) +
           qla::von_neumann_entropy(qla::partial_trace(rho_ab, b)) - qla::von_neumann_entropy(rho_ab);
}

double conditional_entropy(const DensityMatrix& rho_ab, Side measured, const MeasurementBasis& basis)
{
    require_two_qubits(rho_ab, "conditional_entropy");
    const Matrix& r = rho_ab.matrix();
    const double c = std::cos(0.5 * basis.polar), s = std::sin(0.5 * basis.polar);
    const cplx phase = std::polar(1.0, basis.azimuth);
    const std::array<std::array<cplx, 2>, 2> vecs{{{c, phase * s}, {std::conj(phase) * s, -c}}};

    // index of (unmeasured u, measured m) in the two-qubit register
    const auto idx = [measured](int u, int m) { return measured == Side::B ? 2 * u + m : 2 * m + u; };
    double total = 0.0;
    for (const auto& v : vecs) {
        cplx blk[2][2] = {};
        for (int u = 0; u < 2; ++u)
            for (int w = 0; w < 2; ++w)
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n) blk[u][w] += std::conj(v[m]) * r(idx(u, m), idx(w, n)) * v[n];
        const double p = blk[0][0].real() + blk[1][1].real();
        if (p > 1e-14) total += p * qubit_entropy(blk[0][0], blk[0][1], blk[1][1].real(), p);
    }
    return total;
}

ClassicalCorrelation classical_correlation(const DensityMatrix& rho_ab, Side measured)
{
    require_two_qubits(rho_ab, "classical_correlation");
    const std::array<int, 1> keep{measured == Side::B ? 0 : 1};
    const double s_unmeasured = qla::von_neumann_entropy(qla::partial_trace(rho_ab, keep));

    const auto f = [&](double polar, double azimuth) {
        return conditional_entropy(rho_ab, measured, {polar, azimuth});
    };
    double best = std::numeric_limits<double>::infinity();
    double best_p = 0.0, best_a = 0.0;
    for (int i = 0; i < kPolarGrid; ++i) {
        const double polar = std::numbers::pi * i / (kPolarGrid - 1);
        for (int j = 0; j < kAzimuthGrid; ++j) {
            const double azimuth = 2.0 * std::numbers::pi * j / kAzimuthGrid;
            const double v = f(polar, azimuth);
            if (v < best) {
                best = v;
                best_p = polar;
                best_a = azimuth;
            }
        }
    }
    const Point refined = nelder_mead(f, best_p, best_a, std::numbers::pi / (kPolarGrid - 1));
    if (refined.f < best) {
        best = refined.f;
        best_p = refined.x;
        best_a = refined.y;
    }
    return {std::max(0.0, s_unmeasured - best), canonical(best_p, best_a)};
}

double quantum_discord(const DensityMatrix& rho_ab, Side measured)
{
    const double q = mutual_information(rho_ab) - classical_correlation(rho_ab, measured).value;
    return (q < 0.0 && q >= -1e-8) ? 0.0 : q;
}

// --------------------------- tangles ----------------------------------------

double one_tangle(const DensityMatrix& rho, int site, OneTangleMode mode)
{
    require_site(rho, site);
    if (rho.dims()[site] != 2) throw std::invalid_argument("one_tangle: site is not a qubit");
    const std::array<int, 1> keep{site};
    const DensityMatrix r = qla::partial_trace(rho, keep);
    const Matrix& m = r.matrix();
    if (mode == OneTangleMode::det) return 4.0 * (m(0, 0).real() * m(1, 1).real() - std::norm(m(0, 1)));
    return 2.0 * (1.0 - qla::purity(r));
}

double pairwise_concurrence_sq_sum(const DensityMatrix& rho, int ref_site)
{
    require_site(rho, ref_site);
    return sum_sq_from(rho, ref_site, qubit_count(rho));
}

double tangle_pure(const DensityMatrix& psi, int ref_site)
{
    if (qla::purity(psi) < 1.0 - 1e-8) throw std::invalid_argument("tangle_pure: state is not pure");
    const double tau = one_tangle(psi, ref_site) - pairwise_concurrence_sq_sum(psi, ref_site);
    return tau < kTangleFloor ? 0.0 : tau;
}

double tangle_pure(const PureState& psi, int ref_site)
{
    return tangle_pure(DensityMatrix::from_pure(psi), ref_site);
}

TangleBounds tangle_bounds(const DensityMatrix& rho, int ref_site)
{
    require_site(rho, ref_site);
    const std::array<int, 1> keep{ref_site};
    const double local_purity = qla::purity(qla::partial_trace(rho, keep));
    const double pairwise = pairwise_concurrence_sq_sum(rho, ref_site);
    TangleBounds b;
    b.upper_raw = 2.0 * (1.0 - local_purity) - pairwise;
    b.lower_raw = 2.0 * (qla::purity(rho) - local_purity) - pairwise;
    b.upper = std::max(0.0, b.upper_raw);
    b.lower = std::max(0.0, b.lower_raw);
    return b;
}

double monogamy_residual(const DensityMatrix& psi, int ref_site)
{
    const double r = one_tangle(psi, ref_site) - pairwise_concurrence_sq_sum(psi, ref_site);
    if (r < -kTangleFloor) {
        throw MonogamyViolation("monogamy_residual: inequality violated by " + std::to_string(-r));
    }
    return r;
}

double monogamy_residual(const PureState& psi, int ref_site)
{
    return monogamy_residual(DensityMatrix::from_pure(psi), ref_site);
}

double entanglement_sum(const DensityMatrix& psi, int ref_site)
{
    return pairwise_concurrence_sq_sum(psi, ref_site);
}

double entanglement_sum(const PureState& psi, int ref_site)
{
    return entanglement_sum(DensityMatrix::from_pure(psi), ref_site);
}

// --------------------------- Δ ----------------------------------------------

DeltaResult delta_fanchini(const DensityMatrix& rho_123, Side measured)
{
    if (rho_123.dim() != 8) throw std::invalid_argument("delta_fanchini: expected a three-qubit state");
    const std::array<int, 2> p12{0, 1}, p13{0, 2};
    const std::array<int, 1> s2{1}, s3{2};
    const DensityMatrix r12 = qla::partial_trace(rho_123, p12);
    const DensityMatrix r13 = qla::partial_trace(rho_123, p13);
    const double e12 = eof_from_concurrence(concurrence(r12));
    const double e13 = eof_from_concurrence(concurrence(r13));
    const double q12 = quantum_discord(r12, measured);
    const double q13 = quantum_discord(r13, measured);
    DeltaResult out;
    out.delta = e12 + e13 - q12 - q13;
    out.ssa_slack = qla::von_neumann_entropy(r12) + qla::von_neumann_entropy(r13) -
                    qla::von_neumann_entropy(qla::partial_trace(rho_123, s2)) -
                    qla::von_neumann_entropy(qla::partial_trace(rho_123, s3)) - out.delta;
    return out;
}

CorrelationReport correlation_report(const DensityMatrix& rho, const std::vector<std::pair<int, int>>& pairs,
                                     int ref_site, Side measured)
{
    const int n = qubit_count(rho);
    CorrelationReport rep;
    for (const auto& [a, b] : pairs) {
        const std::array<int, 2> keep{a, b};
        const DensityMatrix r = qla::reduce(rho, keep);
        PairReport p;
        p.pair = {a, b};
        p.concurrence = concurrence(r);
        p.eof = eof_from_concurrence(p.concurrence);
        p.mutual_info = mutual_information(r);
        p.classical_corr = classical_correlation(r, measured).value;
        p.discord = p.mutual_info - p.classical_corr;
        rep.pairs.push_back(p);
    }
    for (int i = 0; i < n; ++i) rep.one_tangles.push_back(one_tangle(rho, i));
    rep.tangle_bounds = tangle_bounds(rho, ref_site);
    if (qla::purity(rho) >= 1.0 - 1e-8) {
        rep.tangle = tangle_pure(rho, ref_site);
        rep.monogamy_residual = monogamy_residual(rho, ref_site);
    }
    if (n == 3) rep.delta = delta_fanchini(rho, measured).delta;
    return rep;
}

}  // namespace cqnet::corr
