#include "cqnet/qla.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cqnet::qla {

namespace {

constexpr double kEntropyCutoff = 1e-12;
constexpr double kNegativeClip = 1e-9;
constexpr double kDegeneracyGap = 1e-9;

// Mixed-radix digits of `index` over `dims`, most significant first.
std::vector<int> digits(int index, const Dims& dims)
{
    std::vector<int> out(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    return out;
}

// Deterministic phase: largest-magnitude component (first on ties) real positive.
void fix_phase(Eigen::Ref<Vector> v)
{
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best_mag * (1.0 + 1e-12)) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag > 0.0) v *= std::conj(v(best)) / best_mag;
}

}  // namespace

int product(const Dims& dims)
{
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

// --------------------------- Operator ---------------------------------------

Operator::Operator(Matrix m, Dims dims) : m_(std::move(m)), dims_(std::move(dims))
{
    if (m_.rows() != m_.cols()) throw std::invalid_argument("Operator: matrix must be square");
    if (dims_.empty()) dims_ = {static_cast<int>(m_.rows())};
    for (int d : dims_) {
        if (d <= 0) throw std::invalid_argument("Operator: subsystem dimensions must be positive");
    }
    if (product(dims_) != m_.rows()) {
        throw std::invalid_argument("Operator: dimension " + std::to_string(m_.rows()) +
                                    " does not match subsystem product " +
                                    std::to_string(product(dims_)));
    }
}

Operator Operator::identity(const Dims& dims)
{
    const int n = product(dims);
    return Operator(Matrix::Identity(n, n), dims);
}

Operator Operator::zero(const Dims& dims)
{
    const int n = product(dims);
    return Operator(Matrix::Zero(n, n), dims);
}

// --------------------------- PureState / DensityMatrix ----------------------

PureState::PureState(Vector amplitudes, Dims dims) : amps_(std::move(amplitudes)), dims_(std::move(dims))
{
    if (dims_.empty()) dims_ = {static_cast<int>(amps_.size())};
    if (product(dims_) != amps_.size()) throw std::invalid_argument("PureState: dims do not match amplitude count");
    if (std::abs(amps_.squaredNorm() - 1.0) > 1e-10) throw std::invalid_argument("PureState: amplitudes not normalized");
}

PureState PureState::normalized(Vector amplitudes, Dims dims)
{
    const double n = amplitudes.norm();
    if (n == 0.0) throw std::invalid_argument("PureState: zero vector");
    return PureState(amplitudes / n, std::move(dims));
}

DensityMatrix::DensityMatrix(Operator op, Tolerance tol) : op_(std::move(op)), tol_(tol)
{
    const Matrix& m = op_.matrix();
    const double herm = max_abs(m - m.adjoint());
    if (herm > tol_.hermitian) {
        throw std::invalid_argument("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol_.trace) {
        throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol_.psd) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi)
{
    const Vector& v = psi.amplitudes();
    return DensityMatrix(Operator(v * v.adjoint(), psi.dims()));
}

// --------------------------- helpers ----------------------------------------

double max_abs(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol)
{
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

Matrix commutator(const Matrix& a, const Matrix& b)
{
    return a * b - b * a;
}

Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix k = Eigen::kroneckerProduct(a, b);
    return k;
}

Matrix sigma_y()
{
    Matrix m(2, 2);
    m << 0.0, cplx(0.0, -1.0),
         cplx(0.0, 1.0), 0.0;
    return m;
}

Matrix raising()
{
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

Matrix lowering()
{
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Matrix excited_projector()
{
    Matrix m = Matrix::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

Matrix embed(const Matrix& site_op, int site, int n_qubits)
{
    if (site < 0 || site >= n_qubits) throw std::out_of_range("embed: site out of range");
    const int left = 1 << site;
    const int right = 1 << (n_qubits - site - 1);
    return kron(kron(Matrix::Identity(left, left), site_op), Matrix::Identity(right, right));
}

// --------------------------- tensor / partial trace -------------------------

Operator tensor(const Operator& a, const Operator& b)
{
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return Operator(kron(a.matrix(), b.matrix()), std::move(dims));
}

Matrix partial_trace(const Matrix& m, const Dims& dims, std::span<const int> keep)
{
    const int n_sub = static_cast<int>(dims.size());
    if (product(dims) != m.rows()) throw std::invalid_argument("partial_trace: dims do not match matrix");
    std::vector<bool> kept(n_sub, false);
    for (int k : keep) {
        if (k < 0 || k >= n_sub) throw std::out_of_range("partial_trace: subsystem index out of range");
        if (kept[k]) throw std::invalid_argument("partial_trace: repeated subsystem index");
        kept[k] = true;
    }

    const int total = static_cast<int>(m.rows());
    std::vector<int> kept_index(total), traced_index(total);
    int kept_dim = 1;
    for (int s = 0; s < n_sub; ++s) {
        if (kept[s]) kept_dim *= dims[s];
    }
    for (int i = 0; i < total; ++i) {
        const auto d = digits(i, dims);
        int ki = 0, ti = 0;
        for (int s = 0; s < n_sub; ++s) {
            if (kept[s]) ki = ki * dims[s] + d[s];
            else ti = ti * dims[s] + d[s];
        }
        kept_index[i] = ki;
        traced_index[i] = ti;
    }

    Matrix out = Matrix::Zero(kept_dim, kept_dim);
    for (int j = 0; j < total; ++j) {
        for (int i = 0; i < total; ++i) {
            if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += m(i, j);
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep)
{
    Matrix red = partial_trace(rho.matrix(), rho.dims(), keep);
    std::vector<int> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    Dims dims;
    for (int k : sorted) dims.push_back(rho.dims()[k]);
    if (dims.empty()) dims = {1};
    red = 0.5 * (red + red.adjoint()).eval();
    return DensityMatrix(Operator(std::move(red), std::move(dims)), rho.tolerance());
}

DensityMatrix reduce(const DensityMatrix& rho, std::span<const int> ordered)
{
    std::vector<int> sorted(ordered.begin(), ordered.end());
    std::sort(sorted.begin(), sorted.end());
    DensityMatrix red = partial_trace(rho, sorted);
    if (std::equal(sorted.begin(), sorted.end(), ordered.begin())) return red;

    // perm[k]: position in `sorted` of the k-th requested subsystem
    const int n = static_cast<int>(ordered.size());
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) {
        perm[k] = static_cast<int>(std::find(sorted.begin(), sorted.end(), ordered[k]) - sorted.begin());
    }
    const Dims& src_dims = red.dims();
    Dims dst_dims(n);
    for (int k = 0; k < n; ++k) dst_dims[k] = src_dims[perm[k]];

    const int total = red.dim();
    std::vector<int> map(total);
    for (int i = 0; i < total; ++i) {
        const auto d = digits(i, src_dims);
        int idx = 0;
        for (int k = 0; k < n; ++k) idx = idx * dst_dims[k] + d[perm[k]];
        map[i] = idx;
    }
    Matrix out(total, total);
    for (int j = 0; j < total; ++j) {
        for (int i = 0; i < total; ++i) out(map[i], map[j]) = red.matrix()(i, j);
    }
    return DensityMatrix(Operator(std::move(out), std::move(dst_dims)), rho.tolerance());
}

// --------------------------- spectral decomposition -------------------------

Spectrum hermitian_eigendecomposition(const Operator& h)
{
    return hermitian_eigendecomposition(h.matrix());
}

Spectrum hermitian_eigendecomposition(const Matrix& h)
{
    const double scale = std::max(1.0, max_abs(h));
    if (!is_hermitian(h, 1e-10 * scale)) {
        throw std::invalid_argument("hermitian_eigendecomposition: input is not Hermitian");
    }
    const Matrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eigendecomposition: solver failed");

    Spectrum out{es.eigenvalues(), es.eigenvectors()};
    const Eigen::Index n = out.values.size();
    if (n == 0) return out;

    const double span = out.values(n - 1) - out.values(0);
    const double gap = kDegeneracyGap * std::max(span, out.values.cwiseAbs().maxCoeff());

    // Canonical basis per degenerate cluster: Gram–Schmidt of the projected
    // standard basis vectors, taken in index order.
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && out.values(stop) - out.values(stop - 1) < gap) ++stop;
        const Eigen::Index size = stop - start;
        if (size == 1) {
            fix_phase(out.vectors.col(start));
        } else {
            const Matrix block = out.vectors.middleCols(start, size);
            const Matrix proj = block * block.adjoint();
            Matrix basis(n, size);
            Eigen::Index found = 0;
            for (Eigen::Index e = 0; e < n && found < size; ++e) {
                Vector v = proj.col(e);
                for (Eigen::Index k = 0; k < found; ++k) v -= basis.col(k) * basis.col(k).dot(v);
                for (Eigen::Index k = 0; k < found; ++k) v -= basis.col(k) * basis.col(k).dot(v);
                const double nv = v.norm();
                if (nv > 1e-6) basis.col(found++) = v / nv;
            }
            if (found < size) throw std::runtime_error("hermitian_eigendecomposition: degenerate cluster rank loss");
            const double mean = out.values.segment(start, size).mean();
            out.values.segment(start, size).setConstant(mean);
            out.vectors.middleCols(start, size) = basis;
        }
        start = stop;
    }
    return out;
}

RealVector clipped_eigenvalues(const Matrix& rho)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    RealVector vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < -kNegativeClip) {
            throw std::domain_error("clipped_eigenvalues: eigenvalue " + std::to_string(vals(i)) + " below -1e-9");
        }
        if (vals(i) < 0.0) vals(i) = 0.0;
    }
    return vals;
}

double shannon_entropy(std::span<const double> probs)
{
    double s = 0.0;
    for (double p : probs) {
        if (p > kEntropyCutoff) s -= p * std::log2(p);
    }
    return s;
}

double von_neumann_entropy(const DensityMatrix& rho)
{
    const RealVector vals = clipped_eigenvalues(rho.matrix());
    return shannon_entropy(std::span<const double>(vals.data(), static_cast<std::size_t>(vals.size())));
}

double purity(const DensityMatrix& rho)
{
    // Tr[ρ²] = Σ |ρ_ij|² for Hermitian ρ
    return rho.matrix().squaredNorm();
}

Matrix unitary_propagator(const Spectrum& spec, double t)
{
    Vector phases(spec.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(cplx(0.0, -spec.values(i) * t));
    return spec.vectors * phases.asDiagonal() * spec.vectors.adjoint();
}

}  // namespace cqnet::qla
