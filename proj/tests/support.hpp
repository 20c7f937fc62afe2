// Test helpers: random generators and independent oracles.
// Nothing here calls into the library's numerics so results can be
// compared against it.

#pragma once

#include "cqnet/qla.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace support {

using cqnet::qla::cplx;
using cqnet::qla::Matrix;
using cqnet::qla::Vector;

inline constexpr int kCases = 200;
inline constexpr double kPi = 3.14159265358979323846;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    cplx gaussian() { return {normal(), normal()}; }

    Vector pure(int dim)
    {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = gaussian();
        return v / v.norm();
    }

    // Ginibre-type mixed state with random rank in [1, dim]
    Matrix mixed(int dim)
    {
        const int rank = integer(1, dim);
        Matrix g(dim, rank);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < rank; ++j) g(i, j) = gaussian();
        Matrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        return 0.5 * (rho + rho.adjoint());
    }

    Matrix hermitian(int dim)
    {
        Matrix g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = gaussian();
        return 0.5 * (g + g.adjoint());
    }

    // Haar-ish unitary from the QR of a Ginibre matrix
    Matrix unitary(int dim)
    {
        Matrix g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = gaussian();
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ();
        Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < dim; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
        return q;
    }

private:
    std::mt19937_64 gen_;
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix projector(const Vector& v) { return v * v.adjoint(); }

/// exp(A) by scaling and squaring of a truncated Taylor series.
inline Matrix expm(const Matrix& a)
{
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    const Matrix x = a * scale;
    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int k = 1; k <= 20; ++k) {
        term = (term * x / static_cast<double>(k)).eval();
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
    return sum;
}

/// Concurrence from the singular values of Wᵀ(σy⊗σy)W with ρ = W W†.
inline double concurrence_svd(const Matrix& rho)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    Matrix w = es.eigenvectors();
    for (int j = 0; j < 4; ++j) w.col(j) *= std::sqrt(std::max(0.0, es.eigenvalues()(j)));
    Matrix yy = Matrix::Zero(4, 4);
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Matrix m = w.transpose() * yy * w;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto s = svd.singularValues();  // decreasing
    return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

inline double h2(double x)
{
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Closed-form discord of the Werner family p|Φ+><Φ+| + (1−p)I/4.
inline double werner_discord(double p)
{
    const double l1 = (1.0 - p) / 4.0, l2 = (1.0 + 3.0 * p) / 4.0;
    const auto xlx = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
    const double mi = 2.0 + 3.0 * xlx(l1) + xlx(l2);
    const double c = std::abs(p);
    const double cc = 0.5 * (1.0 - c) * std::log2(1.0 - c) + 0.5 * (1.0 + c) * std::log2(1.0 + c);
    return mi - cc;
}

/// Single-excitation transfer amplitudes along a 3-site chain, x = λt.
inline cplx amp_1_to_3(double x)
{
    const cplx i(0.0, 1.0);
    return 1.0 / 3.0 - 0.5 * std::exp(-i * x) + std::exp(-3.0 * i * x) / 6.0;
}
inline cplx amp_1_to_2(double x)
{
    const cplx i(0.0, 1.0);
    return -1.0 / 3.0 + std::exp(-3.0 * i * x) / 3.0;
}
inline cplx amp_1_to_1(double x)
{
    const cplx i(0.0, 1.0);
    return 1.0 / 3.0 + 0.5 * std::exp(-i * x) + std::exp(-3.0 * i * x) / 6.0;
}

/// Single-qubit reduction at `site` of an n-qubit matrix, computed by
/// explicit index summation.
inline Matrix reduce_one(const Matrix& rho, int site, int n)
{
    Matrix out = Matrix::Zero(2, 2);
    const int dim = 1 << n;
    const int shift = n - 1 - site;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if ((i & ~(1 << shift)) != (j & ~(1 << shift))) continue;
            out((i >> shift) & 1, (j >> shift) & 1) += rho(i, j);
        }
    return out;
}

/// Two-qubit reduction on (a, b) in that order.
inline Matrix reduce_two(const Matrix& rho, int a, int b, int n)
{
    Matrix out = Matrix::Zero(4, 4);
    const int dim = 1 << n;
    const int sa = n - 1 - a, sb = n - 1 - b;
    const int mask = (1 << sa) | (1 << sb);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if ((i & ~mask) != (j & ~mask)) continue;
            const int r = (((i >> sa) & 1) << 1) | ((i >> sb) & 1);
            const int c = (((j >> sa) & 1) << 1) | ((j >> sb) & 1);
            out(r, c) += rho(i, j);
        }
    return out;
}

}  // namespace support
