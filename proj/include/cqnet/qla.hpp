// qla.hpp: dense complex linear algebra and quantum-state core

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cqnet::qla {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Subsystem dimensions of a register, first entry most significant.
using Dims = std::vector<int>;

int product(const Dims& dims);

/// Square complex matrix over a labeled register.
class Operator {
public:
    Operator() = default;
    /// Throws std::invalid_argument if the matrix is not square or does not
    /// match the product of `dims`. An empty `dims` means a single subsystem.
    explicit Operator(Matrix m, Dims dims = {});

    [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()); }
    [[nodiscard]] const Matrix& matrix() const { return m_; }
    [[nodiscard]] const Dims& dims() const { return dims_; }

    static Operator identity(const Dims& dims);
    static Operator zero(const Dims& dims);

private:
    Matrix m_;
    Dims dims_;
};

/// Validation slack used by DensityMatrix.
struct Tolerance {
    double hermitian = 1e-10;
    double trace = 1e-8;
    double psd = 1e-9;  // min eigenvalue must be >= -psd
};

class PureState {
public:
    PureState() = default;
    /// Throws std::invalid_argument unless |‖amps‖² − 1| ≤ 1e-10.
    PureState(Vector amplitudes, Dims dims);

    /// Normalizes `amplitudes` first; throws on a zero vector.
    static PureState normalized(Vector amplitudes, Dims dims);

    [[nodiscard]] int dim() const { return static_cast<int>(amps_.size()); }
    [[nodiscard]] const Vector& amplitudes() const { return amps_; }
    [[nodiscard]] const Dims& dims() const { return dims_; }

private:
    Vector amps_;
    Dims dims_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
public:
    DensityMatrix() = default;
    /// Validates the invariants against `tol`; throws std::invalid_argument.
    explicit DensityMatrix(Operator op, Tolerance tol = {});

    static DensityMatrix from_pure(const PureState& psi);

    [[nodiscard]] int dim() const { return op_.dim(); }
    [[nodiscard]] const Matrix& matrix() const { return op_.matrix(); }
    [[nodiscard]] const Dims& dims() const { return op_.dims(); }
    [[nodiscard]] const Operator& op() const { return op_; }
    [[nodiscard]] const Tolerance& tolerance() const { return tol_; }

private:
    Operator op_;
    Tolerance tol_;
};

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
struct Spectrum {
    RealVector values;
    Matrix vectors;
};

// --------------------------- basic helpers ----------------------------------

double max_abs(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);
Matrix commutator(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);

Matrix sigma_y();
/// |E><G| on one qubit, with |G>=(1,0), |E>=(0,1).
Matrix raising();
/// |G><E|.
Matrix lowering();
/// |E><E|.
Matrix excited_projector();

/// Places a single-qubit operator at `site` of an `n_qubits` register.
Matrix embed(const Matrix& site_op, int site, int n_qubits);

// --------------------------- core operations --------------------------------

Operator tensor(const Operator& a, const Operator& b);

/// Partial trace over a raw matrix; `keep` must be a set of valid subsystem
/// indices. Kept subsystems retain their original order.
Matrix partial_trace(const Matrix& m, const Dims& dims, std::span<const int> keep);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// Reduced state on the listed subsystems in the listed order (permuting
/// if needed). Indices must be distinct.
DensityMatrix reduce(const DensityMatrix& rho, std::span<const int> ordered);

/// Throws std::invalid_argument for non-Hermitian input (tolerance 1e-10
/// relative to max(1, ‖h‖_max)).
Spectrum hermitian_eigendecomposition(const Operator& h);
Spectrum hermitian_eigendecomposition(const Matrix& h);

/// Eigenvalues of a density matrix with the entropy clipping convention:
/// values in [−1e-9, 0) are set to 0, anything lower throws.
RealVector clipped_eigenvalues(const Matrix& rho);

double von_neumann_entropy(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

/// Shannon entropy (base 2) of a probability list; entries below 1e-12 are
/// dropped.
double shannon_entropy(std::span<const double> probs);

/// exp(-i H t) via spectral decomposition.
Matrix unitary_propagator(const Spectrum& spec, double t);

}  // namespace cqnet::qla
