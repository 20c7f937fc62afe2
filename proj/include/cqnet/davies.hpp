// davies.hpp: eigenbasis-resolved (Davies) dissipators and the master-equation generator

#pragma once

#include "cqnet/model.hpp"
#include "cqnet/qla.hpp"

#include <vector>

namespace cqnet::davies {

using qla::DensityMatrix;
using qla::Matrix;
using qla::Operator;

/// One dissipation channel: rate * D[jump].
///
/// `bohr_frequency` is the positive transition frequency the jump is resolved
/// at. Channels built by `build_local_channels` are not frequency resolved
/// and carry 0 there.
struct DaviesChannel {
    int site = 0;
    double bohr_frequency = 0.0;
    Operator jump;
    double rate = 0.0;
};

struct GeneratorSpec {
    Operator hamiltonian;
    std::vector<DaviesChannel> channels;

    /// Throws std::invalid_argument if H is not Hermitian or a channel's
    /// dimension differs from H.
    void validate() const;
};

/// Which register a site operator lives on.
enum class Register { chain, network };

/// Distinct positive eigenvalue differences, clustered within `rel_tol` of
/// the spectral span and returned ascending.
std::vector<double> bohr_frequencies(const qla::Spectrum& spec, double rel_tol = 1e-9);

/// κ·|G_n><E_n| embedded in the chosen register. Throws std::out_of_range.
Operator site_lowering_operator(const model::NetworkConfig& cfg, int site, Register reg);

/// Eigenprojector sandwich A_n(ω) = Σ_{λβ−λα=ω} P_α (κL_n⁻) P_β for every
/// site n and positive Bohr frequency ω. Only ω > 0 survives at zero
/// temperature. Zero jumps and zero-rate sites are dropped.
std::vector<DaviesChannel> build_davies_channels(const Operator& h, const model::NetworkConfig& cfg);

/// Same decomposition but keeping every frequency, including ω ≤ 0.
/// Summing all jumps of one site reproduces κL_n⁻.
std::vector<DaviesChannel> decompose_all_frequencies(const Operator& h, const model::NetworkConfig& cfg,
                                                     int site);

/// Site-local dissipators γ_n D[κL_n⁻]; used as the contrast model.
std::vector<DaviesChannel> build_local_channels(const Operator& h, const model::NetworkConfig& cfg);

GeneratorSpec make_generator(const Operator& h, const model::NetworkConfig& cfg);

/// −i[H,ρ] + Σ γ (AρA† − ½{A†A, ρ}). Throws on dimension mismatch.
Operator lindblad_rhs(const DensityMatrix& rho, const GeneratorSpec& spec);
Matrix lindblad_rhs(const Matrix& rho, const GeneratorSpec& spec);

}  // namespace cqnet::davies
