// model.hpp: network parameters, chain Hamiltonians and initial states

#pragma once

#include "cqnet/qla.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqnet::model {

using qla::DensityMatrix;
using qla::Operator;

enum class GammaUnits { absolute, lambda };

/// Physical parameters. Angular frequencies in rad/ns, rates in 1/ns (or in
/// multiples of λ when `gamma_units == lambda`).
struct NetworkConfig {
    int sites_per_chain = 3;
    int num_chains = 2;
    double omega = 2.0 * 3.14159265358979323846 * 2000.0;
    double nu = 2.0 * 3.14159265358979323846 * 100.0;
    double omega_f = 2.0 * 3.14159265358979323846 * 1600.0;
    double J = 2.0 * 3.14159265358979323846 * 30.0;
    /// One entry (uniform), `sites_per_chain` entries (repeated on every
    /// chain) or one entry per site of the network.
    std::vector<double> gamma{0.0};
    GammaUnits gamma_units = GammaUnits::absolute;
    /// Matrix element of the cavity field between the polariton levels.
    double kappa = 0.70710678118654752440;
    std::optional<double> fiber_length;
    std::optional<double> fiber_continuum_decay;

    [[nodiscard]] double delta() const { return (omega - nu) - omega_f; }
    [[nodiscard]] int total_sites() const { return sites_per_chain * num_chains; }

    /// Throws std::invalid_argument on hard violations; returns warnings.
    std::vector<std::string> validate() const;

    /// Absolute decay rate (1/ns) of network site `site`.
    [[nodiscard]] double rate(int site) const;

    /// Uniform-γ copy of this configuration.
    [[nodiscard]] NetworkConfig with_gamma(double g, GammaUnits units) const;
    /// Same parameters restricted to one chain.
    [[nodiscard]] NetworkConfig single_chain() const;
};

enum class InitialKind { psi_a, psi_b, rho_eq20, psi1_chain, psi2_chain, custom };

struct InitialStateSpec {
    InitialKind kind = InitialKind::psi_a;
    double theta = 0.0;
    std::optional<DensityMatrix> custom;
};

InitialKind parse_initial_kind(std::string_view name);
std::string to_string(InitialKind kind);

/// λ = J²/(2δ). Throws if J ≤ 0 or δ ≤ 0.
double effective_coupling(const NetworkConfig& cfg);

/// Effective hopping Hamiltonian of one chain on its polariton register.
Operator build_effective_chain_hamiltonian(const NetworkConfig& cfg);

/// H_chain ⊗ I + I ⊗ H_chain, chain-blocked ordering (1,2,3 | 1',2',3').
Operator build_network_hamiltonian(const NetworkConfig& cfg);

/// Occupation numbers of one basis state of the truncated full chain model.
struct FullBasisState {
    std::vector<int> polaritons;  // per site, 0 or 1
    std::vector<int> fibers;      // per fiber, photon count
};

struct FullChainModel {
    Operator hamiltonian;
    std::vector<FullBasisState> basis;
    [[nodiscard]] int index_of(const FullBasisState& s) const;
};

/// Polariton chain with explicit fiber modes, truncated to at most
/// `excitation_cap` total excitations. Throws for cap < 1.
FullChainModel build_full_chain_hamiltonian(const NetworkConfig& cfg, int excitation_cap);

/// Σ_i |E_i><E_i| on an `n_qubits` register.
qla::Matrix excitation_number(int n_qubits);

/// Permutation exchanging the two chains of the network register.
qla::Matrix chain_swap(int sites_per_chain);

/// Basis index (chain-blocked) of a label in interleaved notation
/// "X1 X1' X2 X2' ..." over {G,E}. Throws std::invalid_argument.
int map_paper_index(std::string_view label, int sites_per_chain = 3);
/// Inverse of map_paper_index.
std::string paper_label(int index, int sites_per_chain = 3);

/// Network subsystem index of a cavity label such as "2" or "1'".
int site_index(std::string_view cavity, int sites_per_chain = 3);
/// Subsystem index pair from a label like "33'" or "21'" or "12".
std::pair<int, int> pair_indices(std::string_view pair, int sites_per_chain = 3);

DensityMatrix build_initial_state(const InitialStateSpec& spec, const NetworkConfig& cfg);

/// Pure network state from interleaved-notation labels and amplitudes
/// (normalized on construction).
DensityMatrix state_from_labels(const std::vector<std::pair<std::string, qla::cplx>>& terms,
                                int sites_per_chain = 3);

/// p|Φ+><Φ+| + (1−p) I/4 on two qubits.
DensityMatrix werner_state(double p);

/// Zero-energy single-excitation eigenstate of one chain, alternating signs.
qla::PureState chain_dark_state(int sites_per_chain);

}  // namespace cqnet::model
