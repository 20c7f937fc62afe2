#include "cqnet/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace cqnet::model {

using qla::cplx;
using qla::Matrix;
using qla::Vector;

// --------------------------- NetworkConfig ----------------------------------

std::vector<std::string> NetworkConfig::validate() const
{
    if (sites_per_chain < 2) throw std::invalid_argument("NetworkConfig: sites_per_chain must be >= 2");
    if (num_chains < 1) throw std::invalid_argument("NetworkConfig: num_chains must be >= 1");
    if (!(J > 0.0)) throw std::invalid_argument("NetworkConfig: J must be positive");
    if (gamma.empty()) throw std::invalid_argument("NetworkConfig: gamma list is empty");
    for (double g : gamma) {
        if (!(g >= 0.0)) throw std::invalid_argument("NetworkConfig: decay rates must be non-negative");
    }
    const auto n = static_cast<std::size_t>(gamma.size());
    if (n != 1 && n != static_cast<std::size_t>(sites_per_chain) && n != static_cast<std::size_t>(total_sites())) {
        throw std::invalid_argument("NetworkConfig: gamma list length must be 1, sites_per_chain or total sites");
    }
    if (!(kappa > 0.0)) throw std::invalid_argument("NetworkConfig: kappa must be positive");

    std::vector<std::string> warnings;
    const double d = delta();
    if (d <= J) {
        throw std::invalid_argument("NetworkConfig: detuning delta must exceed J for the effective model");
    }
    if (d < 5.0 * J) warnings.emplace_back("detuning delta < 5 J: effective hopping model is inaccurate");
    if (fiber_length && fiber_continuum_decay) {
        // short-fiber limit 2 l mu / (2 pi c) << 1, c in m/ns
        constexpr double c = 0.299792458;
        const double ratio = 2.0 * *fiber_length * *fiber_continuum_decay / (2.0 * std::numbers::pi * c);
        if (ratio >= 0.1) warnings.emplace_back("fiber is not in the short-fiber limit (2 l mu / 2 pi c >= 0.1)");
    }
    return warnings;
}

double NetworkConfig::rate(int site) const
{
    if (site < 0 || site >= total_sites()) throw std::out_of_range("NetworkConfig::rate: site out of range");
    double g = 0.0;
    if (gamma.size() == 1) g = gamma[0];
    else if (gamma.size() == static_cast<std::size_t>(sites_per_chain)) g = gamma[site % sites_per_chain];
    else g = gamma.at(site);
    return gamma_units == GammaUnits::lambda ? g * effective_coupling(*this) : g;
}

NetworkConfig NetworkConfig::with_gamma(double g, GammaUnits units) const
{
    NetworkConfig c = *this;
    c.gamma = {g};
    c.gamma_units = units;
    return c;
}

NetworkConfig NetworkConfig::single_chain() const
{
    NetworkConfig c = *this;
    c.num_chains = 1;
    if (c.gamma.size() != 1 && c.gamma.size() != static_cast<std::size_t>(sites_per_chain)) {
        c.gamma.resize(sites_per_chain);
    }
    return c;
}

InitialKind parse_initial_kind(std::string_view name)
{
    static const std::map<std::string, InitialKind, std::less<>> names{
        {"psi_a", InitialKind::psi_a},         {"psi_b", InitialKind::psi_b},
        {"rho_eq20", InitialKind::rho_eq20},   {"psi1_chain", InitialKind::psi1_chain},
        {"psi2_chain", InitialKind::psi2_chain}, {"custom", InitialKind::custom},
    };
    const auto it = names.find(name);
    if (it == names.end()) throw std::invalid_argument("unknown initial state '" + std::string(name) + "'");
    return it->second;
}

std::string to_string(InitialKind kind)
{
    switch (kind) {
    case InitialKind::psi_a: return "psi_a";
    case InitialKind::psi_b: return "psi_b";
    case InitialKind::rho_eq20: return "rho_eq20";
    case InitialKind::psi1_chain: return "psi1_chain";
    case InitialKind::psi2_chain: return "psi2_chain";
    case InitialKind::custom: return "custom";
    }
    return "custom";
}

// --------------------------- Hamiltonians -----------------------------------

double effective_coupling(const NetworkConfig& cfg)
{
    if (!(cfg.J > 0.0)) throw std::invalid_argument("effective_coupling: J must be positive");
    const double d = cfg.delta();
    if (!(d > 0.0)) throw std::invalid_argument("effective_coupling: detuning must be positive");
    return cfg.J * cfg.J / (2.0 * d);
}

Operator build_effective_chain_hamiltonian(const NetworkConfig& cfg)
{
    cfg.validate();
    const double lambda = effective_coupling(cfg);
    const int n = cfg.sites_per_chain;
    const int dim = 1 << n;
    Matrix h = Matrix::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        // each site picks up one level shift per attached fiber
        const double weight = (i == 0 || i == n - 1) ? 1.0 : 2.0;
        h += weight * lambda * qla::embed(qla::excited_projector(), i, n);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const Matrix up_i = qla::embed(qla::raising(), i, n);
        const Matrix down_j = qla::embed(qla::lowering(), i + 1, n);
        const Matrix hop = up_i * down_j;
        h += lambda * (hop + hop.adjoint());
    }
    return Operator(std::move(h), qla::Dims(n, 2));
}

Operator build_network_hamiltonian(const NetworkConfig& cfg)
{
    if (cfg.num_chains != 2) throw std::invalid_argument("build_network_hamiltonian: num_chains must be 2");
    const Operator chain = build_effective_chain_hamiltonian(cfg);
    const Operator id = Operator::identity(chain.dims());
    const Operator a = qla::tensor(chain, id);
    const Operator b = qla::tensor(id, chain);
    return Operator(a.matrix() + b.matrix(), a.dims());
}

int FullChainModel::index_of(const FullBasisState& s) const
{
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].polaritons == s.polaritons && basis[i].fibers == s.fibers) return static_cast<int>(i);
    }
    return -1;
}

FullChainModel build_full_chain_hamiltonian(const NetworkConfig& cfg, int excitation_cap)
{
    if (excitation_cap < 1) throw std::invalid_argument("build_full_chain_hamiltonian: excitation cap must be >= 1");
    cfg.validate();
    const int n = cfg.sites_per_chain;
    const int nf = n - 1;

    // Enumerate by total excitation, then polariton bits, then fiber counts.
    FullChainModel model;
    for (int total = 0; total <= excitation_cap; ++total) {
        for (int bits = 0; bits < (1 << n); ++bits) {
            std::vector<int> pol(n);
            int npol = 0;
            for (int i = 0; i < n; ++i) {
                pol[i] = (bits >> (n - 1 - i)) & 1;
                npol += pol[i];
            }
            if (npol > total) continue;
            const int photons = total - npol;
            // all compositions of `photons` into nf fiber modes, lexicographic
            std::vector<int> fib(nf, 0);
            std::vector<std::vector<int>> comps;
            auto rec = [&](auto&& self, int k, int left) -> void {
                if (k == nf - 1) {
                    fib[k] = left;
                    comps.push_back(fib);
                    return;
                }
                for (int m = left; m >= 0; --m) {
                    fib[k] = m;
                    self(self, k + 1, left - m);
                }
            };
            if (nf > 0) rec(rec, 0, photons);
            else if (photons == 0) comps.push_back({});
            for (auto& c : comps) model.basis.push_back({pol, c});
        }
    }

    const int dim = static_cast<int>(model.basis.size());
    const double polariton_energy = cfg.omega - cfg.nu;
    const double g = cfg.J / std::numbers::sqrt2;
    Matrix h = Matrix::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) {
        const auto& st = model.basis[s];
        double e = 0.0;
        for (int p : st.polaritons) e += p * polariton_energy;
        for (int m : st.fibers) e += m * cfg.omega_f;
        h(s, s) = e;
        // (L_i^† + L_{i+1}^†) b_i + h.c.: move a fiber photon onto an adjacent site
        for (int f = 0; f < nf; ++f) {
            if (st.fibers[f] == 0) continue;
            for (int site : {f, f + 1}) {
                if (st.polaritons[site] == 1) continue;
                FullBasisState to = st;
                to.fibers[f] -= 1;
                to.polaritons[site] = 1;
                const int t = model.index_of(to);
                if (t < 0) continue;
                const double amp = g * std::sqrt(static_cast<double>(st.fibers[f]));
                h(t, s) += amp;
                h(s, t) += amp;
            }
        }
    }
    model.hamiltonian = Operator(std::move(h));
    return model;
}

Matrix excitation_number(int n_qubits)
{
    const int dim = 1 << n_qubits;
    Matrix m = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) m(i, i) = static_cast<double>(std::popcount(static_cast<unsigned>(i)));
    return m;
}

Matrix chain_swap(int sites_per_chain)
{
    const int half = 1 << sites_per_chain;
    const int dim = half * half;
    Matrix p = Matrix::Zero(dim, dim);
    for (int a = 0; a < half; ++a) {
        for (int b = 0; b < half; ++b) p(b * half + a, a * half + b) = 1.0;
    }
    return p;
}

// --------------------------- labels -----------------------------------------

int map_paper_index(std::string_view label, int sites_per_chain)
{
    const int n = sites_per_chain;
    if (static_cast<int>(label.size()) != 2 * n) {
        throw std::invalid_argument("map_paper_index: label must have " + std::to_string(2 * n) + " characters");
    }
    int chain1 = 0, chain2 = 0;
    for (int k = 0; k < 2 * n; ++k) {
        const char c = label[k];
        if (c != 'G' && c != 'E') throw std::invalid_argument("map_paper_index: label characters must be G or E");
        const int bit = c == 'E' ? 1 : 0;
        if (k % 2 == 0) chain1 = (chain1 << 1) | bit;
        else chain2 = (chain2 << 1) | bit;
    }
    return (chain1 << n) | chain2;
}

std::string paper_label(int index, int sites_per_chain)
{
    const int n = sites_per_chain;
    if (index < 0 || index >= (1 << (2 * n))) throw std::out_of_range("paper_label: index out of range");
    std::string out(2 * n, 'G');
    for (int s = 0; s < n; ++s) {
        if ((index >> (2 * n - 1 - s)) & 1) out[2 * s] = 'E';
        if ((index >> (n - 1 - s)) & 1) out[2 * s + 1] = 'E';
    }
    return out;
}

int site_index(std::string_view cavity, int sites_per_chain)
{
    if (cavity.empty()) throw std::invalid_argument("site_index: empty cavity label");
    const bool primed = cavity.back() == '\'';
    const std::string_view digits = primed ? cavity.substr(0, cavity.size() - 1) : cavity;
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("site_index: malformed cavity label '" + std::string(cavity) + "'");
    }
    const int site = std::stoi(std::string(digits));
    if (site < 1 || site > sites_per_chain) throw std::out_of_range("site_index: cavity number out of range");
    return (primed ? sites_per_chain : 0) + site - 1;
}

std::pair<int, int> pair_indices(std::string_view pair, int sites_per_chain)
{
    // split after the first cavity token (digit plus optional prime)
    if (pair.size() < 2) throw std::invalid_argument("pair_indices: malformed pair label");
    const std::size_t cut = (pair.size() > 1 && pair[1] == '\'') ? 2 : 1;
    const int a = site_index(pair.substr(0, cut), sites_per_chain);
    const int b = site_index(pair.substr(cut), sites_per_chain);
    if (a == b) throw std::invalid_argument("pair_indices: pair members must differ");
    return {a, b};
}

// --------------------------- initial states ---------------------------------

DensityMatrix state_from_labels(const std::vector<std::pair<std::string, cplx>>& terms, int sites_per_chain)
{
    const int n_qubits = 2 * sites_per_chain;
    Vector v = Vector::Zero(1 << n_qubits);
    for (const auto& [label, amp] : terms) v(map_paper_index(label, sites_per_chain)) += amp;
    return DensityMatrix::from_pure(qla::PureState::normalized(v, qla::Dims(n_qubits, 2)));
}

DensityMatrix werner_state(double p)
{
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("werner_state: p must lie in [0, 1]");
    Vector phi = Vector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::numbers::sqrt2;
    Matrix m = p * phi * phi.adjoint() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
    return DensityMatrix(Operator(std::move(m), {2, 2}));
}

qla::PureState chain_dark_state(int sites_per_chain)
{
    // null vector of the hopping matrix: amplitudes (1, -1, 1, -1, ...)
    const int n = sites_per_chain;
    Vector v = Vector::Zero(1 << n);
    for (int i = 0; i < n; ++i) v(1 << (n - 1 - i)) = (i % 2 == 0) ? 1.0 : -1.0;
    return qla::PureState::normalized(v, qla::Dims(n, 2));
}

DensityMatrix build_initial_state(const InitialStateSpec& spec, const NetworkConfig& cfg)
{
    const int n = cfg.sites_per_chain;
    const auto check_theta = [&] {
        if (spec.theta < 0.0 || spec.theta > std::numbers::pi / 2 + 1e-12) {
            throw std::invalid_argument("build_initial_state: theta must lie in [0, pi/2]");
        }
    };
    // interleaved label with the given cavities excited
    const auto label = [n](std::initializer_list<int> excited) {
        std::string s(2 * n, 'G');
        for (int k : excited) s[k] = 'E';
        return s;
    };

    switch (spec.kind) {
    case InitialKind::psi_a:
        check_theta();
        return state_from_labels({{label({1}), std::sin(spec.theta)}, {label({0}), std::cos(spec.theta)}}, n);
    case InitialKind::psi_b:
        check_theta();
        return state_from_labels({{label({}), std::sin(spec.theta)}, {label({0, 1}), std::cos(spec.theta)}}, n);
    case InitialKind::rho_eq20: {
        // ½|EE><EE| + ½|GG><GG| + ½(|EE><GG| + |GG><EE|) on cavities 1, 1'
        Matrix m = Matrix::Zero(1 << (2 * n), 1 << (2 * n));
        const int ee = map_paper_index(label({0, 1}), n);
        const int gg = map_paper_index(label({}), n);
        m(ee, ee) = 0.5;
        m(gg, gg) = 0.5;
        m(ee, gg) = 0.5;
        m(gg, ee) = 0.5;
        return DensityMatrix(Operator(std::move(m), qla::Dims(2 * n, 2)));
    }
    case InitialKind::psi1_chain: {
        Vector v = Vector::Zero(1 << n);
        v(1 << (n - 1)) = 1.0;  // |E G ... G>
        v(1) = 1.0;             // |G ... G E>
        return DensityMatrix::from_pure(qla::PureState::normalized(v, qla::Dims(n, 2)));
    }
    case InitialKind::psi2_chain: {
        Vector v = Vector::Zero(1 << n);
        v(1 << (n - 1)) = 1.0;
        return DensityMatrix::from_pure(qla::PureState(v, qla::Dims(n, 2)));
    }
    case InitialKind::custom:
        if (!spec.custom) throw std::invalid_argument("build_initial_state: custom kind requires a payload");
        return DensityMatrix(spec.custom->op());
    }
    throw std::invalid_argument("build_initial_state: unknown kind");
}

}  // namespace cqnet::model
