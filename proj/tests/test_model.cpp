#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cqnet/correlations.hpp"
#include "cqnet/model.hpp"
#include "support.hpp"

#include <array>
#include <cmath>
#include <set>

using namespace cqnet;
using model::InitialKind;
using model::NetworkConfig;
using qla::Matrix;
using qla::Vector;
using support::kPi;
using support::Rng;

namespace {

double eigen_min(const Matrix& m) { return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff(); }

// Eigenvalues of H restricted to the sector with `k` excitations.
std::vector<double> sector_spectrum(const Matrix& h, int n, int k)
{
    std::vector<int> idx;
    for (int i = 0; i < (1 << n); ++i)
        if (std::popcount(static_cast<unsigned>(i)) == k) idx.push_back(i);
    Matrix block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = h(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(block);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace

TEST_CASE("effective coupling")
{
    NetworkConfig cfg;
    CHECK(model::effective_coupling(cfg) == doctest::Approx(3.0 * kPi).epsilon(1e-12));
    NetworkConfig zero = cfg;
    zero.J = 0.0;
    CHECK_THROWS_AS(model::effective_coupling(zero), std::invalid_argument);
    NetworkConfig doubled = cfg;
    doubled.J *= 2.0;
    CHECK(model::effective_coupling(doubled) == doctest::Approx(4.0 * model::effective_coupling(cfg)));
    NetworkConfig negative = cfg;
    negative.omega_f = cfg.omega;
    CHECK_THROWS_AS(model::effective_coupling(negative), std::invalid_argument);
}

TEST_CASE("config validation")
{
    NetworkConfig cfg;
    CHECK(cfg.validate().empty());
    NetworkConfig close = cfg;
    close.omega_f = cfg.omega - cfg.nu - 3.0 * cfg.J;  // δ = 3J: allowed with a warning
    CHECK(close.validate().size() == 1);
    NetworkConfig bad = cfg;
    bad.omega_f = cfg.omega - cfg.nu - cfg.J;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.gamma = {-0.1};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.gamma = {0.1, 0.2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.sites_per_chain = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    NetworkConfig fiber = cfg;
    fiber.fiber_length = 1.0;
    fiber.fiber_continuum_decay = 1.0;
    CHECK(fiber.validate().size() == 1);

    NetworkConfig units = cfg.with_gamma(0.5, model::GammaUnits::lambda);
    CHECK(units.rate(4) == doctest::Approx(0.5 * model::effective_coupling(cfg)));
    NetworkConfig per_site = cfg;
    per_site.gamma = {0.1, 0.2, 0.3};
    CHECK(per_site.rate(4) == doctest::Approx(0.2));
    CHECK_THROWS_AS((void)per_site.rate(6), std::out_of_range);
}

TEST_CASE("chain Hamiltonian spectrum and structure")
{
    NetworkConfig cfg;
    const double lam = model::effective_coupling(cfg);
    const Matrix h = model::build_effective_chain_hamiltonian(cfg).matrix();
    const std::vector<std::vector<double>> expected{{0.0}, {0.0, 1.0, 3.0}, {1.0, 3.0, 4.0}, {4.0}};
    for (int k = 0; k <= 3; ++k) {
        const auto got = sector_spectrum(h, 3, k);
        REQUIRE(got.size() == expected[k].size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] / lam - expected[k][i]) < 1e-10);
    }
    // |EEE> is an eigenstate with energy 4λ
    Vector eee = Vector::Zero(8);
    eee(7) = 1.0;
    CHECK(support::max_abs(h * eee - 4.0 * lam * eee) < 1e-12);
    CHECK(support::max_abs(h - h.adjoint()) < 1e-15);
    CHECK(support::max_abs(qla::commutator(h, model::excitation_number(3))) < 1e-12);
}

TEST_CASE("general chain length keeps the end/interior pattern")
{
    NetworkConfig cfg;
    cfg.sites_per_chain = 4;
    const double lam = model::effective_coupling(cfg);
    const Matrix h = model::build_effective_chain_hamiltonian(cfg).matrix();
    CHECK(h(8, 8).real() == doctest::Approx(lam));       // |EGGG>
    CHECK(h(4, 4).real() == doctest::Approx(2.0 * lam));  // |GEGG>
    CHECK(support::max_abs(qla::commutator(h, model::excitation_number(4))) < 1e-12);
}

TEST_CASE("network Hamiltonian")
{
    NetworkConfig cfg;
    const double lam = model::effective_coupling(cfg);
    const Matrix h = model::build_network_hamiltonian(cfg).matrix();
    CHECK(h.rows() == 64);
    CHECK(std::abs(h(0, 0)) < 1e-15);
    CHECK(support::max_abs(qla::commutator(h, model::chain_swap(3))) < 1e-12);

    // spectrum is the Minkowski sum of the chain spectra
    const std::vector<double> chain{0, 0, 1, 3, 1, 3, 4, 4};
    std::vector<double> sums;
    for (double a : chain)
        for (double b : chain) sums.push_back(a + b);
    std::sort(sums.begin(), sums.end());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(es.eigenvalues()(i) / lam - sums[i]) < 1e-10);
}

TEST_CASE("product states stay product under network unitary evolution")
{
    Rng rng(21);
    NetworkConfig cfg;
    const Matrix h = model::build_network_hamiltonian(cfg).matrix();
    for (int c = 0; c < 20; ++c) {
        const Vector a = rng.pure(8), b = rng.pure(8);
        const Matrix rho0 = support::projector(support::kron(a, b));
        const Matrix u = support::expm(qla::cplx(0.0, -rng.uniform(0.0, 1.0)) * h);
        const Matrix rho = u * rho0 * u.adjoint();
        const std::array<int, 3> first{0, 1, 2};
        const Matrix r1 = qla::partial_trace(rho, qla::Dims(6, 2), first);
        CHECK(std::abs((r1 * r1).trace().real() - 1.0) < 1e-9);
    }
}

TEST_CASE("full chain model")
{
    NetworkConfig cfg;
    CHECK_THROWS_AS(model::build_full_chain_hamiltonian(cfg, 0), std::invalid_argument);
    const auto full = model::build_full_chain_hamiltonian(cfg, 1);
    CHECK(full.hamiltonian.dim() == 6);
    const auto two = model::build_full_chain_hamiltonian(cfg, 2);
    // total excitation operator commutes
    Matrix n = Matrix::Zero(two.hamiltonian.dim(), two.hamiltonian.dim());
    for (std::size_t i = 0; i < two.basis.size(); ++i) {
        int total = 0;
        for (int p : two.basis[i].polaritons) total += p;
        for (int f : two.basis[i].fibers) total += f;
        n(i, i) = total;
    }
    CHECK(support::max_abs(qla::commutator(two.hamiltonian.matrix(), n)) < 1e-9);
}

namespace {

// max over λt ∈ [0, 2π/3] of |P3_full − P3_effective|
double transfer_deviation(const NetworkConfig& cfg)
{
    const auto full = model::build_full_chain_hamiltonian(cfg, 1);
    const double lam = model::effective_coupling(cfg);
    const int from = full.index_of({{1, 0, 0}, {0, 0}});
    const int to = full.index_of({{0, 0, 1}, {0, 0}});
    double worst = 0.0;
    const Matrix h = full.hamiltonian.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    for (int k = 0; k <= 200; ++k) {
        const double x = (2.0 * kPi / 3.0) * k / 200.0;
        const double t = x / lam;
        Vector phase(es.eigenvalues().size());
        for (int i = 0; i < phase.size(); ++i) phase(i) = std::exp(qla::cplx(0.0, -es.eigenvalues()(i) * t));
        const Matrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
        const double p_full = std::norm(u(to, from));
        const double p_eff = std::norm(support::amp_1_to_3(x));
        worst = std::max(worst, std::abs(p_full - p_eff));
    }
    return worst;
}

}  // namespace

TEST_CASE("full model converges to the effective chain")
{
    NetworkConfig cfg;  // J/δ = 0.1
    CHECK(cfg.J / cfg.delta() == doctest::Approx(0.1));
    const double dev1 = transfer_deviation(cfg);
    CHECK(dev1 < 0.05);

    NetworkConfig finer = cfg;  // J/δ halved at fixed λ
    finer.J = 2.0 * cfg.J;
    finer.omega_f = (cfg.omega - cfg.nu) - 4.0 * cfg.delta();
    CHECK(model::effective_coupling(finer) == doctest::Approx(model::effective_coupling(cfg)));
    const double dev2 = transfer_deviation(finer);
    MESSAGE("deviation at J/delta 0.1: " << dev1 << ", at 0.05: " << dev2);
    CHECK(dev2 * 2.0 <= dev1);
}

TEST_CASE("interleaved labels")
{
    CHECK(model::map_paper_index("GGGGGG") == 0);
    CHECK(model::map_paper_index("EGGGGG") == 32);  // chain-1 site 1
    CHECK(model::map_paper_index("GEGGGG") == 4);   // chain-2 site 1
    CHECK(model::map_paper_index("GGGGGE") == 1);   // cavity 3'
    CHECK_THROWS_AS(model::map_paper_index("EGG"), std::invalid_argument);
    CHECK_THROWS_AS(model::map_paper_index("EGGGGX"), std::invalid_argument);

    std::set<int> seen;
    for (int i = 0; i < 64; ++i) {
        const std::string label = model::paper_label(i);
        CHECK(model::map_paper_index(label) == i);
        seen.insert(model::map_paper_index(label));
    }
    CHECK(seen.size() == 64);

    CHECK(model::site_index("1") == 0);
    CHECK(model::site_index("3") == 2);
    CHECK(model::site_index("1'") == 3);
    CHECK(model::site_index("2'") == 4);
    CHECK_THROWS(model::site_index("4"));
    CHECK(model::pair_indices("21'") == std::pair<int, int>{1, 3});
    CHECK(model::pair_indices("33'") == std::pair<int, int>{2, 5});
    CHECK_THROWS(model::pair_indices("11"));
}

TEST_CASE("initial states")
{
    NetworkConfig cfg;
    const auto p11 = model::pair_indices("11'");
    const std::array<int, 2> k11{p11.first, p11.second};

    const auto a = model::build_initial_state({InitialKind::psi_a, kPi / 4, std::nullopt}, cfg);
    CHECK(corr::concurrence(qla::reduce(a, k11)) == doctest::Approx(1.0).epsilon(1e-9));

    const auto a0 = model::build_initial_state({InitialKind::psi_a, 0.0, std::nullopt}, cfg);
    CHECK(std::abs(a0.matrix()(model::map_paper_index("EGGGGG"), model::map_paper_index("EGGGGG")) - 1.0) < 1e-15);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const std::array<int, 2> k{i, j};
            CHECK(corr::concurrence(qla::reduce(a0, k)) < 1e-12);
        }

    const auto eq20 = model::build_initial_state({InitialKind::rho_eq20, 0.0, std::nullopt}, cfg);
    CHECK(qla::purity(eq20) == doctest::Approx(1.0));
    CHECK(corr::concurrence(qla::reduce(eq20, k11)) == doctest::Approx(1.0).epsilon(1e-9));

    const auto p1 = model::build_initial_state({InitialKind::psi1_chain, 0.0, std::nullopt}, cfg.single_chain());
    CHECK(p1.dim() == 8);
    CHECK(p1.matrix()(4, 1).real() == doctest::Approx(0.5));
    const auto p2 = model::build_initial_state({InitialKind::psi2_chain, 0.0, std::nullopt}, cfg.single_chain());
    CHECK(p2.matrix()(4, 4).real() == doctest::Approx(1.0));

    CHECK_THROWS_AS(model::build_initial_state({InitialKind::psi_a, 2.0, std::nullopt}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(model::build_initial_state({InitialKind::custom, 0.0, std::nullopt}, cfg), std::invalid_argument);

    const auto w = model::werner_state(0.4);
    CHECK(w.matrix()(0, 3).real() == doctest::Approx(0.2));
    CHECK_THROWS(model::werner_state(1.5));

    const auto d = model::chain_dark_state(3);
    CHECK(d.amplitudes()(4).real() == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(d.amplitudes()(2).real() == doctest::Approx(-1.0 / std::sqrt(3.0)));
    CHECK(eigen_min(p1.matrix()) > -1e-12);

    CHECK(model::parse_initial_kind("psi_b") == InitialKind::psi_b);
    CHECK(model::to_string(InitialKind::rho_eq20) == "rho_eq20");
    CHECK_THROWS(model::parse_initial_kind("psi_z"));
}
