// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "cqnet/correlations.hpp"
#include "cqnet/davies.hpp"
#include "cqnet/dynamics.hpp"
#include "cqnet/model.hpp"
#include "cqnet/runner.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace cqnet;
using model::GammaUnits;
using model::InitialKind;
using model::NetworkConfig;
using qla::DensityMatrix;
using qla::Matrix;
using support::kPi;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail)
{
    std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) { return runner::format_number(v); }

double lambda_of(const NetworkConfig& cfg) { return model::effective_coupling(cfg); }

davies::GeneratorSpec chain_spec(const NetworkConfig& cfg)
{
    const auto chain = cfg.single_chain();
    return davies::make_generator(model::build_effective_chain_hamiltonian(chain), chain);
}

davies::GeneratorSpec network_spec(const NetworkConfig& cfg)
{
    return davies::make_generator(model::build_network_hamiltonian(cfg), cfg);
}

NetworkConfig with_gamma(double g, GammaUnits units = GammaUnits::absolute)
{
    return NetworkConfig{}.with_gamma(g, units);
}

std::vector<double> column(const runner::Table& t, std::size_t col, const std::string& initial)
{
    std::vector<double> out;
    for (const auto& r : t.rows)
        if (r.initial == initial) out.push_back(r.values.at(col));
    return out;
}

std::vector<double> times_of(const runner::Table& t, const std::string& initial)
{
    std::vector<double> out;
    for (const auto& r : t.rows)
        if (r.initial == initial) out.push_back(r.lambda_t);
    return out;
}

double raw_tangle(const DensityMatrix& rho) { return corr::one_tangle(rho, 0) - corr::pairwise_concurrence_sq_sum(rho, 0); }

void criterion_1()
{
    const NetworkConfig cfg;
    const double lam = lambda_of(cfg);
    const Matrix h = model::build_effective_chain_hamiltonian(cfg.single_chain()).matrix();
    const std::vector<std::vector<double>> expected{{0.0}, {0.0, 1.0, 3.0}, {1.0, 3.0, 4.0}, {4.0}};
    double worst = 0.0;
    for (int k = 0; k <= 3; ++k) {
        std::vector<int> idx;
        for (int i = 0; i < 8; ++i)
            if (std::popcount(static_cast<unsigned>(i)) == k) idx.push_back(i);
        Matrix block(idx.size(), idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = h(idx[a], idx[b]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(block);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const double want = expected[k][j] * lam;
            worst = std::max(worst, std::abs(es.eigenvalues()(j) - want) / std::max(lam, std::abs(want)));
        }
    }
    report(1, "closed-form chain spectrum", worst <= 1e-10, "max relative error " + fmt(worst));
}

void criterion_2()
{
    runner::TransmissionOptions opts;
    opts.t_max_lambda = 4.0;
    opts.samples = 401;
    const auto t = runner::transmission_table({kPi / 8, kPi / 4, kPi / 3}, NetworkConfig{}, opts);
    bool pass = true;
    double lo = 1.0, hi = 0.0;
    std::ostringstream os;
    for (const auto& r : t.rows) {
        if (r.initial != "psi_a") continue;
        const double v = r.values[0];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        pass = pass && std::abs(v - 0.75) <= 1e-3 && std::abs(r.lambda_t - 2 * kPi / 3) <= 0.02;
        os << "ratio " << fmt(v) << " at lambda_t " << fmt(r.lambda_t) << "; ";
    }
    pass = pass && hi - lo < 0.005;
    os << "spread " << fmt(hi - lo);
    report(2, "lossless transmission", pass, os.str());
}

void criterion_3()
{
    runner::TransmissionOptions opts;
    opts.t_max_lambda = 4.0;
    opts.samples = 401;
    auto evaluate = [&](GammaUnits units, std::string& detail) {
        const auto t = runner::transmission_table({kPi / 8, kPi / 4, kPi / 3}, with_gamma(0.01, units), opts);
        const double a = t.rows[1].values[0];  // psi_a, θ = π/4
        const double b8 = t.rows[3].values[0];
        const double b3 = t.rows[5].values[0];
        detail = "psi_a " + fmt(a) + ", psi_b(pi/3) " + fmt(b3) + ", psi_b(pi/8) " + fmt(b8);
        return std::abs(a - 0.742) <= 0.010 && std::abs(b3 - 0.63) <= 0.03 && std::abs(b8 - 0.28) <= 0.03;
    };
    std::string abs_detail, lam_detail;
    const bool abs_pass = evaluate(GammaUnits::absolute, abs_detail);
    if (abs_pass) {
        report(3, "reference transmission numbers", true, "absolute gamma: " + abs_detail);
        return;
    }
    const bool lam_pass = evaluate(GammaUnits::lambda, lam_detail);
    report(3, "reference transmission numbers", lam_pass,
           "absolute gamma: " + abs_detail + " | gamma in units of lambda: " + lam_detail);
}

void criterion_4()
{
    const NetworkConfig cfg;
    const double lam = lambda_of(cfg);
    const auto spec = chain_spec(cfg);
    dynamics::ChainPropagator prop(spec, {}, lam);
    const auto times = dynamics::uniform_times(12.0, 241, lam);

    double worst_a = 0.0;
    for (double th : {kPi / 8, kPi / 4, kPi / 3}) {
        const auto a = dynamics::evolve_factorized(
            model::build_initial_state({InitialKind::psi_a, th, std::nullopt}, cfg), prop, times, {}, lam);
        for (const auto& s : a.states) worst_a = std::max(worst_a, std::abs(raw_tangle(s)));
    }

    double tau0_b = 0.0;
    std::vector<double> peaks;
    for (double th : {kPi / 4, kPi / 3, kPi / 8}) {
        const auto b = dynamics::evolve_factorized(
            model::build_initial_state({InitialKind::psi_b, th, std::nullopt}, cfg), prop, times, {}, lam);
        tau0_b = std::max(tau0_b, std::abs(raw_tangle(b.states.front())));
        const auto series = dynamics::scalar_series(b, raw_tangle);
        peaks.push_back(runner::interpolated_max(series, b.lambda_times).second);
    }
    const bool pass = worst_a <= 1e-8 && tau0_b <= 1e-8 && peaks[0] > peaks[1] && peaks[1] > peaks[2];
    report(4, "tangle claims", pass,
           "max |tau| psi_a " + fmt(worst_a) + ", |tau(0)| psi_b " + fmt(tau0_b) + ", max tau psi_b pi/4 " +
               fmt(peaks[0]) + " pi/3 " + fmt(peaks[1]) + " pi/8 " + fmt(peaks[2]));
}

void criterion_5()
{
    auto s = runner::scenario_preset("fig8");
    s.samples = 601;
    const auto t = runner::run_scenario(s, NetworkConfig{});
    bool ordered = true;
    double pmin = 1.0, pmax = 0.0;
    for (const auto& r : t.rows) {
        ordered = ordered && r.values[1] <= r.values[0] + 1e-12;
        pmin = std::min(pmin, r.values[2]);
        pmax = std::max(pmax, r.values[2]);
    }
    const bool pass = ordered && pmin >= 0.86 && pmax <= 1.0 + 1e-9;
    report(5, "bounds sandwich", pass,
           std::string("lower <= upper ") + (ordered ? "everywhere" : "violated") + ", purity in [" + fmt(pmin) + ", " +
               fmt(pmax) + "]");
}

void criterion_6()
{
    const auto cfg = with_gamma(0.5).single_chain();
    const double lam = lambda_of(cfg);
    const auto h = model::build_effective_chain_hamiltonian(cfg);
    const auto freqs = davies::bohr_frequencies(qla::hermitian_eigendecomposition(h));
    bool freq_ok = freqs.size() == 4;
    for (std::size_t k = 0; freq_ok && k < 4; ++k) freq_ok = std::abs(freqs[k] / lam - double(k + 1)) < 1e-9;

    const auto dark = model::chain_dark_state(3);
    const auto rho0 = DensityMatrix::from_pure(dark);
    const auto times = dynamics::uniform_times(20.0, 201, lam);
    const auto davies_traj = dynamics::evolve(rho0, davies::make_generator(h, cfg), times, {}, lam);
    double drift = 0.0;
    for (const auto& s : davies_traj.states) drift = std::max(drift, support::max_abs(s.matrix() - rho0.matrix()));

    const davies::GeneratorSpec local{h, davies::build_local_channels(h, cfg)};
    const auto local_traj = dynamics::evolve(rho0, local, times, {}, lam);
    const auto& d = dark.amplitudes();
    const double final_pop = (d.adjoint() * local_traj.states.back().matrix() * d)(0, 0).real();

    const bool pass = freq_ok && drift <= 1e-7 && 1.0 - final_pop > 0.10;
    std::string fs;
    for (double f : freqs) fs += fmt(f / lam) + " ";
    report(6, "Davies structure", pass,
           "Bohr frequencies / lambda { " + fs + "}, dark-state drift " + fmt(drift) +
               ", local-model dark population " + fmt(final_pop));
}

void criterion_7()
{
    const NetworkConfig lossless;
    const double lam = lambda_of(lossless);
    const auto rho_b = model::build_initial_state({InitialKind::psi_b, kPi / 5, std::nullopt}, lossless);
    const auto times = dynamics::uniform_times(2.0, 5, lam);
    const auto traj = dynamics::evolve(rho_b, network_spec(lossless), times, {}, lam);
    const Matrix h = model::build_network_hamiltonian(lossless).matrix();
    double expm_err = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Matrix u = support::expm(qla::cplx(0.0, -times[i]) * h);
        expm_err = std::max(expm_err, support::max_abs(traj.states[i].matrix() - u * rho_b.matrix() * u.adjoint()));
    }

    const auto lossy = with_gamma(0.01);
    const auto rho_l = model::build_initial_state({InitialKind::psi_b, kPi / 4, std::nullopt}, lossy);
    const auto lt = dynamics::uniform_times(2.0, 21, lam);
    const auto direct = dynamics::evolve(rho_l, network_spec(lossy), lt, {}, lam);
    const auto fact = dynamics::evolve_factorized(rho_l, chain_spec(lossy), lt, {}, lam);
    double fact_err = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i)
        fact_err = std::max(fact_err, support::max_abs(direct.states[i].matrix() - fact.states[i].matrix()));

    double luo_err = 0.0;
    for (double p = 0.05; p <= 1.0; p += 0.05)
        luo_err = std::max(luo_err, std::abs(corr::quantum_discord(model::werner_state(p)) - support::werner_discord(p)));

    const auto chain = lossless.single_chain();
    double delta_err = 0.0;
    for (auto kind : {InitialKind::psi1_chain, InitialKind::psi2_chain}) {
        const auto c = dynamics::evolve(model::build_initial_state({kind, 0.0, std::nullopt}, chain), chain_spec(lossless),
                                        dynamics::uniform_times(12.0, 61, lam), {}, lam);
        for (const auto& s : c.states) delta_err = std::max(delta_err, std::abs(corr::delta_fanchini(s).delta));
    }

    const bool pass = expm_err <= 1e-8 && fact_err <= 1e-8 && luo_err <= 1e-6 && delta_err <= 1e-5;
    report(7, "oracle equivalences", pass,
           "expm " + fmt(expm_err) + ", factorized " + fmt(fact_err) + ", Werner discord " + fmt(luo_err) +
               ", |delta| pure " + fmt(delta_err));
}

void criterion_8()
{
    const std::vector<std::pair<const char*, const char*>> suites{
        {"qla", CQNET_TEST_QLA}, {"davies", CQNET_TEST_DAVIES}, {"dynamics", CQNET_TEST_DYNAMICS},
        {"correlations", CQNET_TEST_CORRELATIONS}};
    bool pass = true;
    std::string detail;
    for (const auto& [name, path] : suites) {
        const std::string cmd = std::string(path) + " --test-case='property:*' --minimal > /dev/null 2>&1";
        const bool ok = std::system(cmd.c_str()) == 0;
        pass = pass && ok;
        detail += std::string(name) + (ok ? " ok " : " FAILED ");
    }
    report(8, "measure sanity suite", pass, detail);
}

void criterion_9()
{
    // fig5 scenario: rise order and late-time dominance of discord
    auto f5 = runner::scenario_preset("fig5");
    f5.samples = 401;
    const auto t5 = runner::run_scenario(f5, NetworkConfig{});
    bool fig5 = true;
    std::ostringstream os;
    for (double g : f5.gamma_list) {
        std::vector<double> e, q, lt;
        for (const auto& r : t5.rows)
            if (r.gamma == g) {
                e.push_back(r.values[0]);
                q.push_back(r.values[1]);
                lt.push_back(r.lambda_t);
            }
        auto first_above = [&](const std::vector<double>& v) {
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v[i] > 1e-4) return lt[i];
            return std::numeric_limits<double>::infinity();
        };
        double late = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lt.size(); ++i)
            if (lt[i] > 10.0) late = std::min(late, q[i] - e[i]);
        const double rq = first_above(q), re = first_above(e);
        fig5 = fig5 && rq < re && late >= -1e-6;
        os << "fig5 gamma " << fmt(g) << ": Q rises at " << fmt(rq) << ", E at " << fmt(re) << ", late min(Q-E) "
           << fmt(late) << "; ";
    }

    // fig3 scenario: zero of 4 det rho_2 at the transfer time
    const NetworkConfig cfg;
    const double lam = lambda_of(cfg);
    dynamics::ChainPropagator prop(chain_spec(cfg), {}, lam);
    const auto rho_a = model::build_initial_state({InitialKind::psi_a, kPi / 4, std::nullopt}, cfg);
    const auto coarse = dynamics::evolve_factorized(rho_a, prop, dynamics::uniform_times(12.0, 1201, lam), {}, lam);
    const auto d2 = dynamics::scalar_series(coarse, [](const DensityMatrix& r) { return corr::one_tangle(r, 1); });
    // 4 det rho_2 vanishes at every multiple of 2π/3; take the first interior minimum
    std::size_t at = 1;
    while (at + 1 < d2.size() && !(d2[at] <= d2[at - 1] && d2[at] <= d2[at + 1])) ++at;
    std::vector<double> fine{0.0};
    for (int k = -100; k <= 100; ++k) fine.push_back((coarse.lambda_times[at] + 1e-4 * k) / lam);
    const auto refined = dynamics::evolve_factorized(rho_a, prop, fine, {}, lam);
    const auto d2f = dynamics::scalar_series(refined, [](const DensityMatrix& r) { return corr::one_tangle(r, 1); });
    const auto atf = std::min_element(d2f.begin() + 1, d2f.end()) - d2f.begin();
    const double min_d2 = d2f[atf];
    const double t_min = refined.lambda_times[atf];
    const bool fig3 = min_d2 < 1e-6 && std::abs(t_min - 2 * kPi / 3) <= 0.02;
    os << "fig3 min 4det(rho_2) " << fmt(min_d2) << " at " << fmt(t_min) << "; ";

    // fig9 scenario: positive peak of delta followed by a negative excursion
    auto f9 = runner::scenario_preset("fig9");
    f9.samples = 601;
    const auto t9 = runner::run_scenario(f9, NetworkConfig{});
    bool fig9 = true;
    for (const char* name : {"psi1_chain", "psi2_chain"}) {
        const auto d = column(t9, 0, name);
        const auto lt = times_of(t9, name);
        const auto peaks = runner::peak_sequence({d}, lt);
        bool found = false;
        double peak_t = 0.0, peak_v = 0.0, neg_v = 0.0;
        for (const auto& p : peaks) {
            double lowest = 0.0;
            for (std::size_t i = 0; i < lt.size(); ++i)
                if (lt[i] > p.time_lambda) lowest = std::min(lowest, d[i]);
            if (p.value > 0.0 && lowest < -1e-6) {
                found = true;
                peak_t = p.time_lambda;
                peak_v = p.value;
                neg_v = lowest;
                break;
            }
        }
        fig9 = fig9 && found;
        os << "fig9 " << name << (found ? ": peak " + fmt(peak_v) + " at " + fmt(peak_t) + " then " + fmt(neg_v)
                                        : std::string(": no positive peak followed by a negative value"))
           << "; ";
    }
    report(9, "qualitative figure properties", fig5 && fig3 && fig9, os.str());
}

}  // namespace

int main()
{
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9();
    } catch (const std::exception& e) {
        std::printf("[FAIL] aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
