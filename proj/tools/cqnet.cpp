// cqnet command line front end

#include "cqnet/config.hpp"
#include "cqnet/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace cqnet;

namespace {

struct Options {
    std::string config_path;
    std::string scenario;
    std::string initial;
    std::vector<std::string> theta;
    std::optional<std::string> gamma;
    std::optional<std::string> gamma_units;
    std::optional<std::string> kappa;
    std::optional<std::string> t_max_lambda;
    std::optional<int> samples;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> columns;
    bool single_chain = false;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config_path, "INI file with [network], [integrator], [scenario]");
    cmd->add_option("--theta", o.theta, "Initial-state angle in rad (repeatable, accepts pi/4)");
    cmd->add_option("--gamma", o.gamma, "Decay rate");
    cmd->add_option("--gamma-units", o.gamma_units, "abs or lambda")->check(CLI::IsMember({"abs", "lambda"}));
    cmd->add_option("--kappa", o.kappa, "Polariton matrix element of the cavity field");
    cmd->add_option("--tmax-lambda", o.t_max_lambda, "Window end in units of 1/lambda");
    cmd->add_option("--samples", o.samples, "Number of sample times");
    cmd->add_option("--out", o.out, "Output file (default stdout)");
    cmd->add_option("--format", o.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
}

struct Resolved {
    model::NetworkConfig network;
    dynamics::IntegratorConfig integrator;
    config::ScenarioOverrides scenario;
    std::string format = "csv";
};

Resolved resolve(const Options& o)
{
    Resolved r;
    if (!o.config_path.empty()) {
        auto file = config::load_config(o.config_path);
        r.network = file.network;
        r.integrator = file.integrator;
        r.scenario = file.scenario;
    }
    auto& s = r.scenario;
    if (!o.scenario.empty()) s.name = o.scenario;
    if (!o.initial.empty()) s.initial = o.initial;
    if (!o.theta.empty()) {
        s.theta.clear();
        for (const auto& t : o.theta) s.theta.push_back(config::parse_number(t));
    }
    if (o.gamma) s.gamma = config::parse_number_list(*o.gamma);
    if (o.gamma_units) r.network.gamma_units = config::parse_gamma_units(*o.gamma_units);
    if (o.kappa) r.network.kappa = config::parse_number(*o.kappa);
    if (o.t_max_lambda) s.t_max_lambda = config::parse_number(*o.t_max_lambda);
    if (o.samples) s.samples = *o.samples;
    if (o.out) s.out = *o.out;
    if (o.format) s.format = *o.format;
    if (o.columns) {
        s.columns.clear();
        std::stringstream ss(*o.columns);
        std::string item;
        while (std::getline(ss, item, ',')) s.columns.push_back(item);
    }
    if (o.single_chain) s.single_chain = true;
    if (s.format) r.format = *s.format;
    if (r.format != "csv" && r.format != "jsonl") throw std::invalid_argument("format must be csv or jsonl");
    r.integrator.validate();
    return r;
}

void apply_overrides(runner::ScenarioSpec& spec, const Resolved& r)
{
    const auto& s = r.scenario;
    if (!s.theta.empty()) spec.theta_list = s.theta;
    if (!s.gamma.empty()) spec.gamma_list = s.gamma;
    spec.gamma_units = r.network.gamma_units;
    if (s.t_max_lambda) spec.t_max_lambda = *s.t_max_lambda;
    if (s.samples) spec.samples = *s.samples;
    if (!s.columns.empty()) spec.columns = s.columns;
}

void emit(const runner::Table& table, const Resolved& r)
{
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (r.scenario.out && *r.scenario.out != "-") {
        file.open(*r.scenario.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file '" + *r.scenario.out + "'");
        out = &file;
    }
    if (r.format == "jsonl") runner::write_jsonl(*out, table);
    else runner::write_csv(*out, table);
}

void warn(const model::NetworkConfig& cfg)
{
    for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << '\n';
}

int run_simulate(const Options& o)
{
    const Resolved r = resolve(o);
    warn(r.network);
    runner::ScenarioSpec spec;
    spec.name = "custom";
    spec.single_chain = r.scenario.single_chain.value_or(false);
    const std::string initial = r.scenario.initial.value_or(spec.single_chain ? "psi1_chain" : "psi_a");
    spec.initials = {model::parse_initial_kind(initial)};
    spec.gamma_list = {r.network.gamma.front()};
    spec.columns = spec.single_chain ? std::vector<std::string>{"purity", "delta"}
                                     : std::vector<std::string>{"C_11'", "C_22'", "C_33'", "purity"};
    apply_overrides(spec, r);
    emit(runner::run_scenario(spec, r.network, r.integrator), r);
    return 0;
}

int run_named(const Options& o)
{
    const Resolved r = resolve(o);
    if (!r.scenario.name) throw std::invalid_argument("scenario: --scenario is required");
    warn(r.network);
    if (*r.scenario.name == "transmission") {
        runner::TransmissionOptions topt;
        topt.integrator = r.integrator;
        if (r.scenario.t_max_lambda) topt.t_max_lambda = *r.scenario.t_max_lambda;
        if (r.scenario.samples) topt.samples = *r.scenario.samples;
        auto cfg = r.network;
        if (!r.scenario.gamma.empty()) cfg = cfg.with_gamma(r.scenario.gamma.front(), cfg.gamma_units);
        const std::vector<double> thetas =
            r.scenario.theta.empty() ? std::vector<double>{0.39269908169872414, 0.7853981633974483, 1.0471975511965976}
                                     : r.scenario.theta;
        emit(runner::transmission_table(thetas, cfg, topt), r);
        return 0;
    }
    auto spec = runner::scenario_preset(*r.scenario.name);
    apply_overrides(spec, r);
    emit(runner::run_scenario(spec, r.network, r.integrator), r);
    return 0;
}

int run_transmission(Options o)
{
    o.scenario = "transmission";
    return run_named(o);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entanglement dynamics in coupled-cavity chain networks"};
    app.require_subcommand(1);

    Options sim_opts, scen_opts, trans_opts;
    auto* sim = app.add_subcommand("simulate", "Raw trajectory with selected measures");
    add_common(sim, sim_opts);
    sim->add_option("--initial", sim_opts.initial, "psi_a, psi_b, rho_eq20, psi1_chain or psi2_chain");
    sim->add_option("--columns", sim_opts.columns, "Comma separated measures, e.g. C_33',Q_21',tau1_2,purity");
    sim->add_flag("--single-chain", sim_opts.single_chain, "Evolve one chain instead of the two-chain network");

    auto* scen = app.add_subcommand("scenario", "Named figure scenario (fig2 ... fig9, transmission)");
    add_common(scen, scen_opts);
    scen->add_option("--scenario", scen_opts.scenario, "Scenario name");
    scen->add_option("--columns", scen_opts.columns, "Override the preset's measure columns");

    auto* trans = app.add_subcommand("transmission", "Concurrence transmission ratio table");
    add_common(trans, trans_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return run_simulate(sim_opts);
        if (*scen) return run_named(scen_opts);
        return run_transmission(trans_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
