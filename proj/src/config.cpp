#include "cqnet/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cqnet::config {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

void check_keys(const pt::ptree& section, const std::string& name, std::initializer_list<const char*> allowed)
{
    for (const auto& [key, _] : section) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw std::invalid_argument("config: unknown key '" + key + "' in [" + name + "]");
        }
    }
}

}  // namespace

model::GammaUnits parse_gamma_units(const std::string& s)
{
    if (s == "abs" || s == "absolute") return model::GammaUnits::absolute;
    if (s == "lambda") return model::GammaUnits::lambda;
    throw std::invalid_argument("gamma units must be 'abs' or 'lambda', got '" + s + "'");
}

double parse_number(const std::string& raw)
{
    std::string s = trim(raw);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s.empty()) throw std::invalid_argument("empty number");
    const auto pos = s.find("pi");
    if (pos == std::string::npos) return parse_plain(s);

    double factor = 1.0;
    std::string head = s.substr(0, pos);
    std::string tail = s.substr(pos + 2);
    if (!head.empty()) {
        if (head == "-" || head == "+") {
            factor = head == "-" ? -1.0 : 1.0;
        } else {
            if (head.back() != '*') throw std::invalid_argument("bad number: '" + raw + "'");
            head.pop_back();
            factor = parse_plain(head);
        }
    }
    if (!tail.empty()) {
        if (tail.front() != '/') throw std::invalid_argument("bad number: '" + raw + "'");
        const double d = parse_plain(tail.substr(1));
        if (d == 0.0) throw std::invalid_argument("division by zero in '" + raw + "'");
        factor /= d;
    }
    return factor * std::numbers::pi;
}

std::vector<double> parse_number_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

FileConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }

    FileConfig cfg;
    for (const auto& [section, body] : tree) {
        if (section != "network" && section != "integrator" && section != "scenario") {
            throw std::invalid_argument("config: unknown section [" + section + "]");
        }
    }

    if (auto net = tree.get_child_optional("network")) {
        check_keys(*net, "network",
                   {"sites_per_chain", "omega", "nu", "omega_f", "J", "gamma", "gamma_units", "kappa",
                    "fiber_length", "fiber_continuum_decay"});
        auto& n = cfg.network;
        if (auto v = net->get_optional<std::string>("sites_per_chain")) n.sites_per_chain = static_cast<int>(parse_plain(*v));
        if (auto v = net->get_optional<std::string>("omega")) n.omega = parse_number(*v);
        if (auto v = net->get_optional<std::string>("nu")) n.nu = parse_number(*v);
        if (auto v = net->get_optional<std::string>("omega_f")) n.omega_f = parse_number(*v);
        if (auto v = net->get_optional<std::string>("J")) n.J = parse_number(*v);
        if (auto v = net->get_optional<std::string>("gamma")) n.gamma = parse_number_list(*v);
        if (auto v = net->get_optional<std::string>("gamma_units")) n.gamma_units = parse_gamma_units(trim(*v));
        if (auto v = net->get_optional<std::string>("kappa")) n.kappa = parse_number(*v);
        if (auto v = net->get_optional<std::string>("fiber_length")) n.fiber_length = parse_number(*v);
        if (auto v = net->get_optional<std::string>("fiber_continuum_decay")) n.fiber_continuum_decay = parse_number(*v);
    }
    if (auto integ = tree.get_child_optional("integrator")) {
        check_keys(*integ, "integrator", {"rel_tol", "abs_tol", "max_step", "trace_guard"});
        auto& i = cfg.integrator;
        if (auto v = integ->get_optional<std::string>("rel_tol")) i.rel_tol = parse_number(*v);
        if (auto v = integ->get_optional<std::string>("abs_tol")) i.abs_tol = parse_number(*v);
        if (auto v = integ->get_optional<std::string>("max_step")) i.max_step = parse_number(*v);
        if (auto v = integ->get_optional<std::string>("trace_guard")) i.trace_guard = parse_number(*v);
    }
    if (auto sc = tree.get_child_optional("scenario")) {
        check_keys(*sc, "scenario", {"name", "initial", "theta", "gamma", "tmax_lambda", "samples", "format", "out", "columns", "single_chain"});
        auto& s = cfg.scenario;
        if (auto v = sc->get_optional<std::string>("name")) s.name = trim(*v);
        if (auto v = sc->get_optional<std::string>("initial")) s.initial = trim(*v);
        if (auto v = sc->get_optional<std::string>("theta")) s.theta = parse_number_list(*v);
        if (auto v = sc->get_optional<std::string>("gamma")) s.gamma = parse_number_list(*v);
        if (auto v = sc->get_optional<std::string>("tmax_lambda")) s.t_max_lambda = parse_number(*v);
        if (auto v = sc->get_optional<std::string>("samples")) s.samples = static_cast<int>(parse_plain(trim(*v)));
        if (auto v = sc->get_optional<std::string>("format")) s.format = trim(*v);
        if (auto v = sc->get_optional<std::string>("out")) s.out = trim(*v);
        if (auto v = sc->get_optional<std::string>("columns")) {
            std::stringstream ss(*v);
            std::string item;
            while (std::getline(ss, item, ',')) s.columns.push_back(trim(item));
        }
        if (auto v = sc->get_optional<std::string>("single_chain")) {
            const std::string b = trim(*v);
            if (b == "true" || b == "1") s.single_chain = true;
            else if (b == "false" || b == "0") s.single_chain = false;
            else throw std::invalid_argument("config: single_chain must be true or false");
        }
    }
    return cfg;
}

FileConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace cqnet::config
