// config.hpp: INI configuration file for the command line tool

#pragma once

#include "cqnet/dynamics.hpp"
#include "cqnet/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cqnet::config {

/// Values read from the [scenario] section; unset keys stay empty.
struct ScenarioOverrides {
    std::optional<std::string> name;
    std::optional<std::string> initial;
    std::vector<double> theta;
    std::vector<double> gamma;
    std::optional<double> t_max_lambda;
    std::optional<int> samples;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::vector<std::string> columns;
    std::optional<bool> single_chain;
};

struct FileConfig {
    model::NetworkConfig network;
    dynamics::IntegratorConfig integrator;
    ScenarioOverrides scenario;
};

/// Parses "abs"/"absolute" or "lambda". Throws std::invalid_argument.
model::GammaUnits parse_gamma_units(const std::string& s);

/// Comma separated numbers; accepts "pi" factors such as "pi/4" or "0.5*pi".
std::vector<double> parse_number_list(const std::string& s);
double parse_number(const std::string& s);

/// Reads an INI file with optional [network], [integrator] and [scenario]
/// sections. Unknown keys throw std::invalid_argument.
FileConfig load_config(const std::string& path);
FileConfig parse_config(const std::string& text);

}  // namespace cqnet::config
