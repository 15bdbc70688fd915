// JSON experiment configuration. Loading re-validates every problem
// invariant and reports violations with the full field path, so a broken
// config fails loudly instead of producing a quietly wrong run.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "powalloc/named_pmf.hpp"
#include "powalloc/pmf.hpp"
#include "powalloc/problem.hpp"
#include "powalloc/random_instance.hpp"

namespace powalloc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    double epsilon = 1e-9;
    int max_iterations = 500000;
};

struct SimConfig {
    int traces = 10000;
    int horizon = 0;  // 0 = derive from bias_bound
    double bias_bound = 0.01;
    std::uint64_t seed = 1;
    State start{0, 1};
    bool start_set = false;  // when false, start defaults to (capacity, last channel)
};

struct FigureConfig {
    std::vector<int> policy_channels{5, 15};   // series for the policy-vs-energy figure
    std::vector<int> value_channels{5, 10};    // series for the value-vs-energy figure
    int recharge_compare_channel = 10;
    int discount_compare_channel = 15;
};

struct SweepAxes {
    std::vector<double> discounts{0.5, 0.85, 0.9};
    std::vector<std::string> recharge_pmfs{"decreasing", "increasing"};
};

struct RandomSweepConfig {
    std::uint64_t seed = 42;
    int instances = 200;
    InstanceBounds bounds;
};

struct ExperimentConfig {
    ProblemSpec problem;
    SolverConfig solver;
    SimConfig sim;
    FigureConfig figures;
    SweepAxes sweep_axes;
    RandomSweepConfig random_sweep;
    std::string output_dir = "out";
};

namespace detail {

using nlohmann::json;

inline ConfigError field_error(const std::string& path, const std::string& what) {
    return ConfigError(path + ": " + what);
}

inline const json& require_field(const json& node, const std::string& path, const char* key) {
    auto it = node.find(key);
    if (it == node.end()) throw field_error(path + "." + key, "missing required field");
    return *it;
}

inline double as_number(const json& node, const std::string& path) {
    if (!node.is_number()) throw field_error(path, "expected a number");
    return node.get<double>();
}

inline int as_int(const json& node, const std::string& path) {
    if (!node.is_number_integer()) throw field_error(path, "expected an integer");
    return node.get<int>();
}

inline std::uint64_t as_u64(const json& node, const std::string& path) {
    if (!node.is_number_unsigned() && !node.is_number_integer())
        throw field_error(path, "expected a non-negative integer");
    auto v = node.get<std::int64_t>();
    if (v < 0) throw field_error(path, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

inline std::string as_string(const json& node, const std::string& path) {
    if (!node.is_string()) throw field_error(path, "expected a string");
    return node.get<std::string>();
}

inline std::vector<double> as_number_array(const json& node, const std::string& path) {
    if (!node.is_array()) throw field_error(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(as_number(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

// pmf spec: {"kind": "decreasing|increasing|bell|uniform", "size": n} or
// {"kind": "explicit", "probabilities": [...]}. `default_size` lets the
// problem supply the size implied by its other fields.
inline Pmf parse_pmf(const json& node, const std::string& path, int default_size) {
    if (!node.is_object()) throw field_error(path, "expected an object with a 'kind' field");
    std::string kind = as_string(require_field(node, path, "kind"), path + ".kind");
    int size = default_size;
    if (node.contains("size")) size = as_int(node["size"], path + ".size");
    if (size < 1 && kind != "explicit")
        throw field_error(path + ".size", "must be at least 1 (or derivable from the problem)");
    try {
        if (kind == "explicit") {
            std::vector<double> probs = as_number_array(
                require_field(node, path, "probabilities"), path + ".probabilities");
            return Pmf(probs);
        }
        return build_named_pmf(kind, size);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw field_error(path, e.what());
    }
}

} // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& root) {
    using detail::as_int;
    using detail::as_number;
    using detail::as_number_array;
    using detail::as_string;
    using detail::as_u64;
    using detail::field_error;
    using detail::require_field;

    if (!root.is_object()) throw field_error("config", "expected a JSON object");

    ExperimentConfig config;
    const nlohmann::json& problem = require_field(root, "config", "problem");
    if (!problem.is_object()) throw field_error("config.problem", "expected an object");

    config.problem.battery_capacity = as_int(
        require_field(problem, "config.problem", "battery_capacity"),
        "config.problem.battery_capacity");
    config.problem.noise =
        as_number(require_field(problem, "config.problem", "noise"), "config.problem.noise");
    config.problem.discount = as_number(require_field(problem, "config.problem", "discount"),
                                        "config.problem.discount");
    config.problem.channel_states =
        as_number_array(require_field(problem, "config.problem", "channel_states"),
                        "config.problem.channel_states");
    if (config.problem.channel_states.empty())
        throw field_error("config.problem.channel_states", "must be non-empty");

    const int channels = static_cast<int>(config.problem.channel_states.size());
    config.problem.channel_pmf =
        detail::parse_pmf(require_field(problem, "config.problem", "channel_pmf"),
                          "config.problem.channel_pmf", channels);

    const nlohmann::json& recharge = require_field(problem, "config.problem", "recharge_pmf");
    int recharge_size = -1;
    if (recharge.is_object() && recharge.contains("support_max"))
        recharge_size =
            as_int(recharge["support_max"], "config.problem.recharge_pmf.support_max") + 1;
    config.problem.recharge_pmf =
        detail::parse_pmf(recharge, "config.problem.recharge_pmf", recharge_size);

    try {
        config.problem.validate();
    } catch (const std::exception& e) {
        throw field_error("config.problem", e.what());
    }

    if (root.contains("solver")) {
        const nlohmann::json& solver = root["solver"];
        if (!solver.is_object()) throw field_error("config.solver", "expected an object");
        if (solver.contains("epsilon"))
            config.solver.epsilon = as_number(solver["epsilon"], "config.solver.epsilon");
        if (solver.contains("max_iterations"))
            config.solver.max_iterations =
                as_int(solver["max_iterations"], "config.solver.max_iterations");
        if (!(config.solver.epsilon > 0.0))
            throw field_error("config.solver.epsilon", "must be positive");
        if (config.solver.max_iterations < 1)
            throw field_error("config.solver.max_iterations", "must be at least 1");
    }

    if (root.contains("sim")) {
        const nlohmann::json& sim = root["sim"];
        if (!sim.is_object()) throw field_error("config.sim", "expected an object");
        if (sim.contains("traces")) config.sim.traces = as_int(sim["traces"], "config.sim.traces");
        if (sim.contains("horizon"))
            config.sim.horizon = as_int(sim["horizon"], "config.sim.horizon");
        if (sim.contains("bias_bound"))
            config.sim.bias_bound = as_number(sim["bias_bound"], "config.sim.bias_bound");
        if (sim.contains("seed")) config.sim.seed = as_u64(sim["seed"], "config.sim.seed");
        if (sim.contains("start")) {
            const nlohmann::json& start = sim["start"];
            if (!start.is_object()) throw field_error("config.sim.start", "expected an object");
            config.sim.start.energy = as_int(require_field(start, "config.sim.start", "energy"),
                                             "config.sim.start.energy");
            config.sim.start.channel_index =
                as_int(require_field(start, "config.sim.start", "channel_index"),
                       "config.sim.start.channel_index");
            config.sim.start_set = true;
        }
        if (config.sim.traces < 1) throw field_error("config.sim.traces", "must be at least 1");
        if (config.sim.horizon < 0)
            throw field_error("config.sim.horizon", "must be >= 0 (0 = derive from bias_bound)");
        if (!(config.sim.bias_bound > 0.0))
            throw field_error("config.sim.bias_bound", "must be positive");
        if (config.sim.start_set) {
            if (config.sim.start.energy < 0 ||
                config.sim.start.energy > config.problem.battery_capacity)
                throw field_error("config.sim.start.energy",
                                  "outside [0, " +
                                      std::to_string(config.problem.battery_capacity) + "]");
            if (config.sim.start.channel_index < 1 ||
                config.sim.start.channel_index > config.problem.num_channels())
                throw field_error(
                    "config.sim.start.channel_index",
                    "outside [1, " + std::to_string(config.problem.num_channels()) + "]");
        }
    }

    auto parse_channel_pick = [&](const nlohmann::json& node, const std::string& path) {
        int h = as_int(node, path);
        if (h < 1 || h > config.problem.num_channels())
            throw field_error(path, "outside [1, " +
                                        std::to_string(config.problem.num_channels()) + "]");
        return h;
    };

    if (root.contains("figures")) {
        const nlohmann::json& figures = root["figures"];
        if (!figures.is_object()) throw field_error("config.figures", "expected an object");
        auto parse_channel_list = [&](const char* key, std::vector<int>& out) {
            if (!figures.contains(key)) return;
            const nlohmann::json& node = figures[key];
            std::string path = std::string("config.figures.") + key;
            if (!node.is_array() || node.empty())
                throw field_error(path, "expected a non-empty array of channel indices");
            out.clear();
            for (std::size_t i = 0; i < node.size(); ++i)
                out.push_back(parse_channel_pick(node[i], path + "[" + std::to_string(i) + "]"));
        };
        parse_channel_list("policy_channels", config.figures.policy_channels);
        parse_channel_list("value_channels", config.figures.value_channels);
        if (figures.contains("recharge_compare_channel"))
            config.figures.recharge_compare_channel = parse_channel_pick(
                figures["recharge_compare_channel"], "config.figures.recharge_compare_channel");
        if (figures.contains("discount_compare_channel"))
            config.figures.discount_compare_channel = parse_channel_pick(
                figures["discount_compare_channel"], "config.figures.discount_compare_channel");
    } else {
        // clip the built-in default channel picks to the actual channel count
        auto clip = [&](std::vector<int>& v) {
            for (int& h : v) h = std::min(h, config.problem.num_channels());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        clip(config.figures.policy_channels);
        clip(config.figures.value_channels);
        config.figures.recharge_compare_channel =
            std::min(config.figures.recharge_compare_channel, config.problem.num_channels());
        config.figures.discount_compare_channel =
            std::min(config.figures.discount_compare_channel, config.problem.num_channels());
    }

    if (root.contains("sweep_axes")) {
        const nlohmann::json& axes = root["sweep_axes"];
        if (!axes.is_object()) throw field_error("config.sweep_axes", "expected an object");
        if (axes.contains("discounts")) {
            config.sweep_axes.discounts =
                as_number_array(axes["discounts"], "config.sweep_axes.discounts");
            if (config.sweep_axes.discounts.empty())
                throw field_error("config.sweep_axes.discounts", "must be non-empty");
            for (std::size_t i = 0; i < config.sweep_axes.discounts.size(); ++i) {
                double lambda = config.sweep_axes.discounts[i];
                if (!(lambda > 0.0) || !(lambda < 1.0))
                    throw field_error("config.sweep_axes.discounts[" + std::to_string(i) + "]",
                                      "must lie strictly between 0 and 1");
            }
        }
        if (axes.contains("recharge_pmfs")) {
            const nlohmann::json& names = axes["recharge_pmfs"];
            if (!names.is_array() || names.size() < 2)
                throw field_error("config.sweep_axes.recharge_pmfs",
                                  "expected an array of at least two pmf names");
            config.sweep_axes.recharge_pmfs.clear();
            for (std::size_t i = 0; i < names.size(); ++i) {
                std::string path = "config.sweep_axes.recharge_pmfs[" + std::to_string(i) + "]";
                std::string name = as_string(names[i], path);
                try {
                    build_named_pmf(name, config.problem.recharge_pmf.size());
                } catch (const std::exception& e) {
                    throw field_error(path, e.what());
                }
                config.sweep_axes.recharge_pmfs.push_back(name);
            }
        }
    }

    if (root.contains("random_sweep")) {
        const nlohmann::json& sweep = root["random_sweep"];
        if (!sweep.is_object()) throw field_error("config.random_sweep", "expected an object");
        if (sweep.contains("seed"))
            config.random_sweep.seed = as_u64(sweep["seed"], "config.random_sweep.seed");
        if (sweep.contains("instances"))
            config.random_sweep.instances =
                as_int(sweep["instances"], "config.random_sweep.instances");
        if (sweep.contains("max_capacity"))
            config.random_sweep.bounds.max_capacity =
                as_int(sweep["max_capacity"], "config.random_sweep.max_capacity");
        if (sweep.contains("max_channels"))
            config.random_sweep.bounds.max_channels =
                as_int(sweep["max_channels"], "config.random_sweep.max_channels");
        if (sweep.contains("max_recharge"))
            config.random_sweep.bounds.max_recharge =
                as_int(sweep["max_recharge"], "config.random_sweep.max_recharge");
        if (config.random_sweep.instances < 0)
            throw field_error("config.random_sweep.instances", "must be non-negative");
        if (config.random_sweep.bounds.max_capacity < 1)
            throw field_error("config.random_sweep.max_capacity", "must be at least 1");
        if (config.random_sweep.bounds.max_channels < 1)
            throw field_error("config.random_sweep.max_channels", "must be at least 1");
        if (config.random_sweep.bounds.max_recharge < 0)
            throw field_error("config.random_sweep.max_recharge", "must be non-negative");
    }

    if (root.contains("output_dir"))
        config.output_dir = as_string(root["output_dir"], "config.output_dir");

    return config;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_experiment_config(root);
}

} // namespace powalloc
