// Command-line front end: load a JSON experiment config, then solve, verify,
// export figure data, simulate, or run a randomized structural sweep.
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "powalloc/config.hpp"
#include "powalloc/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> seed;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "experiment config (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--epsilon", flags.epsilon, "solver tolerance (overrides config)");
    cmd->add_option("--seed", flags.seed, "seed (overrides config)");
}

powalloc::ExperimentConfig load(const CommonFlags& flags) {
    powalloc::ExperimentConfig config = powalloc::load_experiment_config(flags.config_path);
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (flags.epsilon) {
        if (!(*flags.epsilon > 0.0))
            throw powalloc::ConfigError("--epsilon: must be positive");
        config.solver.epsilon = *flags.epsilon;
    }
    if (flags.seed) {
        config.sim.seed = *flags.seed;
        config.random_sweep.seed = *flags.seed;
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Solver, verifier and simulator for discounted power allocation from a\n"
        "finite rechargeable battery over an i.i.d. fading channel.\n"
        "Rewards use the natural logarithm: log(1 + channel * power / noise)."};
    app.require_subcommand(1);

    CommonFlags flags;

    CLI::App* solve = app.add_subcommand(
        "solve", "compute the optimal value and policy tables, export them as CSV");
    add_common_flags(solve, flags);

    CLI::App* verify = app.add_subcommand(
        "verify", "solve, then check monotone value, concavity, submodularity, monotone policy");
    add_common_flags(verify, flags);
    bool self_test = false;
    verify->add_flag("--self-test", self_test,
                     "run the checks against a deliberately broken solution; exits 1");

    CLI::App* figures = app.add_subcommand(
        "figures", "export plot data: policy/value vs energy per channel, recharge and "
                   "discount comparisons");
    add_common_flags(figures, flags);

    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo rollout of a policy on sampled traces");
    add_common_flags(simulate, flags);
    std::string policy_source_text = "optimal";
    simulate->add_option("--policy", policy_source_text,
                         "optimal | spend-all | zero | fixed-fraction:<q> | <policy CSV path>");
    std::optional<int> traces_flag;
    std::optional<int> horizon_flag;
    simulate->add_option("--traces", traces_flag, "number of traces (overrides config)");
    simulate->add_option("--horizon", horizon_flag, "slots per trace (overrides config)");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "solve many random instances and run every structure check on each");
    add_common_flags(sweep, flags);
    std::optional<int> instances_flag;
    sweep->add_option("--instances", instances_flag,
                      "number of random instances (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints usage; 0 for --help/--version
        return code == 0 ? powalloc::kExitOk : powalloc::kExitInvalidInput;
    }

    try {
        powalloc::ExperimentConfig config = load(flags);
        if (solve->parsed()) return powalloc::run_solve(config, std::cout);
        if (verify->parsed())
            return self_test ? powalloc::run_verify_self_test(config, std::cout)
                             : powalloc::run_verify(config, std::cout);
        if (figures->parsed()) return powalloc::run_figures(config, std::cout);
        if (simulate->parsed()) {
            if (traces_flag) {
                if (*traces_flag < 1) throw powalloc::ConfigError("--traces: must be at least 1");
                config.sim.traces = *traces_flag;
            }
            if (horizon_flag) {
                if (*horizon_flag < 1)
                    throw powalloc::ConfigError("--horizon: must be at least 1");
                config.sim.horizon = *horizon_flag;
            }
            powalloc::PolicySource source = powalloc::parse_policy_source(policy_source_text);
            return powalloc::run_simulate(config, source, std::cout);
        }
        if (sweep->parsed()) {
            if (instances_flag) {
                if (*instances_flag < 0)
                    throw powalloc::ConfigError("--instances: must be non-negative");
                config.random_sweep.instances = *instances_flag;
            }
            return powalloc::run_random_sweep(config, std::cout);
        }
    } catch (const powalloc::ConfigError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return powalloc::kExitInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return powalloc::kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return powalloc::kExitInvalidInput;
    }
    return powalloc::kExitOk;
}
