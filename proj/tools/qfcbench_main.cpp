// qfcbench: forward-simulate and analyze a polarization-preserving frequency
// conversion interface from the command line.
//
//   qfcbench <experiment> [--config FILE] [--seed N] [--out DIR] [--print-defaults]
//
// Experiments: tomography, fringes, snr-sweep, budget, efficiency.
// Exit codes: 0 success, 2 config validation failure, 3 numerical failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qfc/config.hpp"
#include "qfc/errors.hpp"
#include "qfc/experiments.hpp"

namespace {

struct SubcommandArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool print_defaults = false;
};

int run_one(qfc::Experiment experiment, const SubcommandArgs& args) {
    if (args.print_defaults) {
        std::cout << qfc::print_defaults(experiment);
        return 0;
    }

    std::string text;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path, std::ios::binary);
        if (!in) {
            std::cerr << "qfcbench: cannot read config file '" << args.config_path << "'\n";
            return 2;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    qfc::RunConfig cfg;
    try {
        cfg = qfc::parse_config(experiment, text);
    } catch (const qfc::ConfigError& e) {
        std::cerr << "qfcbench: config error: " << e.what() << "\n";
        return 2;
    }
    if (args.seed_set) cfg.master_seed = args.seed;
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;

    const qfc::RunResult result = qfc::run_experiment(cfg);
    if (result.exit_code != 0) {
        std::cerr << "qfcbench: " << result.message << "\n";
        return result.exit_code;
    }
    for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"digital twin of a polarization-preserving frequency conversion interface"};
    app.require_subcommand(1);

    const std::vector<qfc::Experiment> experiments = {
        qfc::Experiment::tomography, qfc::Experiment::fringes, qfc::Experiment::snr_sweep,
        qfc::Experiment::budget, qfc::Experiment::efficiency};

    std::vector<SubcommandArgs> args(experiments.size());
    for (size_t i = 0; i < experiments.size(); ++i) {
        auto* sub = app.add_subcommand(qfc::experiment_name(experiments[i]),
                                       "run the " + qfc::experiment_name(experiments[i]) +
                                           " pipeline");
        sub->add_option("--config", args[i].config_path, "config file (flat dotted keys)");
        sub->add_option("--out", args[i].out_dir, "output directory");
        auto* seed_opt = sub->add_option("--seed", args[i].seed, "master seed override");
        sub->add_flag("--print-defaults", args[i].print_defaults,
                      "print the full default config and exit");
        sub->callback([&, i, seed_opt] {
            args[i].seed_set = seed_opt->count() > 0;
        });
    }

    CLI11_PARSE(app, argc, argv);

    for (size_t i = 0; i < experiments.size(); ++i) {
        if (app.get_subcommands().front()->get_name() ==
            qfc::experiment_name(experiments[i])) {
            return run_one(experiments[i], args[i]);
        }
    }
    return 2;
}
