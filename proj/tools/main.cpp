#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cldyn/config.hpp"
#include "cldyn/errors.hpp"
#include "cldyn/runner.hpp"
#include "cldyn/version.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::vector<unsigned long long> seeds;
};

void add_common_options(CLI::App* sub, CliArgs& args)
{
    sub->add_option("--config", args.config_path, "json experiment description (omit to run on defaults)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out_path, "output file path ('-' or empty = stdout)");
    sub->add_option("--format", args.format, "output format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--seed", args.seeds, "simulation seed (repeatable; overrides the config)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"training-dynamics laboratory: finite-size runs, limiting ODE/PDE "
                 "descriptions, and stability analysis of a nonlinear contrastive model"};
    app.set_version_flag("--version", cldyn::version_string);
    app.require_subcommand(1);

    CliArgs args;
    const std::pair<const char*, const char*> modes[] = {
        {"simulate", "finite-size mini-batch training runs (one row per seed and snapshot)"},
        {"ode", "limiting overlap dynamics on the record grid"},
        {"pde", "limiting weight-density evolution (finite volumes)"},
        {"fixed-points", "roots and stability of the limiting overlap rates"},
        {"basins", "basin-of-attraction map over the two-feature simplex"},
        {"noise-sweep", "recovery level versus view-noise variance"},
        {"compare", "multi-seed simulation joined against the limiting ODE"},
    };
    for (const auto& [name, desc] : modes) add_common_options(app.add_subcommand(name, desc), args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const cldyn::RunMode mode = cldyn::parse_run_mode(app.get_subcommands().front()->get_name());
        cldyn::ExperimentConfig cfg =
            args.config_path.empty()
                ? cldyn::parse_config(nlohmann::json::object(), mode)
                : cldyn::load_config(args.config_path, mode);
        if (!args.seeds.empty()) cfg.simulate.seeds = args.seeds;
        if (!args.out_path.empty()) cfg.output.path = args.out_path;
        if (!args.format.empty()) cfg.output.format = cldyn::parse_output_format(args.format);
        cldyn::run_experiment(cfg);
        return 0;
    } catch (const cldyn::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const cldyn::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
}
