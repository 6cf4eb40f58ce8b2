#include <string>

#include <CLI11.hpp>

#include "napping/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"NAPPING adaptation lab: train baselines, run novelty trials, report results"};
    app.require_subcommand(1);

    std::string domain, config_path, out_path, manifest_path, results_dir;

    auto* train = app.add_subcommand("train", "Train a baseline policy and write a weight file");
    train->add_option("domain", domain, "cartpole | mountaincar | crossroad")->required();
    train->add_option("config", config_path, "train config file")->required();
    train->add_option("out", out_path, "output weight file")->required();

    auto* run = app.add_subcommand("run", "Run trials from a manifest");
    run->add_option("manifest", manifest_path, "run manifest file")->required();

    auto* sweep = app.add_subcommand("sweep", "Run a parameter-grid sweep from a manifest");
    sweep->add_option("manifest", manifest_path, "sweep manifest file")->required();

    auto* report = app.add_subcommand("report", "Summarize a results directory");
    report->add_option("results_dir", results_dir, "directory holding episodes.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? napping::kExitOk : napping::kExitUsage;
    }

    if (train->parsed()) return napping::cli_train(domain, config_path, out_path);
    if (run->parsed()) return napping::cli_run(manifest_path);
    if (sweep->parsed()) return napping::cli_sweep(manifest_path);
    return napping::cli_report(results_dir);
}
