// SPDX-License-Identifier: Apache-2.0
//
// qaction: solve resource-action problems from a JSON configuration.
//
//   qaction solve --config configs/two_qubit_K2_entanglement.json --out result.json
//   qaction sweep --config cfg.json --param grid_n --values 100,200,400 --out-dir sweep/

#include <CLI11.hpp>

#include "qaction/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Least-action paths of quantum-resource Lagrangians"};
    app.set_version_flag("--version", std::string("qaction ") + qaction::cli::kVersion);
    app.require_subcommand(1);

    std::string config;
    std::string out, csv, method, param, values, out_dir;
    int grid = 0;
    std::uint64_t seed = 0;

    auto* solve = app.add_subcommand("solve", "Solve one problem and write the result document");
    solve->add_option("--config", config, "Problem configuration (JSON)")->required()->check(CLI::ExistingFile);
    auto* out_opt = solve->add_option("--out", out, "Result document path (default: stdout)");
    auto* csv_opt = solve->add_option("--csv", csv, "Also write the node table as CSV");
    auto* method_opt = solve->add_option("--method", method, "Override solver.method")
                           ->check(CLI::IsMember({"transcription", "shooting"}));
    auto* grid_opt = solve->add_option("--grid", grid, "Override solver.grid_n")->check(CLI::PositiveNumber);
    auto* seed_opt = solve->add_option("--seed", seed, "Override solver.seed");

    auto* sweep = app.add_subcommand("sweep", "Solve once per value of one configuration field");
    sweep->add_option("--config", config, "Problem configuration (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", param, "Field to vary, e.g. grid_n or boundary.lambda_B[0]")->required();
    sweep->add_option("--values", values, "Comma-separated values, e.g. 100,200,400 or pi/4,pi/2")->required();
    sweep->add_option("--out-dir", out_dir, "Directory for run_NNN.json and summary.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            qaction::cli::Overrides o;
            if (*method_opt) o.method = method;
            if (*grid_opt) o.grid_n = grid;
            if (*seed_opt) o.seed = seed;
            std::optional<std::filesystem::path> out_path, csv_path;
            if (*out_opt) out_path = out;
            if (*csv_opt) csv_path = csv;
            return qaction::cli::run(config, out_path, csv_path, o);
        }
        return qaction::cli::sweep(config, param, qaction::cli::split_values(values), out_dir);
    } catch (const std::exception& e) {
        std::cerr << "qaction: error: " << e.what() << '\n';
        return 3;
    }
}
