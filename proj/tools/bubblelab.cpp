#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "bubblelab/harness.hpp"
#include "bubblelab/oracles.hpp"

namespace bl = bubblelab;

namespace {

int report_failures(const std::vector<bl::RunFailure>& failures) {
    for (const auto& f : failures) {
        std::cerr << "run failed: " << f.instance_id << ' ' << f.agent << ' ' << f.run << ": " << f.message << '\n';
    }
    return failures.empty() ? 0 : 1;
}

int cmd_simulate(const std::string& config_path) {
    const auto config = bl::load_config(config_path);
    const auto grid = bl::run_grid(config);
    bl::write_text(config.output_dir / "runs.csv", bl::runs_csv(grid.runs));
    bl::write_text(config.output_dir / "agg.csv", bl::aggregate_csv(grid.aggregate));
    bl::write_text(config.output_dir / "summary.json", bl::grid_summary(grid).dump(2) + "\n");
    std::cout << "wrote " << grid.runs.size() << " runs to " << config.output_dir.string() << '\n';
    return report_failures(grid.failures);
}

int cmd_sanity_chi(const std::string& config_path) {
    const auto config = bl::load_config(config_path);
    const auto report = bl::sanity_sweep_chi(config);
    const auto csv = bl::sanity_chi_csv(report);
    bl::write_text(config.output_dir / "sanity_chi.csv", csv);
    std::cout << csv;
    return report_failures(report.failures);
}

int cmd_sanity_v0(const std::string& config_path) {
    const auto config = bl::load_config(config_path);
    if (config.sanity_v0.instance.empty()) {
        throw bl::DomainError("sanity_v0.instance is required");
    }
    const auto report = bl::sanity_sweep_v0(bl::load_instance(config.sanity_v0.instance),
                                            config.sanity_v0.num_initial_lists, config);
    const auto fit = bl::sanity_v0_fit_json(report);
    bl::write_text(config.output_dir / "sanity_v0.csv", bl::sanity_v0_csv(report));
    bl::write_text(config.output_dir / "sanity_v0_fit.json", fit.dump(2) + "\n");
    std::cout << fit.dump(2) << '\n';
    return report_failures(report.failures);
}

int cmd_verify(const std::string& config_path) {
    const auto config = bl::load_config(config_path);
    const auto report = bl::verify(config);
    nlohmann::json doc = {{"all_passed", report.all_passed}, {"checks", report.checks}};
    bl::write_text(config.output_dir / "verify_report.json", doc.dump(2) + "\n");
    for (const auto& check : report.checks) {
        std::cout << (check.at("passed").get<bool>() ? "PASS " : "FAIL ") << check.at("check").get<std::string>() << ' '
                  << check.at("instance").get<std::string>() << '\n';
    }
    return report.all_passed ? 0 : 1;
}

int cmd_bound(const std::string& instance_path, int v0, double delta, std::uint64_t n) {
    const auto instance = bl::load_instance(instance_path);
    std::cout << bl::format_double(bl::theorem1_bound(instance.model, v0, delta, n)) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BubbleRank simulation lab"};
    app.require_subcommand(1);

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "run an instance x agent x seed grid");
    simulate->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto* sanity_chi = app.add_subcommand("sanity-chi", "regret versus minimum examination on the synthetic PBM");
    sanity_chi->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto* sanity_v0 = app.add_subcommand("sanity-v0", "regret versus the number of incorrectly ordered pairs in R0");
    sanity_v0->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto* verify = app.add_subcommand("verify", "run the oracle and analytical checks");
    verify->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);

    std::string instance_path;
    int v0 = 0;
    double delta = 0.0;
    std::uint64_t n = 0;
    auto* bound = app.add_subcommand("bound", "print the regret upper bound for an instance");
    bound->add_option("--instance", instance_path, "instance (JSON)")->required()->check(CLI::ExistingFile);
    bound->add_option("--v0", v0, "incorrectly ordered pairs in R0")->required()->check(CLI::NonNegativeNumber);
    bound->add_option("--delta", delta, "confidence parameter in (0, 1)")->required();
    bound->add_option("--n", n, "horizon")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(config_path);
        if (*sanity_chi) return cmd_sanity_chi(config_path);
        if (*sanity_v0) return cmd_sanity_v0(config_path);
        if (*verify) return cmd_verify(config_path);
        if (*bound) return cmd_bound(instance_path, v0, delta, n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
