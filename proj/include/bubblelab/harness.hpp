#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bubblelab/agents.hpp"
#include "bubblelab/bubblerank.hpp"
#include "bubblelab/click_models.hpp"
#include "bubblelab/metrics.hpp"

namespace bubblelab {

struct SanityChiOptions {
    int i_min = 1;
    int i_max = 5;
};

struct SanityV0Options {
    std::filesystem::path instance;
    int num_initial_lists = 10;
};

struct VerifyOptions {
    std::uint64_t mc_samples = 200000;
    std::uint64_t drift_samples = 200000;
    int random_lists = 1000;
};

struct ExperimentConfig {
    std::vector<std::filesystem::path> instance_paths;
    std::vector<std::string> agents;
    std::uint64_t horizon = 1000000;
    int runs = 1;
    std::uint64_t seed = 0;
    /// nullopt: delta = n^-4 from the horizon.
    std::optional<double> delta;
    std::optional<int> eval_cutoff;
    double checkpoint_ratio = 1.2;
    std::vector<std::uint64_t> extra_checkpoints;
    UpdateScope update_scope = UpdateScope::randomized_only;
    std::filesystem::path output_dir = "results";
    /// 0: one worker per hardware thread.
    unsigned threads = 0;
    std::uint64_t doubling_initial_horizon = kDefaultDoublingHorizon;
    /// Keep a copy of the pair statistics at every checkpoint.
    bool record_pair_stats = false;

    SanityChiOptions sanity_chi;
    SanityV0Options sanity_v0;
    VerifyOptions verify;

    /// Throws DomainError when an invariant (horizon >= 1, runs >= 1, ratio > 1, ...) fails.
    void validate() const;
};

/// Reads the JSON config; relative paths resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Steps 1 and n, a geometric progression with the given ratio in between,
/// and any extra steps within [1, n]; sorted and unique.
std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t n, double ratio, std::span<const std::uint64_t> extra = {});

/// Order-free per-run seed: a 64-bit hash of (base seed, instance id, agent, run index).
std::uint64_t seed_split(std::uint64_t base_seed, const std::string& instance_id, const std::string& agent,
                         std::uint64_t run_index);

/// An instance with its cutoff resolved and its optimal list precomputed.
struct PreparedInstance {
    Instance instance;
    int cutoff = 0;
    OptimalList optimal;
    int v0_size = 0;
};

PreparedInstance prepare(Instance instance, std::optional<int> cutoff_override = std::nullopt);

struct RunResult {
    std::string instance_id;
    std::string agent;
    int run = 0;
    std::uint64_t seed = 0;
    std::vector<StepMetrics> checkpoints;
    RankedList final_list;
    double wall_seconds = 0.0;
    std::uint64_t total_clicks = 0;
    AgentDiagnostics diagnostics;
    std::optional<double> delta;
    /// Parallel to checkpoints when record_pair_stats is set and the agent keeps statistics.
    std::vector<PairStats> pair_stats;
};

/// One agent-environment interaction run. Deterministic in (instance, agent,
/// seed, config). Throws ContractViolation when the agent shows a non-permutation.
RunResult run_one(const PreparedInstance& instance, const std::string& agent, int run_index, std::uint64_t seed,
                  const ExperimentConfig& config);
RunResult run_one(const Instance& instance, const std::string& agent, std::uint64_t seed, const ExperimentConfig& config);

struct AggregateRow {
    std::string instance;
    std::string agent;
    std::uint64_t step = 0;
    double mean_cum_regret = 0.0;
    double se_cum_regret = 0.0;
    double mean_ndcg = 0.0;
    double se_ndcg = 0.0;
    double mean_cum_violations = 0.0;
    double se_cum_violations = 0.0;
};

struct RunFailure {
    std::string instance_id;
    std::string agent;
    int run = 0;
    std::string message;
};

struct GridResult {
    std::vector<RunResult> runs;
    std::vector<AggregateRow> aggregate;
    std::vector<RunFailure> failures;
};

struct RunTask {
    const PreparedInstance* instance;
    std::string agent;
    int run;
};

/// Executes tasks on `threads` workers; results come back in task order.
GridResult execute(const std::vector<RunTask>& tasks, const ExperimentConfig& config, std::uint64_t base_seed);

/// Mean and standard error across runs per (instance, agent, checkpoint), in
/// first-appearance order of instances and agents.
std::vector<AggregateRow> aggregate(const std::vector<RunResult>& runs);

/// Loads every configured instance and runs instances x agents x runs.
GridResult run_grid(const ExperimentConfig& config);
GridResult run_grid(const std::vector<PreparedInstance>& instances, const ExperimentConfig& config);

/// Fixed-schema writers: floats with 17 significant digits, '\n' line ends.
std::string runs_csv(const std::vector<RunResult>& runs);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
nlohmann::json grid_summary(const GridResult& grid);

struct SanityChiRow {
    int i = 0;
    double chi_min = 0.0;
    double final_regret = 0.0;
    double se_final_regret = 0.0;
    std::optional<double> ratio;
};

struct SanityChiReport {
    std::vector<SanityChiRow> rows;
    std::vector<RunFailure> failures;
};

/// BubbleRank on the synthetic PBM for each configured i; final cumulative
/// regret averaged over runs, and ratios between consecutive i.
SanityChiReport sanity_sweep_chi(const ExperimentConfig& config);
std::string sanity_chi_csv(const SanityChiReport& report);

struct SanityV0Row {
    int index = 0;
    RankedList initial_list;
    int v0 = 0;
    double mean_final_regret = 0.0;
    double se_final_regret = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct SanityV0Report {
    std::vector<SanityV0Row> rows;
    LinearFit fit;
    std::vector<RunFailure> failures;
};

/// Runs BubbleRank from `num_initial_lists` initial lists: the sorted list
/// first, then uniformly random permutations from a dedicated seed stream.
/// Fits mean final regret against |V0|.
SanityV0Report sanity_sweep_v0(const Instance& instance, int num_initial_lists, const ExperimentConfig& config);
std::string sanity_v0_csv(const SanityV0Report& report);
nlohmann::json sanity_v0_fit_json(const SanityV0Report& report);

struct VerifyReport {
    nlohmann::json checks = nlohmann::json::array();
    bool all_passed = true;
};

/// Runs the oracle suites over the configured instances.
VerifyReport verify(const ExperimentConfig& config);

/// "%.17g".
std::string format_double(double value);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bubblelab
