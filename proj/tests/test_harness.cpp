#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "bubblelab/harness.hpp"
#include "bubblelab/oracles.hpp"

using namespace bubblelab;
namespace fs = std::filesystem;

namespace {

const fs::path kData = BUBBLELAB_DATA_DIR;

ExperimentConfig small_config(std::uint64_t horizon = 2000) {
    ExperimentConfig c;
    c.horizon = horizon;
    c.runs = 2;
    c.seed = 42;
    c.threads = 1;
    return c;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto doc = nlohmann::json::parse(R"({
        "instances": ["instances/pbm-a.json"], "agents": ["bubblerank", "static"],
        "horizon": 500, "runs": 3, "seed": 9, "delta": "auto", "update_scope": "all_adjacent",
        "output_dir": "out", "sanity_chi": {"i_min": 2, "i_max": 4}})");
    const auto c = parse_config(doc, kData);
    CHECK(c.instance_paths == std::vector<fs::path>{kData / "instances/pbm-a.json"});
    CHECK(c.horizon == 500);
    CHECK(c.runs == 3);
    CHECK_FALSE(c.delta.has_value());
    CHECK(c.update_scope == UpdateScope::all_adjacent);
    CHECK(c.output_dir == kData / "out");
    CHECK(c.sanity_chi.i_min == 2);
    CHECK(c.checkpoint_ratio == 1.2);

    CHECK(parse_config(nlohmann::json::parse(R"({"delta": 0.01})"), kData).delta == 0.01);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"horizon": 0})"), kData), DomainError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"runs": 0})"), kData), DomainError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"checkpoint_ratio": 1.0})"), kData), DomainError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"delta": "n^-4"})"), kData), DomainError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"delta": 1.5})"), kData), DomainError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"agents": ["toprank"]})"), kData), DomainError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"horizn": 10})"), kData), DomainError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"horizon": "ten"})"), kData), DomainError);
}

TEST_CASE("shipped configs load") {
    for (const auto& entry : fs::directory_iterator(kData / "configs")) {
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path()));
    }
}

TEST_CASE("checkpoint schedule") {
    const auto s = checkpoint_schedule(1000, 1.2);
    CHECK(s.front() == 1);
    CHECK(s.back() == 1000);
    CHECK(std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end());
    CHECK(checkpoint_schedule(1, 1.2) == std::vector<std::uint64_t>{1});
    const std::vector<std::uint64_t> extra{500, 5000, 0};
    const auto with_extra = checkpoint_schedule(1000, 2.0, extra);
    CHECK(std::count(with_extra.begin(), with_extra.end(), 500) == 1);
    CHECK(with_extra.back() == 1000);
    CHECK(with_extra.front() == 1);
    CHECK_THROWS_AS(checkpoint_schedule(0, 1.2), DomainError);
}

TEST_CASE("seed split") {
    CHECK(seed_split(1, "a", "bubblerank", 0) == seed_split(1, "a", "bubblerank", 0));
    CHECK(seed_split(1, "a", "bubblerank", 0) != seed_split(1, "a", "bubblerank", 1));
    CHECK(seed_split(1, "a", "bubblerank", 0) != seed_split(2, "a", "bubblerank", 0));
    CHECK(seed_split(1, "ab", "c", 0) != seed_split(1, "a", "bc", 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t run = 0; run < 1000; ++run) seen.insert(seed_split(7, "pbm-a", "static", run));
    CHECK(seen.size() == 1000);
}

TEST_CASE("run one examples") {
    const auto inst = prepare(load_instance(kData / "instances/pbm-a.json"));
    auto config = small_config(5000);

    const auto oracle = run_one(inst, "oracle", 0, 1, config);
    for (const auto& m : oracle.checkpoints) CHECK(m.cum_regret == 0.0);

    const auto fixed = run_one(inst, "static", 0, 1, config);
    const double per_step = inst.optimal.reward - expected_reward(inst.instance.model, inst.instance.initial_list, inst.cutoff);
    for (const auto& m : fixed.checkpoints) {
        CHECK(m.instant_regret == per_step);
        CHECK(m.cum_regret == doctest::Approx(per_step * static_cast<double>(m.step)).epsilon(1e-12));
        CHECK(m.cum_violations == 0);
    }
    CHECK(fixed.final_list == inst.instance.initial_list);

    const auto a = run_one(inst, "bubblerank", 3, 99, config);
    const auto b = run_one(inst, "bubblerank", 3, 99, config);
    CHECK(a.checkpoints == b.checkpoints);
    CHECK(a.final_list == b.final_list);
    CHECK(runs_csv({a}) == runs_csv({b}));
    for (std::size_t i = 1; i < a.checkpoints.size(); ++i) {
        CHECK(a.checkpoints[i].step > a.checkpoints[i - 1].step);
        CHECK(a.checkpoints[i].cum_regret >= a.checkpoints[i - 1].cum_regret);
        CHECK(a.checkpoints[i].cum_violations >= a.checkpoints[i - 1].cum_violations);
    }
}

TEST_CASE("recorded pair statistics follow the checkpoints") {
    const auto inst = prepare(load_instance(kData / "instances/cm-a.json"));
    auto config = small_config(3000);
    config.record_pair_stats = true;
    const auto r = run_one(inst, "bubblerank", 0, 5, config);
    CHECK(r.pair_stats.size() == r.checkpoints.size());
    CHECK(run_one(inst, "static", 0, 5, config).pair_stats.empty());
}

TEST_CASE("grid cardinality, aggregation and concurrency") {
    std::vector<PreparedInstance> instances;
    for (const char* id : {"cm-a", "pbm-a", "dcm-a"}) {
        instances.push_back(prepare(load_instance(kData / "instances" / (std::string(id) + ".json"))));
    }
    auto config = small_config(1000);
    config.agents = {"bubblerank", "static"};
    config.runs = 10;

    const auto serial = run_grid(instances, config);
    CHECK(serial.runs.size() == 60);
    CHECK(serial.failures.empty());
    std::set<std::pair<std::string, std::string>> series;
    for (const auto& row : serial.aggregate) series.insert({row.instance, row.agent});
    CHECK(series.size() == 6);

    for (const auto& row : serial.aggregate) {
        if (row.agent == "static") {
            CHECK(row.se_cum_regret == 0.0);
            CHECK(row.se_ndcg == 0.0);
        }
    }

    config.threads = 4;
    const auto parallel = run_grid(instances, config);
    CHECK(runs_csv(parallel.runs) == runs_csv(serial.runs));
    CHECK(aggregate_csv(parallel.aggregate) == aggregate_csv(serial.aggregate));

    config.runs = 1;
    config.threads = 1;
    for (const auto& row : run_grid(instances, config).aggregate) {
        CHECK(row.se_cum_regret == 0.0);
        CHECK(row.se_cum_violations == 0.0);
    }
}

TEST_CASE("grid order does not change per-run streams") {
    std::vector<PreparedInstance> forward, backward;
    for (const char* id : {"cm-b", "pbm-b"}) forward.push_back(prepare(load_instance(kData / "instances" / (std::string(id) + ".json"))));
    backward.assign(forward.rbegin(), forward.rend());
    auto config = small_config(500);
    config.agents = {"bubblerank"};
    const auto a = run_grid(forward, config);
    const auto b = run_grid(backward, config);
    for (const auto& ra : a.runs) {
        const auto it = std::find_if(b.runs.begin(), b.runs.end(), [&](const RunResult& rb) {
            return rb.instance_id == ra.instance_id && rb.run == ra.run;
        });
        REQUIRE(it != b.runs.end());
        CHECK(it->seed == ra.seed);
        CHECK(it->checkpoints == ra.checkpoints);
    }
}

TEST_CASE("failed runs are listed and the grid completes") {
    std::vector<PreparedInstance> instances{prepare(load_instance(kData / "instances/pbm-a.json"))};
    std::vector<RunTask> tasks{{&instances[0], "static", 0}, {&instances[0], "no-such-agent", 0}};
    const auto grid = execute(tasks, small_config(100), 1);
    CHECK(grid.runs.size() == 1);
    REQUIRE(grid.failures.size() == 1);
    CHECK(grid.failures[0].agent == "no-such-agent");
    CHECK(grid_summary(grid).at("failures").size() == 1);
}

TEST_CASE("csv schemas") {
    std::vector<PreparedInstance> instances{prepare(load_instance(kData / "instances/dcm-a.json"))};
    auto config = small_config(300);
    config.agents = {"bubblerank", "uniform"};
    const auto grid = run_grid(instances, config);

    const auto runs = lines(runs_csv(grid.runs));
    CHECK(runs.front() == "instance,agent,run,step,instant_regret,cum_regret,ndcg,inversions,cum_violations");
    const auto agg = lines(aggregate_csv(grid.aggregate));
    CHECK(agg.front() ==
          "instance,agent,step,mean_cum_regret,se_cum_regret,mean_ndcg,se_ndcg,mean_cum_violations,se_cum_violations");
    for (const auto& line : runs) CHECK(std::count(line.begin(), line.end(), ',') == 8);
    for (const auto& line : agg) CHECK(std::count(line.begin(), line.end(), ',') == 8);
    CHECK(runs_csv(grid.runs).find('\r') == std::string::npos);

    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("least squares") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};
    const auto fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));

    const std::vector<double> noisy{1, 4, 4, 8};
    const auto f2 = least_squares(x, noisy);
    CHECK(f2.r2 >= 0.0);
    CHECK(f2.r2 <= 1.0);
    const std::vector<double> flat{2, 2, 2, 2};
    CHECK_THROWS_AS(least_squares(flat, y), DomainError);
}

TEST_CASE("sanity sweeps") {
    auto config = small_config(2000);
    config.sanity_chi = {1, 4};
    const auto chi = sanity_sweep_chi(config);
    REQUIRE(chi.rows.size() == 4);
    CHECK(chi.rows[3].chi_min == 0.0625);
    CHECK_FALSE(chi.rows[0].ratio.has_value());
    CHECK(chi.rows[1].ratio.has_value());
    const auto csv = lines(sanity_chi_csv(chi));
    CHECK(csv.front() == "i,chi_min,final_regret,ratio");
    CHECK(csv.size() == 5);

    const auto v0 = sanity_sweep_v0(load_instance(kData / "instances/pbm-v0.json"), 4, config);
    REQUIRE(v0.rows.size() == 4);
    CHECK(v0.rows[0].v0 == 0);
    CHECK(v0.rows[0].initial_list == RankedList::identity(10));
    CHECK(v0.fit.r2 >= 0.0);
    CHECK(v0.fit.r2 <= 1.0);
    CHECK(lines(sanity_v0_csv(v0)).size() == 5);
    CHECK_THROWS_AS(sanity_sweep_v0(load_instance(kData / "instances/pbm-v0.json"), 1, config), DomainError);

    const auto again = sanity_sweep_v0(load_instance(kData / "instances/pbm-v0.json"), 4, config);
    CHECK(sanity_v0_csv(again) == sanity_v0_csv(v0));
}

TEST_CASE("random initial lists average K(K-1)/4 inversions") {
    Rng rng(3);
    double total = 0.0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) total += count_inversions(random_list(10, rng));
    // Variance of the inversion count for K = 10 is K(K-1)(2K+5)/72 = 31.25.
    CHECK(std::abs(total / draws - 22.5) < 4.0 * std::sqrt(31.25 / draws));
}

TEST_CASE("verify report") {
    auto config = small_config(20000);
    config.instance_paths = {kData / "instances/pbm-a.json"};
    config.verify = {20000, 20000, 100};
    const auto report = verify(config);
    CHECK(report.all_passed);
    std::set<std::string> kinds;
    for (const auto& c : report.checks) kinds.insert(c.at("check").get<std::string>());
    CHECK(kinds == std::set<std::string>{"reward_oracle", "optimal_list", "lemma3_regret_vs_gap", "pairwise_drift",
                                         "bubblerank_run"});
}
