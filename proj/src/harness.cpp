#include "bubblelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "bubblelab/oracles.hpp"

namespace bubblelab {
namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::uint64_t hash, const std::string& bytes) {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    // Length terminator keeps ("ab", "c") and ("a", "bc") apart.
    hash ^= bytes.size();
    hash *= 0x100000001b3ULL;
    return hash;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& values) {
    MeanSe out;
    if (values.empty()) {
        return out;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
        out.mean = *lo;
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double n = static_cast<double>(values.size());
    out.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

unsigned worker_count(const ExperimentConfig& config, std::size_t tasks) {
    unsigned threads = config.threads;
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(tasks, 1)));
}

std::vector<PreparedInstance> load_instances(const ExperimentConfig& config) {
    std::vector<PreparedInstance> out;
    std::set<std::string> ids;
    for (const auto& path : config.instance_paths) {
        out.push_back(prepare(load_instance(path), config.eval_cutoff));
        if (!ids.insert(out.back().instance.id).second) {
            throw DomainError("duplicate instance id '" + out.back().instance.id + "'");
        }
    }
    return out;
}

json failures_json(const std::vector<RunFailure>& failures) {
    json out = json::array();
    for (const auto& f : failures) {
        out.push_back({{"instance", f.instance_id}, {"agent", f.agent}, {"run", f.run}, {"message", f.message}});
    }
    return out;
}

std::string labels(const RankedList& list) {
    std::string out;
    for (int label : list.one_based()) {
        if (!out.empty()) {
            out += ' ';
        }
        out += std::to_string(label);
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void ExperimentConfig::validate() const {
    if (horizon < 1) throw DomainError("horizon must be >= 1");
    if (runs < 1) throw DomainError("runs must be >= 1");
    if (!(checkpoint_ratio > 1.0)) throw DomainError("checkpoint_ratio must be > 1");
    if (delta && !(*delta > 0.0 && *delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    if (eval_cutoff && *eval_cutoff < 1) throw DomainError("eval_cutoff must be >= 1");
    if (doubling_initial_horizon < 1) throw DomainError("doubling_initial_horizon must be >= 1");
    for (const auto& agent : agents) {
        if (!is_known_agent(agent)) throw DomainError("unknown agent '" + agent + "'");
    }
    if (sanity_chi.i_min < 1 || sanity_chi.i_max < sanity_chi.i_min) throw DomainError("sanity_chi range is empty");
    if (sanity_v0.num_initial_lists < 2) throw DomainError("sanity_v0.num_initial_lists must be >= 2");
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    static const std::set<std::string> known = {
        "instances",     "agents",       "horizon",          "runs",        "seed",
        "delta",         "eval_cutoff",  "checkpoint_ratio", "extra_checkpoints",
        "update_scope",  "output_dir",   "threads",          "doubling_initial_horizon",
        "record_pair_stats", "sanity_chi", "sanity_v0",      "verify"};
    if (!doc.is_object()) {
        throw DomainError("config must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw DomainError("unknown config key '" + key + "'");
        }
    }
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    ExperimentConfig c;
    try {
        for (const auto& p : doc.value("instances", std::vector<std::string>{})) {
            c.instance_paths.push_back(resolve(p));
        }
        c.agents = doc.value("agents", std::vector<std::string>{});
        c.horizon = doc.value("horizon", c.horizon);
        c.runs = doc.value("runs", c.runs);
        c.seed = doc.value("seed", c.seed);
        if (doc.contains("delta")) {
            const auto& d = doc.at("delta");
            if (d.is_string()) {
                if (d.get<std::string>() != "auto") throw DomainError("delta must be \"auto\" or a number");
            } else {
                c.delta = d.get<double>();
            }
        }
        if (doc.contains("eval_cutoff") && !doc.at("eval_cutoff").is_null()) {
            c.eval_cutoff = doc.at("eval_cutoff").get<int>();
        }
        c.checkpoint_ratio = doc.value("checkpoint_ratio", c.checkpoint_ratio);
        c.extra_checkpoints = doc.value("extra_checkpoints", c.extra_checkpoints);
        if (doc.contains("update_scope")) {
            c.update_scope = parse_update_scope(doc.at("update_scope").get<std::string>());
        }
        c.output_dir = resolve(doc.value("output_dir", std::string("results")));
        c.threads = doc.value("threads", c.threads);
        c.doubling_initial_horizon = doc.value("doubling_initial_horizon", c.doubling_initial_horizon);
        c.record_pair_stats = doc.value("record_pair_stats", c.record_pair_stats);
        if (doc.contains("sanity_chi")) {
            const auto& s = doc.at("sanity_chi");
            c.sanity_chi.i_min = s.value("i_min", c.sanity_chi.i_min);
            c.sanity_chi.i_max = s.value("i_max", c.sanity_chi.i_max);
        }
        if (doc.contains("sanity_v0")) {
            const auto& s = doc.at("sanity_v0");
            if (s.contains("instance")) c.sanity_v0.instance = resolve(s.at("instance").get<std::string>());
            c.sanity_v0.num_initial_lists = s.value("num_initial_lists", c.sanity_v0.num_initial_lists);
        }
        if (doc.contains("verify")) {
            const auto& v = doc.at("verify");
            c.verify.mc_samples = v.value("mc_samples", c.verify.mc_samples);
            c.verify.drift_samples = v.value("drift_samples", c.verify.drift_samples);
            c.verify.random_lists = v.value("random_lists", c.verify.random_lists);
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DomainError("cannot open config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t n, double ratio, std::span<const std::uint64_t> extra) {
    if (n < 1 || !(ratio > 1.0)) {
        throw DomainError("checkpoint schedule needs n >= 1 and ratio > 1");
    }
    std::vector<std::uint64_t> steps{1};
    double x = 1.0;
    while (true) {
        x *= ratio;
        const auto step = static_cast<std::uint64_t>(std::floor(x));
        if (step >= n) {
            break;
        }
        if (step > steps.back()) {
            steps.push_back(step);
        }
    }
    steps.push_back(n);
    for (std::uint64_t step : extra) {
        if (step >= 1 && step <= n) {
            steps.push_back(step);
        }
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}

std::uint64_t seed_split(std::uint64_t base_seed, const std::string& instance_id, const std::string& agent,
                         std::uint64_t run_index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, instance_id);
    h = fnv1a(h, agent);
    return splitmix64(splitmix64(h ^ splitmix64(base_seed)) ^ run_index);
}

PreparedInstance prepare(Instance instance, std::optional<int> cutoff_override) {
    const int cutoff = cutoff_override.value_or(instance.eval_cutoff);
    if (cutoff < 1 || cutoff > instance.size()) {
        throw DomainError("eval cutoff outside [1, K] for instance '" + instance.id + "'");
    }
    OptimalList optimal = optimal_reward(instance.model, cutoff);
    const int v0_size = count_inversions(instance.initial_list);
    return PreparedInstance{std::move(instance), cutoff, std::move(optimal), v0_size};
}

RunResult run_one(const PreparedInstance& prepared, const std::string& agent_name, int run_index, std::uint64_t seed,
                  const ExperimentConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    const Instance& instance = prepared.instance;
    const int k_items = instance.size();
    const int cutoff = prepared.cutoff;
    const std::uint64_t horizon = config.horizon;

    AgentView view{k_items, instance.initial_list,
                   agent_name == "bubblerank-doubling" ? config.doubling_initial_horizon : horizon, config.delta};
    std::unique_ptr<Agent> agent = make_agent(agent_name, view, instance, config.update_scope);

    const auto schedule = checkpoint_schedule(horizon, config.checkpoint_ratio, config.extra_checkpoints);
    const NdcgScorer ndcg(instance.model.alpha(), cutoff);
    Rng rng(seed);
    ClickVector clicks(static_cast<std::size_t>(k_items));
    std::vector<std::uint64_t> seen(static_cast<std::size_t>(k_items), 0);

    RunResult result;
    result.instance_id = instance.id;
    result.agent = agent_name;
    result.run = run_index;
    result.seed = seed;
    result.checkpoints.reserve(schedule.size());

    double cum_regret = 0.0;
    std::uint64_t cum_violations = 0;
    std::size_t next = 0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const RankedList& shown = agent->act(t, rng);
        if (shown.size() != k_items) {
            throw ContractViolation(agent_name + " displayed a list of the wrong length at step " + std::to_string(t));
        }
        for (Item item : shown.items()) {
            if (item < 0 || item >= k_items || seen[static_cast<std::size_t>(item)] == t) {
                throw ContractViolation(agent_name + " displayed a non-permutation at step " + std::to_string(t));
            }
            seen[static_cast<std::size_t>(item)] = t;
        }

        sample_clicks(instance.model, shown, rng, clicks);
        for (auto c : clicks) {
            result.total_clicks += c;
        }

        const double regret = prepared.optimal.reward - expected_reward(instance.model, shown, cutoff);
        cum_regret += regret;
        const int inversions = count_inversions(shown);
        cum_violations += violation_indicator(inversions, prepared.v0_size, k_items) ? 1 : 0;

        if (t == schedule[next]) {
            result.checkpoints.push_back({t, regret, cum_regret, ndcg(shown.items()), inversions, cum_violations});
        }

        agent->feedback(shown, clicks);

        if (t == schedule[next]) {
            if (config.record_pair_stats && agent->pair_stats() != nullptr) {
                result.pair_stats.push_back(*agent->pair_stats());
            }
            ++next;
        }
    }

    result.final_list = agent->incumbent();
    result.diagnostics = agent->diagnostics();
    result.delta = agent->current_delta();
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

RunResult run_one(const Instance& instance, const std::string& agent, std::uint64_t seed, const ExperimentConfig& config) {
    return run_one(prepare(instance, config.eval_cutoff), agent, 0, seed, config);
}

GridResult execute(const std::vector<RunTask>& tasks, const ExperimentConfig& config, std::uint64_t base_seed) {
    std::vector<std::optional<RunResult>> results(tasks.size());
    std::vector<std::optional<std::string>> errors(tasks.size());
    std::atomic<std::size_t> cursor{0};

    const auto work = [&] {
        for (std::size_t idx = cursor++; idx < tasks.size(); idx = cursor++) {
            const RunTask& task = tasks[idx];
            const auto seed = seed_split(base_seed, task.instance->instance.id, task.agent, static_cast<std::uint64_t>(task.run));
            try {
                results[idx] = run_one(*task.instance, task.agent, task.run, seed, config);
            } catch (const std::exception& e) {
                errors[idx] = e.what();
            }
        }
    };

    const unsigned workers = worker_count(config, tasks.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }

    GridResult grid;
    for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
        if (results[idx]) {
            grid.runs.push_back(std::move(*results[idx]));
        } else {
            grid.failures.push_back({tasks[idx].instance->instance.id, tasks[idx].agent, tasks[idx].run,
                                     errors[idx].value_or("unknown failure")});
        }
    }
    grid.aggregate = aggregate(grid.runs);
    return grid;
}

std::vector<AggregateRow> aggregate(const std::vector<RunResult>& runs) {
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<const RunResult*>> groups;
    for (const RunResult& run : runs) {
        const auto key = std::make_pair(run.instance_id, run.agent);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) {
            order.push_back(key);
        }
        it->second.push_back(&run);
    }

    std::vector<AggregateRow> rows;
    for (const auto& key : order) {
        const auto& members = groups.at(key);
        const std::size_t checkpoints = members.front()->checkpoints.size();
        for (std::size_t c = 0; c < checkpoints; ++c) {
            std::vector<double> regret, ndcg, violations;
            for (const RunResult* run : members) {
                const StepMetrics& m = run->checkpoints.at(c);
                regret.push_back(m.cum_regret);
                ndcg.push_back(m.ndcg);
                violations.push_back(static_cast<double>(m.cum_violations));
            }
            const auto r = mean_se(regret);
            const auto n = mean_se(ndcg);
            const auto v = mean_se(violations);
            rows.push_back({key.first, key.second, members.front()->checkpoints[c].step, r.mean, r.se, n.mean, n.se, v.mean,
                            v.se});
        }
    }
    return rows;
}

GridResult run_grid(const std::vector<PreparedInstance>& instances, const ExperimentConfig& config) {
    if (instances.empty() || config.agents.empty()) {
        throw DomainError("grid needs at least one instance and one agent");
    }
    std::vector<RunTask> tasks;
    for (const auto& instance : instances) {
        for (const auto& agent : config.agents) {
            for (int run = 0; run < config.runs; ++run) {
                tasks.push_back({&instance, agent, run});
            }
        }
    }
    return execute(tasks, config, config.seed);
}

GridResult run_grid(const ExperimentConfig& config) {
    config.validate();
    const auto instances = load_instances(config);
    return run_grid(instances, config);
}

std::string runs_csv(const std::vector<RunResult>& runs) {
    std::ostringstream out;
    out << "instance,agent,run,step,instant_regret,cum_regret,ndcg,inversions,cum_violations\n";
    for (const RunResult& run : runs) {
        for (const StepMetrics& m : run.checkpoints) {
            out << run.instance_id << ',' << run.agent << ',' << run.run << ',' << m.step << ','
                << format_double(m.instant_regret) << ',' << format_double(m.cum_regret) << ',' << format_double(m.ndcg)
                << ',' << m.inversions << ',' << m.cum_violations << '\n';
        }
    }
    return out.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << "instance,agent,step,mean_cum_regret,se_cum_regret,mean_ndcg,se_ndcg,mean_cum_violations,se_cum_violations\n";
    for (const AggregateRow& r : rows) {
        out << r.instance << ',' << r.agent << ',' << r.step << ',' << format_double(r.mean_cum_regret) << ','
            << format_double(r.se_cum_regret) << ',' << format_double(r.mean_ndcg) << ',' << format_double(r.se_ndcg)
            << ',' << format_double(r.mean_cum_violations) << ',' << format_double(r.se_cum_violations) << '\n';
    }
    return out.str();
}

json grid_summary(const GridResult& grid) {
    json runs = json::array();
    for (const RunResult& run : grid.runs) {
        json entry = {{"instance", run.instance_id},
                      {"agent", run.agent},
                      {"run", run.run},
                      {"seed", run.seed},
                      {"final_list", run.final_list.one_based()},
                      {"total_clicks", run.total_clicks},
                      {"wall_seconds", run.wall_seconds},
                      {"promotions", run.diagnostics.promotions},
                      {"wrong_direction_promotions", run.diagnostics.wrong_direction_promotions},
                      {"resets", run.diagnostics.resets}};
        if (run.delta) {
            entry["delta"] = *run.delta;
        }
        if (!run.checkpoints.empty()) {
            entry["final_cum_regret"] = run.checkpoints.back().cum_regret;
            entry["final_cum_violations"] = run.checkpoints.back().cum_violations;
        }
        runs.push_back(std::move(entry));
    }
    return {{"completed", grid.runs.size()}, {"failures", failures_json(grid.failures)}, {"runs", std::move(runs)}};
}

SanityChiReport sanity_sweep_chi(const ExperimentConfig& config) {
    config.validate();
    std::vector<PreparedInstance> instances;
    for (int i = config.sanity_chi.i_min; i <= config.sanity_chi.i_max; ++i) {
        instances.push_back(prepare(build_sanity_pbm(i), config.eval_cutoff));
    }
    std::vector<RunTask> tasks;
    for (const auto& instance : instances) {
        for (int run = 0; run < config.runs; ++run) {
            tasks.push_back({&instance, "bubblerank", run});
        }
    }
    GridResult grid = execute(tasks, config, config.seed);

    SanityChiReport report;
    report.failures = grid.failures;
    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        std::vector<double> finals;
        for (const RunResult& run : grid.runs) {
            if (run.instance_id == instances[idx].instance.id) {
                finals.push_back(run.checkpoints.back().cum_regret);
            }
        }
        const auto stats = mean_se(finals);
        SanityChiRow row;
        row.i = config.sanity_chi.i_min + static_cast<int>(idx);
        row.chi_min = std::pow(0.5, row.i);
        row.final_regret = stats.mean;
        row.se_final_regret = stats.se;
        if (!report.rows.empty() && report.rows.back().final_regret > 0.0) {
            row.ratio = row.final_regret / report.rows.back().final_regret;
        }
        report.rows.push_back(row);
    }
    return report;
}

std::string sanity_chi_csv(const SanityChiReport& report) {
    std::ostringstream out;
    out << "i,chi_min,final_regret,ratio\n";
    for (const auto& row : report.rows) {
        out << row.i << ',' << format_double(row.chi_min) << ',' << format_double(row.final_regret) << ','
            << (row.ratio ? format_double(*row.ratio) : std::string()) << '\n';
    }
    return out.str();
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("least squares needs two or more paired points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw DomainError("least squares needs at least two distinct x values");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

SanityV0Report sanity_sweep_v0(const Instance& instance, int num_initial_lists, const ExperimentConfig& config) {
    config.validate();
    if (num_initial_lists < 2) {
        throw DomainError("sanity_sweep_v0 needs at least two initial lists");
    }
    Rng list_rng(seed_split(config.seed, instance.id, "sanity-v0-lists", 0));
    std::vector<PreparedInstance> instances;
    for (int idx = 0; idx < num_initial_lists; ++idx) {
        Instance variant = instance;
        variant.initial_list = idx == 0 ? RankedList::identity(instance.size()) : random_list(instance.size(), list_rng);
        variant.id = instance.id + "/r0-" + std::to_string(idx);
        instances.push_back(prepare(std::move(variant), config.eval_cutoff));
    }
    std::vector<RunTask> tasks;
    for (const auto& prepared : instances) {
        for (int run = 0; run < config.runs; ++run) {
            tasks.push_back({&prepared, "bubblerank", run});
        }
    }
    GridResult grid = execute(tasks, config, config.seed);

    SanityV0Report report;
    report.failures = grid.failures;
    std::vector<double> xs, ys;
    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        std::vector<double> finals;
        for (const RunResult& run : grid.runs) {
            if (run.instance_id == instances[idx].instance.id) {
                finals.push_back(run.checkpoints.back().cum_regret);
            }
        }
        const auto stats = mean_se(finals);
        report.rows.push_back({static_cast<int>(idx), instances[idx].instance.initial_list, instances[idx].v0_size,
                               stats.mean, stats.se});
        xs.push_back(instances[idx].v0_size);
        ys.push_back(stats.mean);
    }
    report.fit = least_squares(xs, ys);
    return report;
}

std::string sanity_v0_csv(const SanityV0Report& report) {
    std::ostringstream out;
    out << "list,v0,mean_final_regret,se_final_regret,initial_list\n";
    for (const auto& row : report.rows) {
        out << row.index << ',' << row.v0 << ',' << format_double(row.mean_final_regret) << ','
            << format_double(row.se_final_regret) << ',' << labels(row.initial_list) << '\n';
    }
    return out.str();
}

json sanity_v0_fit_json(const SanityV0Report& report) {
    return {{"slope", report.fit.slope},
            {"intercept", report.fit.intercept},
            {"r2", report.fit.r2},
            {"points", report.rows.size()},
            {"failures", failures_json(report.failures)}};
}

VerifyReport verify(const ExperimentConfig& config) {
    config.validate();
    const auto instances = load_instances(config);
    if (instances.empty()) {
        throw DomainError("verify needs at least one instance");
    }
    VerifyReport report;
    const auto add = [&](json check) {
        report.all_passed = report.all_passed && check.at("passed").get<bool>();
        report.checks.push_back(std::move(check));
    };

    for (const PreparedInstance& prepared : instances) {
        const Instance& inst = prepared.instance;
        const ClickModel& model = inst.model;
        const int k_items = inst.size();
        const auto& alpha = model.alpha();

        {
            Rng rng(seed_split(config.seed, inst.id, "verify-reward", 0));
            std::vector<RankedList> lists{inst.initial_list, RankedList::identity(k_items)};
            for (int r = 0; r < 3; ++r) {
                lists.push_back(random_list(k_items, rng));
            }
            json rows = json::array();
            bool passed = true;
            for (const RankedList& list : lists) {
                const double exact = expected_reward(model, list, prepared.cutoff);
                const McEstimate mc = mc_expected_reward(model, list, prepared.cutoff, config.verify.mc_samples, rng);
                const double diff = std::abs(mc.mean - exact);
                const bool ok = mc.stderr_ > 0.0 ? diff <= 4.0 * mc.stderr_ : diff <= 1e-12;
                passed = passed && ok;
                rows.push_back({{"list", list.one_based()}, {"exact", exact}, {"mc_mean", mc.mean}, {"mc_stderr", mc.stderr_}, {"passed", ok}});
            }
            add({{"check", "reward_oracle"}, {"instance", inst.id}, {"samples", config.verify.mc_samples}, {"lists", rows}, {"passed", passed}});
        }

        if (k_items <= kMaxExactItems) {
            const OptimalList best = brute_force_optimal(model, prepared.cutoff);
            const double sorted = expected_reward(model, RankedList::identity(k_items), prepared.cutoff);
            add({{"check", "optimal_list"},
                 {"instance", inst.id},
                 {"argmax", best.list.one_based()},
                 {"argmax_reward", best.reward},
                 {"sorted_reward", sorted},
                 {"passed", sorted >= best.reward - 1e-12}});
        }

        {
            Rng rng(seed_split(config.seed, inst.id, "verify-regret-gap", 0));
            int failures = 0;
            for (int r = 0; r < config.verify.random_lists; ++r) {
                failures += check_lemma3(model, random_list(k_items, rng)).holds ? 0 : 1;
            }
            add({{"check", "lemma3_regret_vs_gap"}, {"instance", inst.id}, {"lists", config.verify.random_lists},
                 {"failures", failures}, {"passed", failures == 0}});
        }

        {
            Rng rng(seed_split(config.seed, inst.id, "verify-drift", 0));
            json rows = json::array();
            bool passed = true;
            for (Position p = 0; p + 1 < k_items; ++p) {
                const Item a = inst.initial_list[p];
                const Item b = inst.initial_list[p + 1];
                const Item better = std::min(a, b);
                const Item worse = std::max(a, b);
                const double ab = alpha[static_cast<std::size_t>(better)];
                const double aw = alpha[static_cast<std::size_t>(worse)];
                if (!(ab > aw)) {
                    rows.push_back({{"pair", {better + 1, worse + 1}}, {"status", "indeterminate"}});
                    continue;
                }
                const double bound = drift_lower_bound(ab, aw);
                const auto est = estimate_pairwise_drift(model, inst.initial_list, better, worse, config.verify.drift_samples, rng);
                const bool ok = est && est->estimate + est->half_width >= bound;
                passed = passed && ok;
                json row = {{"pair", {better + 1, worse + 1}}, {"bound", bound}, {"passed", ok}};
                if (est) {
                    row["estimate"] = est->estimate;
                    row["half_width"] = est->half_width;
                    row["nonzero"] = est->nonzero;
                } else {
                    row["status"] = "indeterminate";
                }
                rows.push_back(std::move(row));
            }
            add({{"check", "pairwise_drift"}, {"instance", inst.id}, {"samples", config.verify.drift_samples}, {"pairs", rows}, {"passed", passed}});
        }

        {
            ExperimentConfig run_config = config;
            run_config.record_pair_stats = true;
            const auto seed = seed_split(config.seed, inst.id, "verify-bubblerank", 0);
            const RunResult run = run_one(prepared, "bubblerank", 0, seed, run_config);
            const double delta = run.delta.value();
            const EventEReport event = check_event_E(run.pair_stats, alpha, delta);
            int lemma7_failures = 0;
            for (const auto& r : check_lemma7(run.pair_stats.back(), alpha, delta)) {
                lemma7_failures += r.status == BoundStatus::fail ? 1 : 0;
            }
            const double final_regret = run.checkpoints.back().cum_regret;
            json bound = nullptr;
            bool bound_ok = true;
            if (model.strictly_canonical()) {
                const double b = theorem1_bound(model, prepared.v0_size, delta, config.horizon);
                bound = b;
                bound_ok = final_regret <= b;
            }
            const bool passed = event.holds() && lemma7_failures == 0 && bound_ok &&
                                run.diagnostics.wrong_direction_promotions == 0 && run.checkpoints.back().cum_violations == 0;
            add({{"check", "bubblerank_run"},
                 {"instance", inst.id},
                 {"horizon", config.horizon},
                 {"delta", delta},
                 {"event_e", {{"checked_pairs", event.checked_pairs},
                              {"violations_lower", event.violations_lower},
                              {"violations_upper", event.violations_upper},
                              {"snapshots", event.steps},
                              {"coverage", "sampled"}}},
                 {"lemma7_failures", lemma7_failures},
                 {"final_cum_regret", final_regret},
                 {"theorem1_bound", bound},
                 {"wrong_direction_promotions", run.diagnostics.wrong_direction_promotions},
                 {"cum_violations", run.checkpoints.back().cum_violations},
                 {"final_base_list", run.final_list.one_based()},
                 {"passed", passed}});
        }
    }
    return report;
}

}  // namespace bubblelab
