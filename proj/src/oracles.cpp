#include "bubblelab/oracles.hpp"

#include <cmath>
#include <numeric>

#include "bubblelab/metrics.hpp"

namespace bubblelab {

McEstimate mc_expected_reward(const ClickModel& model, const RankedList& list, int cutoff, std::uint64_t samples, Rng& rng) {
    if (samples < 1) {
        throw DomainError("need at least one sample");
    }
    if (cutoff < 1 || cutoff > model.size() || list.size() != model.size()) {
        throw DomainError("cutoff or list does not match the model");
    }
    const bool abandonment_reward = model.kind() == ModelKind::dependent_click;
    ClickVector clicks(static_cast<std::size_t>(model.size()));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t n = 0; n < samples; ++n) {
        const int abandoned_at = sample_clicks(model, list, rng, clicks);
        double reward = 0.0;
        if (abandonment_reward) {
            reward = (abandoned_at >= 0 && abandoned_at < cutoff) ? 1.0 : 0.0;
        } else {
            for (int k = 0; k < cutoff; ++k) {
                reward += clicks[static_cast<std::size_t>(k)];
            }
        }
        sum += reward;
        sum_sq += reward * reward;
    }
    const double count = static_cast<double>(samples);
    McEstimate out;
    out.mean = sum / count;
    if (samples > 1) {
        const double var = std::max(0.0, (sum_sq - count * out.mean * out.mean) / (count - 1.0));
        out.stderr_ = std::sqrt(var / count);
    }
    return out;
}

EventEReport check_event_E(std::span<const PairStats> snapshots, std::span<const double> alpha, double delta) {
    EventEReport report;
    report.delta = delta;
    report.steps = snapshots.size();
    const double log_inv_delta = -std::log(delta);
    for (const PairStats& stats : snapshots) {
        const int k_items = stats.size();
        if (k_items != static_cast<int>(alpha.size())) {
            throw DomainError("snapshot size does not match alpha");
        }
        for (Item i = 0; i < k_items; ++i) {
            for (Item j = 0; j < k_items; ++j) {
                if (i == j) {
                    continue;
                }
                ++report.checked_pairs;
                const double n = static_cast<double>(stats.n(i, j));
                const double s = static_cast<double>(stats.s(i, j));
                const double radius = 2.0 * std::sqrt(n * log_inv_delta);
                if (i < j) {
                    const double ai = alpha[static_cast<std::size_t>(i)];
                    const double aj = alpha[static_cast<std::size_t>(j)];
                    const double drift = ai + aj > 0.0 ? (ai - aj) / (ai + aj) : 0.0;
                    if (drift * n - radius > s) {
                        ++report.violations_lower;
                    }
                } else if (s > radius) {
                    ++report.violations_upper;
                }
            }
        }
    }
    return report;
}

double lemma7_bound(double alpha_upper, double alpha_lower, double delta) {
    return 15.0 * (alpha_upper + alpha_lower) / (alpha_upper - alpha_lower) * -std::log(delta);
}

std::vector<Lemma7Result> check_lemma7(const PairStats& stats, std::span<const double> alpha, double delta) {
    std::vector<Lemma7Result> out;
    const int k_items = stats.size();
    for (Item i = 0; i < k_items; ++i) {
        for (Item j = i + 1; j < k_items; ++j) {
            Lemma7Result r{i, j, stats.s(i, j), 0.0, BoundStatus::indeterminate};
            const double ai = alpha[static_cast<std::size_t>(i)];
            const double aj = alpha[static_cast<std::size_t>(j)];
            if (ai > aj) {
                r.bound = lemma7_bound(ai, aj, delta);
                r.status = static_cast<double>(r.s) <= r.bound ? BoundStatus::pass : BoundStatus::fail;
            }
            out.push_back(r);
        }
    }
    return out;
}

double drift_lower_bound(double alpha_i, double alpha_j) {
    return (alpha_i - alpha_j) / (alpha_i + alpha_j);
}

std::optional<DriftEstimate> estimate_pairwise_drift(const ClickModel& model, const RankedList& base_list, Item i, Item j,
                                                     std::uint64_t samples, Rng& rng, double z_crit) {
    const Position pos_i = inverse_rank(base_list, i);
    const Position pos_j = inverse_rank(base_list, j);
    if (std::abs(pos_i - pos_j) != 1) {
        throw DomainError("drift estimation needs items at adjacent positions of the base list");
    }
    // A fresh learner randomizes every candidate pair; pick the step parity
    // whose candidates include this pair.
    const Position upper = std::min(pos_i, pos_j);
    BubbleRankState state = BubbleRankState::initial(base_list, 0.5);
    state.t = (upper % 2 == 1) ? 1 : 2;

    ProposedAction action;
    ClickVector clicks(static_cast<std::size_t>(model.size()));
    std::uint64_t plus = 0;
    std::uint64_t minus = 0;
    for (std::uint64_t n = 0; n < samples; ++n) {
        propose_into(state, rng, action);
        sample_clicks(model, action.displayed, rng, clicks);
        const bool i_first = action.displayed[upper] == i;
        const int ci = clicks[static_cast<std::size_t>(i_first ? upper : upper + 1)];
        const int cj = clicks[static_cast<std::size_t>(i_first ? upper + 1 : upper)];
        if (ci > cj) {
            ++plus;
        } else if (cj > ci) {
            ++minus;
        }
    }
    const std::uint64_t nonzero = plus + minus;
    if (nonzero == 0) {
        return std::nullopt;
    }
    const double m = static_cast<double>(nonzero);
    const double p = static_cast<double>(plus) / m;
    DriftEstimate out;
    out.estimate = static_cast<double>(static_cast<std::int64_t>(plus) - static_cast<std::int64_t>(minus)) / m;
    out.half_width = z_crit * 2.0 * std::sqrt(p * (1.0 - p) / m);
    out.nonzero = nonzero;
    return out;
}

double theorem1_bound(const ClickModel& model, int v0_size, double delta, std::uint64_t n) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw DomainError("delta must lie in (0, 1)");
    }
    const int k_items = model.size();
    const auto& alpha = model.alpha();
    double gap_min = k_items > 1 ? alpha[0] - alpha[1] : 1.0;
    for (std::size_t i = 1; i + 1 < alpha.size(); ++i) {
        gap_min = std::min(gap_min, alpha[i] - alpha[i + 1]);
    }
    if (!(gap_min > 0.0)) {
        throw DomainError("regret bound needs strictly decreasing attraction (minimum gap is not positive)");
    }
    const RankedList optimal = RankedList::identity(k_items);
    const double chi_max = examination_prob(model, optimal, 0);
    const double chi_min = examination_prob(model, optimal, k_items - 1);
    const double k = static_cast<double>(k_items);
    const double horizon = static_cast<double>(n);
    const double learning = 180.0 * k * (chi_max / chi_min) * (k - 1.0 + 2.0 * v0_size) / gap_min * -std::log(delta);
    return learning + std::sqrt(delta) * k * k * k * horizon * horizon;
}

OptimalList brute_force_optimal(const ClickModel& model, int cutoff) {
    return enumerate_optimal(model, cutoff);
}

Lemma3Check check_lemma3(const ClickModel& model, const RankedList& list) {
    const int k_items = model.size();
    const RankedList optimal = RankedList::identity(k_items);
    Lemma3Check out;
    out.regret = expected_reward(model, optimal, k_items) - expected_reward(model, list, k_items);
    out.bound = k_items * examination_prob(model, optimal, 0) * attraction_gap(list, model.alpha());
    out.holds = out.regret <= out.bound + 1e-12;
    return out;
}

RankedList random_list(int k_items, Rng& rng) {
    std::vector<Item> items(static_cast<std::size_t>(k_items));
    std::iota(items.begin(), items.end(), 0);
    shuffle(std::span<Item>(items), rng);
    return RankedList(std::move(items));
}

}  // namespace bubblelab
