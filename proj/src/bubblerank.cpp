#include "bubblelab/bubblerank.hpp"

#include <algorithm>

#include <json.hpp>

namespace bubblelab {
namespace {

double radius(std::int64_t count, double log_inv_delta) {
    return 2.0 * std::sqrt(static_cast<double>(count) * log_inv_delta);
}

// Keep randomizing while the upper item is not yet known to be better.
bool uncertain(const PairStats& stats, Item upper, Item lower, double log_inv_delta) {
    const std::int64_t s = stats.s(upper, lower);
    return s <= 0 || static_cast<double>(s) <= radius(stats.n(upper, lower), log_inv_delta);
}

// The lower item is better with confidence.
bool beats(const PairStats& stats, Item lower, Item upper, double log_inv_delta) {
    const std::int64_t s = stats.s(lower, upper);
    return s > 0 && static_cast<double>(s) > radius(stats.n(lower, upper), log_inv_delta);
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw DomainError("delta must lie in (0, 1)");
    }
}

}  // namespace

PairStats PairStats::from_matrices(int k_items, std::vector<std::int64_t> s, std::vector<std::int64_t> n) {
    const auto cells = static_cast<std::size_t>(k_items * k_items);
    if (k_items < 1 || s.size() != cells || n.size() != cells) {
        throw DomainError("pair statistics must be K x K");
    }
    PairStats out;
    out.k_ = k_items;
    out.s_ = std::move(s);
    out.n_ = std::move(n);
    if (!out.invariants_hold()) {
        throw DomainError("pair statistics violate antisymmetry / symmetry / |s| <= n");
    }
    return out;
}

bool PairStats::invariants_hold() const noexcept {
    for (Item i = 0; i < k_; ++i) {
        for (Item j = 0; j < k_; ++j) {
            if (s(i, j) != -s(j, i) || n(i, j) != n(j, i) || n(i, j) < 0 || std::abs(s(i, j)) > n(i, j)) {
                return false;
            }
        }
    }
    return true;
}

double threshold(std::int64_t count, double delta) {
    check_delta(delta);
    if (count < 0) {
        throw DomainError("observation count must be non-negative");
    }
    return radius(count, -std::log(delta));
}

std::string to_string(UpdateScope scope) {
    return scope == UpdateScope::randomized_only ? "randomized_only" : "all_adjacent";
}

UpdateScope parse_update_scope(const std::string& name) {
    if (name == "randomized_only") return UpdateScope::randomized_only;
    if (name == "all_adjacent") return UpdateScope::all_adjacent;
    throw DomainError("unknown update_scope '" + name + "'");
}

BubbleRankState BubbleRankState::initial(const RankedList& initial_list, double delta) {
    check_delta(delta);
    return BubbleRankState{initial_list, PairStats(initial_list.size()), delta, 1};
}

void propose_into(const BubbleRankState& state, Rng& rng, ProposedAction& out) {
    const int k_items = state.base_list.size();
    const double log_inv_delta = state.log_inv_delta();
    out.displayed = state.base_list;
    out.randomized_pairs.clear();
    out.parity = static_cast<int>(state.t % 2);
    for (Position p = out.parity; p + 1 < k_items; p += 2) {
        const Item upper = state.base_list[p];
        const Item lower = state.base_list[p + 1];
        if (uncertain(state.stats, upper, lower, log_inv_delta)) {
            out.randomized_pairs.push_back({upper, lower, p});
            if (rng.coin()) {
                out.displayed.swap_with_next(p);
            }
        }
    }
}

ProposedAction propose(const BubbleRankState& state, Rng& rng) {
    ProposedAction out;
    propose_into(state, rng, out);
    return out;
}

PromotionReport update(BubbleRankState& state, const ProposedAction& action, std::span<const std::uint8_t> clicks,
                       UpdateScope scope) {
    const int k_items = state.base_list.size();
    if (static_cast<int>(clicks.size()) != k_items) {
        throw ContractViolation("click vector has " + std::to_string(clicks.size()) + " entries, expected " +
                                std::to_string(k_items));
    }

    const auto observe = [&](Position p) {
        const auto upper_click = clicks[static_cast<std::size_t>(p)];
        const auto lower_click = clicks[static_cast<std::size_t>(p) + 1];
        if (upper_click == lower_click) {
            return;
        }
        const Item shown_upper = action.displayed[p];
        const Item shown_lower = action.displayed[p + 1];
        if (upper_click != 0) {
            state.stats.record_win(shown_upper, shown_lower);
        } else {
            state.stats.record_win(shown_lower, shown_upper);
        }
    };

    if (scope == UpdateScope::randomized_only) {
        for (const RandomizedPair& pair : action.randomized_pairs) {
            observe(pair.position);
        }
    } else {
        for (Position p = action.parity; p + 1 < k_items; p += 2) {
            observe(p);
        }
    }

    PromotionReport report;
    const double log_inv_delta = state.log_inv_delta();
    for (Position k = 0; k + 1 < k_items; ++k) {
        const Item upper = state.base_list[k];
        const Item lower = state.base_list[k + 1];
        if (beats(state.stats, lower, upper, log_inv_delta)) {
            state.base_list.swap_with_next(k);
            ++report.promotions;
            if (lower > upper) {
                ++report.wrong_direction;
            }
        }
    }
    ++state.t;
    return report;
}

std::string state_to_json(const BubbleRankState& state) {
    const int k_items = state.stats.size();
    nlohmann::json doc;
    doc["base_list"] = state.base_list.one_based();
    auto rows = [&](std::span<const std::int64_t> cells) {
        nlohmann::json matrix = nlohmann::json::array();
        for (int i = 0; i < k_items; ++i) {
            matrix.push_back(std::vector<std::int64_t>(cells.begin() + i * k_items, cells.begin() + (i + 1) * k_items));
        }
        return matrix;
    };
    doc["s"] = rows(state.stats.s_matrix());
    doc["n"] = rows(state.stats.n_matrix());
    doc["delta"] = state.delta;
    doc["t"] = state.t;
    return doc.dump();
}

BubbleRankState state_from_json(const std::string& json_text) {
    try {
        const auto doc = nlohmann::json::parse(json_text);
        const auto labels = doc.at("base_list").get<std::vector<int>>();
        RankedList base = RankedList::from_one_based(labels);
        const int k_items = base.size();
        auto flatten = [&](const nlohmann::json& matrix) {
            std::vector<std::int64_t> cells;
            if (!matrix.is_array() || static_cast<int>(matrix.size()) != k_items) {
                throw DomainError("statistics matrix must have K rows");
            }
            for (const auto& row : matrix) {
                const auto values = row.get<std::vector<std::int64_t>>();
                if (static_cast<int>(values.size()) != k_items) {
                    throw DomainError("statistics matrix must have K columns");
                }
                cells.insert(cells.end(), values.begin(), values.end());
            }
            return cells;
        };
        BubbleRankState state;
        state.base_list = std::move(base);
        state.stats = PairStats::from_matrices(k_items, flatten(doc.at("s")), flatten(doc.at("n")));
        state.delta = doc.at("delta").get<double>();
        check_delta(state.delta);
        state.t = doc.at("t").get<std::uint64_t>();
        if (state.t < 1) {
            throw DomainError("t must be >= 1");
        }
        return state;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed state snapshot: ") + e.what());
    }
}

double DeltaPolicy::resolve(std::uint64_t horizon) const {
    if (fixed) {
        check_delta(*fixed);
        return *fixed;
    }
    const double n = static_cast<double>(std::max<std::uint64_t>(horizon, 2));
    return 1.0 / (n * n * n * n);
}

DoublingBubbleRank::DoublingBubbleRank(RankedList initial_list, std::uint64_t initial_horizon, DeltaPolicy policy,
                                       UpdateScope scope)
    : initial_list_(std::move(initial_list)),
      horizon_(initial_horizon),
      policy_(policy),
      scope_(scope),
      state_(BubbleRankState::initial(initial_list_, policy.resolve(initial_horizon))) {
    if (initial_horizon < 1) {
        throw DomainError("horizon estimate must be >= 1");
    }
}

const ProposedAction& DoublingBubbleRank::act(Rng& rng) {
    if (state_.t == horizon_ + 1) {
        state_.base_list = initial_list_;
        horizon_ *= 2;
        state_.delta = policy_.resolve(horizon_);
        resets_.push_back(state_.t);
    }
    propose_into(state_, rng, action_);
    return action_;
}

PromotionReport DoublingBubbleRank::feedback(std::span<const std::uint8_t> clicks) {
    return update(state_, action_, clicks, scope_);
}

DoublingTrajectory run_with_doubling(const Instance& instance, DeltaPolicy policy, std::uint64_t initial_horizon,
                                     std::uint64_t total_steps, std::span<const std::uint64_t> checkpoints, Rng& rng,
                                     UpdateScope scope) {
    DoublingBubbleRank learner(instance.initial_list, initial_horizon, policy, scope);
    DoublingTrajectory out;
    ClickVector clicks(static_cast<std::size_t>(instance.size()));
    std::size_t next = 0;
    for (std::uint64_t step = 1; step <= total_steps; ++step) {
        const ProposedAction& action = learner.act(rng);
        sample_clicks(instance.model, action.displayed, rng, clicks);
        learner.feedback(clicks);
        while (next < checkpoints.size() && checkpoints[next] < step) {
            ++next;
        }
        if (next < checkpoints.size() && checkpoints[next] == step) {
            out.checkpoints.push_back({step, learner.state()});
            ++next;
        }
    }
    out.reset_steps = learner.reset_steps();
    out.final_state = learner.state();
    return out;
}

}  // namespace bubblelab
