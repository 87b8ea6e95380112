#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bubblelab/click_models.hpp"
#include "bubblelab/core.hpp"
#include "bubblelab/random.hpp"

namespace bubblelab {

/// Pairwise click-difference statistics. s(i, j) accumulates
/// c(pos of i) - c(pos of j) over steps where exactly one of the two was
/// clicked while the pair was observed; n(i, j) counts those steps.
/// Invariants: s antisymmetric, n symmetric, |s| <= n.
class PairStats {
public:
    PairStats() = default;
    explicit PairStats(int k_items)
        : k_(k_items), s_(static_cast<std::size_t>(k_items * k_items), 0), n_(static_cast<std::size_t>(k_items * k_items), 0) {}

    int size() const noexcept { return k_; }
    std::int64_t s(Item i, Item j) const noexcept { return s_[index(i, j)]; }
    std::int64_t n(Item i, Item j) const noexcept { return n_[index(i, j)]; }

    /// One observation in which `winner` was clicked and `loser` was not.
    void record_win(Item winner, Item loser) noexcept {
        ++s_[index(winner, loser)];
        --s_[index(loser, winner)];
        ++n_[index(winner, loser)];
        ++n_[index(loser, winner)];
    }

    /// Dense row-major K x K views, used by snapshots.
    std::span<const std::int64_t> s_matrix() const noexcept { return s_; }
    std::span<const std::int64_t> n_matrix() const noexcept { return n_; }

    /// Rebuilds from dense matrices; throws DomainError when the invariants fail.
    static PairStats from_matrices(int k_items, std::vector<std::int64_t> s, std::vector<std::int64_t> n);

    /// Checks antisymmetry, symmetry and |s| <= n.
    bool invariants_hold() const noexcept;

    bool operator==(const PairStats&) const = default;

private:
    std::size_t index(Item i, Item j) const noexcept { return static_cast<std::size_t>(i * k_ + j); }

    int k_ = 0;
    std::vector<std::int64_t> s_;
    std::vector<std::int64_t> n_;
};

/// Confidence radius 2 * sqrt(count * log(1/delta)). Throws DomainError
/// unless 0 < delta < 1.
double threshold(std::int64_t count, double delta);

/// Which pairs feed the statistics after a step.
enum class UpdateScope {
    /// Only pairs that passed the randomization test this step.
    randomized_only,
    /// Every adjacent candidate pair of this step's parity, randomized or not.
    all_adjacent,
};

std::string to_string(UpdateScope scope);
UpdateScope parse_update_scope(const std::string& name);

/// The learner's entire memory.
struct BubbleRankState {
    RankedList base_list;
    PairStats stats;
    double delta = 0.0;
    std::uint64_t t = 1;

    /// Fresh state: base = initial list, all statistics zero, t = 1.
    static BubbleRankState initial(const RankedList& initial_list, double delta);

    double log_inv_delta() const { return -std::log(delta); }

    bool operator==(const BubbleRankState&) const = default;
};

/// A base-list pair that passed the randomization test: `upper` sits at
/// `position` in the base list and `lower` right below it.
struct RandomizedPair {
    Item upper;
    Item lower;
    Position position;
    bool operator==(const RandomizedPair&) const = default;
};

struct ProposedAction {
    RankedList displayed;
    std::vector<RandomizedPair> randomized_pairs;
    /// t mod 2; candidate pairs start at 0-based position `parity`.
    int parity = 0;
};

/// Outcome of the promotion pass of one update.
struct PromotionReport {
    int promotions = 0;
    /// Promotions that moved a less attractive item (higher canonical label) up.
    int wrong_direction = 0;
};

/// Builds the displayed list for step state.t: every candidate base pair at
/// positions (h, h+1), (h+2, h+3), ... with h = t mod 2 whose statistic passes
/// s(i, j) <= threshold(n(i, j)) is randomized and swapped with probability 1/2.
ProposedAction propose(const BubbleRankState& state, Rng& rng);

/// Allocation-free variant of propose; `out` buffers are reused.
void propose_into(const BubbleRankState& state, Rng& rng, ProposedAction& out);

/// Folds the clicks of the displayed list into the statistics, runs one
/// top-down promotion pass over the base list and advances t.
/// Throws ContractViolation when clicks.size() != K.
PromotionReport update(BubbleRankState& state, const ProposedAction& action, std::span<const std::uint8_t> clicks,
                       UpdateScope scope = UpdateScope::randomized_only);

/// Snapshot format: {"base_list": [1-based], "s": [[...]], "n": [[...]], "delta": x, "t": n}.
std::string state_to_json(const BubbleRankState& state);
BubbleRankState state_from_json(const std::string& json_text);

/// How the confidence parameter follows the horizon: either a fixed value or
/// delta = n^-4 for the horizon n in force (n clamped to >= 2 so delta < 1).
struct DeltaPolicy {
    std::optional<double> fixed;

    double resolve(std::uint64_t horizon) const;
    static DeltaPolicy automatic() { return {}; }
    static DeltaPolicy constant(double delta) { return DeltaPolicy{delta}; }
};

/// BubbleRank under an unknown horizon. Whenever step t reaches
/// (horizon estimate + 1), the base list is reset to R0, the estimate doubles
/// and delta is recomputed; pair statistics carry over.
class DoublingBubbleRank {
public:
    DoublingBubbleRank(RankedList initial_list, std::uint64_t initial_horizon, DeltaPolicy policy,
                       UpdateScope scope = UpdateScope::randomized_only);

    /// Applies a pending reset for the current step, then proposes.
    const ProposedAction& act(Rng& rng);
    PromotionReport feedback(std::span<const std::uint8_t> clicks);

    const BubbleRankState& state() const noexcept { return state_; }
    std::uint64_t horizon_estimate() const noexcept { return horizon_; }
    const std::vector<std::uint64_t>& reset_steps() const noexcept { return resets_; }

private:
    RankedList initial_list_;
    std::uint64_t horizon_;
    DeltaPolicy policy_;
    UpdateScope scope_;
    BubbleRankState state_;
    ProposedAction action_;
    std::vector<std::uint64_t> resets_;
};

struct DoublingCheckpoint {
    std::uint64_t step;
    BubbleRankState state;
};

struct DoublingTrajectory {
    std::vector<std::uint64_t> reset_steps;
    std::vector<DoublingCheckpoint> checkpoints;
    BubbleRankState final_state;
};

/// Runs the doubling-trick learner against `instance` for `total_steps`,
/// recording the state after each step listed in `checkpoints`.
DoublingTrajectory run_with_doubling(const Instance& instance, DeltaPolicy policy, std::uint64_t initial_horizon,
                                     std::uint64_t total_steps, std::span<const std::uint64_t> checkpoints, Rng& rng,
                                     UpdateScope scope = UpdateScope::randomized_only);

}  // namespace bubblelab
