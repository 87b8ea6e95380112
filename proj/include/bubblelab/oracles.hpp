#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bubblelab/bubblerank.hpp"
#include "bubblelab/click_models.hpp"
#include "bubblelab/core.hpp"
#include "bubblelab/random.hpp"

// Independent checks of the simulator and of the analytical guarantees
// behind BubbleRank. Everything here is read-only over models and
// trajectories.
namespace bubblelab {

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Monte-Carlo estimate of the reward at the cutoff: clicks in the top
/// `cutoff` positions (CM, PBM) or an abandonment click within them (DCM).
McEstimate mc_expected_reward(const ClickModel& model, const RankedList& list, int cutoff, std::uint64_t samples, Rng& rng);

/// Violations of the confidence event over a sequence of statistics snapshots.
/// Lower: for i < j, ((a_i - a_j)/(a_i + a_j)) n - 2 sqrt(n log(1/delta)) <= s(i, j).
/// Upper: for i > j, s(i, j) <= 2 sqrt(n log(1/delta)).
struct EventEReport {
    std::uint64_t checked_pairs = 0;
    std::uint64_t violations_lower = 0;
    std::uint64_t violations_upper = 0;
    double delta = 0.0;
    std::uint64_t steps = 0;

    bool holds() const noexcept { return violations_lower == 0 && violations_upper == 0; }
};

EventEReport check_event_E(std::span<const PairStats> snapshots, std::span<const double> alpha, double delta);

enum class BoundStatus { pass, fail, indeterminate };

struct Lemma7Result {
    Item upper;  ///< more attractive item (smaller label)
    Item lower;
    std::int64_t s = 0;
    double bound = 0.0;
    BoundStatus status = BoundStatus::pass;
};

/// Bound on the final click difference of every pair i < j:
/// s(i, j) <= 15 (a_i + a_j)/(a_i - a_j) log(1/delta). Pairs with equal
/// attraction are indeterminate.
std::vector<Lemma7Result> check_lemma7(const PairStats& stats, std::span<const double> alpha, double delta);

double lemma7_bound(double alpha_upper, double alpha_lower, double delta);

struct DriftEstimate {
    double estimate = 0.0;
    double half_width = 0.0;
    std::uint64_t nonzero = 0;
};

/// Monte-Carlo estimate of E[z | z != 0] with z = c(pos of i) - c(pos of j)
/// when i and j sit next to each other in `base_list` and are displayed
/// through a fresh BubbleRank proposal (coin flip included). Returns nullopt
/// when no sample had z != 0. `z_crit` scales the standard error into the
/// confidence half-width.
std::optional<DriftEstimate> estimate_pairwise_drift(const ClickModel& model, const RankedList& base_list, Item i, Item j,
                                                     std::uint64_t samples, Rng& rng, double z_crit = 3.0);

/// Lower bound (a_i - a_j)/(a_i + a_j) on the conditional drift.
double drift_lower_bound(double alpha_i, double alpha_j);

/// Regret ceiling
/// 180 K (chi_max/chi_min) (K - 1 + 2|V0|)/gap_min log(1/delta) + sqrt(delta) K^3 n^2
/// with chi_max, chi_min the examination of the first and last position of
/// (1, ..., K). Throws DomainError when the minimum gap is not positive.
double theorem1_bound(const ClickModel& model, int v0_size, double delta, std::uint64_t n);

/// Exhaustive argmax over all lists; refuses K > 10.
OptimalList brute_force_optimal(const ClickModel& model, int cutoff);

/// Full-list regret r(R*) - r(R) against K chi_max gap(R) for one list.
struct Lemma3Check {
    double regret = 0.0;
    double bound = 0.0;
    bool holds = true;
};
Lemma3Check check_lemma3(const ClickModel& model, const RankedList& list);

RankedList random_list(int k_items, Rng& rng);

}  // namespace bubblelab
