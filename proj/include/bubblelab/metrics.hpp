#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bubblelab/click_models.hpp"
#include "bubblelab/core.hpp"

namespace bubblelab {

/// Metrics recorded at one checkpoint of a run.
struct StepMetrics {
    std::uint64_t step = 0;
    double instant_regret = 0.0;
    double cum_regret = 0.0;
    double ndcg = 0.0;
    int inversions = 0;
    std::uint64_t cum_violations = 0;

    bool operator==(const StepMetrics&) const = default;
};

/// r(R*) - r(displayed) at the cutoff, given the precomputed optimal reward.
double instant_regret(const ClickModel& model, double optimal_reward, const RankedList& displayed, int cutoff);

/// 1 iff |V(displayed)| > |V0| + K/2, with K/2 compared exactly (2|V| > 2|V0| + K).
inline bool violation_indicator(int displayed_inversions, int v0_size, int k_items) noexcept {
    return 2 * displayed_inversions > 2 * v0_size + k_items;
}
bool violation_indicator(const RankedList& displayed, int v0_size, int k_items);

/// DCG@cutoff(list) / DCG@cutoff(1, ..., K) with attraction probabilities as
/// gains and log2(k + 1) discounts. Returns 1.0 when the ideal DCG is zero.
double ndcg_at(const RankedList& list, std::span<const double> alpha, int cutoff);

/// Precomputed discounts and ideal DCG for repeated NDCG evaluation.
class NdcgScorer {
public:
    NdcgScorer(std::span<const double> alpha, int cutoff);
    double operator()(std::span<const Item> items) const noexcept;

private:
    std::vector<double> alpha_;
    std::vector<double> discount_;
    double ideal_ = 0.0;
};

/// Sum of the positive jumps alpha(R(k+1)) - alpha(R(k)) between adjacent positions.
double attraction_gap(const RankedList& list, std::span<const double> alpha);

}  // namespace bubblelab
