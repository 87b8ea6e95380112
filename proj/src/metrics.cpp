#include "bubblelab/metrics.hpp"

#include <cmath>

namespace bubblelab {

double instant_regret(const ClickModel& model, double optimal_reward, const RankedList& displayed, int cutoff) {
    return optimal_reward - expected_reward(model, displayed, cutoff);
}

bool violation_indicator(const RankedList& displayed, int v0_size, int k_items) {
    return violation_indicator(count_inversions(displayed), v0_size, k_items);
}

NdcgScorer::NdcgScorer(std::span<const double> alpha, int cutoff) : alpha_(alpha.begin(), alpha.end()) {
    if (cutoff < 1 || cutoff > static_cast<int>(alpha.size())) {
        throw DomainError("NDCG cutoff outside [1, K]");
    }
    for (int k = 0; k < cutoff; ++k) {
        discount_.push_back(1.0 / std::log2(static_cast<double>(k) + 2.0));
        ideal_ += alpha_[static_cast<std::size_t>(k)] * discount_.back();
    }
}

double NdcgScorer::operator()(std::span<const Item> items) const noexcept {
    if (ideal_ == 0.0) {
        return 1.0;
    }
    double dcg = 0.0;
    for (std::size_t k = 0; k < discount_.size(); ++k) {
        dcg += alpha_[static_cast<std::size_t>(items[k])] * discount_[k];
    }
    return dcg / ideal_;
}

double ndcg_at(const RankedList& list, std::span<const double> alpha, int cutoff) {
    if (list.size() != static_cast<int>(alpha.size())) {
        throw DomainError("list length does not match alpha");
    }
    return NdcgScorer(alpha, cutoff)(list.items());
}

double attraction_gap(const RankedList& list, std::span<const double> alpha) {
    if (list.size() != static_cast<int>(alpha.size())) {
        throw DomainError("list length does not match alpha");
    }
    double gap = 0.0;
    for (Position k = 0; k + 1 < list.size(); ++k) {
        const double jump = alpha[static_cast<std::size_t>(list[k + 1])] - alpha[static_cast<std::size_t>(list[k])];
        if (jump > 0.0) {
            gap += jump;
        }
    }
    return gap;
}

}  // namespace bubblelab
