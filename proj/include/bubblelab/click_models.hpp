#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bubblelab/core.hpp"
#include "bubblelab/random.hpp"

namespace bubblelab {

using ClickVector = std::vector<std::uint8_t>;

/// Cascade model: the user scans top-down and clicks the first attractive
/// item, then leaves. Examination of position k is prod_{i<k} (1 - alpha(R(i))).
struct CascadeModel {
    std::vector<double> alpha;
};

/// Position-based model: position k is examined independently with
/// probability chi[k]; chi must be non-increasing.
struct PositionBasedModel {
    std::vector<double> alpha;
    std::vector<double> chi;
};

/// Dependent click model: cascade scan that may continue after a click;
/// after a click at position k the user abandons with probability v[k].
/// Reward is the number of abandonment clicks.
struct DependentClickModel {
    std::vector<double> alpha;
    std::vector<double> v;
};

enum class ModelKind { cascade, position_based, dependent_click };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// One of the three click models. Validates probabilities on construction.
class ClickModel {
public:
    using Variant = std::variant<CascadeModel, PositionBasedModel, DependentClickModel>;

    explicit ClickModel(CascadeModel model);
    explicit ClickModel(PositionBasedModel model);
    explicit ClickModel(DependentClickModel model);

    ModelKind kind() const noexcept { return static_cast<ModelKind>(model_.index()); }
    int size() const noexcept { return static_cast<int>(alpha().size()); }
    const std::vector<double>& alpha() const noexcept;
    const Variant& variant() const noexcept { return model_; }

    /// True when alpha is strictly decreasing and positive.
    bool strictly_canonical() const;

private:
    Variant model_;
};

/// A simulated query: click model, initial production list R0 and the
/// evaluation cutoff used by every metric.
struct Instance {
    std::string id;
    ClickModel model;
    RankedList initial_list;
    int eval_cutoff = 0;
    /// original_label[canonical item] = 1-based label in the source file.
    std::vector<int> original_label;

    int size() const noexcept { return model.size(); }
};

/// Draws one user session. Writes K click indicators into `clicks` and
/// returns the position of the abandonment click, or -1 when the session
/// ended without one (DCM only; CM/PBM always return -1).
int sample_clicks(const ClickModel& model, const RankedList& list, Rng& rng, std::span<std::uint8_t> clicks);
ClickVector sample_clicks(const ClickModel& model, const RankedList& list, Rng& rng);

/// Exact expected reward at positions [0, cutoff): expected clicks for CM and
/// PBM, expected abandonment clicks for DCM. Throws DomainError for a cutoff
/// outside [1, K].
double expected_reward(const ClickModel& model, const RankedList& list, int cutoff);

/// Exact examination probability of 0-based position k in `list`.
double examination_prob(const ClickModel& model, const RankedList& list, Position k);

struct OptimalList {
    RankedList list;
    double reward = 0.0;
    bool exact = false;
    std::string warning;
};

/// Largest K solved by exhaustive search.
inline constexpr int kMaxExactItems = 10;

/// Argmax of expected_reward over all K! lists when K <= 10. Among lists
/// whose reward is within 1e-12 of the best, the lexicographically smallest
/// wins, so tied optima resolve to (1, ..., K) whenever it is optimal.
/// For K > 10 returns (1, ..., K) and sets a warning when the monotonicity
/// assumptions behind it cannot be confirmed.
OptimalList optimal_reward(const ClickModel& model, int cutoff);

/// Exhaustive search, K <= 10 only.
OptimalList enumerate_optimal(const ClickModel& model, int cutoff);

/// Synthetic PBM with alpha = (0.9, 0.5, ..., 0.5), chi = (0.9, ..., 0.9,
/// 0.5^i, 0.5^i), K = 10 and the most attractive item shown last in R0.
Instance build_sanity_pbm(int i);

/// Parses the JSON instance format and relabels items so that alpha is
/// non-increasing. Throws DomainError on malformed or invalid content.
Instance parse_instance(const std::string& json_text);
Instance load_instance(const std::filesystem::path& path);

/// Serializes in the file format using canonical (relabeled) item labels.
std::string instance_to_json(const Instance& instance);

}  // namespace bubblelab
