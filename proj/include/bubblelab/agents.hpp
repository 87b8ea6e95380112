#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "bubblelab/bubblerank.hpp"
#include "bubblelab/click_models.hpp"
#include "bubblelab/core.hpp"
#include "bubblelab/random.hpp"

namespace bubblelab {

/// Everything a learning agent may know about its environment. Click-model
/// parameters are deliberately absent: clicks are the only feedback.
struct AgentView {
    int k_items = 0;
    RankedList initial_list;
    std::optional<std::uint64_t> horizon;
    std::optional<double> delta;
};

struct AgentDiagnostics {
    std::uint64_t promotions = 0;
    std::uint64_t wrong_direction_promotions = 0;
    std::uint64_t resets = 0;
};

/// Agent contract for the interaction loop: act, display, observe clicks.
class Agent {
public:
    virtual ~Agent() = default;

    virtual std::string name() const = 0;

    /// List to display at step t (1-based). The reference stays valid until
    /// the next call to act or feedback.
    virtual const RankedList& act(std::uint64_t t, Rng& rng) = 0;

    /// Clicks observed on the list returned by the last act.
    virtual void feedback(const RankedList& displayed, std::span<const std::uint8_t> clicks) = 0;

    /// The agent's current best-guess list (base list for BubbleRank).
    virtual const RankedList& incumbent() const = 0;

    /// Pair statistics, for agents that keep them.
    virtual const PairStats* pair_stats() const { return nullptr; }
    virtual std::optional<double> current_delta() const { return std::nullopt; }

    virtual AgentDiagnostics diagnostics() const { return {}; }
};

/// Production baseline: always shows R0.
class StaticAgent final : public Agent {
public:
    explicit StaticAgent(const AgentView& view) : list_(view.initial_list) {}

    std::string name() const override { return "static"; }
    const RankedList& act(std::uint64_t, Rng&) override { return list_; }
    void feedback(const RankedList&, std::span<const std::uint8_t>) override {}
    const RankedList& incumbent() const override { return list_; }

private:
    RankedList list_;
};

/// Unsafe explorer: a fresh uniformly random permutation every step.
class UniformShuffleAgent final : public Agent {
public:
    explicit UniformShuffleAgent(const AgentView& view) : list_(view.initial_list), items_(list_.items().begin(), list_.items().end()) {}

    std::string name() const override { return "uniform"; }
    const RankedList& act(std::uint64_t t, Rng& rng) override;
    void feedback(const RankedList&, std::span<const std::uint8_t>) override {}
    const RankedList& incumbent() const override { return list_; }

private:
    RankedList list_;
    std::vector<Item> items_;
};

/// Diagnostic agent that knows the click model and always plays its argmax list.
class OracleAgent final : public Agent {
public:
    OracleAgent(const ClickModel& model, int cutoff) : list_(optimal_reward(model, cutoff).list) {}

    std::string name() const override { return "oracle"; }
    const RankedList& act(std::uint64_t, Rng&) override { return list_; }
    void feedback(const RankedList&, std::span<const std::uint8_t>) override {}
    const RankedList& incumbent() const override { return list_; }

private:
    RankedList list_;
};

/// BubbleRank with a known horizon. delta comes from the view, or n^-4 when
/// only the horizon is given.
class BubbleRankAgent final : public Agent {
public:
    explicit BubbleRankAgent(const AgentView& view, UpdateScope scope = UpdateScope::randomized_only);

    std::string name() const override { return "bubblerank"; }
    const RankedList& act(std::uint64_t t, Rng& rng) override;
    void feedback(const RankedList& displayed, std::span<const std::uint8_t> clicks) override;
    const RankedList& incumbent() const override { return state_.base_list; }
    const PairStats* pair_stats() const override { return &state_.stats; }
    std::optional<double> current_delta() const override { return state_.delta; }
    AgentDiagnostics diagnostics() const override { return diagnostics_; }

    const BubbleRankState& state() const noexcept { return state_; }

private:
    UpdateScope scope_;
    BubbleRankState state_;
    ProposedAction action_;
    AgentDiagnostics diagnostics_;
};

/// BubbleRank with the doubling trick. The view's horizon is the initial
/// estimate (default 1000); delta follows the view's delta or n^-4.
class DoublingBubbleRankAgent final : public Agent {
public:
    explicit DoublingBubbleRankAgent(const AgentView& view, UpdateScope scope = UpdateScope::randomized_only);

    std::string name() const override { return "bubblerank-doubling"; }
    const RankedList& act(std::uint64_t t, Rng& rng) override;
    void feedback(const RankedList& displayed, std::span<const std::uint8_t> clicks) override;
    const RankedList& incumbent() const override { return learner_.state().base_list; }
    const PairStats* pair_stats() const override { return &learner_.state().stats; }
    std::optional<double> current_delta() const override { return learner_.state().delta; }
    AgentDiagnostics diagnostics() const override;

private:
    DoublingBubbleRank learner_;
    AgentDiagnostics diagnostics_;
};

inline constexpr std::uint64_t kDefaultDoublingHorizon = 1000;

/// Known agent names: "bubblerank", "bubblerank-doubling", "static",
/// "uniform", "oracle". Only the oracle receives the click model.
bool is_known_agent(const std::string& name);
std::unique_ptr<Agent> make_agent(const std::string& name, const AgentView& view, const Instance& instance,
                                  UpdateScope scope = UpdateScope::randomized_only);

}  // namespace bubblelab
