#include "bubblelab/agents.hpp"

#include <utility>

namespace bubblelab {
namespace {

double resolve_delta(const AgentView& view) {
    if (view.delta) {
        return DeltaPolicy::constant(*view.delta).resolve(0);
    }
    if (!view.horizon) {
        throw DomainError("BubbleRank needs either a horizon or an explicit delta");
    }
    return DeltaPolicy::automatic().resolve(*view.horizon);
}

void check_feedback(const RankedList& displayed, const RankedList& expected, std::span<const std::uint8_t> clicks) {
    if (static_cast<int>(clicks.size()) != expected.size()) {
        throw ContractViolation("click vector length differs from K");
    }
    if (!(displayed == expected)) {
        throw ContractViolation("feedback received for a list the agent did not display");
    }
}

}  // namespace

const RankedList& UniformShuffleAgent::act(std::uint64_t, Rng& rng) {
    shuffle(std::span<Item>(items_), rng);
    list_ = RankedList(items_);
    return list_;
}

BubbleRankAgent::BubbleRankAgent(const AgentView& view, UpdateScope scope)
    : scope_(scope), state_(BubbleRankState::initial(view.initial_list, resolve_delta(view))) {}

const RankedList& BubbleRankAgent::act(std::uint64_t, Rng& rng) {
    propose_into(state_, rng, action_);
    return action_.displayed;
}

void BubbleRankAgent::feedback(const RankedList& displayed, std::span<const std::uint8_t> clicks) {
    check_feedback(displayed, action_.displayed, clicks);
    const PromotionReport report = update(state_, action_, clicks, scope_);
    diagnostics_.promotions += static_cast<std::uint64_t>(report.promotions);
    diagnostics_.wrong_direction_promotions += static_cast<std::uint64_t>(report.wrong_direction);
}

DoublingBubbleRankAgent::DoublingBubbleRankAgent(const AgentView& view, UpdateScope scope)
    : learner_(view.initial_list, view.horizon.value_or(kDefaultDoublingHorizon),
               view.delta ? DeltaPolicy::constant(*view.delta) : DeltaPolicy::automatic(), scope) {}

const RankedList& DoublingBubbleRankAgent::act(std::uint64_t, Rng& rng) {
    return learner_.act(rng).displayed;
}

void DoublingBubbleRankAgent::feedback(const RankedList& displayed, std::span<const std::uint8_t> clicks) {
    if (static_cast<int>(clicks.size()) != displayed.size()) {
        throw ContractViolation("click vector length differs from K");
    }
    const PromotionReport report = learner_.feedback(clicks);
    diagnostics_.promotions += static_cast<std::uint64_t>(report.promotions);
    diagnostics_.wrong_direction_promotions += static_cast<std::uint64_t>(report.wrong_direction);
}

AgentDiagnostics DoublingBubbleRankAgent::diagnostics() const {
    AgentDiagnostics out = diagnostics_;
    out.resets = learner_.reset_steps().size();
    return out;
}

bool is_known_agent(const std::string& name) {
    return name == "bubblerank" || name == "bubblerank-doubling" || name == "static" || name == "uniform" ||
           name == "oracle";
}

std::unique_ptr<Agent> make_agent(const std::string& name, const AgentView& view, const Instance& instance,
                                  UpdateScope scope) {
    if (name == "bubblerank") return std::make_unique<BubbleRankAgent>(view, scope);
    if (name == "bubblerank-doubling") return std::make_unique<DoublingBubbleRankAgent>(view, scope);
    if (name == "static") return std::make_unique<StaticAgent>(view);
    if (name == "uniform") return std::make_unique<UniformShuffleAgent>(view);
    if (name == "oracle") return std::make_unique<OracleAgent>(instance.model, instance.eval_cutoff);
    throw DomainError("unknown agent '" + name + "'");
}

}  // namespace bubblelab
