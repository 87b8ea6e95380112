#include "bubblelab/click_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace bubblelab {
namespace {

void check_probabilities(const std::vector<double>& values, const char* name) {
    if (values.empty()) {
        throw DomainError(std::string(name) + " must not be empty");
    }
    for (double p : values) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError(std::string(name) + " entries must lie in [0, 1]");
        }
    }
}

void check_same_size(const std::vector<double>& a, const std::vector<double>& b, const char* name) {
    if (a.size() != b.size()) {
        throw DomainError(std::string(name) + " must have one entry per position");
    }
}

void check_list(const ClickModel& model, std::span<const Item> items) {
    if (static_cast<int>(items.size()) != model.size()) {
        throw DomainError("list length does not match the model's item count");
    }
}

void check_cutoff(const ClickModel& model, int cutoff) {
    if (cutoff < 1 || cutoff > model.size()) {
        throw DomainError("cutoff " + std::to_string(cutoff) + " outside [1, K]");
    }
}

double reward_of(const CascadeModel& m, std::span<const Item> items, int cutoff) {
    double exam = 1.0;
    double sum = 0.0;
    for (int k = 0; k < cutoff; ++k) {
        const double a = m.alpha[static_cast<std::size_t>(items[static_cast<std::size_t>(k)])];
        sum += exam * a;
        exam *= 1.0 - a;
    }
    return sum;
}

double reward_of(const PositionBasedModel& m, std::span<const Item> items, int cutoff) {
    double sum = 0.0;
    for (int k = 0; k < cutoff; ++k) {
        sum += m.chi[static_cast<std::size_t>(k)] * m.alpha[static_cast<std::size_t>(items[static_cast<std::size_t>(k)])];
    }
    return sum;
}

double reward_of(const DependentClickModel& m, std::span<const Item> items, int cutoff) {
    double exam = 1.0;
    double sum = 0.0;
    for (int k = 0; k < cutoff; ++k) {
        const double a = m.alpha[static_cast<std::size_t>(items[static_cast<std::size_t>(k)])];
        const double stop = m.v[static_cast<std::size_t>(k)] * a;
        sum += exam * stop;
        exam *= 1.0 - stop;
    }
    return sum;
}

bool non_increasing(const std::vector<double>& values) {
    return std::is_sorted(values.rbegin(), values.rend());
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::cascade: return "cm";
        case ModelKind::position_based: return "pbm";
        case ModelKind::dependent_click: return "dcm";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "cm") return ModelKind::cascade;
    if (name == "pbm") return ModelKind::position_based;
    if (name == "dcm") return ModelKind::dependent_click;
    throw DomainError("unknown click model '" + name + "' (expected cm, pbm or dcm)");
}

ClickModel::ClickModel(CascadeModel model) : model_(std::move(model)) {
    check_probabilities(std::get<CascadeModel>(model_).alpha, "alpha");
}

ClickModel::ClickModel(PositionBasedModel model) : model_(std::move(model)) {
    const auto& m = std::get<PositionBasedModel>(model_);
    check_probabilities(m.alpha, "alpha");
    check_probabilities(m.chi, "chi");
    check_same_size(m.alpha, m.chi, "chi");
    if (!non_increasing(m.chi)) {
        throw DomainError("PBM examination probabilities chi must be non-increasing");
    }
}

ClickModel::ClickModel(DependentClickModel model) : model_(std::move(model)) {
    const auto& m = std::get<DependentClickModel>(model_);
    check_probabilities(m.alpha, "alpha");
    check_probabilities(m.v, "v");
    check_same_size(m.alpha, m.v, "v");
}

const std::vector<double>& ClickModel::alpha() const noexcept {
    return std::visit([](const auto& m) -> const std::vector<double>& { return m.alpha; }, model_);
}

bool ClickModel::strictly_canonical() const {
    const auto& a = alpha();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] <= 0.0 || (i > 0 && !(a[i - 1] > a[i]))) {
            return false;
        }
    }
    return true;
}

int sample_clicks(const ClickModel& model, const RankedList& list, Rng& rng, std::span<std::uint8_t> clicks) {
    const auto items = list.items();
    const std::size_t k_items = items.size();
    if (clicks.size() != k_items) {
        throw ContractViolation("click buffer length must equal K");
    }
    std::fill(clicks.begin(), clicks.end(), std::uint8_t{0});

    switch (model.kind()) {
        case ModelKind::cascade: {
            const auto& m = std::get<CascadeModel>(model.variant());
            for (std::size_t k = 0; k < k_items; ++k) {
                if (rng.bernoulli(m.alpha[static_cast<std::size_t>(items[k])])) {
                    clicks[k] = 1;
                    break;
                }
            }
            return -1;
        }
        case ModelKind::position_based: {
            const auto& m = std::get<PositionBasedModel>(model.variant());
            for (std::size_t k = 0; k < k_items; ++k) {
                const bool examined = rng.bernoulli(m.chi[k]);
                const bool attracted = rng.bernoulli(m.alpha[static_cast<std::size_t>(items[k])]);
                clicks[k] = static_cast<std::uint8_t>(examined && attracted);
            }
            return -1;
        }
        case ModelKind::dependent_click: {
            const auto& m = std::get<DependentClickModel>(model.variant());
            for (std::size_t k = 0; k < k_items; ++k) {
                if (rng.bernoulli(m.alpha[static_cast<std::size_t>(items[k])])) {
                    clicks[k] = 1;
                    if (rng.bernoulli(m.v[k])) {
                        return static_cast<int>(k);
                    }
                }
            }
            return -1;
        }
    }
    return -1;
}

ClickVector sample_clicks(const ClickModel& model, const RankedList& list, Rng& rng) {
    ClickVector clicks(static_cast<std::size_t>(list.size()), 0);
    sample_clicks(model, list, rng, clicks);
    return clicks;
}

double expected_reward(const ClickModel& model, const RankedList& list, int cutoff) {
    check_list(model, list.items());
    check_cutoff(model, cutoff);
    return std::visit([&](const auto& m) { return reward_of(m, list.items(), cutoff); }, model.variant());
}

double examination_prob(const ClickModel& model, const RankedList& list, Position k) {
    check_list(model, list.items());
    if (k < 0 || k >= model.size()) {
        throw DomainError("position " + std::to_string(k) + " out of range");
    }
    const auto& alpha = model.alpha();
    switch (model.kind()) {
        case ModelKind::cascade: {
            double exam = 1.0;
            for (Position i = 0; i < k; ++i) {
                exam *= 1.0 - alpha[static_cast<std::size_t>(list[i])];
            }
            return exam;
        }
        case ModelKind::position_based:
            return std::get<PositionBasedModel>(model.variant()).chi[static_cast<std::size_t>(k)];
        case ModelKind::dependent_click: {
            const auto& v = std::get<DependentClickModel>(model.variant()).v;
            double exam = 1.0;
            for (Position i = 0; i < k; ++i) {
                exam *= 1.0 - v[static_cast<std::size_t>(i)] * alpha[static_cast<std::size_t>(list[i])];
            }
            return exam;
        }
    }
    return 0.0;
}

OptimalList enumerate_optimal(const ClickModel& model, int cutoff) {
    check_cutoff(model, cutoff);
    const int k_items = model.size();
    if (k_items > kMaxExactItems) {
        throw DomainError("exhaustive search refused for K = " + std::to_string(k_items) + " > 10");
    }
    constexpr double kTieTolerance = 1e-12;
    std::vector<Item> items(static_cast<std::size_t>(k_items));
    std::iota(items.begin(), items.end(), 0);

    return std::visit(
        [&](const auto& m) {
            std::vector<Item> best_items = items;
            double best = reward_of(m, items, cutoff);
            while (std::next_permutation(items.begin(), items.end())) {
                const double r = reward_of(m, items, cutoff);
                if (r > best + kTieTolerance) {
                    best = r;
                    best_items = items;
                }
            }
            return OptimalList{RankedList(std::move(best_items)), best, true, {}};
        },
        model.variant());
}

OptimalList optimal_reward(const ClickModel& model, int cutoff) {
    check_cutoff(model, cutoff);
    if (model.size() <= kMaxExactItems) {
        return enumerate_optimal(model, cutoff);
    }
    OptimalList out;
    out.list = RankedList::identity(model.size());
    out.reward = expected_reward(model, out.list, cutoff);
    out.exact = false;
    bool verified = non_increasing(model.alpha());
    if (model.kind() == ModelKind::dependent_click) {
        verified = verified && non_increasing(std::get<DependentClickModel>(model.variant()).v);
    }
    if (!verified) {
        out.warning = "K > 10: assuming (1, ..., K) is optimal, but monotonicity of the model could not be verified";
    }
    return out;
}

Instance build_sanity_pbm(int i) {
    if (i < 1) {
        throw DomainError("sanity PBM index must be >= 1");
    }
    constexpr int kItems = 10;
    PositionBasedModel pbm;
    pbm.alpha.assign(kItems, 0.5);
    pbm.alpha[0] = 0.9;
    pbm.chi.assign(kItems, 0.9);
    const double tail = std::pow(0.5, i);
    pbm.chi[kItems - 2] = tail;
    pbm.chi[kItems - 1] = tail;

    std::vector<Item> initial;
    for (Item item = 1; item < kItems; ++item) {
        initial.push_back(item);
    }
    initial.push_back(0);

    Instance out{"sanity-pbm-i" + std::to_string(i), ClickModel(std::move(pbm)), RankedList(std::move(initial)), 5, {}};
    out.original_label.resize(kItems);
    std::iota(out.original_label.begin(), out.original_label.end(), 1);
    return out;
}

Instance parse_instance(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("instance is not valid JSON: ") + e.what());
    }

    try {
        const auto id = doc.at("id").get<std::string>();
        const auto kind = parse_model_kind(doc.at("model").get<std::string>());
        const int k_items = doc.at("K").get<int>();
        if (k_items < 1) {
            throw DomainError("K must be >= 1");
        }
        const auto alpha = doc.at("alpha").get<std::vector<double>>();
        if (static_cast<int>(alpha.size()) != k_items) {
            throw DomainError("alpha must have K entries");
        }

        // Canonical label = rank by descending attraction (stable on ties).
        std::vector<int> order(static_cast<std::size_t>(k_items));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return alpha[static_cast<std::size_t>(a)] > alpha[static_cast<std::size_t>(b)]; });
        std::vector<int> canonical_of(static_cast<std::size_t>(k_items));
        std::vector<double> canonical_alpha(static_cast<std::size_t>(k_items));
        std::vector<int> original_label(static_cast<std::size_t>(k_items));
        for (int rank = 0; rank < k_items; ++rank) {
            const auto orig = static_cast<std::size_t>(order[static_cast<std::size_t>(rank)]);
            canonical_of[orig] = rank;
            canonical_alpha[static_cast<std::size_t>(rank)] = alpha[orig];
            original_label[static_cast<std::size_t>(rank)] = static_cast<int>(orig) + 1;
        }

        const auto positional = [&](const char* key) {
            const auto values = doc.at(key).get<std::vector<double>>();
            if (static_cast<int>(values.size()) != k_items) {
                throw DomainError(std::string(key) + " must have K entries");
            }
            return values;
        };

        std::optional<ClickModel> model;
        switch (kind) {
            case ModelKind::cascade: model.emplace(CascadeModel{canonical_alpha}); break;
            case ModelKind::position_based: model.emplace(PositionBasedModel{canonical_alpha, positional("chi")}); break;
            case ModelKind::dependent_click: model.emplace(DependentClickModel{canonical_alpha, positional("v")}); break;
        }

        const auto initial_labels = doc.at("initial_list").get<std::vector<int>>();
        if (static_cast<int>(initial_labels.size()) != k_items) {
            throw DomainError("initial_list must have K entries");
        }
        std::vector<Item> initial;
        for (int label : initial_labels) {
            if (label < 1 || label > k_items) {
                throw DomainError("initial_list label " + std::to_string(label) + " outside [1, K]");
            }
            initial.push_back(canonical_of[static_cast<std::size_t>(label - 1)]);
        }

        const int cutoff = doc.at("eval_cutoff").get<int>();
        if (cutoff < 1 || cutoff > k_items) {
            throw DomainError("eval_cutoff must lie in [1, K]");
        }
        return Instance{id, std::move(*model), RankedList(std::move(initial)), cutoff, std::move(original_label)};
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed instance: ") + e.what());
    }
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DomainError("cannot open instance file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_instance(text.str());
}

std::string instance_to_json(const Instance& instance) {
    nlohmann::json doc;
    doc["id"] = instance.id;
    doc["model"] = to_string(instance.model.kind());
    doc["K"] = instance.size();
    doc["alpha"] = instance.model.alpha();
    if (const auto* pbm = std::get_if<PositionBasedModel>(&instance.model.variant())) {
        doc["chi"] = pbm->chi;
    }
    if (const auto* dcm = std::get_if<DependentClickModel>(&instance.model.variant())) {
        doc["v"] = dcm->v;
    }
    doc["initial_list"] = instance.initial_list.one_based();
    doc["eval_cutoff"] = instance.eval_cutoff;
    return doc.dump(2) + "\n";
}

}  // namespace bubblelab
