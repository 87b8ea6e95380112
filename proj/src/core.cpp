#include "bubblelab/core.hpp"

#include <algorithm>
#include <numeric>

namespace bubblelab {

bool is_permutation_of_range(std::span<const Item> items) {
    std::vector<bool> seen(items.size(), false);
    for (Item item : items) {
        if (item < 0 || static_cast<std::size_t>(item) >= items.size() || seen[static_cast<std::size_t>(item)]) {
            return false;
        }
        seen[static_cast<std::size_t>(item)] = true;
    }
    return true;
}

RankedList::RankedList(std::vector<Item> items) : items_(std::move(items)) {
    if (!is_permutation_of_range(items_)) {
        throw DomainError("ranked list is not a permutation of its items: " + to_string(*this));
    }
}

RankedList RankedList::identity(int k) {
    if (k < 1) {
        throw DomainError("ranked list needs at least one item");
    }
    std::vector<Item> items(static_cast<std::size_t>(k));
    std::iota(items.begin(), items.end(), 0);
    return RankedList(std::move(items), unchecked_tag{});
}

RankedList RankedList::from_one_based(std::span<const int> labels) {
    std::vector<Item> items;
    items.reserve(labels.size());
    for (int label : labels) {
        items.push_back(label - 1);
    }
    return RankedList(std::move(items));
}

RankedList RankedList::from_one_based(std::initializer_list<int> labels) {
    return from_one_based(std::span<const int>(labels.begin(), labels.size()));
}

Item RankedList::at(Position k) const {
    if (k < 0 || k >= size()) {
        throw DomainError("position " + std::to_string(k) + " out of range");
    }
    return items_[static_cast<std::size_t>(k)];
}

std::vector<int> RankedList::one_based() const {
    std::vector<int> labels;
    labels.reserve(items_.size());
    for (Item item : items_) {
        labels.push_back(item + 1);
    }
    return labels;
}

Position inverse_rank(const RankedList& list, Item item) {
    if (item < 0 || item >= list.size()) {
        throw DomainError("item " + std::to_string(item) + " out of range");
    }
    const auto items = list.items();
    return static_cast<Position>(std::find(items.begin(), items.end(), item) - items.begin());
}

std::vector<Position> inverse(const RankedList& list) {
    std::vector<Position> pos(static_cast<std::size_t>(list.size()));
    for (Position k = 0; k < list.size(); ++k) {
        pos[static_cast<std::size_t>(list[k])] = k;
    }
    return pos;
}

RankedList swap_adjacent(const RankedList& list, Position k) {
    if (k < 0 || k + 1 >= list.size()) {
        throw DomainError("adjacent swap position " + std::to_string(k) + " out of range");
    }
    RankedList out = list;
    out.swap_with_next(k);
    return out;
}

bool PairSet::insert(Item a, Item b) {
    if (a == b) {
        throw DomainError("pair members must differ");
    }
    const ItemPair pair{std::min(a, b), std::max(a, b)};
    const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), pair);
    if (it != pairs_.end() && *it == pair) {
        return false;
    }
    pairs_.insert(it, pair);
    return true;
}

bool PairSet::contains(Item a, Item b) const {
    const ItemPair pair{std::min(a, b), std::max(a, b)};
    return std::binary_search(pairs_.begin(), pairs_.end(), pair);
}

PairSet incorrect_pairs(const RankedList& list) {
    PairSet out;
    const auto items = list.items();
    for (std::size_t p = 0; p < items.size(); ++p) {
        for (std::size_t q = p + 1; q < items.size(); ++q) {
            if (items[p] > items[q]) {
                out.insert(items[q], items[p]);
            }
        }
    }
    return out;
}

int count_inversions(std::span<const Item> items) noexcept {
    int count = 0;
    for (std::size_t p = 0; p < items.size(); ++p) {
        const Item upper = items[p];
        for (std::size_t q = p + 1; q < items.size(); ++q) {
            count += upper > items[q] ? 1 : 0;
        }
    }
    return count;
}

std::string to_string(const RankedList& list) {
    std::string out = "(";
    for (Position k = 0; k < list.size(); ++k) {
        if (k > 0) {
            out += ',';
        }
        out += std::to_string(list[k] + 1);
    }
    out += ')';
    return out;
}

}  // namespace bubblelab
