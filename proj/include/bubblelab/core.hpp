#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bubblelab {

/// Raised when an argument lies outside the domain of an operation
/// (item or position out of range, invalid probability, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a caller breaks a documented contract (wrong click vector
/// length, agent emitting a non-permutation, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Items and positions are 0-based inside the library. Item 0 is the most
// attractive item of a canonically labeled instance. File formats and
// human-facing output use 1-based labels.
using Item = int;
using Position = int;

/// A permutation of the items {0, ..., K-1}; entry k is the item shown at
/// position k.
class RankedList {
public:
    RankedList() = default;

    /// Throws DomainError unless `items` is a permutation of [0, K).
    explicit RankedList(std::vector<Item> items);

    static RankedList identity(int k);
    static RankedList from_one_based(std::span<const int> labels);
    static RankedList from_one_based(std::initializer_list<int> labels);

    int size() const noexcept { return static_cast<int>(items_.size()); }
    Item operator[](Position k) const noexcept { return items_[static_cast<std::size_t>(k)]; }
    Item at(Position k) const;

    std::span<const Item> items() const noexcept { return items_; }
    std::vector<int> one_based() const;

    /// Exchanges positions k and k+1 in place. No range check; see swap_adjacent.
    void swap_with_next(Position k) noexcept {
        std::swap(items_[static_cast<std::size_t>(k)], items_[static_cast<std::size_t>(k) + 1]);
    }

    bool operator==(const RankedList&) const = default;

private:
    struct unchecked_tag {};
    RankedList(std::vector<Item> items, unchecked_tag) : items_(std::move(items)) {}

    std::vector<Item> items_;
};

/// True iff `items` is a permutation of [0, items.size()).
bool is_permutation_of_range(std::span<const Item> items);

/// Position of `item` in `list`. Throws DomainError for items outside [0, K).
Position inverse_rank(const RankedList& list, Item item);

/// Full inverse permutation: result[item] = position.
std::vector<Position> inverse(const RankedList& list);

/// Returns a copy of `list` with positions k and k+1 exchanged.
/// Throws DomainError unless 0 <= k < K-1.
RankedList swap_adjacent(const RankedList& list, Position k);

/// An unordered pair of items stored as (first < second).
struct ItemPair {
    Item first;
    Item second;
    auto operator<=>(const ItemPair&) const = default;
};

/// Sorted set of item pairs, every member with first < second.
class PairSet {
public:
    PairSet() = default;

    /// Inserts (min(a,b), max(a,b)); a == b is a DomainError. Returns false
    /// when the pair was already present.
    bool insert(Item a, Item b);
    bool contains(Item a, Item b) const;

    std::size_t size() const noexcept { return pairs_.size(); }
    bool empty() const noexcept { return pairs_.empty(); }
    auto begin() const noexcept { return pairs_.begin(); }
    auto end() const noexcept { return pairs_.end(); }

    bool operator==(const PairSet&) const = default;

private:
    std::vector<ItemPair> pairs_;
};

/// V(R): pairs (i, j), i < j, with item i shown below item j.
PairSet incorrect_pairs(const RankedList& list);

/// |V(R)| without materializing the set (the per-step hot path).
int count_inversions(std::span<const Item> items) noexcept;
inline int count_inversions(const RankedList& list) noexcept { return count_inversions(list.items()); }

std::string to_string(const RankedList& list);

}  // namespace bubblelab
