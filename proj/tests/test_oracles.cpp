#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bubblelab/oracles.hpp"

using namespace bubblelab;

TEST_CASE("monte carlo reward examples") {
    Rng rng(1);
    const auto certain = mc_expected_reward(ClickModel(CascadeModel{{1.0, 0.3}}), RankedList::identity(2), 2, 1000, rng);
    CHECK(certain.mean == 1.0);
    CHECK(certain.stderr_ == 0.0);

    const auto half = mc_expected_reward(ClickModel(CascadeModel{{0.5, 0.5}}), RankedList::identity(2), 2, 1000000, rng);
    CHECK(std::abs(half.mean - 0.75) <= 3.0 * half.stderr_);
    CHECK_THROWS_AS(mc_expected_reward(ClickModel(CascadeModel{{0.5}}), RankedList::identity(1), 1, 0, rng), DomainError);
}

TEST_CASE("event E examples") {
    const std::vector<double> alpha{0.9, 0.5};
    const double delta = std::exp(-1.0);
    PairStats zero(2);
    CHECK(check_event_E(std::span<const PairStats>(&zero, 1), alpha, delta).holds());

    const auto low = PairStats::from_matrices(2, {0, 5, -5, 0}, {0, 100, 100, 0});
    const auto r_low = check_event_E(std::span<const PairStats>(&low, 1), alpha, delta);
    CHECK(r_low.violations_lower == 1);
    CHECK(r_low.violations_upper == 0);
    CHECK(r_low.checked_pairs == 2);

    const auto ok = PairStats::from_matrices(2, {0, 10, -10, 0}, {0, 100, 100, 0});
    CHECK(check_event_E(std::span<const PairStats>(&ok, 1), alpha, delta).holds());

    // s(2, 1) = 21 > 2 sqrt(100) = 20.
    const auto up = PairStats::from_matrices(2, {0, -21, 21, 0}, {0, 100, 100, 0});
    CHECK(check_event_E(std::span<const PairStats>(&up, 1), alpha, delta).violations_upper == 1);
}

TEST_CASE("click-difference bound examples") {
    const std::vector<double> alpha{0.9, 0.5};
    const double delta = std::exp(-4.0);
    CHECK(lemma7_bound(0.9, 0.5, delta) == doctest::Approx(210.0));
    for (const auto& r : check_lemma7(PairStats(2), alpha, delta)) CHECK(r.status == BoundStatus::pass);

    const auto at = PairStats::from_matrices(2, {0, 210, -210, 0}, {0, 300, 300, 0});
    CHECK(check_lemma7(at, alpha, delta)[0].status == BoundStatus::pass);
    const auto above = PairStats::from_matrices(2, {0, 211, -211, 0}, {0, 300, 300, 0});
    CHECK(check_lemma7(above, alpha, delta)[0].status == BoundStatus::fail);

    const std::vector<double> tied{0.5, 0.5};
    CHECK(check_lemma7(PairStats(2), tied, delta)[0].status == BoundStatus::indeterminate);
}

TEST_CASE("pairwise drift") {
    const auto model = ClickModel(PositionBasedModel{{0.9, 0.5, 0.5}, {1.0, 0.8, 0.6}});
    const auto base = RankedList::identity(3);

    Rng rng(2);
    const auto est = estimate_pairwise_drift(model, base, 0, 1, 200000, rng);
    REQUIRE(est.has_value());
    CHECK(drift_lower_bound(0.9, 0.5) == doctest::Approx(0.4 / 1.4));
    CHECK(est->estimate + est->half_width >= drift_lower_bound(0.9, 0.5));

    Rng same(2);
    const auto neg = estimate_pairwise_drift(model, base, 1, 0, 200000, same);
    REQUIRE(neg.has_value());
    CHECK(neg->estimate == doctest::Approx(-est->estimate));

    Rng tied_rng(3);
    const auto tied = estimate_pairwise_drift(model, base, 1, 2, 200000, tied_rng);
    REQUIRE(tied.has_value());
    CHECK(std::abs(tied->estimate) <= tied->half_width);

    const auto silent = ClickModel(PositionBasedModel{{0.0, 0.0}, {1.0, 1.0}});
    Rng r(4);
    CHECK_FALSE(estimate_pairwise_drift(silent, RankedList::identity(2), 0, 1, 1000, r).has_value());
    CHECK_THROWS_AS(estimate_pairwise_drift(model, base, 0, 2, 10, r), DomainError);
}

TEST_CASE("regret ceiling") {
    // chi_max / chi_min = 2, gap 0.5, |V0| = 1, delta = 1/e, n = 10.
    const auto model = ClickModel(PositionBasedModel{{0.9, 0.4}, {1.0, 0.5}});
    const double b = theorem1_bound(model, 1, std::exp(-1.0), 10);
    CHECK(b == doctest::Approx(4320.0 + std::exp(-0.5) * 800.0));
    CHECK(b == doctest::Approx(4805.2).epsilon(1e-4));

    const double b0 = theorem1_bound(model, 0, 0.01, 100);
    const double b3 = theorem1_bound(model, 3, 0.01, 100);
    const double b6 = theorem1_bound(model, 6, 0.01, 100);
    CHECK(b6 - b3 == doctest::Approx(b3 - b0));

    const double tail_big = theorem1_bound(model, 0, 1e-6, 100) - 180.0 * 2 * 2 * 1 / 0.5 * -std::log(1e-6);
    const double tail_small = theorem1_bound(model, 0, 1e-12, 100) - 180.0 * 2 * 2 * 1 / 0.5 * -std::log(1e-12);
    CHECK(tail_small < tail_big);

    CHECK_THROWS_AS(theorem1_bound(ClickModel(CascadeModel{{0.5, 0.5}}), 0, 0.1, 10), DomainError);
}

TEST_CASE("brute force optimum") {
    CHECK(brute_force_optimal(ClickModel(CascadeModel{{0.3}}), 1).list == RankedList::identity(1));

    Rng rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const int k = 2 + static_cast<int>(rng.below(4));
        std::vector<double> alpha(static_cast<std::size_t>(k)), chi(static_cast<std::size_t>(k));
        for (auto& a : alpha) a = 0.05 + 0.9 * rng.uniform();
        for (auto& c : chi) c = 0.05 + 0.9 * rng.uniform();
        std::sort(alpha.rbegin(), alpha.rend());
        std::sort(chi.rbegin(), chi.rend());
        CHECK(brute_force_optimal(ClickModel(CascadeModel{alpha}), k).list == RankedList::identity(k));
        CHECK(brute_force_optimal(ClickModel(PositionBasedModel{alpha, chi}), k).list == RankedList::identity(k));
    }

    // Dependent clicks with increasing abandonment: the sorted list is not optimal.
    const auto dcm = ClickModel(DependentClickModel{{0.9, 0.8, 0.1}, {0.05, 0.05, 1.0}});
    const auto best = brute_force_optimal(dcm, 3);
    CHECK(best.list != RankedList::identity(3));
    CHECK(best.reward > expected_reward(dcm, RankedList::identity(3), 3));
}
