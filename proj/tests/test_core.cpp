#include <doctest.h>

#include <algorithm>
#include <set>

#include "crackbench/column.hpp"
#include "oracle.hpp"

using namespace crackbench;

namespace {

// Brute-force two-way split used to derive expected piece contents.
std::pair<std::vector<Key>, std::vector<Key>> split_by_pivot(const std::vector<Key>& in, Key pivot,
                                                             BoundKind kind) {
    std::vector<Key> left, right;
    for (Key v : in) {
        const bool goes_left = kind == BoundKind::lt_left ? v < pivot : v <= pivot;
        (goes_left ? left : right).push_back(v);
    }
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    return {left, right};
}

std::vector<Key> sorted_range(std::span<const Key> values, std::size_t begin, std::size_t end) {
    std::vector<Key> out(values.begin() + static_cast<std::ptrdiff_t>(begin),
                         values.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("load_column starts with a single piece and zero counters") {
    auto col = load_column({13, 4, 9});
    CHECK(col.size() == 3);
    CHECK(col.index().piece_count() == 1);
    CHECK(col.index().boundary_count() == 0);
    CHECK(col.totals().tuples_touched == 0);
    CHECK(col.totals().swaps == 0);
    CHECK(std::vector<Key>(col.values().begin(), col.values().end()) == std::vector<Key>{13, 4, 9});
}

TEST_CASE("empty column answers empty") {
    auto col = load_column({});
    const auto a = col.query(RangeQuery::exclusive(1, 5));
    CHECK(a.count() == 0);
    CHECK(col.query_log().size() == 1);
}

TEST_CASE("load preserves the multiset") {
    const auto source = oracle::uniform_keys(500, -100, 100, 7);
    auto col = load_column(source);
    CHECK(oracle::is_permutation_of({col.values().begin(), col.values().end()}, source));
}

TEST_CASE("crack_in_two splits around the pivot") {
    const std::vector<Key> source{5, 12, 20, 10, 14, 13};
    auto col = load_column(source);
    const auto p = col.crack_in_two(Piece{0, 6}, 14, BoundKind::lt_left);

    const auto [left, right] = split_by_pivot(source, 14, BoundKind::lt_left);
    CHECK(p == left.size());
    CHECK(p == 4);
    CHECK(sorted_range(col.values(), 0, p) == left);
    CHECK(sorted_range(col.values(), p, 6) == right);
    CHECK(sorted_range(col.values(), 0, p) == std::vector<Key>{5, 10, 12, 13});
    CHECK(sorted_range(col.values(), p, 6) == std::vector<Key>{14, 20});
    CHECK(col.totals().tuples_touched == 6);
    CHECK(col.index().boundary_count() == 1);
    CHECK(oracle::boundaries_sound(col));
}

TEST_CASE("crack_in_two degenerate pivots") {
    SUBCASE("pivot below every element, lt_left") {
        auto col = load_column({5, 12, 20, 10, 14, 13});
        const auto p = col.crack_in_two(Piece{0, 6}, 3, BoundKind::lt_left);
        CHECK(p == 0);
        CHECK(col.totals().swaps == 0);
        CHECK(col.index().boundary_count() == 0);
    }
    SUBCASE("pivot above every element, le_left") {
        auto col = load_column({5, 12, 20, 10, 14, 13});
        const auto p = col.crack_in_two(Piece{0, 6}, 100, BoundKind::le_left);
        CHECK(p == 6);
        CHECK(col.totals().swaps == 0);
    }
}

TEST_CASE("crack_in_two rejects out-of-range pieces") {
    auto col = load_column({1, 2, 3});
    CHECK_THROWS_AS(col.crack_in_two(Piece{0, 4}, 2, BoundKind::lt_left), std::out_of_range);
    CHECK_THROWS_AS(col.crack_in_two(Piece{2, 1}, 2, BoundKind::lt_left), std::out_of_range);
}

TEST_CASE("crack_in_three yields the canonical three-piece layout") {
    const std::vector<Key> source{5, 12, 20, 10, 14, 13};
    auto col = load_column(source);
    const auto [p1, p2] = col.crack_in_three(Piece{0, 6}, RangeQuery::exclusive(10, 14));

    CHECK(sorted_range(col.values(), 0, p1) == std::vector<Key>{5, 10});    // v <= 10
    CHECK(sorted_range(col.values(), p1, p2) == std::vector<Key>{12, 13});  // 10 < v < 14
    CHECK(sorted_range(col.values(), p2, 6) == std::vector<Key>{14, 20});   // 14 <= v
    CHECK(col.index().boundary_count() == 2);
    CHECK(oracle::boundaries_sound(col));
}

TEST_CASE("crack_in_three point query with absent value leaves an empty middle") {
    auto col = load_column({5, 12, 20, 10, 14, 13});
    const auto [p1, p2] = col.crack_in_three(Piece{0, 6}, RangeQuery::inclusive(11, 11));
    CHECK(p1 == p2);
    CHECK(oracle::boundaries_sound(col));
}

TEST_CASE("query rejects malformed ranges") {
    auto col = load_column({1, 2, 3});
    CHECK_THROWS_AS(col.query(RangeQuery::exclusive(5, 4)), std::invalid_argument);
    CHECK_THROWS_AS(col.crack_in_three(Piece{0, 3}, RangeQuery::exclusive(5, 4)), std::invalid_argument);
}

TEST_CASE("first query cracks in three and answers with one view") {
    const std::vector<Key> source{5, 12, 20, 10, 14, 13};
    auto col = load_column(source);
    const auto a = col.query(RangeQuery::exclusive(10, 14));
    CHECK(a.views.size() == 1);
    CHECK(a.materialized.empty());
    CHECK(oracle::answer_multiset(a, col.values()) == oracle::scan_filter(source, RangeQuery::exclusive(10, 14)));
    CHECK(col.index().boundary_count() == 2);
}

TEST_CASE("two queries with fresh bounds leave five pieces") {
    const auto source = oracle::shuffled_iota(1000, 3);
    auto col = load_column(source);
    col.query(RangeQuery::exclusive(300, 600));
    CHECK(col.index().piece_count() == 3);
    col.query(RangeQuery::exclusive(100, 800));
    CHECK(col.index().piece_count() == 5);
    CHECK(oracle::column_intact(col, source));
}

TEST_CASE("repeating a query performs zero swaps and returns the same answer") {
    const auto source = oracle::uniform_keys(5000, 0, 10000, 11);
    auto col = load_column(source);
    const RangeQuery q = RangeQuery::exclusive(2000, 4500);
    const auto first = oracle::answer_multiset(col.query(q), col.values());
    const auto swaps_before = col.totals().swaps;
    const auto again = oracle::answer_multiset(col.query(q), col.values());
    CHECK(col.totals().swaps == swaps_before);
    CHECK(first == again);
}

TEST_CASE("find_piece resolves values through the boundary predicates") {
    const auto source = oracle::shuffled_iota(100, 5);
    auto col = load_column(source);
    SUBCASE("fresh column is one piece") {
        CHECK(col.find_piece(42) == Piece{0, 100});
    }
    SUBCASE("values route around a lt_left boundary") {
        const auto p = col.crack_in_two(Piece{0, 100}, 10, BoundKind::lt_left);
        CHECK(col.find_piece(9) == Piece{0, p});
        CHECK(col.find_piece(10) == Piece{p, 100});
    }
    SUBCASE("value equal to a le_left pivot stays left") {
        const auto p = col.crack_in_two(Piece{0, 100}, 10, BoundKind::le_left);
        CHECK(col.find_piece(10) == Piece{0, p});
        CHECK(col.find_piece(11) == Piece{p, 100});
    }
}

TEST_CASE("random query sequences stay oracle-equal, sound and bounded") {
    for (std::uint64_t seed : {101u, 202u, 303u}) {
        const auto source = oracle::uniform_keys(20000, 0, 40000, seed);  // duplicates likely
        const oracle::SortedOracle ora(source);
        auto col = load_column(source, true);
        const auto queries = oracle::random_queries(300, 0, 40000, seed ^ 0xabc, true);
        std::size_t prev_pieces = col.index().piece_count();
        for (const auto& q : queries) {
            const std::size_t before = col.index().boundary_count();
            const auto a = col.query(q);
            CHECK(oracle::answer_multiset(a, col.values()) == ora.expected(q));
            const std::size_t pieces = col.index().piece_count();
            CHECK(pieces >= prev_pieces);
            CHECK(col.index().boundary_count() - before <= 2);
            prev_pieces = pieces;
        }
        CHECK(oracle::column_intact(col, source));
        CHECK(oracle::rowids_aligned(col, source));
        CHECK(col.query_log().size() == queries.size());
    }
}

TEST_CASE("query log records per-query deltas") {
    const auto source = oracle::uniform_keys(1000, 0, 1000, 21);
    auto col = load_column(source);
    col.query(RangeQuery::exclusive(100, 300));
    col.query(RangeQuery::exclusive(100, 300));
    REQUIRE(col.query_log().size() == 2);
    CHECK(col.query_log()[0].tuples_touched > 0);
    CHECK(col.query_log()[1].swaps == 0);
    // totals are the sum of the per-query records
    CostRecord sum;
    for (const auto& r : col.query_log()) sum += r;
    CHECK(sum.tuples_touched == col.totals().tuples_touched);
    CHECK(sum.swaps == col.totals().swaps);
}
