#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crackbench/stochastic.hpp"
#include "oracle.hpp"

using namespace crackbench;

namespace {

std::vector<Key> values_copy(const CrackedColumn& col) {
    return {col.values().begin(), col.values().end()};
}

bool partial_invariant_holds(const CrackedColumn& col, const PartialCrack& pc) {
    for (std::size_t i = pc.begin; i < pc.lo; ++i)
        if (!(col.values()[i] < pc.pivot)) return false;
    for (std::size_t i = pc.hi; i < pc.end; ++i)
        if (!(col.values()[i] >= pc.pivot)) return false;
    return true;
}

}  // namespace

TEST_CASE("ddc halves its way down to the threshold, then cracks the bound") {
    // 8 * crack_at_size distinct keys so every exact median halves exactly.
    StochasticConfig cfg;
    cfg.crack_at_size = 128;
    cfg.rng_seed = 9;
    const auto source = oracle::shuffled_iota(1024, 17);
    auto col = load_column(source);
    StochasticCracker engine(cfg);

    // Low bound lands after 3 halvings (1024 -> 512 -> 256 -> 128); the high
    // bound then falls inside an already-small piece, adding one crack.
    const auto a = engine.query_ddc(col, RangeQuery::exclusive(500, 510));
    CHECK(col.index().boundary_count() == 5);

    std::vector<Key> aux_pivots;
    for (const auto& b : col.index().boundaries())
        if (b.pivot != 500 && b.pivot != 510) aux_pivots.push_back(b.pivot);
    std::sort(aux_pivots.begin(), aux_pivots.end());
    CHECK(aux_pivots == std::vector<Key>{256, 384, 512});

    CHECK(oracle::answer_multiset(a, col.values()) ==
          oracle::scan_filter(source, RangeQuery::exclusive(500, 510)));
    CHECK(oracle::column_intact(col, source));
}

TEST_CASE("ddc behaves as plain cracking once pieces fit the threshold") {
    StochasticConfig cfg;
    cfg.crack_at_size = 4096;
    const auto source = oracle::shuffled_iota(1000, 23);
    auto colA = load_column(source);
    auto colB = load_column(source);
    StochasticCracker engine(cfg);
    const RangeQuery q = RangeQuery::exclusive(200, 700);
    const auto a = engine.query_ddc(colA, q);
    const auto b = colB.query(q);
    CHECK(values_copy(colA) == values_copy(colB));
    CHECK(oracle::answer_multiset(a, colA.values()) == oracle::answer_multiset(b, colB.values()));
}

TEST_CASE("dd1c and dd1r do exactly one auxiliary crack per bound on a fresh column") {
    StochasticConfig cfg;
    cfg.crack_at_size = 64;
    cfg.rng_seed = 5;
    const auto source = oracle::shuffled_iota(4096, 31);
    for (AlgoTag tag : {AlgoTag::dd1c, AlgoTag::dd1r}) {
        auto col = load_column(source);
        StochasticCracker engine(cfg);
        engine.query(tag, col, RangeQuery::exclusive(1000, 3000));
        CHECK(col.index().boundary_count() == 4);  // (aux + bound) per bound
        CHECK(oracle::column_intact(col, source));
    }
}

TEST_CASE("dd1c and dd1r skip the auxiliary crack under the threshold") {
    StochasticConfig cfg;
    cfg.crack_at_size = 1 << 20;
    const auto source = oracle::shuffled_iota(4096, 37);
    for (AlgoTag tag : {AlgoTag::dd1c, AlgoTag::dd1r}) {
        auto col = load_column(source);
        StochasticCracker engine(cfg);
        engine.query(tag, col, RangeQuery::exclusive(1000, 3000));
        CHECK(col.index().boundary_count() == 2);  // bound cracks only
    }
}

TEST_CASE("ddc and ddr stay within the per-bound crack budget") {
    StochasticConfig cfg;
    cfg.crack_at_size = 256;
    cfg.rng_seed = 77;
    const std::size_t n = 16384;
    const std::size_t per_bound = detail::ceil_log2_ratio(n, cfg.crack_at_size) + 1;
    for (AlgoTag tag : {AlgoTag::ddc, AlgoTag::ddr}) {
        const auto source = oracle::uniform_keys(n, 0, 1 << 20, 41);
        auto col = load_column(source);
        StochasticCracker engine(cfg);
        for (const auto& q : oracle::random_queries(50, 0, 1 << 20, 43)) {
            const auto before = col.index().boundary_count();
            engine.query(tag, col, q);
            CHECK(col.index().boundary_count() - before <= 2 * per_bound);
        }
        CHECK(oracle::column_intact(col, source));
    }
}

TEST_CASE("same seed and workload replay to an identical layout") {
    const auto source = oracle::uniform_keys(8000, 0, 100000, 51);
    const auto queries = oracle::random_queries(100, 0, 100000, 53);
    for (AlgoTag tag : {AlgoTag::ddr, AlgoTag::dd1r, AlgoTag::mdd1r, AlgoTag::pmdd1r}) {
        StochasticConfig cfg;
        cfg.crack_at_size = 512;
        cfg.rng_seed = 99;
        cfg.progressive_fraction = 0.25;
        auto colA = load_column(source);
        auto colB = load_column(source);
        StochasticCracker engineA(cfg), engineB(cfg);
        for (const auto& q : queries) {
            engineA.query(tag, colA, q);
            engineB.query(tag, colB, q);
        }
        CHECK(values_copy(colA) == values_copy(colB));
        CHECK(colA.index().boundary_count() == colB.index().boundary_count());
    }
}

TEST_CASE("mdd1r cracks at a random pivot, never at the query bounds") {
    StochasticConfig cfg;
    cfg.rng_seed = 1234;
    const auto source = oracle::shuffled_iota(10000, 61);
    auto col = load_column(source);
    StochasticCracker engine(cfg);
    const RangeQuery q = RangeQuery::exclusive(3000, 4000);

    // Replay the pivot draw against the pre-query layout.
    std::mt19937_64 replay(cfg.rng_seed);
    const Key expected_pivot = col.values()[detail::uniform_index(replay, col.size())];

    const auto a = engine.query_mdd1r(col, q);
    REQUIRE(col.index().boundary_count() == 1);
    CHECK(col.index().boundaries()[0].pivot == expected_pivot);
    CHECK(col.index().boundaries()[0].pivot != q.low);
    CHECK(col.index().boundaries()[0].pivot != q.high);
    CHECK(a.views.empty());  // single-piece case: fully materialized
    CHECK(!a.materialized.empty());
    CHECK(oracle::answer_multiset(a, col.values()) == oracle::scan_filter(source, q));
}

TEST_CASE("mdd1r over four pieces: two end cracks, middles stay views") {
    StochasticConfig cfg;
    cfg.rng_seed = 7;
    const auto source = oracle::shuffled_iota(10000, 67);
    auto col = load_column(source);
    const auto b1 = col.crack_in_two(Piece{0, 10000}, 2000, BoundKind::lt_left);
    const auto b2 = col.crack_in_two(col.find_piece(5000), 5000, BoundKind::lt_left);
    const auto b3 = col.crack_in_two(col.find_piece(8000), 8000, BoundKind::lt_left);
    REQUIRE(col.index().piece_count() == 4);

    StochasticCracker engine(cfg);
    const RangeQuery q = RangeQuery::exclusive(1000, 9000);
    const auto a = engine.query_mdd1r(col, q);

    CHECK(col.index().boundary_count() == 5);  // two new random cracks
    REQUIRE(a.views.size() == 1);              // adjacent middle pieces merge
    CHECK(a.views[0].begin == b1);
    CHECK(a.views[0].end == b3);
    CHECK(!a.materialized.empty());
    CHECK(oracle::answer_multiset(a, col.values()) == oracle::scan_filter(source, q));
    CHECK(oracle::column_intact(col, source));
    (void)b2;
}

TEST_CASE("pmdd1r with a full budget matches mdd1r layouts") {
    const auto source = oracle::uniform_keys(6000, 0, 50000, 71);
    const auto queries = oracle::random_queries(80, 0, 50000, 73);
    StochasticConfig cfg;
    cfg.rng_seed = 15;
    cfg.progressive_fraction = 1.0;
    auto colM = load_column(source);
    auto colP = load_column(source);
    StochasticCracker engineM(cfg), engineP(cfg);
    for (const auto& q : queries) {
        engineM.query_mdd1r(colM, q);
        engineP.query_pmdd1r(colP, q);
        CHECK(values_copy(colM) == values_copy(colP));
    }
    CHECK(engineP.pending().empty());
}

TEST_CASE("pmdd1r spreads one crack over several queries under a swap budget") {
    StochasticConfig cfg;
    cfg.rng_seed = 19;
    cfg.progressive_fraction = 0.1;
    const std::size_t n = 100000;
    const auto source = oracle::uniform_keys(n, 0, 1000000, 79);
    auto col = load_column(source);
    StochasticCracker engine(cfg);
    const RangeQuery q = RangeQuery::exclusive(400000, 600000);
    const auto budget = static_cast<std::uint64_t>(std::ceil(0.1 * static_cast<double>(n)));

    std::size_t queries_until_complete = 0;
    for (std::size_t i = 0; i < 12 && col.index().boundary_count() == 0; ++i) {
        const auto swaps_before = col.totals().swaps;
        const auto a = engine.query_pmdd1r(col, q);
        ++queries_until_complete;
        CHECK(col.totals().swaps - swaps_before <= budget);
        CHECK(oracle::answer_multiset(a, col.values()) == oracle::scan_filter(source, q));
        if (!engine.pending().empty()) {
            CHECK(partial_invariant_holds(col, engine.pending().front()));
            CHECK(col.index().boundary_count() == 0);
        }
    }
    CHECK(queries_until_complete <= 10);
    CHECK(col.index().boundary_count() >= 1);
    CHECK(oracle::column_intact(col, source));
}

TEST_CASE("interrupted partial cracks finish exactly like a one-shot crack") {
    std::mt19937_64 rng(85);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 16 + rng() % 512;
        const auto source = oracle::uniform_keys(n, 0, 200, 1000 + static_cast<std::uint64_t>(trial));
        auto resumed = load_column(source);
        auto oneshot = load_column(source);
        const Key pivot = source[rng() % n];

        PartialCrack pc{0, n, pivot, 0, n};
        while (!StochasticCracker::advance_partial(resumed, pc, rng() % 7)) {
            CHECK(partial_invariant_holds(resumed, pc));
        }
        const auto p = oneshot.crack_in_two(Piece{0, n}, pivot, BoundKind::lt_left);
        CHECK(pc.lo == p);
        CHECK(values_copy(resumed) == values_copy(oneshot));
    }
}

TEST_CASE("flip_flop routes small pieces to plain cracking") {
    StochasticConfig cfg;
    cfg.crack_at_size = 1 << 20;  // threshold everywhere
    cfg.rng_seed = 3;
    const auto source = oracle::uniform_keys(5000, 0, 40000, 91);
    const auto queries = oracle::random_queries(60, 0, 40000, 93);
    auto colF = load_column(source);
    auto colC = load_column(source);
    StochasticCracker engine(cfg);
    for (const auto& q : queries) {
        const auto a = engine.flip_flop(AlgoTag::mdd1r, colF, q);
        const auto b = colC.query(q);
        CHECK(values_copy(colF) == values_copy(colC));
        CHECK(oracle::answer_multiset(a, colF.values()) == oracle::answer_multiset(b, colC.values()));
    }
    CHECK(colF.index().boundary_count() == colC.index().boundary_count());
}

TEST_CASE("flip_flop leaves large pieces to the inner algorithm") {
    StochasticConfig cfg;
    cfg.crack_at_size = 64;  // threshold nowhere on a fresh column
    cfg.rng_seed = 27;
    const auto source = oracle::uniform_keys(5000, 0, 40000, 95);
    const RangeQuery q = RangeQuery::exclusive(10000, 30000);
    auto colF = load_column(source);
    auto colM = load_column(source);
    StochasticCracker engineF(cfg), engineM(cfg);
    engineF.flip_flop(AlgoTag::mdd1r, colF, q);
    engineM.query_mdd1r(colM, q);
    CHECK(values_copy(colF) == values_copy(colM));
}

TEST_CASE("every stochastic entry point stays oracle-equal over random workloads") {
    const struct {
        AlgoTag tag;
        bool flip;
    } cases[] = {{AlgoTag::ddc, false}, {AlgoTag::ddr, false},   {AlgoTag::dd1c, false},
                 {AlgoTag::dd1r, false}, {AlgoTag::mdd1r, false}, {AlgoTag::pmdd1r, false},
                 {AlgoTag::mdd1r, true}, {AlgoTag::pmdd1r, true}};
    for (const auto& c : cases) {
        for (std::uint64_t seed : {1u, 2u}) {
            StochasticConfig cfg;
            cfg.crack_at_size = 512;
            cfg.progressive_fraction = 0.2;
            cfg.rng_seed = seed * 31;
            cfg.flip_flop_enabled = c.flip;
            const auto source = oracle::uniform_keys(20000, 0, 30000, seed);  // duplicates likely
            const oracle::SortedOracle ora(source);
            auto col = load_column(source, true);
            StochasticCracker engine(cfg);
            for (const auto& q : oracle::random_queries(200, 0, 30000, seed ^ 0xfeed, true)) {
                const auto a = engine.query(c.tag, col, q);
                CHECK(oracle::answer_multiset(a, col.values()) == ora.expected(q));
            }
            CHECK(oracle::column_intact(col, source));
            CHECK(oracle::rowids_aligned(col, source));
        }
    }
}

TEST_CASE("stochastic entry points handle empty columns") {
    StochasticConfig cfg;
    StochasticCracker engine(cfg);
    auto col = load_column({});
    for (AlgoTag tag : {AlgoTag::ddc, AlgoTag::ddr, AlgoTag::dd1c, AlgoTag::dd1r, AlgoTag::mdd1r, AlgoTag::pmdd1r})
        CHECK(engine.query(tag, col, RangeQuery::exclusive(1, 5)).count() == 0);
}

TEST_CASE("config validation rejects bad parameters") {
    StochasticConfig cfg;
    cfg.crack_at_size = 1;
    CHECK_THROWS_AS(StochasticCracker{cfg}, std::invalid_argument);
    cfg.crack_at_size = 1024;
    cfg.progressive_fraction = 0.0;
    CHECK_THROWS_AS(StochasticCracker{cfg}, std::invalid_argument);
    cfg.progressive_fraction = 1.5;
    CHECK_THROWS_AS(StochasticCracker{cfg}, std::invalid_argument);
}
