// Benchmark-scale comparisons between whole runs; slower than the unit
// suites but still counter-based and deterministic.

#include <doctest.h>

#include "crackbench/bench.hpp"
#include "oracle.hpp"

using namespace crackbench;

namespace {

RunConfig cfg_of(AlgoTag algo, WorkloadKind kind) {
    RunConfig cfg;
    cfg.algo = algo;
    cfg.data.generated_n = 1000000;
    cfg.workload.kind = kind;
    cfg.workload.selectivity = 0.01;
    cfg.workload.query_count = 1000;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("hybrid stays within 2x of the best pure algorithm per workload") {
    SUBCASE("pure random tracks plain cracking") {
        const auto crack = run(cfg_of(AlgoTag::crack, WorkloadKind::random)).total_touched();
        const auto hybrid = run(cfg_of(AlgoTag::hybrid, WorkloadKind::random)).total_touched();
        CHECK(hybrid <= 2 * crack);
    }
    SUBCASE("pure sequential tracks mdd1r") {
        const auto mdd1r = run(cfg_of(AlgoTag::mdd1r, WorkloadKind::sequential)).total_touched();
        const auto hybrid = run(cfg_of(AlgoTag::hybrid, WorkloadKind::sequential)).total_touched();
        CHECK(hybrid <= 2 * mdd1r);
    }
}

TEST_CASE("the one-time sort costs more than the first crack query at N=1e6") {
    const auto sort_report = run(cfg_of(AlgoTag::sort, WorkloadKind::random));
    const auto crack_report = run(cfg_of(AlgoTag::crack, WorkloadKind::random));
    CHECK(sort_report.rows[0].tuples_touched > crack_report.rows[0].tuples_touched);
    CHECK(sort_report.rows[0].elapsed_ns > crack_report.rows[0].elapsed_ns);
}

TEST_CASE("sequential sweeps leave pieces sized by the stride, random queries converge") {
    auto cfg = cfg_of(AlgoTag::crack, WorkloadKind::sequential);
    cfg.workload.query_count = 200;
    const auto report = run(cfg);
    // every fresh sweep query cracks the shrinking right remainder
    CHECK(report.rows[10].tuples_touched > report.rows[150].tuples_touched);
}
