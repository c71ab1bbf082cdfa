#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "crackbench/types.hpp"

namespace crackbench {

// Linear filter over the untouched source; the reference answer every other
// algorithm is checked against. Touches all N tuples on every query.
inline QueryAnswer query_scan(std::span<const Key> source, const RangeQuery& q, CostRecord* cost = nullptr) {
    require_valid(q);
    QueryAnswer answer;
    CostRecord local;
    CostRecord& c = cost ? *cost : local;
    for (const Key v : source) {
        ++c.tuples_touched;
        ++c.comparisons;
        const bool above = q.low_inclusive ? v >= q.low : v > q.low;
        if (!above) continue;
        ++c.comparisons;
        const bool below = q.high_inclusive ? v <= q.high : v < q.high;
        if (!below) continue;
        answer.materialized.push_back(v);
        ++c.moves;
    }
    return answer;
}

struct SortedColumn {
    std::vector<Key> values;
    // Cost of the one-time sort. Comparisons are counted through the
    // comparator and each comparison reads two elements; the writes inside
    // std::sort are not observable, so swaps/moves stay zero.
    CostRecord built_cost;
};

inline SortedColumn build_sorted(std::vector<Key> source) {
    SortedColumn sc;
    sc.values = std::move(source);
    std::uint64_t cmps = 0;
    std::sort(sc.values.begin(), sc.values.end(), [&cmps](Key a, Key b) {
        ++cmps;
        return a < b;
    });
    sc.built_cost.comparisons = cmps;
    sc.built_cost.tuples_touched = 2 * cmps;
    return sc;
}

// Two binary searches, answer returned as one view into the sorted buffer.
inline QueryAnswer query_sorted(const SortedColumn& sc, const RangeQuery& q, CostRecord* cost = nullptr) {
    require_valid(q);
    CostRecord local;
    CostRecord& c = cost ? *cost : local;
    const auto counting_less = [&c](Key a, Key b) {
        ++c.comparisons;
        ++c.tuples_touched;
        return a < b;
    };
    const auto& v = sc.values;
    const auto first = q.low_inclusive ? std::lower_bound(v.begin(), v.end(), q.low, counting_less)
                                       : std::upper_bound(v.begin(), v.end(), q.low, counting_less);
    const auto last = q.high_inclusive ? std::upper_bound(first, v.end(), q.high, counting_less)
                                       : std::lower_bound(first, v.end(), q.high, counting_less);
    QueryAnswer answer;
    answer.add_view(static_cast<std::size_t>(first - v.begin()), static_cast<std::size_t>(last - v.begin()));
    return answer;
}

}  // namespace crackbench
