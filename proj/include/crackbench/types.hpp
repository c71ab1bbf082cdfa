#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crackbench {

using Key = std::int64_t;

// Side assignment for values equal to a boundary pivot.
//   lt_left : values[i] <  pivot for i < pos,  values[i] >= pivot for i >= pos
//   le_left : values[i] <= pivot for i < pos,  values[i] >  pivot for i >= pos
enum class BoundKind : std::uint8_t { lt_left = 0, le_left = 1 };

inline const char* to_string(BoundKind k) {
    return k == BoundKind::lt_left ? "lt_left" : "le_left";
}

// Per-query work counters. tuples_touched counts element reads performed while
// reorganizing or answering; moves counts copy-based writes (materialization,
// out-of-place initialization). Wall time is kept separate from the counters
// so counter output stays reproducible.
struct CostRecord {
    std::uint64_t elapsed_ns = 0;
    std::uint64_t tuples_touched = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t swaps = 0;
    std::uint64_t moves = 0;

    CostRecord& operator+=(const CostRecord& o) {
        elapsed_ns += o.elapsed_ns;
        tuples_touched += o.tuples_touched;
        comparisons += o.comparisons;
        swaps += o.swaps;
        moves += o.moves;
        return *this;
    }

    // Counter-wise difference against an earlier snapshot of the same stream.
    CostRecord delta_since(const CostRecord& base) const {
        CostRecord d;
        d.elapsed_ns = elapsed_ns - base.elapsed_ns;
        d.tuples_touched = tuples_touched - base.tuples_touched;
        d.comparisons = comparisons - base.comparisons;
        d.swaps = swaps - base.swaps;
        d.moves = moves - base.moves;
        return d;
    }
};

// Range predicate over keys. Exclusive bounds are the default form: the
// canonical first query selects low < v < high.
struct RangeQuery {
    Key low = 0;
    Key high = 0;
    bool low_inclusive = false;
    bool high_inclusive = false;

    static RangeQuery exclusive(Key low, Key high) { return {low, high, false, false}; }
    static RangeQuery inclusive(Key low, Key high) { return {low, high, true, true}; }

    bool valid() const {
        if (low > high) return false;
        if (low == high && !low_inclusive && !high_inclusive) return false;
        return true;
    }

    bool matches(Key v) const {
        const bool above_low = low_inclusive ? v >= low : v > low;
        const bool below_high = high_inclusive ? v <= high : v < high;
        return above_low && below_high;
    }

    Key width() const { return high - low; }

    double selectivity_over(Key domain_min, Key domain_max) const {
        const double span = static_cast<double>(domain_max) - static_cast<double>(domain_min);
        if (span <= 0) return 0.0;
        return static_cast<double>(width()) / span;
    }
};

inline void require_valid(const RangeQuery& q) {
    if (!q.valid()) throw std::invalid_argument("RangeQuery: low must be <= high (equal only with an inclusive bound)");
}

// Half-open range of positions into a column.
struct View {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    bool empty() const { return begin >= end; }
};

// A query result: copied-out values plus contiguous ranges into the queried
// container. Views stay valid until the container is reorganized again.
struct QueryAnswer {
    std::vector<Key> materialized;
    std::vector<View> views;

    void add_view(std::size_t begin, std::size_t end) {
        if (begin >= end) return;
        if (!views.empty() && views.back().end == begin) {
            views.back().end = end;
            return;
        }
        views.push_back({begin, end});
    }

    std::size_t count() const {
        std::size_t n = materialized.size();
        for (const auto& v : views) n += v.size();
        return n;
    }

    template <typename Container>
    std::vector<Key> gather(const Container& values) const {
        std::vector<Key> out;
        out.reserve(count());
        out.insert(out.end(), materialized.begin(), materialized.end());
        for (const auto& v : views)
            for (std::size_t i = v.begin; i < v.end; ++i) out.push_back(values[i]);
        return out;
    }

    template <typename Container>
    std::uint64_t sum(const Container& values) const {
        std::uint64_t s = 0;
        for (Key k : materialized) s += static_cast<std::uint64_t>(k);
        for (const auto& v : views)
            for (std::size_t i = v.begin; i < v.end; ++i) s += static_cast<std::uint64_t>(values[i]);
        return s;
    }
};

enum class AlgoTag {
    scan,
    sort,
    crack,
    ddc,
    ddr,
    dd1c,
    dd1r,
    mdd1r,
    pmdd1r,
    optimized,
    hybrid,
};

inline std::string_view to_string(AlgoTag t) {
    switch (t) {
        case AlgoTag::scan: return "scan";
        case AlgoTag::sort: return "sort";
        case AlgoTag::crack: return "crack";
        case AlgoTag::ddc: return "ddc";
        case AlgoTag::ddr: return "ddr";
        case AlgoTag::dd1c: return "dd1c";
        case AlgoTag::dd1r: return "dd1r";
        case AlgoTag::mdd1r: return "mdd1r";
        case AlgoTag::pmdd1r: return "pmdd1r";
        case AlgoTag::optimized: return "optimized";
        case AlgoTag::hybrid: return "hybrid";
    }
    return "?";
}

inline AlgoTag algo_from_string(std::string_view s) {
    for (AlgoTag t : {AlgoTag::scan, AlgoTag::sort, AlgoTag::crack, AlgoTag::ddc, AlgoTag::ddr,
                      AlgoTag::dd1c, AlgoTag::dd1r, AlgoTag::mdd1r, AlgoTag::pmdd1r,
                      AlgoTag::optimized, AlgoTag::hybrid})
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown algorithm tag: " + std::string(s));
}

namespace detail {

// Cheap seed mixer for deriving independent substreams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Modulo reduction keeps pivot choice identical across standard libraries;
// the bias is irrelevant at benchmark sizes.
template <typename Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

inline std::size_t ceil_log2_ratio(std::size_t num, std::size_t den) {
    if (den == 0 || num <= den) return 0;
    std::size_t steps = 0, v = den;
    while (v < num) {
        v *= 2;
        ++steps;
    }
    return steps;
}

}  // namespace detail

}  // namespace crackbench
