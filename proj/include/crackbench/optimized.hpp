#pragma once

#include <cassert>
#include <chrono>
#include <deque>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "crackbench/stochastic.hpp"

namespace crackbench {

namespace detail {

struct InitResult {
    CrackedColumn column;
    std::size_t mid_begin = 0;
    std::size_t mid_end = 0;
};

// Builds the first-query three-piece layout by copying instead of swapping.
// Pass 1 routes values below the range to an advancing front cursor and
// values above it to a retreating back cursor, marking in-range values.
// Pass 2 copies the marked values, in source order, into the remaining gap.
// Every element is written exactly once, so moves == N and swaps == 0; the
// source buffer is consumed and released.
inline InitResult init_copy_crack3_ex(std::vector<Key> source, const RangeQuery& q) {
    require_valid(q);
    const std::size_t n = source.size();
    std::vector<Key> target(n);
    std::vector<char> marks(n, 0);
    CostRecord cost;
    std::size_t front = 0;
    std::size_t back = n;
    for (std::size_t i = 0; i < n; ++i) {
        const Key v = source[i];
        ++cost.tuples_touched;
        ++cost.comparisons;
        const bool below = q.low_inclusive ? v < q.low : v <= q.low;
        if (below) {
            target[front++] = v;
            ++cost.moves;
            continue;
        }
        ++cost.comparisons;
        const bool above = q.high_inclusive ? v > q.high : v >= q.high;
        if (above) {
            target[--back] = v;
            ++cost.moves;
        } else {
            marks[i] = 1;
        }
    }
    std::size_t mid = front;
    for (std::size_t i = 0; i < n; ++i) {
        if (!marks[i]) continue;
        ++cost.tuples_touched;
        target[mid++] = source[i];
        ++cost.moves;
    }
    assert(mid == back);

    InitResult r;
    r.column = CrackedColumn::load(std::move(target));
    r.column.counters() += cost;
    r.column.raw_index().insert(front, q.low, CrackedColumn::low_bound_kind(q), n);
    r.column.raw_index().insert(back, q.high, CrackedColumn::high_bound_kind(q), n);
    r.mid_begin = front;
    r.mid_end = back;
    return r;
}

}  // namespace detail

// Out-of-place three-piece initialization for the very first query on a
// column. The logical piece contents match an in-place crack_in_three of the
// same source, but no swap is ever performed.
inline CrackedColumn init_copy_crack3(std::vector<Key> source, const RangeQuery& q) {
    return detail::init_copy_crack3_ex(std::move(source), q).column;
}

// Cracks the piece with the most elements (leftmost on ties) at a uniformly
// drawn element of that piece. Returns the split position, or nothing when
// the column holds no elements.
inline std::optional<std::size_t> max_piece_random_crack(CrackedColumn& col, std::mt19937_64& rng) {
    if (col.empty()) return std::nullopt;
    Piece best{0, 0};
    col.index().for_each_piece(col.size(), [&](Piece p) {
        if (p.size() > best.size()) best = p;
    });
    if (best.size() == 0) return std::nullopt;
    const std::size_t at = best.begin + detail::uniform_index(rng, best.size());
    ++col.counters().tuples_touched;
    const Key pivot = col.raw_values()[at];
    return col.crack_in_two(best, pivot, BoundKind::lt_left);
}

enum class MaxPieceCrackMode { every_query, first_only };

inline std::string_view to_string(MaxPieceCrackMode m) {
    return m == MaxPieceCrackMode::every_query ? "every-query" : "first-only";
}

struct OptimizedConfig {
    std::uint64_t rng_seed = 1;
    MaxPieceCrackMode max_piece_mode = MaxPieceCrackMode::every_query;
};

// Copy-initialized cracking: the first query builds the column via
// init_copy_crack3, every answered query is followed by a random crack of
// the currently largest piece (configurable to first query only).
class OptimizedCracker {
public:
    explicit OptimizedCracker(std::vector<Key> source, OptimizedConfig cfg = {})
        : source_(std::move(source)), rng_(cfg.rng_seed), mode_(cfg.max_piece_mode) {}

    QueryAnswer query(const RangeQuery& q) {
        require_valid(q);
        if (first_) {
            first_ = false;
            const auto start = std::chrono::steady_clock::now();
            auto init = detail::init_copy_crack3_ex(std::move(source_), q);
            col_ = std::move(init.column);
            QueryAnswer answer;
            answer.add_view(init.mid_begin, init.mid_end);
            max_piece_random_crack(col_, rng_);
            CostRecord rec = col_.totals();
            rec.elapsed_ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                                            std::chrono::steady_clock::now() - start)
                                                            .count());
            col_.push_query_record(rec);
            return answer;
        }
        auto scope = col_.begin_query();
        QueryAnswer answer = col_.query(q);
        if (mode_ == MaxPieceCrackMode::every_query) max_piece_random_crack(col_, rng_);
        return answer;
    }

    bool initialized() const { return !first_; }
    CrackedColumn& column() { return col_; }
    const CrackedColumn& column() const { return col_; }

private:
    std::vector<Key> source_;
    CrackedColumn col_;
    std::mt19937_64 rng_;
    MaxPieceCrackMode mode_;
    bool first_ = true;
};

struct SelectorConfig {
    std::size_t window = 32;
    double monotone_threshold = 0.9;
};

// Tracks the last W query low bounds and classifies the stream: mostly
// one-directional bounds look sequential and get the materializing variant,
// anything else gets plain cracking; until the window fills the safe default
// is dd1r. No randomness: the choice is a pure function of the stream.
class SelectorState {
public:
    explicit SelectorState(SelectorConfig cfg = {}) : cfg_(cfg) {}

    AlgoTag select(Key low) {
        lows_.push_back(low);
        if (lows_.size() > cfg_.window) lows_.pop_front();
        if (lows_.size() < cfg_.window)
            last_ = AlgoTag::dd1r;
        else
            last_ = monotone_ratio() >= cfg_.monotone_threshold ? AlgoTag::mdd1r : AlgoTag::crack;
        return last_;
    }

    // Fraction of consecutive deltas sharing the majority sign; zero deltas
    // count for neither direction.
    double monotone_ratio() const {
        if (lows_.size() < 2) return 0.0;
        std::size_t up = 0, down = 0;
        for (std::size_t i = 1; i < lows_.size(); ++i) {
            if (lows_[i] > lows_[i - 1])
                ++up;
            else if (lows_[i] < lows_[i - 1])
                ++down;
        }
        return static_cast<double>(std::max(up, down)) / static_cast<double>(lows_.size() - 1);
    }

    AlgoTag last_choice() const { return last_; }
    const SelectorConfig& config() const { return cfg_; }
    std::size_t window_fill() const { return lows_.size(); }

private:
    SelectorConfig cfg_;
    std::deque<Key> lows_;
    AlgoTag last_ = AlgoTag::dd1r;
};

inline AlgoTag select_algorithm(SelectorState& state, const RangeQuery& q) { return state.select(q.low); }

// Per-query dispatch between plain cracking, dd1r and mdd1r over one shared
// column, driven by the selector.
class HybridCracker {
public:
    explicit HybridCracker(StochasticConfig stochastic = {}, SelectorConfig selector = {})
        : stoch_(stochastic), selector_(selector) {}

    QueryAnswer query(CrackedColumn& col, const RangeQuery& q) {
        require_valid(q);
        switch (selector_.select(q.low)) {
            case AlgoTag::mdd1r: return stoch_.query_mdd1r(col, q);
            case AlgoTag::crack: return col.query(q);
            default: return stoch_.query_dd1r(col, q);
        }
    }

    AlgoTag last_choice() const { return selector_.last_choice(); }
    SelectorState& selector() { return selector_; }
    StochasticCracker& stochastic() { return stoch_; }

private:
    StochasticCracker stoch_;
    SelectorState selector_;
};

}  // namespace crackbench
