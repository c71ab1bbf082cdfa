#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "crackbench/column.hpp"

namespace crackbench {

struct StochasticConfig {
    // Piece size under which auxiliary reorganization stops; the default is
    // 256 KiB of 8-byte keys, an L1-ish working set.
    std::size_t crack_at_size = 32768;
    // PMDD1R swap budget per query per piece, as a fraction of the piece size.
    double progressive_fraction = 1.0;
    std::uint64_t rng_seed = 1;
    bool flip_flop_enabled = false;

    void validate() const {
        if (crack_at_size < 2) throw std::invalid_argument("crack_at_size must be >= 2");
        if (!(progressive_fraction > 0.0) || progressive_fraction > 1.0)
            throw std::invalid_argument("progressive_fraction must be in (0, 1]");
    }
};

// A Hoare partition caught mid-flight. [begin, lo) is settled below the
// pivot, [hi, end) is settled at-or-above it, [lo, hi) is still unexamined.
struct PartialCrack {
    std::size_t begin = 0;
    std::size_t end = 0;
    Key pivot = 0;
    std::size_t lo = 0;
    std::size_t hi = 0;

    bool complete() const { return lo >= hi; }
    std::size_t piece_size() const { return end - begin; }
};

// The stochastic cracking family. One instance drives one column through one
// query stream; the seeded generator and any pending partial cracks live
// here, so runs replay bit-identically for a fixed seed and workload.
class StochasticCracker {
public:
    explicit StochasticCracker(StochasticConfig cfg) : cfg_(cfg), rng_(cfg.rng_seed) { cfg_.validate(); }

    static constexpr std::string_view rng_name() { return "mt19937_64"; }
    const StochasticConfig& config() const { return cfg_; }
    std::mt19937_64& rng() { return rng_; }
    const std::vector<PartialCrack>& pending() const { return pending_; }

    // Recursively halves the bound's enclosing piece at exact medians until
    // it fits under crack_at_size, then cracks at the bound itself.
    QueryAnswer query_ddc(CrackedColumn& col, const RangeQuery& q) {
        return bound_driven(col, q, PivotRule::median, Recursion::to_threshold);
    }

    // Single-branch quick sort flavor: like ddc but with uniformly drawn
    // pivot elements. Bad draws can make it touch far more data than ddc;
    // the recursion cap below keeps the crack count bounded either way.
    QueryAnswer query_ddr(CrackedColumn& col, const RangeQuery& q) {
        return bound_driven(col, q, PivotRule::random, Recursion::to_threshold);
    }

    // At most one auxiliary median crack per bound, then the bound crack.
    QueryAnswer query_dd1c(CrackedColumn& col, const RangeQuery& q) {
        return bound_driven(col, q, PivotRule::median, Recursion::single);
    }

    // At most one auxiliary random crack per bound, then the bound crack.
    QueryAnswer query_dd1r(CrackedColumn& col, const RangeQuery& q) {
        return bound_driven(col, q, PivotRule::random, Recursion::single);
    }

    // Never cracks at the query bounds: the end pieces of the requested range
    // each get one random crack while their qualifying values are copied out;
    // fully qualifying middle pieces come back as a view.
    QueryAnswer query_mdd1r(CrackedColumn& col, const RangeQuery& q) {
        return materializing(col, q, Progress::one_shot, cfg_.flip_flop_enabled);
    }

    // mdd1r with each random crack spread over several queries: a query may
    // spend at most ceil(progressive_fraction * piece_size) swaps per piece,
    // and pieces with an unfinished crack are answered by scanning.
    QueryAnswer query_pmdd1r(CrackedColumn& col, const RangeQuery& q) {
        return materializing(col, q, Progress::budgeted, cfg_.flip_flop_enabled);
    }

    // Routes per piece: pieces at or under crack_at_size get plain
    // query-bound cracking, larger ones get the inner algorithm.
    QueryAnswer flip_flop(AlgoTag inner, CrackedColumn& col, const RangeQuery& q) {
        switch (inner) {
            case AlgoTag::crack:
                return col.query(q);
            case AlgoTag::ddc:
            case AlgoTag::ddr:
            case AlgoTag::dd1c:
            case AlgoTag::dd1r:
                // These already stop auxiliary work under crack_at_size, so
                // the wrapper coincides with the plain variant.
                return query(inner, col, q);
            case AlgoTag::mdd1r:
                return materializing(col, q, Progress::one_shot, true);
            case AlgoTag::pmdd1r:
                return materializing(col, q, Progress::budgeted, true);
            default:
                throw std::invalid_argument("flip_flop: inner algorithm must be a cracking variant");
        }
    }

    QueryAnswer query(AlgoTag tag, CrackedColumn& col, const RangeQuery& q) {
        switch (tag) {
            case AlgoTag::crack: return col.query(q);
            case AlgoTag::ddc: return query_ddc(col, q);
            case AlgoTag::ddr: return query_ddr(col, q);
            case AlgoTag::dd1c: return query_dd1c(col, q);
            case AlgoTag::dd1r: return query_dd1r(col, q);
            case AlgoTag::mdd1r: return query_mdd1r(col, q);
            case AlgoTag::pmdd1r: return query_pmdd1r(col, q);
            default: throw std::invalid_argument("not a cracking variant");
        }
    }

    // Continues a pending partition for at most max_swaps exchanges. Cursor
    // state is preserved across calls, so the finished layout matches a
    // one-shot crack_in_two with the same pivot.
    static bool advance_partial(CrackedColumn& col, PartialCrack& pc, std::size_t max_swaps) {
        auto& vals = col.raw_values();
        auto& c = col.counters();
        std::size_t done = 0;
        while (pc.lo < pc.hi) {
            while (pc.lo < pc.hi) {
                ++c.tuples_touched;
                ++c.comparisons;
                if (!(vals[pc.lo] < pc.pivot)) break;
                ++pc.lo;
            }
            while (pc.hi - pc.lo >= 2) {
                ++c.tuples_touched;
                ++c.comparisons;
                if (vals[pc.hi - 1] < pc.pivot) break;
                --pc.hi;
            }
            if (pc.hi - pc.lo < 2) break;
            if (done == max_swaps) return false;
            col.swap_rows(pc.lo, pc.hi - 1);
            ++pc.lo;
            --pc.hi;
            ++done;
        }
        return true;
    }

private:
    enum class PivotRule { median, random };
    enum class Recursion { single, to_threshold };
    enum class Progress { one_shot, budgeted };

    StochasticConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<PartialCrack> pending_;

    QueryAnswer bound_driven(CrackedColumn& col, const RangeQuery& q, PivotRule rule, Recursion rec) {
        require_valid(q);
        auto scope = col.begin_query();
        QueryAnswer answer;
        if (col.empty()) return answer;
        const std::size_t plo = settle_bound(col, q.low, CrackedColumn::low_bound_kind(q), rule, rec);
        const std::size_t phi = settle_bound(col, q.high, CrackedColumn::high_bound_kind(q), rule, rec);
        answer.add_view(plo, phi);
        return answer;
    }

    std::size_t settle_bound(CrackedColumn& col, Key bound, BoundKind kind, PivotRule rule, Recursion rec) {
        const auto site = col.index().locate_bound(bound, kind, col.size());
        if (site.exact) return site.pos;
        Piece piece = site.piece;
        // Auxiliary data-driven cracks ahead of the bound crack. The cap
        // matches the halvings an exact-median split needs, and bounds the
        // work when random pivots fail to shrink the piece.
        std::size_t aux_left = 0;
        if (piece.size() > cfg_.crack_at_size)
            aux_left = rec == Recursion::single
                           ? 1
                           : detail::ceil_log2_ratio(piece.size(), cfg_.crack_at_size);
        while (aux_left > 0 && piece.size() > cfg_.crack_at_size) {
            --aux_left;
            const Key pivot = rule == PivotRule::median ? piece_median(col, piece) : random_element(col, piece);
            const std::size_t p = col.crack_in_two(piece, pivot, BoundKind::lt_left);
            if (bound == pivot && kind == BoundKind::lt_left) return p;
            if (bound < pivot)
                piece.end = p;
            else
                piece.begin = p;
        }
        return col.crack_in_two(piece, bound, kind);
    }

    Key random_element(CrackedColumn& col, Piece piece) {
        const std::size_t at = piece.begin + detail::uniform_index(rng_, piece.size());
        ++col.counters().tuples_touched;
        return col.raw_values()[at];
    }

    // Exact median (rank size/2) by repeated in-place partitioning. The
    // reorganization stays inside the piece, so boundary invariants hold;
    // its compares and swaps are charged to the query like any other work.
    Key piece_median(CrackedColumn& col, Piece piece) {
        auto& vals = col.raw_values();
        std::size_t begin = piece.begin, end = piece.end;
        std::size_t rank = piece.size() / 2;
        while (end - begin > 1) {
            const Key pivot = vals[begin + (end - begin) / 2];
            ++col.counters().tuples_touched;
            const std::size_t p = col.partition_range(begin, end, pivot, BoundKind::lt_left);
            if (rank < p - begin) {
                end = p;
                continue;
            }
            const std::size_t p2 = col.partition_range(p, end, pivot, BoundKind::le_left);
            if (rank < p2 - begin) return pivot;
            rank -= p2 - begin;
            begin = p2;
        }
        return vals[begin];
    }

    QueryAnswer materializing(CrackedColumn& col, const RangeQuery& q, Progress progress, bool flip) {
        require_valid(q);
        auto scope = col.begin_query();
        QueryAnswer answer;
        if (col.empty()) return answer;
        const BoundKind kl = CrackedColumn::low_bound_kind(q);
        const BoundKind kh = CrackedColumn::high_bound_kind(q);
        const auto lo = col.index().locate_bound(q.low, kl, col.size());
        const auto hi = col.index().locate_bound(q.high, kh, col.size());

        if (lo.exact && hi.exact) {
            answer.add_view(lo.pos, hi.pos);
            return answer;
        }
        if (!lo.exact && !hi.exact && lo.piece == hi.piece) {
            // The whole range sits in one piece.
            if (flip && lo.piece.size() <= cfg_.crack_at_size) {
                const auto [p1, p2] = col.crack_in_three(lo.piece, q);
                answer.add_view(p1, p2);
            } else {
                end_piece(col, lo.piece, q, progress, answer);
            }
            return answer;
        }

        std::size_t view_begin, view_end;
        if (lo.exact) {
            view_begin = lo.pos;
        } else if (flip && lo.piece.size() <= cfg_.crack_at_size) {
            view_begin = col.crack_in_two(lo.piece, q.low, kl);
        } else {
            end_piece(col, lo.piece, q, progress, answer);
            view_begin = lo.piece.end;
        }
        if (hi.exact) {
            view_end = hi.pos;
        } else if (flip && hi.piece.size() <= cfg_.crack_at_size) {
            view_end = col.crack_in_two(hi.piece, q.high, kh);
        } else {
            end_piece(col, hi.piece, q, progress, answer);
            view_end = hi.piece.begin;
        }
        answer.add_view(view_begin, view_end);
        return answer;
    }

    void end_piece(CrackedColumn& col, Piece piece, const RangeQuery& q, Progress progress, QueryAnswer& answer) {
        if (progress == Progress::one_shot) {
            split_and_materialize(col, piece, q, answer);
        } else {
            progressive_piece(col, piece, q, answer);
        }
    }

    // One random crack of the piece; qualifying values are copied out as the
    // partition pass reads each element once.
    void split_and_materialize(CrackedColumn& col, Piece piece, const RangeQuery& q, QueryAnswer& answer) {
        if (piece.size() < 2) {
            scan_collect(col, piece, q, answer);
            return;
        }
        const Key pivot = random_element(col, piece);
        auto& vals = col.raw_values();
        auto& c = col.counters();
        const auto examine = [&](std::size_t i) {
            const Key v = vals[i];
            ++c.tuples_touched;
            ++c.comparisons;
            if (range_matches_counted(q, v, c)) {
                answer.materialized.push_back(v);
                ++c.moves;
            }
            return v < pivot;
        };
        std::size_t lo = piece.begin, hi = piece.end;
        while (lo < hi) {
            while (lo < hi) {
                if (!examine(lo)) break;
                ++lo;
            }
            while (hi - lo >= 2) {
                if (examine(hi - 1)) break;
                --hi;
            }
            if (hi - lo < 2) break;
            col.swap_rows(lo, hi - 1);
            ++lo;
            --hi;
        }
        col.raw_index().insert(lo, pivot, BoundKind::lt_left, col.size());
    }

    void progressive_piece(CrackedColumn& col, Piece piece, const RangeQuery& q, QueryAnswer& answer) {
        if (piece.size() >= 2) {
            std::size_t slot = pending_.size();
            for (std::size_t i = 0; i < pending_.size(); ++i)
                if (pending_[i].begin == piece.begin && pending_[i].end == piece.end) {
                    slot = i;
                    break;
                }
            if (slot == pending_.size())
                pending_.push_back(PartialCrack{piece.begin, piece.end, random_element(col, piece),
                                                piece.begin, piece.end});
            const auto budget = static_cast<std::size_t>(
                std::ceil(cfg_.progressive_fraction * static_cast<double>(piece.size())));
            if (advance_partial(col, pending_[slot], budget)) {
                col.raw_index().insert(pending_[slot].lo, pending_[slot].pivot, BoundKind::lt_left, col.size());
                pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(slot));
            }
        }
        scan_collect(col, piece, q, answer);
    }

    static void scan_collect(CrackedColumn& col, Piece piece, const RangeQuery& q, QueryAnswer& answer) {
        const auto& vals = col.raw_values();
        auto& c = col.counters();
        for (std::size_t i = piece.begin; i < piece.end; ++i) {
            ++c.tuples_touched;
            if (range_matches_counted(q, vals[i], c)) {
                answer.materialized.push_back(vals[i]);
                ++c.moves;
            }
        }
    }

    static bool range_matches_counted(const RangeQuery& q, Key v, CostRecord& c) {
        ++c.comparisons;
        const bool above = q.low_inclusive ? v >= q.low : v > q.low;
        if (!above) return false;
        ++c.comparisons;
        return q.high_inclusive ? v <= q.high : v < q.high;
    }
};

}  // namespace crackbench
