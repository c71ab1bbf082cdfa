#pragma once

#include <chrono>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crackbench/piece_index.hpp"
#include "crackbench/types.hpp"

namespace crackbench {

// The working copy of one attribute, reorganized in place as queries arrive.
// The loaded multiset is preserved under every operation; when row ids are
// enabled they stay position-aligned with the values. Single writer: callers
// must serialize all operations on one column.
class CrackedColumn {
public:
    CrackedColumn() = default;

    static CrackedColumn load(std::vector<Key> source, bool with_rowids = false) {
        CrackedColumn col;
        col.values_ = std::move(source);
        if (with_rowids) {
            col.rowids_.resize(col.values_.size());
            std::iota(col.rowids_.begin(), col.rowids_.end(), std::size_t{0});
        }
        return col;
    }

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    std::span<const Key> values() const { return values_; }
    bool has_rowids() const { return !rowids_.empty(); }
    const std::vector<std::size_t>& rowids() const { return rowids_; }
    const PieceIndex& index() const { return index_; }
    const CostRecord& totals() const { return totals_; }
    const std::vector<CostRecord>& query_log() const { return query_log_; }

    Piece find_piece(Key v) const { return index_.find_piece(v, size()); }

    // Low-level hooks for the algorithm variants layered on top. Callers are
    // responsible for keeping the boundary invariants intact.
    std::vector<Key>& raw_values() { return values_; }
    PieceIndex& raw_index() { return index_; }
    CostRecord& counters() { return totals_; }

    void swap_rows(std::size_t i, std::size_t j) {
        std::swap(values_[i], values_[j]);
        if (!rowids_.empty()) std::swap(rowids_[i], rowids_[j]);
        ++totals_.swaps;
    }

    // Two-cursor kernel over an arbitrary sub-range; records no boundary and
    // reads every element of the range exactly once.
    std::size_t partition_range(std::size_t begin, std::size_t end, Key pivot, BoundKind kind) {
        std::size_t lo = begin, hi = end;
        std::uint64_t touched = 0, cmps = 0, swaps = 0;
        while (lo < hi) {
            while (lo < hi) {
                ++touched;
                ++cmps;
                if (!goes_left(values_[lo], pivot, kind)) break;
                ++lo;
            }
            while (hi - lo >= 2) {
                ++touched;
                ++cmps;
                if (goes_left(values_[hi - 1], pivot, kind)) break;
                --hi;
            }
            if (hi - lo < 2) break;
            std::swap(values_[lo], values_[hi - 1]);
            if (!rowids_.empty()) std::swap(rowids_[lo], rowids_[hi - 1]);
            ++swaps;
            ++lo;
            --hi;
        }
        totals_.tuples_touched += touched;
        totals_.comparisons += cmps;
        totals_.swaps += swaps;
        return lo;
    }

    // Hoare partition of [piece.begin, piece.end) around pivot. Returns the
    // first position of the right side. The boundary is recorded only when
    // the range is a whole piece and the split lands strictly inside; callers
    // partitioning sub-ranges record their own boundaries if needed.
    std::size_t crack_in_two(Piece piece, Key pivot, BoundKind kind) {
        check_range(piece);
        const bool whole_piece = index_.is_piece(piece.begin, piece.end, size());
        const std::size_t split = partition_range(piece.begin, piece.end, pivot, kind);
        if (whole_piece && split > piece.begin && split < piece.end)
            index_.insert(split, pivot, kind, size());
        return split;
    }

    // Splits one piece into below / qualifying / above for the query range,
    // recording up to two boundaries. Returns the qualifying range [p1, p2).
    std::pair<std::size_t, std::size_t> crack_in_three(Piece piece, const RangeQuery& q) {
        require_valid(q);
        check_range(piece);
        const std::size_t p1 = crack_in_two(piece, q.low, low_bound_kind(q));
        const std::size_t p2 = crack_in_two(Piece{p1, piece.end}, q.high, high_bound_kind(q));
        return {p1, p2};
    }

    // Original query-driven cracking: locate the bound pieces, partition them
    // around the query bounds, answer with a single view.
    QueryAnswer query(const RangeQuery& q) {
        require_valid(q);
        auto scope = begin_query();
        QueryAnswer answer;
        if (empty()) return answer;
        const auto [plo, phi] = settle_bounds(q);
        answer.add_view(plo, phi);
        return answer;
    }

    // Resolves both query bounds to positions, cracking where needed. Shared
    // by the plain query path and the variants that finish with bound cracks.
    std::pair<std::size_t, std::size_t> settle_bounds(const RangeQuery& q) {
        const BoundKind kl = low_bound_kind(q);
        const BoundKind kh = high_bound_kind(q);
        const auto lo = index_.locate_bound(q.low, kl, size());
        const auto hi = index_.locate_bound(q.high, kh, size());
        if (!lo.exact && !hi.exact && lo.piece == hi.piece)
            return crack_in_three(lo.piece, q);
        const std::size_t plo = lo.exact ? lo.pos : crack_in_two(lo.piece, q.low, kl);
        const std::size_t phi = hi.exact ? hi.pos : crack_in_two(hi.piece, q.high, kh);
        return {plo, phi};
    }

    static BoundKind low_bound_kind(const RangeQuery& q) {
        return q.low_inclusive ? BoundKind::lt_left : BoundKind::le_left;
    }
    static BoundKind high_bound_kind(const RangeQuery& q) {
        return q.high_inclusive ? BoundKind::le_left : BoundKind::lt_left;
    }

    void push_query_record(const CostRecord& r) { query_log_.push_back(r); }

    // RAII bracket for one top-level query: on destruction of the outermost
    // scope the counter delta plus elapsed time is appended to the query log.
    class QueryScope {
    public:
        explicit QueryScope(CrackedColumn& col)
            : col_(&col), base_(col.totals_), start_(std::chrono::steady_clock::now()) {
            ++col.query_depth_;
        }
        QueryScope(const QueryScope&) = delete;
        QueryScope& operator=(const QueryScope&) = delete;
        QueryScope(QueryScope&& o) noexcept : col_(o.col_), base_(o.base_), start_(o.start_) { o.col_ = nullptr; }
        ~QueryScope() {
            if (!col_) return;
            if (--col_->query_depth_ == 0) {
                CostRecord d = col_->totals_.delta_since(base_);
                d.elapsed_ns = static_cast<std::uint64_t>(
                    std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_)
                        .count());
                col_->push_query_record(d);
            }
        }

    private:
        CrackedColumn* col_;
        CostRecord base_;
        std::chrono::steady_clock::time_point start_;
    };

    QueryScope begin_query() { return QueryScope(*this); }

private:
    std::vector<Key> values_;
    std::vector<std::size_t> rowids_;
    PieceIndex index_;
    CostRecord totals_;
    std::vector<CostRecord> query_log_;
    int query_depth_ = 0;

    void check_range(Piece piece) const {
        if (piece.begin > piece.end || piece.end > size())
            throw std::out_of_range("crack range outside the column");
    }

    static bool goes_left(Key v, Key pivot, BoundKind kind) {
        return kind == BoundKind::lt_left ? v < pivot : v <= pivot;
    }
};

// Operation-style aliases mirroring the library surface.
inline CrackedColumn load_column(std::vector<Key> source, bool with_rowids = false) {
    return CrackedColumn::load(std::move(source), with_rowids);
}

inline QueryAnswer query_crack(CrackedColumn& col, const RangeQuery& q) { return col.query(q); }

inline Piece find_piece(const CrackedColumn& col, Key v) { return col.find_piece(v); }

}  // namespace crackbench
