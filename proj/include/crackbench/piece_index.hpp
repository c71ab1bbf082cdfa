#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

#include "crackbench/types.hpp"

namespace crackbench {

// A contiguous piece [begin, end) of a cracked column.
struct Piece {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    bool operator==(const Piece&) const = default;
};

// Ordered set of piece boundaries. A boundary (pos, pivot, kind) asserts that
// everything left of pos satisfies the kind predicate against pivot and
// everything from pos on fails it. Boundaries are kept sorted; positions are
// strictly increasing and (pivot, kind) keys are co-monotone with them, with
// lt_left ordering before le_left at equal pivots. Column ends act as
// implicit sentinels, so boundaries at 0 or N are never stored.
class PieceIndex {
public:
    struct Boundary {
        std::size_t pos = 0;
        Key pivot = 0;
        BoundKind kind = BoundKind::lt_left;
    };

    // Result of resolving a (pivot, kind) bound: either the bound is already
    // indexed at a known position, or here is the piece it falls into.
    struct BoundSite {
        bool exact = false;
        std::size_t pos = 0;
        Piece piece;
    };

    bool empty() const { return entries_.empty(); }
    std::size_t boundary_count() const { return entries_.size(); }
    std::size_t piece_count() const { return entries_.size() + 1; }
    const std::vector<Boundary>& boundaries() const { return entries_; }
    void clear() { entries_.clear(); }

    // The unique piece whose key range contains v; n is the column size.
    Piece find_piece(Key v, std::size_t n) const {
        const auto it = lower_bound(v, BoundKind::le_left);
        return piece_around(it, n);
    }

    BoundSite locate_bound(Key pivot, BoundKind kind, std::size_t n) const {
        const auto it = lower_bound(pivot, kind);
        if (it != entries_.end() && it->pivot == pivot && it->kind == kind)
            return {true, it->pos, {}};
        return {false, 0, piece_around(it, n)};
    }

    // True when [begin, end) is exactly one of the current pieces.
    bool is_piece(std::size_t begin, std::size_t end, std::size_t n) const {
        const auto at = [&](std::size_t pos) {
            const auto it = std::lower_bound(entries_.begin(), entries_.end(), pos,
                                             [](const Boundary& b, std::size_t p) { return b.pos < p; });
            return it != entries_.end() && it->pos == pos;
        };
        if (begin != 0 && !at(begin)) return false;
        if (end != n && !at(end)) return false;
        const auto inside = std::upper_bound(entries_.begin(), entries_.end(), begin,
                                             [](std::size_t p, const Boundary& b) { return p < b.pos; });
        return inside == entries_.end() || inside->pos >= end;
    }

    // Records a boundary. Degenerate positions (column edges, collisions with
    // an existing position) and duplicate keys are skipped; returns whether
    // the boundary was stored.
    bool insert(std::size_t pos, Key pivot, BoundKind kind, std::size_t n) {
        if (pos == 0 || pos >= n) return false;
        const auto it = lower_bound(pivot, kind);
        if (it != entries_.end() && it->pivot == pivot && it->kind == kind) {
            assert(it->pos == pos && "duplicate boundary key with conflicting position");
            return false;
        }
        if (it != entries_.begin() && std::prev(it)->pos >= pos) return false;
        if (it != entries_.end() && it->pos <= pos) return false;
        entries_.insert(it, Boundary{pos, pivot, kind});
        return true;
    }

    template <typename Fn>
    void for_each_piece(std::size_t n, Fn&& fn) const {
        std::size_t begin = 0;
        for (const auto& b : entries_) {
            fn(Piece{begin, b.pos});
            begin = b.pos;
        }
        fn(Piece{begin, n});
    }

private:
    std::vector<Boundary> entries_;

    // First boundary whose key (pivot, kind) is >= the probe. For a value v
    // probed as (v, le_left) this is the first boundary v belongs left of.
    std::vector<Boundary>::const_iterator lower_bound(Key pivot, BoundKind kind) const {
        return std::lower_bound(entries_.begin(), entries_.end(), std::pair{pivot, kind},
                                [](const Boundary& b, const std::pair<Key, BoundKind>& probe) {
                                    if (b.pivot != probe.first) return b.pivot < probe.first;
                                    return static_cast<int>(b.kind) < static_cast<int>(probe.second);
                                });
    }

    Piece piece_around(std::vector<Boundary>::const_iterator right_edge, std::size_t n) const {
        Piece p;
        p.begin = right_edge == entries_.begin() ? 0 : std::prev(right_edge)->pos;
        p.end = right_edge == entries_.end() ? n : right_edge->pos;
        return p;
    }
};

}  // namespace crackbench
