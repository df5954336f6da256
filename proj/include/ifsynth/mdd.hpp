#pragma once

// Reduced, ordered multi-valued decision diagrams.
//
// A manager owns every node. Levels are numbered top-down; level `l` has
// `level_size(l)` outgoing edges. Terminals live below the last level.
// Relations use an interleaved layout: variable k occupies level 2k for its
// current value and level 2k+1 for its next value. Sets only use even levels.
//
// The manager is not thread-safe; node ids are canonical, so two diagrams
// denote the same function iff their ids are equal.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace ifsynth::mdd {

using NodeId = std::uint32_t;

inline constexpr NodeId kFalse = 0;
inline constexpr NodeId kTrue = 1;

class Manager {
public:
    explicit Manager(std::vector<std::uint32_t> level_sizes)
        : sizes_(std::move(level_sizes))
    {
        for (auto s : sizes_)
            if (s == 0)
                throw std::invalid_argument("mdd: empty level domain");
        const int terminal = static_cast<int>(sizes_.size());
        nodes_.push_back({terminal, 0});
        nodes_.push_back({terminal, 0});
    }

    Manager(const Manager&) = delete;
    Manager& operator=(const Manager&) = delete;

    int num_levels() const { return static_cast<int>(sizes_.size()); }
    std::uint32_t level_size(int level) const { return sizes_[level]; }
    std::size_t node_count() const { return nodes_.size(); }

    int level(NodeId n) const { return nodes_[n].level; }
    bool is_terminal(NodeId n) const { return n <= kTrue; }

    std::span<const NodeId> children(NodeId n) const
    {
        assert(!is_terminal(n));
        const auto& node = nodes_[n];
        return {pool_.data() + node.offset, sizes_[node.level]};
    }

    // Child of `n` along value `v` of `lvl`, treating skipped levels as
    // don't-care.
    NodeId cofactor(NodeId n, int lvl, std::uint32_t v) const
    {
        return level(n) == lvl ? pool_[nodes_[n].offset + v] : n;
    }

    NodeId make(int lvl, std::span<const NodeId> kids)
    {
        assert(kids.size() == sizes_[lvl]);
        if (std::all_of(kids.begin(), kids.end(), [&](NodeId k) { return k == kids[0]; }))
            return kids[0];

        std::uint64_t h = static_cast<std::uint64_t>(lvl) * 0x9e3779b97f4a7c15ULL;
        for (auto k : kids)
            h = (h ^ k) * 0x100000001b3ULL + (h >> 29);

        auto& bucket = unique_[h];
        for (auto cand : bucket) {
            if (nodes_[cand].level != lvl)
                continue;
            const auto* c = pool_.data() + nodes_[cand].offset;
            if (std::equal(kids.begin(), kids.end(), c))
                return cand;
        }
        const auto id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back({lvl, static_cast<std::uint32_t>(pool_.size())});
        pool_.insert(pool_.end(), kids.begin(), kids.end());
        bucket.push_back(id);
        return id;
    }

    // Node that is true exactly when `lvl` takes a value in `values`.
    NodeId literal(int lvl, const std::vector<bool>& values)
    {
        std::vector<NodeId> kids(sizes_[lvl]);
        for (std::uint32_t v = 0; v < sizes_[lvl]; ++v)
            kids[v] = values[v] ? kTrue : kFalse;
        return make(lvl, kids);
    }

    NodeId conj(NodeId a, NodeId b) { gc_guard(); return apply(Op::conj, a, b); }
    NodeId disj(NodeId a, NodeId b) { gc_guard(); return apply(Op::disj, a, b); }
    NodeId diff(NodeId a, NodeId b) { gc_guard(); return apply(Op::diff, a, b); }
    NodeId negate(NodeId a) { return diff(kTrue, a); }

    // Existential quantification over every level flagged in `levels`.
    NodeId exists(NodeId n, const std::vector<bool>& levels)
    {
        gc_guard();
        std::unordered_map<NodeId, NodeId> memo;
        return exists_rec(n, levels, memo);
    }

    // Successors of `set` under `rel` (interleaved relation), as a set.
    NodeId image(NodeId set, NodeId rel) { gc_guard(); return image_rec(set, rel); }

    // Predecessors of `set` under `rel`.
    NodeId preimage(NodeId set, NodeId rel) { gc_guard(); return preimage_rec(set, rel); }

    // Copy of `n` with every level shifted from 2k to 2k+1 (current to next).
    NodeId prime(NodeId n)
    {
        std::unordered_map<NodeId, NodeId> memo;
        return prime_rec(n, memo);
    }

    void clear_caches() { cache_.clear(); }

private:
    struct Node {
        int level;
        std::uint32_t offset;
    };

    enum class Op : std::uint8_t { conj, disj, diff, image, preimage };

    struct Key {
        Op op;
        NodeId a, b;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const
        {
            std::uint64_t h = (static_cast<std::uint64_t>(k.a) << 32) | k.b;
            h ^= static_cast<std::uint64_t>(k.op) * 0x9e3779b97f4a7c15ULL;
            h *= 0xff51afd7ed558ccdULL;
            return static_cast<std::size_t>(h ^ (h >> 33));
        }
    };

    void gc_guard()
    {
        if (cache_.size() > (1u << 22))
            cache_.clear();
    }

    NodeId apply(Op op, NodeId a, NodeId b)
    {
        switch (op) {
        case Op::conj:
            if (a == kFalse || b == kFalse) return kFalse;
            if (a == kTrue) return b;
            if (b == kTrue || a == b) return a;
            if (a > b) std::swap(a, b);
            break;
        case Op::disj:
            if (a == kTrue || b == kTrue) return kTrue;
            if (a == kFalse) return b;
            if (b == kFalse || a == b) return a;
            if (a > b) std::swap(a, b);
            break;
        case Op::diff:
            if (a == kFalse || b == kTrue || a == b) return kFalse;
            if (b == kFalse) return a;
            if (a == kTrue && b == kFalse) return kTrue;
            break;
        default:
            break;
        }
        const Key key{op, a, b};
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;

        const int lvl = std::min(level(a), level(b));
        std::vector<NodeId> kids(sizes_[lvl]);
        for (std::uint32_t v = 0; v < sizes_[lvl]; ++v)
            kids[v] = apply(op, cofactor(a, lvl, v), cofactor(b, lvl, v));
        const auto r = make(lvl, kids);
        cache_.emplace(key, r);
        return r;
    }

    NodeId exists_rec(NodeId n, const std::vector<bool>& levels,
                      std::unordered_map<NodeId, NodeId>& memo)
    {
        if (is_terminal(n))
            return n;
        if (auto it = memo.find(n); it != memo.end())
            return it->second;
        const int lvl = level(n);
        const auto kids_in = children(n);
        std::vector<NodeId> kids(kids_in.begin(), kids_in.end());
        for (auto& k : kids)
            k = exists_rec(k, levels, memo);
        NodeId r;
        if (levels[lvl]) {
            r = kFalse;
            for (auto k : kids) {
                r = apply(Op::disj, r, k);
                if (r == kTrue)
                    break;
            }
        } else {
            r = make(lvl, kids);
        }
        memo.emplace(n, r);
        return r;
    }

    static int var_of(int lvl) { return lvl / 2; }

    NodeId image_rec(NodeId x, NodeId t)
    {
        if (x == kFalse || t == kFalse)
            return kFalse;
        if (x == kTrue && t == kTrue)
            return kTrue;
        const Key key{Op::image, x, t};
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;

        const int k = std::min(var_of(level(x)), var_of(level(t)));
        const int cur = 2 * k;
        const int nxt = cur + 1;
        const auto dom = sizes_[cur];
        std::vector<NodeId> out(dom, kFalse);
        NodeId any = kFalse;
        for (std::uint32_t i = 0; i < dom; ++i) {
            const auto xi = cofactor(x, cur, i);
            if (xi == kFalse)
                continue;
            const auto ti = cofactor(t, cur, i);
            if (ti == kFalse)
                continue;
            if (level(ti) != nxt) {
                any = apply(Op::disj, any, image_rec(xi, ti));
                continue;
            }
            const auto span = children(ti);
            const std::vector<NodeId> tk(span.begin(), span.end());
            for (std::uint32_t j = 0; j < dom; ++j) {
                if (tk[j] == kFalse)
                    continue;
                out[j] = apply(Op::disj, out[j], image_rec(xi, tk[j]));
            }
        }
        if (any != kFalse)
            for (auto& o : out)
                o = apply(Op::disj, o, any);
        const auto r = make(cur, out);
        cache_.emplace(key, r);
        return r;
    }

    NodeId preimage_rec(NodeId y, NodeId t)
    {
        if (y == kFalse || t == kFalse)
            return kFalse;
        if (y == kTrue && t == kTrue)
            return kTrue;
        const Key key{Op::preimage, y, t};
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;

        const int k = std::min(var_of(level(y)), var_of(level(t)));
        const int cur = 2 * k;
        const int nxt = cur + 1;
        const auto dom = sizes_[cur];

        // y restricted to "some next value of k"
        NodeId y_any = y;
        if (level(y) == cur) {
            y_any = kFalse;
            const auto span = children(y);
            const std::vector<NodeId> ys(span.begin(), span.end());
            for (auto c : ys)
                y_any = apply(Op::disj, y_any, c);
        }

        std::vector<NodeId> out(dom, kFalse);
        for (std::uint32_t i = 0; i < dom; ++i) {
            const auto ti = cofactor(t, cur, i);
            if (ti == kFalse)
                continue;
            if (level(ti) != nxt) {
                out[i] = preimage_rec(y_any, ti);
                continue;
            }
            const auto span = children(ti);
            const std::vector<NodeId> tk(span.begin(), span.end());
            NodeId acc = kFalse;
            for (std::uint32_t j = 0; j < dom; ++j) {
                if (tk[j] == kFalse)
                    continue;
                const auto yj = cofactor(y, cur, j);
                if (yj == kFalse)
                    continue;
                acc = apply(Op::disj, acc, preimage_rec(yj, tk[j]));
                if (acc == kTrue)
                    break;
            }
            out[i] = acc;
        }
        const auto r = make(cur, out);
        cache_.emplace(key, r);
        return r;
    }

    NodeId prime_rec(NodeId n, std::unordered_map<NodeId, NodeId>& memo)
    {
        if (is_terminal(n))
            return n;
        if (auto it = memo.find(n); it != memo.end())
            return it->second;
        const int lvl = level(n);
        if (lvl % 2 != 0)
            throw std::logic_error("mdd: prime() applied to a relation");
        const auto kids_in = children(n);
        std::vector<NodeId> kids(kids_in.begin(), kids_in.end());
        for (auto& k : kids)
            k = prime_rec(k, memo);
        const auto r = make(lvl + 1, kids);
        memo.emplace(n, r);
        return r;
    }

    std::vector<std::uint32_t> sizes_;
    std::vector<Node> nodes_;
    std::vector<NodeId> pool_;
    std::unordered_map<std::uint64_t, std::vector<NodeId>> unique_;
    std::unordered_map<Key, NodeId, KeyHash> cache_;
};

} // namespace ifsynth::mdd
