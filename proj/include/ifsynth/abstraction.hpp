#pragma once

// Region partitions of a state space and the two refinement primitives.

#include "ifsynth/symstate.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ifsynth {

using RegionId = std::uint32_t;

// Sorted, duplicate-free list of region ids.
using RegionSet = std::vector<RegionId>;

struct Region {
    RegionId id = 0;
    std::optional<RegionId> parent;
    ValuationSet extent;
};

// A partition of a state space into non-empty regions.
class Abstraction {
public:
    Abstraction() = default;
    Abstraction(SpacePtr space, std::vector<Region> regions, RegionId next_id)
        : space_(std::move(space))
        , regions_(std::move(regions))
        , next_id_(next_id)
    {}

    const SpacePtr& space() const { return space_; }
    const std::vector<Region>& regions() const { return regions_; }
    std::size_t size() const { return regions_.size(); }
    RegionId next_id() const { return next_id_; }

    const Region& region(RegionId id) const
    {
        for (const auto& r : regions_)
            if (r.id == id)
                return r;
        throw std::out_of_range("no region with id " + std::to_string(id));
    }

    RegionSet all_ids() const
    {
        RegionSet out;
        for (const auto& r : regions_)
            out.push_back(r.id);
        std::sort(out.begin(), out.end());
        return out;
    }

    // The same regions viewed over a larger state space (extra variables
    // unconstrained).
    Abstraction lifted(SpacePtr space) const
    {
        auto out = *this;
        out.space_ = space;
        for (auto& r : out.regions_)
            r.extent = r.extent.reinterpret(space);
        return out;
    }

    // The same regions viewed over a smaller state space; extents must not
    // depend on the dropped variables.
    Abstraction restricted(SpacePtr space) const
    {
        auto out = lifted(space);
        for (const auto& r : out.regions_)
            for (auto v : r.extent.support())
                if (!space->has_var(v))
                    throw std::logic_error("region depends on a variable outside the target space");
        return out;
    }

    // Number of regions that are not subsets of `set`.
    std::size_t count_outside(const ValuationSet& set) const
    {
        return static_cast<std::size_t>(std::count_if(
            regions_.begin(), regions_.end(), [&](const Region& r) { return !r.extent.subset_of(set); }));
    }

    bool operator==(const Abstraction& o) const
    {
        if (regions_.size() != o.regions_.size() || next_id_ != o.next_id_)
            return false;
        for (std::size_t i = 0; i < regions_.size(); ++i)
            if (regions_[i].id != o.regions_[i].id || regions_[i].parent != o.regions_[i].parent
                || !(regions_[i].extent == o.regions_[i].extent))
                return false;
        return true;
    }

private:
    friend Abstraction split_by_set(const Abstraction&, const ValuationSet&);
    friend Abstraction split_by_variable(const Abstraction&, int);

    SpacePtr space_;
    std::vector<Region> regions_;
    RegionId next_id_ = 0;
};

inline ValuationSet concretize(const Abstraction& a, const RegionSet& u)
{
    auto out = ValuationSet::empty(a.space());
    for (auto id : u)
        out = out | a.region(id).extent;
    return out;
}

// Regions that intersect `t`.
inline RegionSet abs_over(const Abstraction& a, const ValuationSet& t)
{
    RegionSet out;
    for (const auto& r : a.regions())
        if (r.extent.intersects(t))
            out.push_back(r.id);
    std::sort(out.begin(), out.end());
    return out;
}

// Regions contained in `t`.
inline RegionSet abs_under(const Abstraction& a, const ValuationSet& t)
{
    RegionSet out;
    for (const auto& r : a.regions())
        if (r.extent.subset_of(t))
            out.push_back(r.id);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool is_precise(const Abstraction& a, const ValuationSet& t)
{
    for (const auto& r : a.regions())
        if (r.extent.intersects(t) && !r.extent.subset_of(t))
            return false;
    return true;
}

// Every region straddling `c` is replaced by its parts inside and outside `c`.
inline Abstraction split_by_set(const Abstraction& a, const ValuationSet& c)
{
    Abstraction out(a.space_, {}, a.next_id_);
    for (const auto& r : a.regions_) {
        auto in = r.extent & c;
        auto rest = r.extent - c;
        if (in.is_empty() || rest.is_empty()) {
            out.regions_.push_back(r);
            continue;
        }
        out.regions_.push_back({out.next_id_++, r.id, in});
        out.regions_.push_back({out.next_id_++, r.id, rest});
    }
    return out;
}

// Every region is replaced by its non-empty slices v=c, c ranging over the
// domain of variable `var` (a library variable index).
inline Abstraction split_by_variable(const Abstraction& a, int var)
{
    const auto& info = a.space_->var(var);
    if (!a.space_->has_var(var))
        throw std::invalid_argument("variable " + info.name + " is not part of the abstraction's space");
    auto& m = a.space_->manager();
    Abstraction out(a.space_, {}, a.next_id_);
    for (const auto& r : a.regions_) {
        std::vector<ValuationSet> parts;
        for (std::uint32_t i = 0; i < info.size(); ++i) {
            std::vector<bool> one(info.size(), false);
            one[i] = true;
            auto slice = r.extent & ValuationSet(a.space_, m.literal(2 * var, one));
            if (!slice.is_empty())
                parts.push_back(slice);
        }
        if (parts.size() <= 1) {
            out.regions_.push_back(r);
            continue;
        }
        for (auto& p : parts)
            out.regions_.push_back({out.next_id_++, r.id, p});
    }
    return out;
}

inline RegionSet set_union(const RegionSet& a, const RegionSet& b)
{
    RegionSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline RegionSet set_difference(const RegionSet& a, const RegionSet& b)
{
    RegionSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline RegionSet set_intersection(const RegionSet& a, const RegionSet& b)
{
    RegionSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool includes(const RegionSet& big, const RegionSet& small)
{
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

} // namespace ifsynth
