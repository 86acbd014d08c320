// Good covers of configuration space by axis-aligned open boxes.
#pragma once

#include <qgerbe/errors.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace qgerbe {

using Point = std::vector<double>;
using Labels = std::vector<int>;

/// Open box (lo, hi) labelled by `index`.
struct Chart {
    int index = 0;
    Point lo;
    Point hi;

    bool contains(const Point& p) const
    {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < p[i] && p[i] < hi[i]))
                return false;
        return true;
    }
};

/// Intersection of the charts named in `indices`. `lo`/`hi` are always the
/// componentwise max/min; `empty` is set when some interval collapses.
struct OverlapRegion {
    Labels indices;
    Point lo;
    Point hi;
    bool empty = false;

    bool contains(const Point& p) const
    {
        if (empty)
            return false;
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < p[i] && p[i] < hi[i]))
                return false;
        return true;
    }

    bool contains_box(const OverlapRegion& other) const
    {
        if (other.empty)
            return true;
        if (empty)
            return false;
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (other.lo[i] < lo[i] || other.hi[i] > hi[i])
                return false;
        return true;
    }
};

class Cover {
public:
    Cover(int dimension, std::vector<Chart> charts)
        : dim_(dimension), charts_(std::move(charts))
    {
        if (dim_ <= 0)
            throw DomainError("cover dimension must be positive");
        if (charts_.empty())
            throw DomainError("cover needs at least one chart");
        std::sort(charts_.begin(), charts_.end(),
                  [](const Chart& a, const Chart& b) { return a.index < b.index; });
        for (std::size_t c = 0; c < charts_.size(); ++c) {
            const Chart& ch = charts_[c];
            if (c > 0 && charts_[c - 1].index == ch.index)
                throw DomainError("duplicate chart index " + std::to_string(ch.index));
            if (static_cast<int>(ch.lo.size()) != dim_ || static_cast<int>(ch.hi.size()) != dim_)
                throw DomainError("chart " + std::to_string(ch.index) + " has wrong dimension");
            for (int i = 0; i < dim_; ++i)
                if (!(ch.lo[i] < ch.hi[i]))
                    throw DomainError("chart " + std::to_string(ch.index) + " has lo >= hi");
        }
    }

    int dimension() const { return dim_; }
    const std::vector<Chart>& charts() const { return charts_; }

    Labels labels() const
    {
        Labels out;
        out.reserve(charts_.size());
        for (const auto& c : charts_)
            out.push_back(c.index);
        return out;
    }

    const Chart& chart(int index) const
    {
        auto it = std::lower_bound(charts_.begin(), charts_.end(), index,
                                   [](const Chart& c, int i) { return c.index < i; });
        if (it == charts_.end() || it->index != index)
            throw LookupError("unknown chart label " + std::to_string(index));
        return *it;
    }

    /// Intersection of any nonempty set of charts (a single label gives the chart itself).
    OverlapRegion region(const Labels& indices) const
    {
        if (indices.empty())
            throw DomainError("region needs at least one label");
        OverlapRegion r;
        r.indices = indices;
        std::sort(r.indices.begin(), r.indices.end());
        r.lo.assign(dim_, -std::numeric_limits<double>::infinity());
        r.hi.assign(dim_, std::numeric_limits<double>::infinity());
        for (int label : r.indices) {
            const Chart& c = chart(label);
            for (int i = 0; i < dim_; ++i) {
                r.lo[i] = std::max(r.lo[i], c.lo[i]);
                r.hi[i] = std::min(r.hi[i], c.hi[i]);
            }
        }
        for (int i = 0; i < dim_; ++i)
            if (!(r.lo[i] < r.hi[i]))
                r.empty = true;
        return r;
    }

private:
    int dim_;
    std::vector<Chart> charts_;
};

/// k-fold overlap of at least two charts.
inline OverlapRegion overlap(const Cover& cover, const Labels& indices)
{
    if (indices.size() < 2)
        throw DomainError("overlap needs at least two chart labels");
    return cover.region(indices);
}

/// `n` points strictly inside `region`, reproducible for a given seed.
inline std::vector<Point> sample_points(const OverlapRegion& region, std::size_t n, std::uint64_t seed)
{
    if (region.empty)
        throw DomainError("cannot sample an empty overlap");
    if (n == 0)
        throw DomainError("sample count must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> out;
    out.reserve(n);
    const std::size_t d = region.lo.size();
    while (out.size() < n) {
        Point p(d);
        for (std::size_t i = 0; i < d; ++i)
            p[i] = region.lo[i] + u(rng) * (region.hi[i] - region.lo[i]);
        if (region.contains(p))
            out.push_back(std::move(p));
    }
    return out;
}

/// All sorted subsets of `labels` with exactly `size` elements.
inline std::vector<Labels> label_subsets(const Labels& labels, std::size_t size)
{
    std::vector<Labels> out;
    if (size == 0 || size > labels.size())
        return out;
    Labels sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i)
        idx[i] = i;
    for (;;) {
        Labels s(size);
        for (std::size_t i = 0; i < size; ++i)
            s[i] = sorted[idx[i]];
        out.push_back(std::move(s));
        std::size_t k = size;
        while (k > 0 && idx[k - 1] == sorted.size() - size + k - 1)
            --k;
        if (k == 0)
            break;
        ++idx[k - 1];
        for (std::size_t j = k; j < size; ++j)
            idx[j] = idx[j - 1] + 1;
    }
    return out;
}

/// Sample cloud shared by every cochain built on `cover`: `per_region` points
/// from each nonempty overlap of 1..max_order charts. Using one cloud for all
/// degrees keeps coboundaries complete on every higher overlap.
inline std::vector<Point> sample_cloud(const Cover& cover, std::size_t max_order,
                                       std::size_t per_region, std::uint64_t seed)
{
    std::vector<Point> cloud;
    std::uint64_t salt = 0;
    for (std::size_t order = 1; order <= max_order; ++order) {
        for (const auto& subset : label_subsets(cover.labels(), order)) {
            ++salt;
            OverlapRegion r = cover.region(subset);
            if (r.empty)
                continue;
            auto pts = sample_points(r, per_region, seed * 1000003ULL + salt);
            cloud.insert(cloud.end(), pts.begin(), pts.end());
        }
    }
    std::sort(cloud.begin(), cloud.end());
    cloud.erase(std::unique(cloud.begin(), cloud.end()), cloud.end());
    return cloud;
}

} // namespace qgerbe
