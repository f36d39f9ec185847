#pragma once

// Region quadtree over node positions, used to locate dense areas.
//
// A cell is split into four quadrants until it holds at most one point or
// the maximum depth is reached. Points are binned through normalised
// coordinates u = (x - xmin) / width, so the cell of a point at depth d is
// simply floor(u * 2^d); that keeps the tree consistent with any
// independent grid count at the same depth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "common.hpp"

namespace pnt {

class QuadTree {
public:
    struct Leaf {
        int depth = 0;
        std::uint32_t ix = 0;
        std::uint32_t iy = 0;
        Point center;
        double area = 0.0;
        std::vector<std::size_t> points;  // indices into the input span, ascending

        double density() const noexcept { return static_cast<double>(points.size()) / area; }
    };

    static constexpr int kDefaultMaxDepth = 10;

    QuadTree(Rect region, std::span<const Point> points, int max_depth = kDefaultMaxDepth)
        : region_(region), max_depth_(max_depth) {
        if (!(region.width() > 0.0) || !(region.height() > 0.0)) throw Error("quadtree region is empty");
        if (max_depth < 0 || max_depth > 30) throw Error("quadtree depth out of range");
        norm_.reserve(points.size());
        for (const auto& p : points)
            norm_.push_back({std::clamp((p.x - region.xmin) / region.width(), 0.0, 1.0),
                             std::clamp((p.y - region.ymin) / region.height(), 0.0, 1.0)});
        std::vector<std::size_t> all(points.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        build(0, 0, 0, std::move(all));
    }

    static std::uint32_t cell_index(double u, int depth) noexcept {
        const double scale = std::ldexp(1.0, depth);
        const auto last = static_cast<std::uint32_t>(scale) - 1;
        const auto i = static_cast<std::uint32_t>(std::floor(u * scale));
        return std::min(i, last);
    }

    const Rect& region() const noexcept { return region_; }
    int max_depth() const noexcept { return max_depth_; }
    std::span<const Leaf> leaves() const noexcept { return leaves_; }

    // Non-empty leaves by density (descending), ties by smaller centre x then y.
    std::vector<const Leaf*> by_density() const {
        std::vector<const Leaf*> out;
        for (const auto& l : leaves_)
            if (!l.points.empty()) out.push_back(&l);
        std::sort(out.begin(), out.end(), [](const Leaf* a, const Leaf* b) {
            const double da = a->density();
            const double db = b->density();
            if (da != db) return da > db;
            if (a->center.x != b->center.x) return a->center.x < b->center.x;
            return a->center.y < b->center.y;
        });
        return out;
    }

private:
    void build(int depth, std::uint32_t ix, std::uint32_t iy, std::vector<std::size_t> pts) {
        if (pts.size() <= 1 || depth == max_depth_) {
            const double scale = std::ldexp(1.0, depth);
            Leaf leaf;
            leaf.depth = depth;
            leaf.ix = ix;
            leaf.iy = iy;
            leaf.center = {region_.xmin + region_.width() * (ix + 0.5) / scale,
                           region_.ymin + region_.height() * (iy + 0.5) / scale};
            leaf.area = region_.width() * region_.height() / (scale * scale);
            std::sort(pts.begin(), pts.end());
            leaf.points = std::move(pts);
            leaves_.push_back(std::move(leaf));
            return;
        }
        std::vector<std::size_t> child[4];
        for (auto i : pts) {
            const auto cx = cell_index(norm_[i].x, depth + 1) - 2 * ix;
            const auto cy = cell_index(norm_[i].y, depth + 1) - 2 * iy;
            child[cy * 2 + cx].push_back(i);
        }
        for (std::uint32_t q = 0; q < 4; ++q)
            build(depth + 1, 2 * ix + (q & 1), 2 * iy + (q >> 1), std::move(child[q]));
    }

    Rect region_;
    int max_depth_;
    std::vector<Point> norm_;
    std::vector<Leaf> leaves_;
};

}  // namespace pnt
