#include "nngtl/spatial_index.hpp"
#include "nngtl/simd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nngtl
{
    SpatialIndex::SpatialIndex (int buckets_per_side)
        : side_ (std::max (buckets_per_side, 1)), cell_ (1.0 / side_), buckets_ (static_cast<std::size_t> (side_) * side_)
    {
    }

    int SpatialIndex::coord (double v) const noexcept
    {
        const int c = static_cast<int> (std::floor (v * side_));
        return std::clamp (c, 0, side_ - 1);
    }

    std::uint32_t SpatialIndex::insert (Point p)
    {
        const auto id = static_cast<std::uint32_t> (points_.size ());
        points_.push_back (p);
        Bucket &b = buckets_[static_cast<std::size_t> (coord (p.y)) * side_ + coord (p.x)];
        b.xs.push_back (p.x);
        b.ys.push_back (p.y);
        b.ids.push_back (id);
        return id;
    }

    std::optional<std::uint32_t> SpatialIndex::nearest (Point q) const
    {
        if (points_.empty ())
            return std::nullopt;
        const auto &k = simd::active ();
        const int bx = coord (q.x), by = coord (q.y);
        double best_d2 = std::numeric_limits<double>::infinity ();
        std::uint32_t best_id = 0;

        auto scan = [&] (int cx, int cy) {
            if (cx < 0 || cy < 0 || cx >= side_ || cy >= side_)
                return;
            const Bucket &b = buckets_[static_cast<std::size_t> (cy) * side_ + cx];
            if (b.ids.empty ())
                return;
            const simd::Nearest r = k.nearest (b.xs.data (), b.ys.data (), b.ids.size (), q.x, q.y);
            const std::uint32_t id = b.ids[r.index];
            if (r.d2 < best_d2 || (r.d2 == best_d2 && id < best_id))
            {
                best_d2 = r.d2;
                best_id = id;
            }
        };

        for (int ring = 0; ring <= side_; ++ring)
        {
            if (ring == 0)
                scan (bx, by);
            else
            {
                for (int dx = -ring; dx <= ring; ++dx)
                {
                    scan (bx + dx, by - ring);
                    scan (bx + dx, by + ring);
                }
                for (int dy = -ring + 1; dy <= ring - 1; ++dy)
                {
                    scan (bx - ring, by + dy);
                    scan (bx + ring, by + dy);
                }
            }
            // every bucket beyond this ring is at least ring * cell_ away
            const double reach = ring * cell_;
            if (best_d2 < std::numeric_limits<double>::infinity () && best_d2 < reach * reach)
                break;
        }
        return best_id;
    }

    void SpatialIndex::within (Point q, double r, std::vector<std::uint32_t> &out) const
    {
        out.clear ();
        if (points_.empty () || !(r >= 0.0))
            return;
        const auto &k = simd::active ();
        const double r2 = r * r;
        const int x0 = coord (q.x - r), x1 = coord (q.x + r);
        const int y0 = coord (q.y - r), y1 = coord (q.y + r);
        std::vector<std::uint32_t> local;
        for (int cy = y0; cy <= y1; ++cy)
            for (int cx = x0; cx <= x1; ++cx)
            {
                const Bucket &b = buckets_[static_cast<std::size_t> (cy) * side_ + cx];
                if (b.ids.empty ())
                    continue;
                local.clear ();
                k.within (b.xs.data (), b.ys.data (), b.ids.size (), q.x, q.y, r2, 0, local);
                for (std::uint32_t i : local)
                    out.push_back (b.ids[i]);
            }
        std::sort (out.begin (), out.end ());
    }

} // namespace nngtl
