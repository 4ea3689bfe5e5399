#pragma once
/**
 * @file  spatial_index.hpp
 * @brief Bucket grid over the unit square for nearest and fixed-radius queries.
 *
 * Points are stored structure-of-arrays per bucket and scanned with the active
 * SIMD kernels. Ties in nearest() resolve to the smallest id.
 */

#include "nngtl/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nngtl
{
    class SpatialIndex
    {
      public:
        explicit SpatialIndex (int buckets_per_side = 64);

        /// Ids are assigned in insertion order starting at 0.
        std::uint32_t insert (Point p);

        [[nodiscard]] std::size_t size () const noexcept { return points_.size (); }
        [[nodiscard]] Point point (std::uint32_t id) const { return points_.at (id); }

        [[nodiscard]] std::optional<std::uint32_t> nearest (Point q) const;

        /// Ids with squared distance <= r * r, sorted ascending.
        void within (Point q, double r, std::vector<std::uint32_t> &out) const;

      private:
        struct Bucket
        {
            std::vector<double> xs;
            std::vector<double> ys;
            std::vector<std::uint32_t> ids;
        };

        [[nodiscard]] int coord (double v) const noexcept;

        int side_;
        double cell_;
        std::vector<Bucket> buckets_;
        std::vector<Point> points_;
    };

} // namespace nngtl
