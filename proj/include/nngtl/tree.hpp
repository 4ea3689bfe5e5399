#pragma once
/**
 * @file  tree.hpp
 * @brief Random tree over (position, automaton state) pairs.
 *
 * Positions are shared: each tree point owns the product vertices placed at it,
 * at most one per automaton state. Costs are Euclidean path lengths from the root.
 */

#include "nngtl/core.hpp"
#include "nngtl/spatial_index.hpp"

#include <optional>
#include <vector>

namespace nngtl
{
    struct ProductVertex
    {
        std::uint32_t point = 0;
        int q = 0;
        int parent = -1;
        double cost = 0.0;
        std::vector<int> children;
    };

    struct TreePoint
    {
        Point x;
        Symbol symbol;
        std::vector<int> vertices;
    };

    class ProductTree
    {
      public:
        ProductTree (Point root, Symbol root_symbol, int q_root, int state_count);

        [[nodiscard]] int root () const noexcept { return 0; }
        [[nodiscard]] std::size_t vertex_count () const noexcept { return vertices_.size (); }
        [[nodiscard]] std::size_t point_count () const noexcept { return points_.size (); }
        [[nodiscard]] int state_count () const noexcept { return static_cast<int> (by_state_.size ()); }

        [[nodiscard]] const ProductVertex &vertex (int v) const { return vertices_.at (static_cast<std::size_t> (v)); }
        [[nodiscard]] const TreePoint &point (std::uint32_t p) const { return points_.at (p); }
        [[nodiscard]] Point position (int v) const { return points_[vertices_.at (static_cast<std::size_t> (v)).point].x; }
        [[nodiscard]] Symbol symbol (int v) const { return points_[vertices_.at (static_cast<std::size_t> (v)).point].symbol; }
        [[nodiscard]] const std::vector<int> &in_state (int q) const { return by_state_.at (static_cast<std::size_t> (q)); }
        [[nodiscard]] const SpatialIndex &index () const noexcept { return index_; }

        [[nodiscard]] std::optional<int> find (std::uint32_t point, int q) const;

        std::uint32_t add_point (Point x, Symbol s);
        int add_vertex (std::uint32_t point, int q, int parent, double cost);

        /// Moves v under new_parent and recomputes the cost of v's whole subtree.
        void reparent (int v, int new_parent);

        [[nodiscard]] bool is_ancestor (int ancestor, int v) const;

        /// Vertex ids from the root to v inclusive.
        [[nodiscard]] std::vector<int> path_to (int v) const;

      private:
        std::vector<TreePoint> points_;
        std::vector<ProductVertex> vertices_;
        std::vector<std::vector<int>> by_state_;
        SpatialIndex index_;
    };

} // namespace nngtl
