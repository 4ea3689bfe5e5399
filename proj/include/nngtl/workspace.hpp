#pragma once
/**
 * @file  workspace.hpp
 * @brief Labeled occupancy grid that doubles as the continuous unit-square workspace.
 *
 * Cell codes follow the on-disk format: 0 = free, 1 = obstacle, 1 + i = region l_i.
 * A point (x, y) in [0,1)^2 lives in column floor(x * width), row floor(y * height).
 */

#include "nngtl/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nngtl
{
    enum class CellStatus : std::uint8_t
    {
        Free,
        Obstacle,
        Region,
    };

    /// Encoded cell value: 0 = free, 1 = obstacle, 1 + i = region i.
    using CellCode = std::uint8_t;

    inline constexpr CellCode kFreeCode = 0;
    inline constexpr CellCode kObstacleCode = 1;
    inline constexpr CellCode region_code (int label) noexcept { return static_cast<CellCode> (1 + label); }

    using CellPath = std::vector<Cell>;
    using CellPredicate = std::function<bool (Cell)>;

    class GridWorkspace
    {
      public:
        /// Validates the invariants (init not in an obstacle, region indices in 1..m,
        /// at least one free cell) and throws InvalidArgument when they fail.
        GridWorkspace (int width, int height, int label_count, std::vector<CellCode> cells, Point init);

        /// All-free map of the given size.
        static GridWorkspace empty (int width, int height, int label_count, Point init);

        [[nodiscard]] int width () const noexcept { return width_; }
        [[nodiscard]] int height () const noexcept { return height_; }
        [[nodiscard]] int label_count () const noexcept { return label_count_; }
        [[nodiscard]] Point init () const noexcept { return init_; }
        [[nodiscard]] std::span<const CellCode> cells () const noexcept { return cells_; }

        [[nodiscard]] bool in_bounds (Cell c) const noexcept { return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_; }
        [[nodiscard]] std::size_t index (Cell c) const noexcept { return static_cast<std::size_t> (c.row) * width_ + c.col; }
        [[nodiscard]] Cell cell_at_index (std::size_t i) const noexcept { return {static_cast<int> (i % width_), static_cast<int> (i / width_)}; }

        [[nodiscard]] CellCode code (Cell c) const noexcept { return cells_[index (c)]; }
        [[nodiscard]] bool is_obstacle (Cell c) const noexcept { return code (c) == kObstacleCode; }

        /// Symbol carried by a non-obstacle cell (empty for free cells).
        [[nodiscard]] Symbol symbol (Cell c) const noexcept
        {
            const CellCode v = code (c);
            return Symbol{v >= 2 ? v - 1 : 0};
        }

        [[nodiscard]] Cell cell_of (Point p) const noexcept;
        [[nodiscard]] Point center_of (Cell c) const noexcept;
        [[nodiscard]] bool contains (Point p) const noexcept { return p.x >= 0.0 && p.y >= 0.0 && p.x < 1.0 && p.y < 1.0; }

        /// True when p lies inside the square and its cell is not an obstacle.
        [[nodiscard]] bool is_free (Point p) const noexcept { return contains (p) && !is_obstacle (cell_of (p)); }

        /// Symbol of a free point (empty when no region holds it).
        [[nodiscard]] Symbol symbol_at (Point p) const { return symbol (cell_of (p)); }

        /// Cells carrying each symbol: index 0 = free cells, index i = region i.
        [[nodiscard]] const std::vector<std::uint32_t> &cells_with (Symbol s) const { return by_symbol_.at (static_cast<std::size_t> (s.label)); }
        [[nodiscard]] std::size_t non_obstacle_count () const noexcept { return non_obstacle_.size (); }
        [[nodiscard]] const std::vector<std::uint32_t> &non_obstacle_cells () const noexcept { return non_obstacle_; }

        friend bool operator== (const GridWorkspace &a, const GridWorkspace &b)
        {
            return a.width_ == b.width_ && a.height_ == b.height_ && a.label_count_ == b.label_count_ && a.init_ == b.init_ && a.cells_ == b.cells_;
        }

      private:
        int width_;
        int height_;
        int label_count_;
        std::vector<CellCode> cells_;
        Point init_;
        std::vector<std::vector<std::uint32_t>> by_symbol_;
        std::vector<std::uint32_t> non_obstacle_;
    };

    /// Region label at p, or nullopt for free space. Throws ObstaclePoint.
    std::optional<int> label_at (const GridWorkspace &w, Point p);

    /// Every cell the closed segment a-b touches, ordered from the lexicographically
    /// smaller endpoint. Cells touched only at a shared corner are both included.
    std::vector<Cell> supercover (const GridWorkspace &w, Point a, Point b);

    /// Transition relation of the workspace: the segment crosses no obstacle cell and
    /// the label sequence along its supercover changes value at most once.
    bool segment_valid (const GridWorkspace &w, Point a, Point b);

    /// Obstacle-only line of sight (label changes ignored).
    bool segment_clear (const GridWorkspace &w, Point a, Point b);

    /// Breadth-first 4-connected shortest path from `start` to the nearest cell
    /// satisfying `goal`. Neighbour order is fixed (+x, -x, +y, -y). When `passable`
    /// is given, intermediate cells must satisfy it; the start and goal cells need not.
    std::optional<CellPath> grid_shortest_path (const GridWorkspace &w, Cell start, const CellPredicate &goal, const CellPredicate &passable = {});

    /// BFS hop distances from `start` to every cell (-1 when unreachable).
    std::vector<int> grid_distances (const GridWorkspace &w, Cell start);

    /// Uniform point over the union of non-obstacle cells. Throws NoFreeSpace.
    Point sample_free_uniform (const GridWorkspace &w, Rng &rng);

    /// Uniform point inside a cell.
    Point sample_in_cell (const GridWorkspace &w, Cell c, Rng &rng);

    struct GenParams
    {
        int width = 200;
        int height = 200;
        int label_count = 7;
        int obstacle_count_min = 4;
        int obstacle_count_max = 10;
        int obstacle_size_min = 10; ///< cells
        int obstacle_size_max = 40;
        int region_size_min = 12;
        int region_size_max = 24;
        int max_retries = 100;
    };

    /// {"width":W,"height":H,"m":m,"init":[x,y],"grid":[row-major codes]}. Doubles are
    /// written with round-trip precision, so save/load is bit exact.
    std::string workspace_to_json (const GridWorkspace &w);
    /// Throws FormatError (malformed) or InvalidArgument (violated invariants).
    GridWorkspace workspace_from_json (std::string_view text);

    /// Reproducible random map with `label_count` rectangular regions, rectangular
    /// obstacles and a random free init; every region is reachable from the init.
    GridWorkspace generate_random_workspace (std::uint64_t seed, const GenParams &params = {});

} // namespace nngtl
