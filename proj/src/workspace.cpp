#include "nngtl/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <tuple>

namespace nngtl
{
    GridWorkspace::GridWorkspace (int width, int height, int label_count, std::vector<CellCode> cells, Point init)
        : width_ (width), height_ (height), label_count_ (label_count), cells_ (std::move (cells)), init_ (init)
    {
        if (width <= 0 || height <= 0)
            throw Error (ErrorCode::InvalidArgument, "workspace dimensions must be positive");
        if (label_count < 0 || label_count > 250)
            throw Error (ErrorCode::InvalidArgument, "label count out of range");
        if (cells_.size () != static_cast<std::size_t> (width) * static_cast<std::size_t> (height))
            throw Error (ErrorCode::DimensionMismatch, "cell array size does not match width*height");

        by_symbol_.assign (static_cast<std::size_t> (label_count) + 1, {});
        for (std::size_t i = 0; i < cells_.size (); ++i)
        {
            const CellCode v = cells_[i];
            if (v == kObstacleCode)
                continue;
            if (v > label_count + 1)
                throw Error (ErrorCode::InvalidArgument, "cell code " + std::to_string (v) + " exceeds label count");
            non_obstacle_.push_back (static_cast<std::uint32_t> (i));
            by_symbol_[v == kFreeCode ? 0 : v - 1].push_back (static_cast<std::uint32_t> (i));
        }
        if (by_symbol_[0].empty ())
            throw Error (ErrorCode::InvalidArgument, "workspace has no free cell");
        if (!contains (init_))
            throw Error (ErrorCode::InvalidArgument, "init outside the unit square");
        if (is_obstacle (cell_of (init_)))
            throw Error (ErrorCode::InvalidArgument, "init lies in an obstacle");
    }

    GridWorkspace GridWorkspace::empty (int width, int height, int label_count, Point init)
    {
        return GridWorkspace (width, height, label_count, std::vector<CellCode> (static_cast<std::size_t> (width) * height, kFreeCode), init);
    }

    Cell GridWorkspace::cell_of (Point p) const noexcept
    {
        const int col = std::clamp (static_cast<int> (std::floor (p.x * width_)), 0, width_ - 1);
        const int row = std::clamp (static_cast<int> (std::floor (p.y * height_)), 0, height_ - 1);
        return {col, row};
    }

    Point GridWorkspace::center_of (Cell c) const noexcept
    {
        return {(c.col + 0.5) / width_, (c.row + 0.5) / height_};
    }

    std::optional<int> label_at (const GridWorkspace &w, Point p)
    {
        if (!w.contains (p))
            throw Error (ErrorCode::InvalidArgument, "point outside the unit square");
        const Cell c = w.cell_of (p);
        if (w.is_obstacle (c))
            throw Error (ErrorCode::ObstaclePoint, "point lies in an obstacle cell");
        const Symbol s = w.symbol (c);
        if (s.empty ())
            return std::nullopt;
        return s.label;
    }

    std::vector<Cell> supercover (const GridWorkspace &w, Point a, Point b)
    {
        // Traverse from the smaller endpoint so both directions visit the same sequence.
        if (std::tie (b.x, b.y) < std::tie (a.x, a.y))
            std::swap (a, b);

        const Cell start = w.cell_of (a);
        const Cell end = w.cell_of (b);
        std::vector<Cell> out;
        out.push_back (start);
        if (start == end)
            return out;

        const double u0 = a.x * w.width (), v0 = a.y * w.height ();
        const double du = (b.x - a.x) * w.width (), dv = (b.y - a.y) * w.height ();
        const int step_c = end.col > start.col ? 1 : (end.col < start.col ? -1 : 0);
        const int step_r = end.row > start.row ? 1 : (end.row < start.row ? -1 : 0);
        int remaining_c = std::abs (end.col - start.col);
        int remaining_r = std::abs (end.row - start.row);

        constexpr double inf = std::numeric_limits<double>::infinity ();
        const double delta_u = step_c != 0 ? std::abs (1.0 / du) : inf;
        const double delta_v = step_r != 0 ? std::abs (1.0 / dv) : inf;
        double t_max_u = step_c > 0 ? (start.col + 1 - u0) / du : (step_c < 0 ? (u0 - start.col) / -du : inf);
        double t_max_v = step_r > 0 ? (start.row + 1 - v0) / dv : (step_r < 0 ? (v0 - start.row) / -dv : inf);

        Cell cur = start;
        out.reserve (static_cast<std::size_t> (remaining_c + remaining_r + 2));
        while (remaining_c > 0 || remaining_r > 0)
        {
            const bool can_u = remaining_c > 0, can_v = remaining_r > 0;
            if (can_u && can_v && t_max_u == t_max_v)
            {
                // exact corner crossing: both side cells are touched
                out.push_back ({cur.col + step_c, cur.row});
                out.push_back ({cur.col, cur.row + step_r});
                cur = {cur.col + step_c, cur.row + step_r};
                out.push_back (cur);
                t_max_u += delta_u;
                t_max_v += delta_v;
                --remaining_c;
                --remaining_r;
            }
            else if (can_u && (!can_v || t_max_u < t_max_v))
            {
                cur.col += step_c;
                out.push_back (cur);
                t_max_u += delta_u;
                --remaining_c;
            }
            else
            {
                cur.row += step_r;
                out.push_back (cur);
                t_max_v += delta_v;
                --remaining_r;
            }
        }
        return out;
    }

    bool segment_valid (const GridWorkspace &w, Point a, Point b)
    {
        if (!w.contains (a) || !w.contains (b))
            return false;
        const auto cells = supercover (w, a, b);
        int changes = 0;
        CellCode prev = w.code (cells.front ());
        for (const Cell &c : cells)
        {
            const CellCode v = w.code (c);
            if (v == kObstacleCode)
                return false;
            if (v != prev)
            {
                if (++changes > 1)
                    return false;
                prev = v;
            }
        }
        return true;
    }

    bool segment_clear (const GridWorkspace &w, Point a, Point b)
    {
        if (!w.contains (a) || !w.contains (b))
            return false;
        for (const Cell &c : supercover (w, a, b))
            if (w.is_obstacle (c))
                return false;
        return true;
    }

    namespace
    {
        constexpr int kNeighbourDc[4] = {1, -1, 0, 0};
        constexpr int kNeighbourDr[4] = {0, 0, 1, -1};
    } // namespace

    std::optional<CellPath> grid_shortest_path (const GridWorkspace &w, Cell start, const CellPredicate &goal, const CellPredicate &passable)
    {
        if (!w.in_bounds (start) || w.is_obstacle (start))
            return std::nullopt;
        if (goal (start))
            return CellPath{start};

        const std::size_t n = static_cast<std::size_t> (w.width ()) * w.height ();
        std::vector<std::int32_t> parent (n, -1);
        std::vector<std::uint32_t> queue;
        queue.reserve (1024);
        const std::size_t s = w.index (start);
        parent[s] = static_cast<std::int32_t> (s);
        queue.push_back (static_cast<std::uint32_t> (s));

        for (std::size_t head = 0; head < queue.size (); ++head)
        {
            const Cell c = w.cell_at_index (queue[head]);
            for (int k = 0; k < 4; ++k)
            {
                const Cell nb{c.col + kNeighbourDc[k], c.row + kNeighbourDr[k]};
                if (!w.in_bounds (nb) || w.is_obstacle (nb))
                    continue;
                const std::size_t ni = w.index (nb);
                if (parent[ni] >= 0)
                    continue;
                parent[ni] = static_cast<std::int32_t> (queue[head]);
                if (goal (nb))
                {
                    CellPath path;
                    for (std::size_t i = ni; i != s; i = static_cast<std::size_t> (parent[i]))
                        path.push_back (w.cell_at_index (i));
                    path.push_back (start);
                    std::reverse (path.begin (), path.end ());
                    return path;
                }
                if (!passable || passable (nb))
                    queue.push_back (static_cast<std::uint32_t> (ni));
            }
        }
        return std::nullopt;
    }

    std::vector<int> grid_distances (const GridWorkspace &w, Cell start)
    {
        const std::size_t n = static_cast<std::size_t> (w.width ()) * w.height ();
        std::vector<int> dist (n, -1);
        if (!w.in_bounds (start) || w.is_obstacle (start))
            return dist;
        std::vector<std::uint32_t> queue;
        queue.reserve (n);
        dist[w.index (start)] = 0;
        queue.push_back (static_cast<std::uint32_t> (w.index (start)));
        for (std::size_t head = 0; head < queue.size (); ++head)
        {
            const Cell c = w.cell_at_index (queue[head]);
            const int d = dist[queue[head]];
            for (int k = 0; k < 4; ++k)
            {
                const Cell nb{c.col + kNeighbourDc[k], c.row + kNeighbourDr[k]};
                if (!w.in_bounds (nb) || w.is_obstacle (nb))
                    continue;
                const std::size_t ni = w.index (nb);
                if (dist[ni] >= 0)
                    continue;
                dist[ni] = d + 1;
                queue.push_back (static_cast<std::uint32_t> (ni));
            }
        }
        return dist;
    }

    Point sample_in_cell (const GridWorkspace &w, Cell c, Rng &rng)
    {
        double x = (c.col + rng.uniform ()) / w.width ();
        double y = (c.row + rng.uniform ()) / w.height ();
        // rounding can land exactly on the next cell boundary
        const double x_hi = static_cast<double> (c.col + 1) / w.width ();
        const double y_hi = static_cast<double> (c.row + 1) / w.height ();
        if (x >= x_hi || w.cell_of ({x, y}).col != c.col)
            x = std::nextafter (x_hi, 0.0);
        if (y >= y_hi || w.cell_of ({x, y}).row != c.row)
            y = std::nextafter (y_hi, 0.0);
        return {x, y};
    }

    Point sample_free_uniform (const GridWorkspace &w, Rng &rng)
    {
        const auto &cells = w.non_obstacle_cells ();
        if (cells.empty ())
            throw Error (ErrorCode::NoFreeSpace, "no non-obstacle cell to sample");
        const std::uint32_t idx = cells[rng.below (cells.size ())];
        return sample_in_cell (w, w.cell_at_index (idx), rng);
    }

    namespace
    {
        struct Rect
        {
            int c0, r0, c1, r1; // inclusive-exclusive
        };

        Rect random_rect (Rng &rng, int width, int height, int size_min, int size_max)
        {
            const int w = std::min (rng.between (size_min, size_max), width);
            const int h = std::min (rng.between (size_min, size_max), height);
            const int c0 = rng.between (0, width - w);
            const int r0 = rng.between (0, height - h);
            return {c0, r0, c0 + w, r0 + h};
        }

        std::optional<GridWorkspace> try_generate (Rng &rng, const GenParams &p)
        {
            const std::size_t n = static_cast<std::size_t> (p.width) * p.height;
            std::vector<CellCode> cells (n, kFreeCode);
            auto at = [&] (int c, int r) -> CellCode & { return cells[static_cast<std::size_t> (r) * p.width + c]; };

            const int obstacles = rng.between (p.obstacle_count_min, p.obstacle_count_max);
            for (int k = 0; k < obstacles; ++k)
            {
                const Rect r = random_rect (rng, p.width, p.height, p.obstacle_size_min, p.obstacle_size_max);
                for (int row = r.r0; row < r.r1; ++row)
                    for (int col = r.c0; col < r.c1; ++col)
                        at (col, row) = kObstacleCode;
            }

            for (int label = 1; label <= p.label_count; ++label)
            {
                bool placed = false;
                for (int attempt = 0; attempt < 200 && !placed; ++attempt)
                {
                    const Rect r = random_rect (rng, p.width, p.height, p.region_size_min, p.region_size_max);
                    // one-cell margin keeps regions from touching each other or obstacles
                    bool clear = true;
                    for (int row = std::max (r.r0 - 1, 0); row < std::min (r.r1 + 1, p.height) && clear; ++row)
                        for (int col = std::max (r.c0 - 1, 0); col < std::min (r.c1 + 1, p.width) && clear; ++col)
                            clear = at (col, row) == kFreeCode;
                    if (!clear)
                        continue;
                    for (int row = r.r0; row < r.r1; ++row)
                        for (int col = r.c0; col < r.c1; ++col)
                            at (col, row) = region_code (label);
                    placed = true;
                }
                if (!placed)
                    return std::nullopt;
            }

            std::vector<std::uint32_t> free_cells;
            for (std::size_t i = 0; i < n; ++i)
                if (cells[i] == kFreeCode)
                    free_cells.push_back (static_cast<std::uint32_t> (i));
            if (free_cells.empty ())
                return std::nullopt;
            const std::uint32_t init_idx = free_cells[rng.below (free_cells.size ())];
            const Cell init_cell{static_cast<int> (init_idx % p.width), static_cast<int> (init_idx / p.width)};
            GridWorkspace ws (p.width, p.height, p.label_count, std::move (cells), Point{(init_cell.col + 0.5) / p.width, (init_cell.row + 0.5) / p.height});

            const auto dist = grid_distances (ws, init_cell);
            for (int label = 1; label <= p.label_count; ++label)
            {
                const auto &region = ws.cells_with (Symbol{label});
                const bool reachable = std::any_of (region.begin (), region.end (), [&] (std::uint32_t i) { return dist[i] >= 0; });
                if (!reachable)
                    return std::nullopt;
            }
            return ws;
        }
    } // namespace

    GridWorkspace generate_random_workspace (std::uint64_t seed, const GenParams &params)
    {
        if (params.label_count < 1)
            throw Error (ErrorCode::InvalidArgument, "at least one labeled region is required");
        if (params.region_size_min > std::min (params.width, params.height) || params.obstacle_size_min > std::min (params.width, params.height))
            throw Error (ErrorCode::InvalidArgument, "footprints do not fit the grid");
        for (int attempt = 0; attempt < params.max_retries; ++attempt)
        {
            Rng rng (seed * 1000003ULL + static_cast<std::uint64_t> (attempt));
            if (auto ws = try_generate (rng, params))
                return std::move (*ws);
        }
        throw Error (ErrorCode::GenerationFailed, "workspace generation failed after " + std::to_string (params.max_retries) + " retries");
    }

} // namespace nngtl
