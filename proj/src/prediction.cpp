#include "nngtl/prediction.hpp"
#include "nngtl/simd.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace nngtl
{
    void validate (const Prediction &pred, int n_states, int rows, int cols)
    {
        if (pred.p.size () != static_cast<std::size_t> (n_states))
            throw Error (ErrorCode::DimensionMismatch, "prediction has " + std::to_string (pred.p.size ()) + " state probabilities, automaton has " +
                                                           std::to_string (n_states) + " states");
        if (pred.rows != rows || pred.cols != cols)
            throw Error (ErrorCode::DimensionMismatch, "prediction heatmap is " + std::to_string (pred.rows) + "x" + std::to_string (pred.cols) +
                                                           ", workspace grid is " + std::to_string (rows) + "x" + std::to_string (cols));
        if (pred.heatmap.size () != static_cast<std::size_t> (rows) * static_cast<std::size_t> (cols))
            throw Error (ErrorCode::DimensionMismatch, "prediction heatmap length does not match its declared shape");
        auto in_range = [] (float v) { return std::isfinite (v) && v >= 0.0f && v <= 1.0f; };
        if (!std::all_of (pred.p.begin (), pred.p.end (), in_range) || !std::all_of (pred.heatmap.begin (), pred.heatmap.end (), in_range))
            throw Error (ErrorCode::FormatError, "prediction values must be finite and lie in [0, 1]");
    }

    std::string prediction_to_json (const Prediction &pred)
    {
        nlohmann::ordered_json j;
        j["n_states"] = pred.p.size ();
        j["grid"] = {pred.rows, pred.cols};
        j["p"] = pred.p;
        j["heatmap"] = pred.heatmap;
        return j.dump ();
    }

    Prediction prediction_from_json (std::string_view text)
    {
        try
        {
            const auto j = nlohmann::json::parse (text);
            Prediction pred;
            const auto n = j.at ("n_states").get<std::size_t> ();
            const auto grid = j.at ("grid").get<std::vector<int>> ();
            if (grid.size () != 2 || grid[0] < 0 || grid[1] < 0)
                throw Error (ErrorCode::FormatError, "prediction JSON: grid must be [rows, cols]");
            pred.rows = grid[0];
            pred.cols = grid[1];
            pred.p = j.at ("p").get<std::vector<float>> ();
            pred.heatmap = j.at ("heatmap").get<std::vector<float>> ();
            if (pred.p.size () != n)
                throw Error (ErrorCode::DimensionMismatch, "prediction JSON: p length differs from n_states");
            if (pred.heatmap.size () != static_cast<std::size_t> (pred.rows) * static_cast<std::size_t> (pred.cols))
                throw Error (ErrorCode::DimensionMismatch, "prediction JSON: heatmap length differs from grid");
            return pred;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error (ErrorCode::FormatError, std::string ("prediction JSON: ") + e.what ());
        }
    }

    namespace
    {
        constexpr std::string_view kMagic = "NNTL1";

        void put_u32 (std::string &out, std::uint32_t v)
        {
            for (int i = 0; i < 4; ++i)
                out.push_back (static_cast<char> ((v >> (8 * i)) & 0xFFu));
        }

        std::uint32_t get_u32 (std::string_view in, std::size_t at)
        {
            std::uint32_t v = 0;
            for (int i = 0; i < 4; ++i)
                v |= static_cast<std::uint32_t> (static_cast<unsigned char> (in[at + static_cast<std::size_t> (i)])) << (8 * i);
            return v;
        }

        void put_f32 (std::string &out, float f)
        {
            put_u32 (out, std::bit_cast<std::uint32_t> (f));
        }

        float get_f32 (std::string_view in, std::size_t at)
        {
            return std::bit_cast<float> (get_u32 (in, at));
        }
    } // namespace

    std::string prediction_to_binary (const Prediction &pred)
    {
        std::string out (kMagic);
        put_u32 (out, static_cast<std::uint32_t> (pred.p.size ()));
        put_u32 (out, static_cast<std::uint32_t> (pred.rows));
        put_u32 (out, static_cast<std::uint32_t> (pred.cols));
        for (float v : pred.p)
            put_f32 (out, v);
        for (float v : pred.heatmap)
            put_f32 (out, v);
        return out;
    }

    Prediction prediction_from_binary (std::string_view bytes)
    {
        const std::size_t header = kMagic.size () + 12;
        if (bytes.size () < header || bytes.substr (0, kMagic.size ()) != kMagic)
            throw Error (ErrorCode::FormatError, "prediction binary: missing NNTL1 header");
        const std::uint32_t n = get_u32 (bytes, 5), rows = get_u32 (bytes, 9), cols = get_u32 (bytes, 13);
        const std::uint64_t count = static_cast<std::uint64_t> (n) + static_cast<std::uint64_t> (rows) * cols;
        if (bytes.size () != header + 4 * count)
            throw Error (ErrorCode::FormatError, "prediction binary: expected " + std::to_string (header + 4 * count) + " bytes, found " +
                                                     std::to_string (bytes.size ()));
        Prediction pred;
        pred.rows = static_cast<int> (rows);
        pred.cols = static_cast<int> (cols);
        pred.p.resize (n);
        pred.heatmap.resize (static_cast<std::size_t> (rows) * cols);
        std::size_t at = header;
        for (auto &v : pred.p)
        {
            v = get_f32 (bytes, at);
            at += 4;
        }
        for (auto &v : pred.heatmap)
        {
            v = get_f32 (bytes, at);
            at += 4;
        }
        return pred;
    }

    void save_prediction (const Prediction &pred, const std::filesystem::path &file)
    {
        std::ofstream os (file, std::ios::binary);
        if (!os)
            throw Error (ErrorCode::FormatError, "cannot write " + file.string ());
        os << (file.extension () == ".json" ? prediction_to_json (pred) : prediction_to_binary (pred));
        if (!os)
            throw Error (ErrorCode::FormatError, "write failed for " + file.string ());
    }

    Prediction load_prediction (const std::filesystem::path &file)
    {
        std::ifstream is (file, std::ios::binary);
        if (!is)
            throw Error (ErrorCode::FormatError, "cannot read " + file.string ());
        std::ostringstream ss;
        ss << is.rdbuf ();
        const std::string bytes = ss.str ();
        if (bytes.compare (0, kMagic.size (), kMagic) == 0)
            return prediction_from_binary (bytes);
        return prediction_from_json (bytes);
    }

    // ───────── oracle ─────────

    namespace
    {
        struct SymbolicLasso
        {
            std::vector<int> prefix; ///< init .. qF
            std::vector<int> cycle;  ///< qF .. qF
        };

        std::vector<int> shortest_cycle (const TransitionTable &t, int q, int n)
        {
            std::vector<int> parent (static_cast<std::size_t> (n), -1);
            std::vector<int> queue;
            for (int s : t.feasible_successors (q))
            {
                if (s == q)
                    return {q, q};
                if (parent[static_cast<std::size_t> (s)] < 0)
                {
                    parent[static_cast<std::size_t> (s)] = q;
                    queue.push_back (s);
                }
            }
            for (std::size_t head = 0; head < queue.size (); ++head)
            {
                const int u = queue[head];
                for (int s : t.feasible_successors (u))
                {
                    if (s == q)
                    {
                        std::vector<int> cyc{q};
                        for (int v = u; v != q; v = parent[static_cast<std::size_t> (v)])
                            cyc.push_back (v);
                        std::reverse (cyc.begin () + 1, cyc.end ());
                        cyc.push_back (q);
                        return cyc;
                    }
                    if (parent[static_cast<std::size_t> (s)] < 0)
                    {
                        parent[static_cast<std::size_t> (s)] = u;
                        queue.push_back (s);
                    }
                }
            }
            return {};
        }

        /// Up to k simple paths init -> target in order of hop count.
        std::vector<std::vector<int>> shortest_simple_paths (const TransitionTable &t, int init, int target, std::size_t k)
        {
            std::vector<std::vector<int>> out;
            std::vector<std::vector<int>> frontier{{init}};
            constexpr std::size_t kExpansionCap = 20000;
            std::size_t expanded = 0;
            for (std::size_t head = 0; head < frontier.size () && out.size () < k && expanded < kExpansionCap; ++head)
            {
                const std::vector<int> path = frontier[head];
                if (path.back () == target)
                {
                    out.push_back (path);
                    continue;
                }
                ++expanded;
                for (int s : t.feasible_successors (path.back ()))
                {
                    if (std::find (path.begin (), path.end (), s) != path.end ())
                        continue;
                    auto next = path;
                    next.push_back (s);
                    frontier.push_back (std::move (next));
                }
            }
            return out;
        }

        /// Line-of-sight smoothing of a grid path: each anchor connects straight to
        /// the farthest later cell whose connecting segment touches only cells
        /// accepted by `allowed`. Returns the cells touched by the smoothed polyline.
        CellPath taut (const GridWorkspace &w, const CellPath &path, const CellPredicate &allowed)
        {
            if (path.size () <= 2)
                return path;
            auto visible = [&] (std::size_t i, std::size_t j) {
                for (const Cell &c : supercover (w, w.center_of (path[i]), w.center_of (path[j])))
                    if (w.is_obstacle (c) || !allowed (c))
                        return false;
                return true;
            };
            CellPath out{path.front ()};
            std::size_t anchor = 0;
            while (anchor + 1 < path.size ())
            {
                std::size_t next = anchor + 1;
                while (next + 1 < path.size () && visible (anchor, next + 1))
                    ++next;
                auto seg = supercover (w, w.center_of (path[anchor]), w.center_of (path[next]));
                if (!(seg.front () == path[anchor]))
                    std::reverse (seg.begin (), seg.end ());
                out.insert (out.end (), seg.begin () + 1, seg.end ());
                anchor = next;
            }
            return out;
        }

        struct Leg
        {
            CellPath path;  ///< 4-connected grid path, start to goal
            CellPath ridge; ///< cells of its line-of-sight smoothing
        };

        struct Realizer
        {
            const GridWorkspace &w;
            const TransitionTable &t;

            /// Moves from `at` to the nearest cell whose label enables a -> b. The
            /// cells in between should keep the automaton in a and stay out of
            /// unrelated regions (a planner step cannot hop across a region thinner
            /// than its step length); these preferences are dropped in turn when
            /// they wall the target off.
            std::optional<Leg> leg (Cell at, int a, int b) const
            {
                const Guard &move = t.guard (a, b);
                const Guard &stay = t.guard (a, a);
                auto goal = [&] (Cell c) { return move.satisfied_by (w.symbol (c)); };
                auto keeps = [&] (Cell c) { return stay.satisfied_by (w.symbol (c)); };
                auto unlabeled = [&] (Cell c) { return w.symbol (c).label == 0; };
                const std::array<CellPredicate, 4> tiers{
                    [&] (Cell c) { return keeps (c) && unlabeled (c); },
                    keeps,
                    unlabeled,
                    [] (Cell) { return true; },
                };
                for (std::size_t i = stay.is_false () ? 2 : 0; i < tiers.size (); ++i)
                    if (auto l = constrained_leg (at, goal, tiers[i]))
                        return l;
                return std::nullopt;
            }

            std::optional<Leg> free_leg (Cell at, const CellPredicate &goal) const
            {
                auto unlabeled = [&] (Cell c) { return w.symbol (c).label == 0; };
                if (auto l = constrained_leg (at, goal, unlabeled))
                    return l;
                return constrained_leg (at, goal, [] (Cell) { return true; });
            }

            std::optional<Leg> constrained_leg (Cell at, const CellPredicate &goal, const CellPredicate &passable) const
            {
                auto path = grid_shortest_path (w, at, goal, passable);
                if (!path)
                    return std::nullopt;
                auto ridge = taut (w, *path, [&] (Cell c) { return c == at || passable (c) || goal (c); });
                return Leg{std::move (*path), std::move (ridge)};
            }
        };

        void append (CellPath &dst, const CellPath &leg)
        {
            if (dst.empty ())
                dst = leg;
            else
                dst.insert (dst.end (), leg.begin () + 1, leg.end ());
        }
    } // namespace

    std::vector<OracleLasso> oracle_lassos (const GridWorkspace &w, const Nba &b, const DistanceTable &d, const OracleConfig &cfg)
    {
        const std::vector<int> feasible = feasible_accepting (b, d);
        const TransitionTable t (b, w.label_count ());
        const auto k = static_cast<std::size_t> (std::max (cfg.candidates, 1));

        std::vector<SymbolicLasso> symbolic;
        for (int qf : feasible)
        {
            const auto cyc = shortest_cycle (t, qf, b.state_count);
            if (cyc.empty ())
                continue;
            for (auto &path : shortest_simple_paths (t, b.init, qf, k))
                symbolic.push_back ({std::move (path), cyc});
        }
        std::stable_sort (symbolic.begin (), symbolic.end (), [] (const SymbolicLasso &x, const SymbolicLasso &y) {
            const auto hx = x.prefix.size () + x.cycle.size (), hy = y.prefix.size () + y.cycle.size ();
            return hx != hy ? hx < hy : std::tie (x.prefix, x.cycle) < std::tie (y.prefix, y.cycle);
        });
        if (symbolic.size () > k)
            symbolic.resize (k);

        const Realizer r{w, t};
        const double inf = std::numeric_limits<double>::infinity ();
        std::vector<OracleLasso> out;
        for (const auto &s : symbolic)
        {
            OracleLasso l;
            l.prefix_states = s.prefix;
            l.cycle_states = s.cycle;
            Cell at = w.cell_of (w.init ());
            l.prefix_cells = {at};
            l.ridge = {at};
            bool ok = true;
            for (std::size_t i = 0; ok && i + 1 < s.prefix.size (); ++i)
            {
                const auto leg = r.leg (at, s.prefix[i], s.prefix[i + 1]);
                if (!leg)
                    ok = false;
                else
                {
                    append (l.prefix_cells, leg->path);
                    append (l.ridge, leg->ridge);
                    at = leg->path.back ();
                }
            }
            if (ok && s.cycle.size () == 2 && s.cycle[0] == s.cycle[1])
            {
                // stay cycle: walk to a cell that enables the self-loop, then remain there
                const auto leg = r.leg (at, s.cycle[0], s.cycle[0]);
                if (!leg)
                    ok = false;
                else
                {
                    append (l.prefix_cells, leg->path);
                    append (l.ridge, leg->ridge);
                    l.cycle_cells = {leg->path.back ()};
                }
            }
            else if (ok)
            {
                const Cell start = at;
                l.cycle_cells = {at};
                for (std::size_t i = 0; ok && i + 1 < s.cycle.size (); ++i)
                {
                    const auto leg = r.leg (at, s.cycle[i], s.cycle[i + 1]);
                    if (!leg)
                        ok = false;
                    else
                    {
                        append (l.cycle_cells, leg->path);
                        append (l.ridge, leg->ridge);
                        at = leg->path.back ();
                    }
                }
                if (ok && !(at == start))
                {
                    const auto back = r.free_leg (at, [start] (Cell c) { return c == start; });
                    if (!back)
                        ok = false;
                    else
                    {
                        append (l.cycle_cells, back->path);
                        append (l.ridge, back->ridge);
                    }
                }
            }
            if (ok)
            {
                const auto pre_moves = static_cast<double> (l.prefix_cells.size () - 1);
                const auto cyc_moves = static_cast<double> (l.cycle_cells.size () - 1);
                l.cost = cfg.lambda * pre_moves + (1.0 - cfg.lambda) * cyc_moves;
            }
            else
                l.cost = inf;
            out.push_back (std::move (l));
        }
        return out;
    }

    Prediction oracle_predict (const GridWorkspace &w, const Nba &b, const DistanceTable &d, const OracleConfig &cfg)
    {
        const auto lassos = oracle_lassos (w, b, d, cfg);
        const OracleLasso *best = nullptr;
        for (const auto &l : lassos)
            if (std::isfinite (l.cost) && (!best || l.cost < best->cost))
                best = &l;
        if (!best)
            throw Error (ErrorCode::NoRealizableRun, "no candidate accepting lasso can be realized in the workspace");

        Prediction pred;
        pred.p.assign (static_cast<std::size_t> (b.state_count), cfg.floor);
        for (int q : best->prefix_states)
            pred.p[static_cast<std::size_t> (q)] = 1.0f;
        for (int q : best->cycle_states)
            pred.p[static_cast<std::size_t> (q)] = 1.0f;

        std::vector<Cell> src = best->ridge;
        std::sort (src.begin (), src.end ());
        src.erase (std::unique (src.begin (), src.end ()), src.end ());
        std::vector<double> sx, sy;
        for (const Cell &c : src)
        {
            sx.push_back (c.col);
            sy.push_back (c.row);
        }

        pred.rows = w.height ();
        pred.cols = w.width ();
        const std::size_t cells = static_cast<std::size_t> (pred.rows) * pred.cols;
        std::vector<double> qx (cells), qy (cells), d2 (cells, std::numeric_limits<double>::infinity ());
        for (std::size_t i = 0; i < cells; ++i)
        {
            const Cell c = w.cell_at_index (i);
            qx[i] = c.col;
            qy[i] = c.row;
        }
        simd::active ().min_sq_distance (qx.data (), qy.data (), cells, sx.data (), sy.data (), src.size (), d2.data ());
        pred.heatmap.resize (cells);
        for (std::size_t i = 0; i < cells; ++i)
            pred.heatmap[i] = w.is_obstacle (w.cell_at_index (i)) ? 0.0f : static_cast<float> (std::exp (-std::sqrt (d2[i]) / cfg.sigma_cells));
        return pred;
    }

} // namespace nngtl
