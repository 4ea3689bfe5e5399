#include "nngtl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nngtl
{
    const char *to_string (Strategy s) noexcept
    {
        switch (s)
        {
        case Strategy::Uniform: return "uniform";
        case Strategy::Biased: return "biased";
        case Strategy::Guided: return "guided";
        }
        return "?";
    }

    Strategy strategy_from_string (std::string_view s)
    {
        if (s == "uniform")
            return Strategy::Uniform;
        if (s == "biased")
            return Strategy::Biased;
        if (s == "guided")
            return Strategy::Guided;
        throw Error (ErrorCode::InvalidArgument, "unknown strategy '" + std::string (s) + "'");
    }

    namespace
    {
        constexpr int kInf = DistanceTable::kInfinity;

        std::vector<double> summed_area (const std::vector<double> &weight, int cols, int rows)
        {
            const auto stride = static_cast<std::size_t> (cols) + 1;
            std::vector<double> sat (stride * (static_cast<std::size_t> (rows) + 1), 0.0);
            for (int r = 0; r < rows; ++r)
            {
                double run = 0.0;
                for (int c = 0; c < cols; ++c)
                {
                    run += weight[static_cast<std::size_t> (r) * cols + c];
                    sat[(r + 1) * stride + c + 1] = sat[r * stride + c + 1] + run;
                }
            }
            return sat;
        }
    } // namespace

    Sampler::Sampler (const GridWorkspace &w, const TransitionTable &table, const DistanceTable &rho, const SamplerConfig &cfg, const Prediction *pred)
        : w_ (w), table_ (table), rho_ (rho), cfg_ (cfg), pred_ (pred)
    {
        if (cfg_.strategy == Strategy::Guided)
        {
            if (!pred_)
                throw Error (ErrorCode::InvalidArgument, "guided sampling requires a prediction");
            validate (*pred_, rho_.size (), w_.height (), w_.width ());
        }
        const std::size_t cells = static_cast<std::size_t> (w_.width ()) * w_.height ();
        free_weight_.assign (cells, 0.0);
        for (std::uint32_t i : w_.non_obstacle_cells ())
            free_weight_[i] = 1.0;
        free_sat_ = summed_area (free_weight_, w_.width (), w_.height ());
        if (pred_)
        {
            heat_weight_.assign (cells, 0.0);
            for (std::uint32_t i : w_.non_obstacle_cells ())
                heat_weight_[i] = static_cast<double> (pred_->heatmap[i]);
            heat_sat_ = summed_area (heat_weight_, w_.width (), w_.height ());
        }
    }

    Point Sampler::sample_uniform (Rng &rng) const
    {
        return sample_free_uniform (w_, rng);
    }

    double Sampler::weight (int q) const
    {
        return pred_ ? static_cast<double> (pred_->p[static_cast<std::size_t> (q)]) : 1.0;
    }

    std::optional<Point> Sampler::sample_label_point (const Guard &g, Rng &rng) const
    {
        std::vector<double> counts (static_cast<std::size_t> (w_.label_count ()) + 1, 0.0);
        double total = 0.0;
        for (int s = 0; s <= w_.label_count (); ++s)
            if (g.satisfied_by (Symbol{s}))
            {
                counts[static_cast<std::size_t> (s)] = static_cast<double> (w_.cells_with (Symbol{s}).size ());
                total += counts[static_cast<std::size_t> (s)];
            }
        if (total <= 0.0)
            return std::nullopt;
        const auto s = static_cast<int> (rng.weighted (counts));
        const auto &cells = w_.cells_with (Symbol{s});
        const Cell c = w_.cell_at_index (cells[rng.below (cells.size ())]);
        return sample_in_cell (w_, c, rng);
    }

    std::optional<BiasSelection> Sampler::select (const ProductTree &tree, const SearchGoal &goal, Rng &rng, bool weighted) const
    {
        if (goal.targets.empty ())
            throw Error (ErrorCode::NoFeasibleAccepting, "sampler has no target state");
        const int n = tree.state_count ();
        BiasSelection sel;

        // S-1
        if (weighted)
        {
            std::vector<double> wts;
            for (int t : goal.targets)
                wts.push_back (weight (t));
            if (std::all_of (wts.begin (), wts.end (), [] (double x) { return x <= 0.0; }))
                std::fill (wts.begin (), wts.end (), 1.0);
            sel.q_feas = goal.targets[rng.weighted (wts)];
        }
        else
            sel.q_feas = goal.targets[rng.below (goal.targets.size ())];

        const int target = sel.q_feas;
        auto dist_succ = [&] (int q) { return rho_.to_target (q, target); };
        auto dist_closest = [&] (int q) { return goal.suffix ? rho_ (q, target) : rho_.to_target (q, target); };

        // S-2
        int best = kInf;
        bool any_finite = false;
        for (int q = 0; q < n; ++q)
            if (!tree.in_state (q).empty ())
            {
                const int d = dist_closest (q);
                if (d != kInf)
                    any_finite = true;
                best = std::min (best, d);
            }
        std::vector<double> tier_min (static_cast<std::size_t> (n), 0.0), tier_rest (static_cast<std::size_t> (n), 0.0);
        double sum_min = 0.0, sum_rest = 0.0;
        for (int q = 0; q < n; ++q)
        {
            const auto count = static_cast<double> (tree.in_state (q).size ());
            if (count == 0.0)
                continue;
            const double wq = count * (weighted ? weight (q) : 1.0);
            const bool in_min = any_finite ? dist_closest (q) == best : true;
            (in_min ? tier_min : tier_rest)[static_cast<std::size_t> (q)] = wq;
            (in_min ? sum_min : sum_rest) += wq;
        }
        int q_closest;
        if (weighted && !cfg_.guided_tiered_closest)
        {
            std::vector<double> all (static_cast<std::size_t> (n), 0.0);
            double sum = 0.0;
            for (int q = 0; q < n; ++q)
            {
                all[static_cast<std::size_t> (q)] = tier_min[static_cast<std::size_t> (q)] + tier_rest[static_cast<std::size_t> (q)];
                sum += all[static_cast<std::size_t> (q)];
            }
            if (sum <= 0.0)
                for (int q = 0; q < n; ++q)
                    all[static_cast<std::size_t> (q)] = static_cast<double> (tree.in_state (q).size ());
            q_closest = static_cast<int> (rng.weighted (all));
        }
        else
        {
            const bool pick_min = rng.bernoulli (cfg_.p_d) || sum_rest <= 0.0;
            auto &tier = pick_min ? tier_min : tier_rest;
            const double sum = pick_min ? sum_min : sum_rest;
            if (sum <= 0.0)
                for (int q = 0; q < n; ++q)
                {
                    const bool in_min = any_finite ? dist_closest (q) == best : true;
                    if (!tree.in_state (q).empty () && in_min == pick_min)
                        tier[static_cast<std::size_t> (q)] = static_cast<double> (tree.in_state (q).size ());
                }
            q_closest = static_cast<int> (rng.weighted (tier));
        }
        const auto &bucket = tree.in_state (q_closest);
        sel.closest = bucket[rng.below (bucket.size ())];
        const Symbol sym = tree.symbol (sel.closest);

        if (goal.suffix && table_.enabled (q_closest, sym, target))
        {
            sel.homing = true;
            sel.q_succ1 = sel.q_succ2 = target;
            sel.x_l = goal.root_point;
            return sel;
        }

        // S-3
        const int d_closest = dist_closest (q_closest);
        if (d_closest == kInf)
            return std::nullopt;
        std::vector<std::pair<int, int>> pairs;
        for (int s1 : table_.successors (q_closest, sym))
        {
            const int d1 = dist_succ (s1);
            if (d1 == kInf || d1 > d_closest)
                continue;
            for (int s2 : table_.feasible_successors (s1))
            {
                const int d2 = dist_succ (s2);
                if (d2 == kInf || d2 > d1 || (s2 == s1 && s1 != target))
                    continue;
                const Guard &g = table_.guard (s1, s2);
                bool has_cells = false;
                for (int s = 0; s <= w_.label_count () && !has_cells; ++s)
                    has_cells = g.satisfied_by (Symbol{s}) && !w_.cells_with (Symbol{s}).empty ();
                if (has_cells)
                    pairs.emplace_back (s1, s2);
            }
        }
        if (pairs.empty ())
            return std::nullopt;

        std::pair<int, int> chosen;
        if (!weighted)
            chosen = pairs[rng.below (pairs.size ())];
        else
        {
            std::vector<int> firsts;
            for (const auto &pr : pairs)
                if (firsts.empty () || firsts.back () != pr.first)
                    firsts.push_back (pr.first);
            std::vector<double> w1;
            for (int s1 : firsts)
                w1.push_back (weight (s1));
            if (std::all_of (w1.begin (), w1.end (), [] (double x) { return x <= 0.0; }))
                std::fill (w1.begin (), w1.end (), 1.0);
            const int s1 = firsts[rng.weighted (w1)];
            std::vector<int> seconds;
            std::vector<double> w2;
            for (const auto &pr : pairs)
                if (pr.first == s1)
                {
                    seconds.push_back (pr.second);
                    w2.push_back (weight (pr.second));
                }
            if (std::all_of (w2.begin (), w2.end (), [] (double x) { return x <= 0.0; }))
                std::fill (w2.begin (), w2.end (), 1.0);
            chosen = {s1, seconds[rng.weighted (w2)]};
        }
        sel.q_succ1 = chosen.first;
        sel.q_succ2 = chosen.second;

        // S-4
        const auto x_l = sample_label_point (table_.guard (sel.q_succ1, sel.q_succ2), rng);
        if (!x_l)
            return std::nullopt;
        sel.x_l = *x_l;
        return sel;
    }

    std::optional<BiasSelection> Sampler::biased_select (const ProductTree &tree, const SearchGoal &goal, Rng &rng) const
    {
        return select (tree, goal, rng, false);
    }

    std::optional<BiasSelection> Sampler::guided_select (const ProductTree &tree, const SearchGoal &goal, Rng &rng) const
    {
        const bool use_p = pred_ != nullptr && cfg_.alpha > 0.0 && (cfg_.alpha >= 1.0 || rng.bernoulli (cfg_.alpha));
        auto sel = select (tree, goal, rng, use_p);
        if (sel)
            sel->predicted = use_p;
        return sel;
    }

    Point Sampler::biased_waypoint (const ProductTree &tree, const BiasSelection &sel) const
    {
        const Point xc = tree.position (sel.closest);
        const Cell from = w_.cell_of (xc);
        const Cell to = w_.cell_of (sel.x_l);
        if (from == to)
            return sel.x_l;
        auto path = grid_shortest_path (w_, to, [from] (Cell c) { return c == from; });
        if (!path)
            return xc;
        std::reverse (path->begin (), path->end ());
        if (path->size () <= 2)
            return sel.x_l;
        // farthest cell still in straight line of sight: exponential probe, then bisection
        auto visible = [&] (std::size_t k) { return segment_clear (w_, xc, w_.center_of ((*path)[k])); };
        const std::size_t last = path->size () - 1;
        std::size_t ok = 0, bad = last + 1;
        for (std::size_t k = 1;; k = std::min (2 * k, last))
        {
            if (!visible (k))
            {
                bad = k;
                break;
            }
            ok = k;
            if (k == last)
                break;
        }
        while (bad - ok > 1 && bad <= last)
        {
            const std::size_t mid = ok + (bad - ok) / 2;
            (visible (mid) ? ok : bad) = mid;
        }
        if (ok == last)
            return segment_clear (w_, xc, sel.x_l) ? sel.x_l : w_.center_of ((*path)[last]);
        return w_.center_of ((*path)[std::max<std::size_t> (ok, 1)]);
    }

    Point Sampler::biased_target_and_sample (const ProductTree &tree, const BiasSelection &sel, Rng &rng)
    {
        const Point xc = tree.position (sel.closest);
        const Point target = biased_waypoint (tree, sel);
        if (target == xc)
        {
            ++counters_.s6_fallbacks;
            return sample_uniform (rng);
        }
        const double bearing = std::atan2 (target.y - xc.y, target.x - xc.x);
        const double reach = std::max (cfg_.eta, distance (xc, target));
        for (int attempt = 0; attempt < cfg_.s6_retries; ++attempt)
        {
            const double theta = bearing + cfg_.sigma_angle * rng.normal ();
            const double d = reach * rng.uniform_open_closed ();
            const Point x{xc.x + d * std::cos (theta), xc.y + d * std::sin (theta)};
            if (w_.is_free (x))
                return x;
        }
        ++counters_.s6_fallbacks;
        return sample_uniform (rng);
    }

    Sampler::Rect Sampler::sampling_rect (Point a, Point b) const
    {
        const Cell ca = w_.cell_of (a), cb = w_.cell_of (b);
        Rect r{std::min (ca.col, cb.col), std::min (ca.row, cb.row), std::max (ca.col, cb.col), std::max (ca.row, cb.row)};
        auto inflate = [m = cfg_.rect_min_cells] (int &lo, int &hi, int size) {
            const int span = hi - lo + 1;
            if (span < m)
            {
                const int need = m - span;
                lo -= need / 2;
                hi += need - need / 2;
            }
            if (lo < 0)
            {
                hi -= lo;
                lo = 0;
            }
            if (hi > size - 1)
            {
                lo -= hi - (size - 1);
                hi = size - 1;
            }
            lo = std::max (lo, 0);
        };
        inflate (r.col0, r.col1, w_.width ());
        inflate (r.row0, r.row1, w_.height ());
        return r;
    }

    double Sampler::rect_sum (const std::vector<double> &sat, const Rect &r) const
    {
        const auto stride = static_cast<std::size_t> (w_.width ()) + 1;
        auto at = [&] (int row, int col) { return sat[static_cast<std::size_t> (row) * stride + static_cast<std::size_t> (col)]; };
        return at (r.row1 + 1, r.col1 + 1) - at (r.row0, r.col1 + 1) - at (r.row1 + 1, r.col0) + at (r.row0, r.col0);
    }

    std::optional<Cell> Sampler::rect_draw (const std::vector<double> &sat, const std::vector<double> &cell_weight, const Rect &r, Rng &rng) const
    {
        const double total = rect_sum (sat, r);
        if (!(total >= 1e-9))
            return std::nullopt;
        const double u = rng.uniform () * total;

        int lo = r.row0, hi = r.row1;
        while (lo < hi)
        {
            const int mid = lo + (hi - lo) / 2;
            if (rect_sum (sat, {r.col0, r.row0, r.col1, mid}) > u)
                hi = mid;
            else
                lo = mid + 1;
        }
        const int row = lo;
        const double before = row > r.row0 ? rect_sum (sat, {r.col0, r.row0, r.col1, row - 1}) : 0.0;
        const double u_row = u - before;
        int clo = r.col0, chi = r.col1;
        while (clo < chi)
        {
            const int mid = clo + (chi - clo) / 2;
            if (rect_sum (sat, {r.col0, row, mid, row}) > u_row)
                chi = mid;
            else
                clo = mid + 1;
        }
        Cell c{clo, row};
        if (cell_weight[w_.index (c)] > 0.0)
            return c;

        // rounding in the table landed on a zero-weight cell: direct scan
        double acc = 0.0;
        std::optional<Cell> last;
        for (int rr = r.row0; rr <= r.row1; ++rr)
            for (int cc = r.col0; cc <= r.col1; ++cc)
            {
                const double wt = cell_weight[static_cast<std::size_t> (rr) * w_.width () + cc];
                if (wt <= 0.0)
                    continue;
                acc += wt;
                last = Cell{cc, rr};
                if (acc > u)
                    return last;
            }
        return last;
    }

    Point Sampler::guided_rect_sample (const ProductTree &tree, const BiasSelection &sel, Rng &rng)
    {
        if (!pred_)
            throw Error (ErrorCode::InvalidArgument, "guided sampling requires a prediction");
        const Point corner = cfg_.guided_rect_waypoint ? biased_waypoint (tree, sel) : sel.x_l;
        const Rect r = sampling_rect (corner, tree.position (sel.closest));
        auto c = rect_draw (heat_sat_, heat_weight_, r, rng);
        if (!c)
        {
            ++counters_.rect_fallbacks;
            c = rect_draw (free_sat_, free_weight_, r, rng);
        }
        if (!c)
            return sample_uniform (rng);
        return sample_in_cell (w_, *c, rng);
    }

    Point Sampler::sample (const ProductTree &tree, const SearchGoal &goal, Rng &rng)
    {
        switch (cfg_.strategy)
        {
        case Strategy::Uniform: ++counters_.uniform; return sample_uniform (rng);
        case Strategy::Biased:
        {
            const auto sel = biased_select (tree, goal, rng);
            if (!sel)
            {
                ++counters_.dead_ends;
                return sample_uniform (rng);
            }
            ++counters_.biased;
            return biased_target_and_sample (tree, *sel, rng);
        }
        case Strategy::Guided:
        {
            const auto sel = guided_select (tree, goal, rng);
            if (!sel)
            {
                ++counters_.dead_ends;
                return sample_uniform (rng);
            }
            if (!sel->predicted)
            {
                ++counters_.biased;
                return biased_target_and_sample (tree, *sel, rng);
            }
            ++counters_.guided;
            return guided_rect_sample (tree, *sel, rng);
        }
        }
        return sample_uniform (rng);
    }

} // namespace nngtl
