#include "nngtl/planner.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace nngtl
{
    namespace
    {
        double now_seconds ()
        {
            using clock = std::chrono::steady_clock;
            return std::chrono::duration<double> (clock::now ().time_since_epoch ()).count ();
        }

        Nba prune_or_unsat (const Nba &nba, int label_count)
        {
            if (nba.max_label () > label_count)
                throw Error (ErrorCode::InvalidArgument, "formula mentions label l" + std::to_string (nba.max_label ()) + " but the workspace has " +
                                                             std::to_string (label_count));
            return prune_infeasible (nba, label_count);
        }

        std::vector<int> feasible_or_unsat (const Nba &b, const DistanceTable &d)
        {
            try
            {
                return feasible_accepting (b, d);
            }
            catch (const Error &e)
            {
                if (e.code () == ErrorCode::NoFeasibleAccepting)
                    throw Error (ErrorCode::Unsatisfiable, "task is unsatisfiable: no feasible accepting automaton state");
                throw;
            }
        }

        PlanVertex to_plan_vertex (const ProductTree &t, int v)
        {
            return {t.position (v), t.vertex (v).q, t.symbol (v)};
        }
    } // namespace

    void PlannerConfig::validate () const
    {
        auto bad = [] (const char *what) { throw Error (ErrorCode::InvalidArgument, std::string ("planner config: ") + what); };
        if (!(lambda >= 0.0 && lambda <= 1.0))
            bad ("lambda must lie in [0, 1]");
        if (!(eta > 0.0))
            bad ("eta must be positive");
        if (!(gamma > 0.0))
            bad ("gamma must be positive");
        if (!(alpha >= 0.0 && alpha <= 1.0))
            bad ("alpha must lie in [0, 1]");
        if (!(p_d >= 0.0 && p_d <= 1.0))
            bad ("p_d must lie in [0, 1]");
        if (max_iters < 0)
            bad ("max_iters must be non-negative");
        if (!(sigma_angle >= 0.0))
            bad ("sigma_angle must be non-negative");
    }

    SamplerConfig PlannerConfig::sampler () const
    {
        SamplerConfig s;
        s.strategy = strategy;
        s.alpha = alpha;
        s.p_d = p_d;
        s.eta = eta;
        s.sigma_angle = sigma_angle;
        s.guided_tiered_closest = guided_tiered_closest;
        s.guided_rect_waypoint = guided_rect_waypoint;
        return s;
    }

    Word Plan::prefix_word () const
    {
        Word word;
        for (std::size_t i = 0; i + 1 < prefix.size (); ++i)
            word.push_back (prefix[i].symbol);
        return word;
    }

    Word Plan::cycle_word () const
    {
        Word word;
        for (const auto &v : suffix)
            word.push_back (v.symbol);
        return word;
    }

    Point steer (Point from, Point to, double eta)
    {
        const double d = distance (from, to);
        if (d <= eta)
            return to;
        const double s = eta / d;
        return {from.x + (to.x - from.x) * s, from.y + (to.y - from.y) * s};
    }

    double near_radius (std::size_t n, double gamma, double eta)
    {
        if (n < 2)
            return 0.0;
        const double nn = static_cast<double> (n);
        return std::min (gamma * std::sqrt (std::log (nn) / nn), eta);
    }

    std::vector<int> extend (ProductTree &tree, Point x_new, const GridWorkspace &w, const TransitionTable &table, double gamma, double eta)
    {
        std::vector<std::uint32_t> near;
        const auto nearest = tree.index ().nearest (x_new);
        if (!nearest || distance (tree.point (*nearest).x, x_new) < 1e-12)
            return {};
        tree.index ().within (x_new, near_radius (tree.point_count (), gamma, eta), near);
        if (!std::binary_search (near.begin (), near.end (), *nearest))
            near.insert (std::upper_bound (near.begin (), near.end (), *nearest), *nearest);

        struct NearPoint
        {
            std::uint32_t id;
            double d;
        };
        std::vector<NearPoint> valid;
        for (std::uint32_t p : near)
            if (segment_valid (w, tree.point (p).x, x_new))
                valid.push_back ({p, distance (tree.point (p).x, x_new)});
        if (valid.empty ())
            return {};

        const int n = tree.state_count ();
        std::vector<double> best_cost (static_cast<std::size_t> (n), std::numeric_limits<double>::infinity ());
        std::vector<int> best_parent (static_cast<std::size_t> (n), -1);
        for (const auto &np : valid)
        {
            const TreePoint &tp = tree.point (np.id);
            for (int v : tp.vertices)
                for (int q : table.successors (tree.vertex (v).q, tp.symbol))
                {
                    const double c = tree.vertex (v).cost + np.d;
                    if (c < best_cost[static_cast<std::size_t> (q)])
                    {
                        best_cost[static_cast<std::size_t> (q)] = c;
                        best_parent[static_cast<std::size_t> (q)] = v;
                    }
                }
        }

        std::vector<int> added;
        const Symbol sym_new = w.symbol_at (x_new);
        std::optional<std::uint32_t> pid;
        for (int q = 0; q < n; ++q)
        {
            if (best_parent[static_cast<std::size_t> (q)] < 0)
                continue;
            if (!pid)
                pid = tree.add_point (x_new, sym_new);
            added.push_back (tree.add_vertex (*pid, q, best_parent[static_cast<std::size_t> (q)], best_cost[static_cast<std::size_t> (q)]));
        }

        for (int u : added)
        {
            const int qu = tree.vertex (u).q;
            for (const auto &np : valid)
            {
                // copy: reparenting does not touch the point's vertex list, but keep it obvious
                const std::vector<int> targets = tree.point (np.id).vertices;
                for (int v : targets)
                {
                    if (!table.enabled (qu, sym_new, tree.vertex (v).q))
                        continue;
                    const double c = tree.vertex (u).cost + np.d;
                    if (c < tree.vertex (v).cost - 1e-12 && !tree.is_ancestor (v, u))
                        tree.reparent (v, u);
                }
            }
        }
        return added;
    }

    Planner::Planner (const GridWorkspace &w, const Nba &nba, const PlannerConfig &cfg, const Prediction *pred)
        : w_ (w), original_ (nba), cfg_ (cfg), pred_ (pred), pruned_ (prune_or_unsat (nba, w.label_count ())), table_ (pruned_, w.label_count ()),
          rho_ (compute_rho (pruned_)), feasible_ (feasible_or_unsat (pruned_, rho_)), rng_ (cfg.seed),
          sampler_ (w_, table_, rho_, (cfg_.validate (), cfg_.sampler ()), pred_)
    {
        if (w_.is_obstacle (w_.cell_of (w_.init ())))
            throw Error (ErrorCode::ObstaclePoint, "initial position lies in an obstacle");
    }

    bool Planner::out_of_time () const
    {
        return cfg_.time_limit_s > 0.0 && now_seconds () - start_time_ > cfg_.time_limit_s;
    }

    PrefixResult Planner::search_prefix (const IterationHook &hook)
    {
        start_time_ = now_seconds ();
        const Point x0 = w_.init ();
        PrefixResult res{ProductTree (x0, w_.symbol_at (x0), pruned_.init, pruned_.state_count), {}, {}};
        ProductTree &tree = res.tree;
        const SearchGoal goal{false, feasible_, x0};
        std::vector<bool> is_goal_state (static_cast<std::size_t> (pruned_.state_count), false);
        for (int q : feasible_)
            is_goal_state[static_cast<std::size_t> (q)] = true;

        auto note = [&] (const std::vector<int> &vs, long iter) {
            for (int v : vs)
                if (is_goal_state[static_cast<std::size_t> (tree.vertex (v).q)])
                {
                    if (res.goals.empty ())
                    {
                        res.stats.found = true;
                        res.stats.T = now_seconds () - start_time_;
                        res.stats.n = iter;
                        res.stats.m = static_cast<long> (tree.vertex_count ());
                        res.stats.len = tree.vertex (v).cost;
                    }
                    res.goals.push_back (v);
                }
        };
        note ({tree.root ()}, 0);

        long iter = 0;
        while (iter < cfg_.max_iters && !(cfg_.first_solution_only && !res.goals.empty ()) && !out_of_time ())
        {
            ++iter;
            const Point x_rand = sampler_.sample (tree, goal, rng_);
            const auto nearest = tree.index ().nearest (x_rand);
            const Point x_new = steer (tree.point (*nearest).x, x_rand, cfg_.eta);
            // blocked steps leave the tree unchanged but still count as an iteration
            const auto added = w_.is_free (x_new) ? extend (tree, x_new, w_, table_, cfg_.gamma, cfg_.eta) : std::vector<int>{};
            if (hook)
                hook (tree);
            note (added, iter);
        }
        res.stats.total_iters = iter;
        res.stats.total_nodes = static_cast<long> (tree.vertex_count ());
        res.stats.goals = static_cast<long> (res.goals.size ());
        if (res.goals.empty ())
            throw Error (ErrorCode::NoPrefixFound, "no accepting product state reached within " + std::to_string (iter) + " iterations");
        return res;
    }

    std::optional<SuffixResult> Planner::search_suffix (Point x, int q, long budget, const IterationHook &hook)
    {
        const Symbol s0 = w_.symbol_at (x);
        if (table_.enabled (q, s0, q))
            return SuffixResult{{{x, q, s0}}, 0.0, 0, 1};

        ProductTree tree (x, s0, q, pruned_.state_count);
        const SearchGoal goal{true, {q}, x};
        int best_v = -1;
        double best_cost = std::numeric_limits<double>::infinity ();
        auto closes = [&] (int v) {
            const Point p = tree.position (v);
            return table_.enabled (tree.vertex (v).q, tree.symbol (v), q) && segment_valid (w_, p, x);
        };

        long iter = 0;
        while (iter < budget && !out_of_time ())
        {
            ++iter;
            const Point x_rand = sampler_.sample (tree, goal, rng_);
            const auto nearest = tree.index ().nearest (x_rand);
            const Point x_new = steer (tree.point (*nearest).x, x_rand, cfg_.eta);
            // blocked steps leave the tree unchanged but still count as an iteration
            const auto added = w_.is_free (x_new) ? extend (tree, x_new, w_, table_, cfg_.gamma, cfg_.eta) : std::vector<int>{};
            if (hook)
                hook (tree);
            for (int v : added)
                if (closes (v))
                {
                    const double c = tree.vertex (v).cost + distance (tree.position (v), x);
                    if (c < best_cost)
                    {
                        best_cost = c;
                        best_v = v;
                    }
                }
            if (best_v >= 0 && cfg_.first_solution_only)
                break;
        }
        if (best_v < 0)
            return SuffixResult{{}, std::numeric_limits<double>::infinity (), iter, static_cast<long> (tree.vertex_count ())};

        // rewiring may have lowered costs since the candidate was recorded
        for (int v = 1; v < static_cast<int> (tree.vertex_count ()); ++v)
            if (closes (v))
            {
                const double c = tree.vertex (v).cost + distance (tree.position (v), x);
                if (c < best_cost)
                {
                    best_cost = c;
                    best_v = v;
                }
            }
        SuffixResult r;
        for (int v : tree.path_to (best_v))
            r.cycle.push_back (to_plan_vertex (tree, v));
        r.cost = best_cost;
        r.iterations = iter;
        r.nodes = static_cast<long> (tree.vertex_count ());
        return r;
    }

    std::pair<Plan, RunStats> Planner::plan (const IterationHook &hook)
    {
        start_time_ = now_seconds ();
        const Point x0 = w_.init ();
        ProductTree tree (x0, w_.symbol_at (x0), pruned_.init, pruned_.state_count);
        const SearchGoal goal{false, feasible_, x0};
        std::vector<bool> is_goal_state (static_cast<std::size_t> (pruned_.state_count), false);
        for (int q : feasible_)
            is_goal_state[static_cast<std::size_t> (q)] = true;

        RunStats stats;
        std::vector<int> goals;
        std::map<int, SuffixResult> cycles;
        long iter = 0;
        long suffix_nodes = 0;
        int suffix_trees = 0;
        const long suffix_budget = std::max<long> (cfg_.max_iters / 10, 100);

        auto consider = [&] (const std::vector<int> &vs) {
            for (int v : vs)
            {
                const int q = tree.vertex (v).q;
                if (!is_goal_state[static_cast<std::size_t> (q)])
                    continue;
                goals.push_back (v);
                const Point x = tree.position (v);
                std::optional<SuffixResult> r;
                if (table_.enabled (q, tree.symbol (v), q))
                    r = search_suffix (x, q, 0, hook);
                else if ((cfg_.first_solution_only || suffix_trees < cfg_.max_suffix_goals) && iter < cfg_.max_iters && !out_of_time ())
                {
                    ++suffix_trees;
                    r = search_suffix (x, q, std::min (cfg_.max_iters - iter, suffix_budget), hook);
                    iter += r->iterations;
                    suffix_nodes += r->nodes;
                }
                if (!r || r->cycle.empty ())
                    continue;
                cycles.emplace (v, *r);
                if (!stats.found)
                {
                    stats.found = true;
                    stats.T = now_seconds () - start_time_;
                    stats.n = iter;
                    stats.m = static_cast<long> (tree.vertex_count ()) + suffix_nodes;
                    stats.len = cfg_.lambda * tree.vertex (v).cost + (1.0 - cfg_.lambda) * r->cost;
                }
            }
        };
        consider ({tree.root ()});

        while (iter < cfg_.max_iters && !(cfg_.first_solution_only && stats.found) && !out_of_time ())
        {
            ++iter;
            const Point x_rand = sampler_.sample (tree, goal, rng_);
            const auto nearest = tree.index ().nearest (x_rand);
            const Point x_new = steer (tree.point (*nearest).x, x_rand, cfg_.eta);
            // blocked steps leave the tree unchanged but still count as an iteration
            const auto added = w_.is_free (x_new) ? extend (tree, x_new, w_, table_, cfg_.gamma, cfg_.eta) : std::vector<int>{};
            if (hook)
                hook (tree);
            consider (added);
        }

        stats.total_iters = iter;
        stats.total_nodes = static_cast<long> (tree.vertex_count ()) + suffix_nodes;
        stats.goals = static_cast<long> (goals.size ());
        stats.sampler = sampler_.counters ();
        last_stats_ = stats;
        if (!stats.found)
        {
            last_stats_.T = now_seconds () - start_time_;
            last_stats_.n = iter;
            last_stats_.m = stats.total_nodes;
        }
        if (cycles.empty ())
            throw Error (ErrorCode::NoPlanFound, goals.empty () ? "no accepting product state reached within the iteration budget"
                                                                : "no suffix cycle closed within the iteration budget");

        int best_goal = -1;
        double best_j = std::numeric_limits<double>::infinity ();
        for (const auto &[v, r] : cycles)
        {
            const double j = cfg_.lambda * tree.vertex (v).cost + (1.0 - cfg_.lambda) * r.cost;
            if (j < best_j)
            {
                best_j = j;
                best_goal = v;
            }
        }
        Plan p;
        for (int v : tree.path_to (best_goal))
            p.prefix.push_back (to_plan_vertex (tree, v));
        const SuffixResult &cyc = cycles.at (best_goal);
        p.suffix = cyc.cycle;
        p.j_pre = tree.vertex (best_goal).cost;
        p.j_suf = cyc.cost;
        p.j = best_j;
        stats.final_cost = best_j;
        last_stats_ = stats;

        if (!plan_is_valid (w_, original_, p))
            throw Error (ErrorCode::InvalidArgument, "internal error: assembled plan failed verification");
        return {std::move (p), stats};
    }

    std::pair<Plan, RunStats> plan (const GridWorkspace &w, const Nba &nba, const PlannerConfig &cfg, const Prediction *pred)
    {
        Planner planner (w, nba, cfg, pred);
        return planner.plan ();
    }

    bool plan_is_valid (const GridWorkspace &w, const Nba &nba, const Plan &p)
    {
        if (p.prefix.empty () || p.suffix.empty ())
            return false;
        if (!(p.prefix.back () == p.suffix.front ()))
            return false;
        for (const auto &v : p.prefix)
            if (!w.is_free (v.x) || w.symbol_at (v.x) != v.symbol)
                return false;
        for (const auto &v : p.suffix)
            if (!w.is_free (v.x) || w.symbol_at (v.x) != v.symbol)
                return false;
        for (std::size_t i = 0; i + 1 < p.prefix.size (); ++i)
            if (!segment_valid (w, p.prefix[i].x, p.prefix[i + 1].x))
                return false;
        for (std::size_t i = 0; i < p.suffix.size (); ++i)
        {
            const Point a = p.suffix[i].x;
            const Point b = p.suffix[(i + 1) % p.suffix.size ()].x;
            if (!segment_valid (w, a, b))
                return false;
        }
        return accepts_prefix_suffix (nba, p.prefix_word (), p.cycle_word ());
    }

    std::string plan_to_json (const Plan &p)
    {
        auto verts = [] (const std::vector<PlanVertex> &vs) {
            nlohmann::ordered_json a = nlohmann::ordered_json::array ();
            for (const auto &v : vs)
                a.push_back ({v.x.x, v.x.y, v.q});
            return a;
        };
        nlohmann::ordered_json j;
        j["prefix"] = verts (p.prefix);
        j["suffix"] = verts (p.suffix);
        j["Jpre"] = p.j_pre;
        j["Jsuf"] = p.j_suf;
        j["J"] = p.j;
        return j.dump ();
    }

    Plan plan_from_json (std::string_view text, const GridWorkspace &w)
    {
        try
        {
            const auto j = nlohmann::json::parse (text);
            auto verts = [&] (const nlohmann::json &a) {
                std::vector<PlanVertex> out;
                for (const auto &e : a)
                {
                    const Point x{e.at (0).get<double> (), e.at (1).get<double> ()};
                    if (!w.contains (x))
                        throw Error (ErrorCode::FormatError, "plan vertex outside the workspace");
                    out.push_back ({x, e.at (2).get<int> (), w.symbol_at (x)});
                }
                return out;
            };
            Plan p;
            p.prefix = verts (j.at ("prefix"));
            p.suffix = verts (j.at ("suffix"));
            p.j_pre = j.at ("Jpre").get<double> ();
            p.j_suf = j.at ("Jsuf").get<double> ();
            p.j = j.at ("J").get<double> ();
            return p;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error (ErrorCode::FormatError, std::string ("plan JSON: ") + e.what ());
        }
    }

    std::string stats_to_json (const RunStats &s)
    {
        nlohmann::ordered_json j;
        j["found"] = s.found;
        j["T"] = s.T;
        j["n"] = s.n;
        j["m"] = s.m;
        if (s.found)
            j["len"] = s.len;
        else
            j["len"] = nullptr;
        j["total_iterations"] = s.total_iters;
        j["total_nodes"] = s.total_nodes;
        j["J"] = s.final_cost;
        j["goals"] = s.goals;
        j["sampler"] = {{"uniform", s.sampler.uniform},     {"biased", s.sampler.biased},
                        {"guided", s.sampler.guided},       {"dead_ends", s.sampler.dead_ends},
                        {"s6_fallbacks", s.sampler.s6_fallbacks}, {"rect_fallbacks", s.sampler.rect_fallbacks}};
        return j.dump ();
    }

} // namespace nngtl
