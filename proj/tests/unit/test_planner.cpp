#include "fixtures.hpp"

#include "nngtl/bench.hpp"
#include "nngtl/planner.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nngtl;

namespace
{
    GridWorkspace two_rooms ()
    {
        return fixtures::ascii_map ({"..........", "..111.....", "..111.....", "..........", "#######...", "..........", "..........", "......222.",
                                     "S.....222.", ".........."},
                                    2);
    }

    // Per-iteration RRT* invariants; returns the first violation or "".
    struct InvariantChecker
    {
        std::vector<double> last_cost;
        std::string failure;

        void operator() (const ProductTree &t)
        {
            if (!failure.empty ())
                return;
            for (std::size_t v = 0; v < t.vertex_count (); ++v)
            {
                const auto &node = t.vertex (static_cast<int> (v));
                if (v == 0)
                {
                    if (node.parent != -1 || node.cost != 0.0)
                        failure = "root has a parent or a cost";
                    continue;
                }
                // acyclic: walking up reaches the root within vertex_count steps
                int u = static_cast<int> (v);
                std::size_t steps = 0;
                while (u != 0 && steps <= t.vertex_count ())
                {
                    u = t.vertex (u).parent;
                    ++steps;
                    if (u < 0)
                        break;
                }
                if (u != 0)
                {
                    failure = "vertex " + std::to_string (v) + " does not reach the root";
                    return;
                }
                const auto &parent = t.vertex (node.parent);
                const double expect = parent.cost + distance (t.position (node.parent), t.position (static_cast<int> (v)));
                if (std::abs (node.cost - expect) > 1e-9)
                {
                    failure = "cost of " + std::to_string (v) + " is not parent cost plus edge length";
                    return;
                }
                if (v < last_cost.size () && node.cost > last_cost[v] + 1e-12)
                {
                    failure = "cost of " + std::to_string (v) + " increased";
                    return;
                }
            }
            last_cost.resize (t.vertex_count ());
            for (std::size_t v = 0; v < t.vertex_count (); ++v)
                last_cost[v] = t.vertex (static_cast<int> (v)).cost;
        }
    };
} // namespace

TEST (Planner, SteerClampsToStepLength)
{
    EXPECT_EQ (steer ({0, 0}, {0.05, 0}, 0.1), (Point{0.05, 0}));
    const Point p = steer ({0, 0}, {0.3, 0.4}, 0.1);
    EXPECT_NEAR (p.x, 0.06, 1e-12);
    EXPECT_NEAR (p.y, 0.08, 1e-12);
}

TEST (Planner, NearRadiusShrinksAndIsCapped)
{
    EXPECT_DOUBLE_EQ (near_radius (10, 0.6, 0.1), 0.1);
    const double r = near_radius (10000, 0.6, 0.1);
    EXPECT_NEAR (r, 0.6 * std::sqrt (std::log (10000.0) / 10000.0), 1e-15);
    EXPECT_LT (near_radius (20000, 0.6, 0.1), r);
}

TEST (Planner, ConfigValidation)
{
    PlannerConfig c;
    EXPECT_NO_THROW (c.validate ());
    c.lambda = 1.5;
    EXPECT_THROW (c.validate (), Error);
    c = {};
    c.eta = 0.0;
    EXPECT_THROW (c.validate (), Error);
    c = {};
    c.alpha = -0.1;
    EXPECT_THROW (c.validate (), Error);
}

TEST (Planner, FindsValidPlansWithEveryStrategy)
{
    const GridWorkspace w = two_rooms ();
    const Nba nba = ltl_to_nba (parse_ltl ("[]<> l1 && []<> l2"));
    const Nba pruned = prune_infeasible (nba, 2);
    const Prediction pred = oracle_predict (w, pruned, compute_rho (pruned));
    // uniform growth of the post-l1 subtree stalls behind the wall once the near
    // radius shrinks, so it only gets the single-region task below
    for (Strategy s : {Strategy::Biased, Strategy::Guided})
    {
        PlannerConfig cfg;
        cfg.strategy = s;
        cfg.seed = 3;
        const auto [p, stats] = plan (w, nba, cfg, &pred);
        EXPECT_TRUE (plan_is_valid (w, nba, p)) << to_string (s);
        EXPECT_TRUE (stats.found);
        EXPECT_GT (stats.n, 0);
        EXPECT_NEAR (p.j, cfg.lambda * p.j_pre + (1 - cfg.lambda) * p.j_suf, 1e-12);
        EXPECT_EQ (p.prefix.front ().x, w.init ());
        EXPECT_EQ (p.prefix.back ().x, p.suffix.front ().x);
    }
}

TEST (Planner, ReachTaskHasStayInPlaceSuffix)
{
    const GridWorkspace w = two_rooms ();
    const Nba nba = ltl_to_nba (parse_ltl ("<> l2"));
    for (Strategy s : {Strategy::Uniform, Strategy::Biased})
    {
        PlannerConfig cfg;
        cfg.strategy = s;
        const auto [p, stats] = plan (w, nba, cfg);
        EXPECT_TRUE (plan_is_valid (w, nba, p));
        EXPECT_EQ (p.suffix.size (), 1u);
        EXPECT_EQ (p.j_suf, 0.0);
    }
}

TEST (Planner, IdenticalSeedsGiveIdenticalPlans)
{
    const GridWorkspace w = two_rooms ();
    const Nba nba = ltl_to_nba (parse_ltl ("(!l1 U l2) && <> l1"));
    PlannerConfig cfg;
    cfg.seed = 11;
    const auto a = plan (w, nba, cfg);
    const auto b = plan (w, nba, cfg);
    EXPECT_EQ (plan_to_json (a.first), plan_to_json (b.first));
    EXPECT_EQ (a.second.n, b.second.n);
    EXPECT_EQ (a.second.m, b.second.m);
    EXPECT_EQ (a.second.len, b.second.len);
    cfg.seed = 12;
    const auto c = plan (w, nba, cfg);
    EXPECT_TRUE (plan_is_valid (w, nba, c.first));
}

TEST (Planner, UnsatisfiableAndExhaustedBudget)
{
    const GridWorkspace w = two_rooms ();
    try
    {
        Planner p (w, ltl_to_nba (parse_ltl ("<> (l1 && l2)")), PlannerConfig{});
        FAIL ();
    }
    catch (const Error &e)
    {
        EXPECT_EQ (e.code (), ErrorCode::Unsatisfiable);
    }
    PlannerConfig cfg;
    cfg.strategy = Strategy::Uniform;
    cfg.max_iters = 2;
    Planner p (w, ltl_to_nba (parse_ltl ("<> l1")), cfg);
    try
    {
        p.plan ();
        FAIL ();
    }
    catch (const Error &e)
    {
        EXPECT_EQ (e.code (), ErrorCode::NoPlanFound);
    }
    EXPECT_FALSE (p.last_stats ().found);
    EXPECT_EQ (p.last_stats ().n, 2);
}

TEST (Planner, RrtStarInvariantsHoldEveryIteration)
{
    const GridWorkspace w = generate_random_workspace (8, {});
    const Nba nba = ltl_to_nba (parse_ltl ("[]<> l1 && <> l2"));
    PlannerConfig cfg;
    cfg.max_iters = 600;
    cfg.first_solution_only = false;
    Planner planner (w, nba, cfg);
    InvariantChecker check;
    try
    {
        planner.search_prefix ([&] (const ProductTree &t) { check (t); });
    }
    catch (const Error &e)
    {
        ASSERT_EQ (e.code (), ErrorCode::NoPrefixFound);
    }
    EXPECT_EQ (check.failure, "");
}

TEST (Planner, FullModeNeverWorsensFirstSolution)
{
    const GridWorkspace w = two_rooms ();
    const Nba nba = ltl_to_nba (parse_ltl ("[]<> l1 && []<> l2"));
    PlannerConfig cfg;
    cfg.seed = 4;
    const auto first = plan (w, nba, cfg);
    cfg.first_solution_only = false;
    cfg.max_iters = 3000;
    const auto full = plan (w, nba, cfg);
    EXPECT_TRUE (plan_is_valid (w, nba, full.first));
    EXPECT_LE (full.second.final_cost, full.second.len + 1e-12);
    EXPECT_NEAR (full.first.j, full.second.final_cost, 1e-12);
    (void)first;
}

TEST (Planner, PlanValidityCheckRejectsTampering)
{
    const GridWorkspace w = two_rooms ();
    const Nba nba = ltl_to_nba (parse_ltl ("(!l1 U l2) && <> l1"));
    const auto [p, stats] = plan (w, nba, PlannerConfig{});
    ASSERT_TRUE (plan_is_valid (w, nba, p));
    Plan skip = p;
    // jump straight from the start to the goal through the wall
    skip.prefix = {p.prefix.front (), p.prefix.back ()};
    EXPECT_FALSE (plan_is_valid (w, nba, skip));
    const Nba other = ltl_to_nba (parse_ltl ("!l2 U l1"));
    EXPECT_FALSE (plan_is_valid (w, other, p));
}

TEST (Planner, PlanJsonRoundTrip)
{
    const GridWorkspace w = two_rooms ();
    const Nba nba = ltl_to_nba (parse_ltl ("[]<> l1 && []<> l2"));
    const auto [p, stats] = plan (w, nba, PlannerConfig{});
    const Plan back = plan_from_json (plan_to_json (p), w);
    EXPECT_EQ (back.prefix, p.prefix);
    EXPECT_EQ (back.suffix, p.suffix);
    EXPECT_EQ (back.j, p.j);
    EXPECT_THROW (plan_from_json ("{\"prefix\":[[2,0,0]]}", w), Error);
    EXPECT_NE (stats_to_json (stats).find ("\"n\""), std::string::npos);
}

TEST (Planner, CaseStudyGuidedVisitsL2BeforeL1AndVisitsL3)
{
    const GridWorkspace w = case_study_workspace ();
    const Nba nba = ltl_to_nba (parse_ltl (case_study_formula ()));
    const Nba pruned = prune_infeasible (nba, 3);
    const Prediction pred = oracle_predict (w, pruned, compute_rho (pruned));
    PlannerConfig cfg;
    cfg.strategy = Strategy::Guided;
    const auto [p, stats] = plan (w, nba, cfg, &pred);
    ASSERT_TRUE (plan_is_valid (w, nba, p));
    Word trace = p.prefix_word ();
    const Word cyc = p.cycle_word ();
    trace.insert (trace.end (), cyc.begin (), cyc.end ());
    const auto first = [&] (int label) {
        return std::find_if (trace.begin (), trace.end (), [&] (Symbol s) { return s.label == label; }) - trace.begin ();
    };
    EXPECT_LT (first (2), first (1));
    EXPECT_LT (first (3), static_cast<long> (trace.size ()));
}
