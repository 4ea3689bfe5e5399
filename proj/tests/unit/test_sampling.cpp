#include "fixtures.hpp"

#include "nngtl/bench.hpp"
#include "nngtl/planner.hpp"
#include "nngtl/prediction.hpp"
#include "nngtl/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace nngtl;

namespace
{
    struct Scene
    {
        GridWorkspace w = case_study_workspace ();
        Nba nba = prune_infeasible (fixtures::drawn_case_study_nba (), 3);
        TransitionTable table{nba, 3};
        DistanceTable rho = compute_rho (nba);
        SearchGoal goal{false, feasible_accepting (nba, rho), {}};

        [[nodiscard]] ProductTree root_tree () const { return ProductTree (w.init (), w.symbol_at (w.init ()), nba.init, nba.state_count); }
    };

    Prediction flat_prediction (const GridWorkspace &w, std::vector<float> p, float heat = 0.0f)
    {
        Prediction pred;
        pred.p = std::move (p);
        pred.rows = w.height ();
        pred.cols = w.width ();
        pred.heatmap.assign (static_cast<std::size_t> (w.width () * w.height ()), heat);
        return pred;
    }

    // 3-sigma binomial band around n * p.
    void expect_binomial (long hits, long n, double p)
    {
        const double sd = std::sqrt (n * p * (1 - p));
        EXPECT_NEAR (static_cast<double> (hits), n * p, 3 * sd + 1) << hits << " of " << n << " vs p=" << p;
    }
} // namespace

TEST (Sampling, StrategyNamesRoundTrip)
{
    for (Strategy s : {Strategy::Uniform, Strategy::Biased, Strategy::Guided})
        EXPECT_EQ (strategy_from_string (to_string (s)), s);
    EXPECT_THROW (strategy_from_string ("greedy"), Error);
}

TEST (Sampling, RootSelectionEnumeratesProgressingPairsUniformly)
{
    Scene s;
    const ProductTree tree = s.root_tree ();
    SamplerConfig cfg;
    Sampler sampler (s.w, s.table, s.rho, cfg);
    Rng rng (1);
    std::map<std::pair<int, int>, long> pairs;
    const long n = 20000;
    for (long i = 0; i < n; ++i)
    {
        const auto sel = sampler.biased_select (tree, s.goal, rng);
        ASSERT_TRUE (sel);
        EXPECT_EQ (sel->closest, tree.root ());
        EXPECT_EQ (sel->q_feas, 4);
        ++pairs[std::pair{sel->q_succ1, sel->q_succ2}];
        const Guard &g = s.table.guard (sel->q_succ1, sel->q_succ2);
        EXPECT_TRUE (g.satisfied_by (s.w.symbol_at (sel->x_l)));
    }
    // at the root only the self-loop reads the empty letter; 1 and 2 both cut the distance
    ASSERT_EQ (pairs.size (), 2u);
    expect_binomial (pairs[std::pair{0, 1}], n, 0.5);
    expect_binomial (pairs[std::pair{0, 2}], n, 0.5);
}

TEST (Sampling, GuidedSelectionWeighsSuccessorsByStateProbability)
{
    Scene s;
    const ProductTree tree = s.root_tree ();
    const Prediction pred = flat_prediction (s.w, {0.999f, 0.486f, 0.902f, 0.994f, 0.997f});
    SamplerConfig cfg;
    cfg.strategy = Strategy::Guided;
    cfg.alpha = 1.0;
    Sampler sampler (s.w, s.table, s.rho, cfg, &pred);
    Rng rng (2);
    long to2 = 0;
    const long n = 20000;
    for (long i = 0; i < n; ++i)
    {
        const auto sel = sampler.guided_select (tree, s.goal, rng);
        ASSERT_TRUE (sel);
        EXPECT_TRUE (sel->predicted);
        to2 += sel->q_succ2 == 2;
    }
    expect_binomial (to2, n, 0.902 / (0.902 + 0.486));
}

TEST (Sampling, GuidedSelectionFallsBackWithProbabilityOneMinusAlpha)
{
    Scene s;
    const ProductTree tree = s.root_tree ();
    const Prediction pred = flat_prediction (s.w, {1, 1, 1, 1, 1});
    SamplerConfig cfg;
    cfg.strategy = Strategy::Guided;
    cfg.alpha = 0.8;
    Sampler sampler (s.w, s.table, s.rho, cfg, &pred);
    Rng rng (3);
    long predicted = 0;
    const long n = 20000;
    for (long i = 0; i < n; ++i)
        predicted += sampler.guided_select (tree, s.goal, rng)->predicted;
    expect_binomial (predicted, n, 0.8);
}

TEST (Sampling, HeatmapRectangleConcentratesOnPeakCell)
{
    Scene s;
    const ProductTree tree = s.root_tree (); // root at (0.1, 0.1)
    Prediction pred = flat_prediction (s.w, {1, 1, 1, 1, 1});
    BiasSelection sel;
    sel.closest = tree.root ();
    sel.x_l = {0.1495, 0.1495}; // 10 x 10 cell rectangle with the root
    SamplerConfig cfg;
    cfg.strategy = Strategy::Guided;
    {
        Sampler probe (s.w, s.table, s.rho, cfg, &pred);
        const auto r = probe.sampling_rect (sel.x_l, tree.position (sel.closest));
        ASSERT_EQ (r.col1 - r.col0 + 1, 10);
        ASSERT_EQ (r.row1 - r.row0 + 1, 10);
        // peak weight 1, the other 99 cells share 1 % of the mass
        for (int row = r.row0; row <= r.row1; ++row)
            for (int col = r.col0; col <= r.col1; ++col)
                pred.heatmap[static_cast<std::size_t> (row * s.w.width () + col)] = 1.0f / 9801.0f;
    }
    const Cell peak{25, 26};
    pred.heatmap[s.w.index (peak)] = 1.0f;
    Sampler sampler (s.w, s.table, s.rho, cfg, &pred);
    Rng rng (4);
    const long n = 10000;
    long hits = 0;
    for (long i = 0; i < n; ++i)
    {
        const Point x = sampler.guided_rect_sample (tree, sel, rng);
        ASSERT_TRUE (s.w.is_free (x));
        hits += s.w.cell_of (x) == peak;
    }
    const double sd = std::sqrt (n * 0.99 * 0.01);
    EXPECT_GE (hits, static_cast<long> (0.97 * n));
    EXPECT_GE (static_cast<double> (hits), 0.99 * n - 3 * sd);
}

TEST (Sampling, DegenerateRectangleIsInflatedToFiveCells)
{
    Scene s;
    const ProductTree tree = s.root_tree ();
    const Prediction pred = flat_prediction (s.w, {1, 1, 1, 1, 1}, 0.5f);
    SamplerConfig cfg;
    cfg.strategy = Strategy::Guided;
    Sampler sampler (s.w, s.table, s.rho, cfg, &pred);
    BiasSelection sel;
    sel.closest = tree.root ();
    sel.x_l = tree.position (tree.root ());
    const auto r = sampler.sampling_rect (sel.x_l, sel.x_l);
    EXPECT_EQ (r.col1 - r.col0 + 1, 5);
    EXPECT_EQ (r.row1 - r.row0 + 1, 5);
    const Cell c0 = s.w.cell_of (sel.x_l);
    EXPECT_TRUE (r.col0 <= c0.col && c0.col <= r.col1 && r.row0 <= c0.row && c0.row <= r.row1);
    Rng rng (5);
    for (int i = 0; i < 5000; ++i)
    {
        const Cell c = s.w.cell_of (sampler.guided_rect_sample (tree, sel, rng));
        ASSERT_TRUE (r.col0 <= c.col && c.col <= r.col1 && r.row0 <= c.row && c.row <= r.row1);
    }
    // clamped at the map border
    const auto corner = sampler.sampling_rect ({0.001, 0.001}, {0.001, 0.001});
    EXPECT_EQ (corner.col0, 0);
    EXPECT_EQ (corner.col1, 4);
}

TEST (Sampling, ZeroHeatFallsBackToUniformInsideRectangle)
{
    Scene s;
    const ProductTree tree = s.root_tree ();
    const Prediction pred = flat_prediction (s.w, {1, 1, 1, 1, 1}, 0.0f);
    SamplerConfig cfg;
    cfg.strategy = Strategy::Guided;
    Sampler sampler (s.w, s.table, s.rho, cfg, &pred);
    BiasSelection sel;
    sel.closest = tree.root ();
    sel.x_l = {0.12, 0.12}; // 5 x 5 cells
    const auto r = sampler.sampling_rect (sel.x_l, tree.position (sel.closest));
    std::map<Cell, long> hits;
    Rng rng (6);
    const long n = 25000;
    for (long i = 0; i < n; ++i)
        ++hits[s.w.cell_of (sampler.guided_rect_sample (tree, sel, rng))];
    const long cells = static_cast<long> (r.col1 - r.col0 + 1) * (r.row1 - r.row0 + 1);
    EXPECT_EQ (static_cast<long> (hits.size ()), cells);
    for (const auto &[c, k] : hits)
        expect_binomial (k, n, 1.0 / static_cast<double> (cells));
    EXPECT_EQ (sampler.counters ().rect_fallbacks, n);
}

TEST (Sampling, GuidedRequiresPrediction)
{
    Scene s;
    SamplerConfig cfg;
    cfg.strategy = Strategy::Guided;
    EXPECT_THROW (Sampler (s.w, s.table, s.rho, cfg, nullptr), Error);
    const Prediction wrong = flat_prediction (s.w, {1, 1});
    EXPECT_THROW (Sampler (s.w, s.table, s.rho, cfg, &wrong), Error);
}

// Grow trees with every strategy; each draw must be free and every biased
// selection must respect the progress chain.
TEST (Sampling, FuzzFreeSpaceAndProgressChain)
{
    Scene s;
    const Nba translated = prune_infeasible (ltl_to_nba (parse_ltl (case_study_formula ())), 3);
    const TransitionTable table (translated, 3);
    const DistanceTable rho = compute_rho (translated);
    const SearchGoal goal{false, feasible_accepting (translated, rho), {}};
    const Prediction pred = oracle_predict (s.w, translated, rho);
    for (Strategy strategy : {Strategy::Uniform, Strategy::Biased, Strategy::Guided})
    {
        SamplerConfig cfg;
        cfg.strategy = strategy;
        Sampler sampler (s.w, table, rho, cfg, strategy == Strategy::Guided ? &pred : nullptr);
        ProductTree tree (s.w.init (), s.w.symbol_at (s.w.init ()), translated.init, translated.state_count);
        Rng rng (7 + static_cast<int> (strategy));
        Rng probe (99);
        for (int i = 0; i < 4000; ++i)
        {
            const Point x = sampler.sample (tree, goal, rng);
            ASSERT_TRUE (s.w.is_free (x));
            const auto near = tree.index ().nearest (x);
            extend (tree, steer (tree.point (*near).x, x, 0.1), s.w, table, 0.6, 0.1);

            const auto sel = sampler.biased_select (tree, goal, probe);
            if (!sel)
                continue;
            const int qc = tree.vertex (sel->closest).q;
            const int d0 = rho.to_target (qc, sel->q_feas);
            const int d1 = rho.to_target (sel->q_succ1, sel->q_feas);
            const int d2 = rho.to_target (sel->q_succ2, sel->q_feas);
            ASSERT_LE (d2, d1);
            ASSERT_LE (d1, d0);
            ASSERT_TRUE (table.enabled (qc, tree.symbol (sel->closest), sel->q_succ1));
            ASSERT_TRUE (table.guard (sel->q_succ1, sel->q_succ2).satisfied_by (s.w.symbol_at (sel->x_l)));
        }
    }
}
