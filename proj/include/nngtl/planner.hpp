#pragma once
/**
 * @file  planner.hpp
 * @brief RRT*-style prefix and suffix search over the product of workspace and
 *        automaton, returning a prefix-suffix plan of minimum weighted cost.
 *
 * An edge (x, q) -> (x', q') is admitted when segment_valid(x, x') holds and the
 * automaton moves q -> q' on the label of the source point x.
 */

#include "nngtl/buchi.hpp"
#include "nngtl/prediction.hpp"
#include "nngtl/sampling.hpp"
#include "nngtl/tree.hpp"
#include "nngtl/workspace.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nngtl
{
    struct PlannerConfig
    {
        double lambda = 0.5;
        double eta = 0.1;
        double gamma = 0.6;
        long max_iters = 50000;
        double time_limit_s = 0.0; ///< 0 disables the wall-clock limit
        Strategy strategy = Strategy::Biased;
        double alpha = 0.8;
        double p_d = 0.9;
        double sigma_angle = std::numbers::pi / 6.0;
        /// See SamplerConfig::guided_tiered_closest.
        bool guided_tiered_closest = true;
        /// See SamplerConfig::guided_rect_waypoint.
        bool guided_rect_waypoint = false;
        std::uint64_t seed = 0;
        bool first_solution_only = true;
        /// Suffix trees grown for goals that cannot stay in place (full mode).
        int max_suffix_goals = 10;

        /// Throws InvalidArgument on out-of-range values.
        void validate () const;
        [[nodiscard]] SamplerConfig sampler () const;
    };

    struct PlanVertex
    {
        Point x;
        int q = 0;
        Symbol symbol;

        friend bool operator== (const PlanVertex &, const PlanVertex &) = default;
    };

    struct Plan
    {
        /// Root to goal inclusive.
        std::vector<PlanVertex> prefix;
        /// Goal first; the cycle closes from the last vertex back to the goal.
        /// A single vertex is the stay-in-place cycle.
        std::vector<PlanVertex> suffix;
        double j_pre = 0.0;
        double j_suf = 0.0;
        double j = 0.0;

        /// Letters read along the prefix (every vertex except the goal).
        [[nodiscard]] Word prefix_word () const;
        /// Letters read around the cycle (every suffix vertex).
        [[nodiscard]] Word cycle_word () const;
    };

    struct RunStats
    {
        bool found = false;
        double T = 0.0;      ///< seconds to the first feasible plan
        long n = 0;          ///< iterations to the first feasible plan
        long m = 0;          ///< tree vertices at the first feasible plan
        double len = 0.0;    ///< cost of the first feasible plan
        long total_iters = 0;
        long total_nodes = 0;
        double final_cost = 0.0;
        long goals = 0;
        SamplerCounters sampler;
    };

    Point steer (Point from, Point to, double eta);

    /// min(gamma * sqrt(log n / n), eta) for n tree points.
    double near_radius (std::size_t n, double gamma, double eta);

    /// Adds x_new to the tree under every reachable automaton state with its
    /// cheapest admissible parent, then rewires nearby vertices through the new
    /// ones. Returns the added vertex ids (empty when nothing connects).
    std::vector<int> extend (ProductTree &tree, Point x_new, const GridWorkspace &w, const TransitionTable &table, double gamma, double eta);

    /// Per-iteration observer for invariant checks.
    using IterationHook = std::function<void (const ProductTree &)>;

    struct SuffixResult
    {
        std::vector<PlanVertex> cycle; ///< goal first
        double cost = 0.0;
        long iterations = 0;
        long nodes = 0;
    };

    struct PrefixResult
    {
        ProductTree tree;
        std::vector<int> goals;
        RunStats stats;
    };

    /// Preprocessed problem: pruned automaton, transition table, distances.
    class Planner
    {
      public:
        /// Throws Unsatisfiable when no feasible accepting state survives pruning.
        Planner (const GridWorkspace &w, const Nba &nba, const PlannerConfig &cfg, const Prediction *pred = nullptr);

        [[nodiscard]] const Nba &pruned () const noexcept { return pruned_; }
        [[nodiscard]] const TransitionTable &table () const noexcept { return table_; }
        [[nodiscard]] const DistanceTable &rho () const noexcept { return rho_; }
        [[nodiscard]] const std::vector<int> &feasible () const noexcept { return feasible_; }

        /// Prefix tree alone, grown for max_iters iterations (or until the first
        /// goal when first_solution_only). Throws NoPrefixFound.
        PrefixResult search_prefix (const IterationHook &hook = {});

        /// Cheapest cycle back to the goal vertex (x, q) within `budget` iterations.
        std::optional<SuffixResult> search_suffix (Point x, int q, long budget, const IterationHook &hook = {});

        /// Full run. Throws NoPlanFound.
        std::pair<Plan, RunStats> plan (const IterationHook &hook = {});

        /// Statistics of the latest plan() call, also when it threw NoPlanFound
        /// (then T, n and m describe the exhausted budget).
        [[nodiscard]] const RunStats &last_stats () const noexcept { return last_stats_; }

        Planner (const Planner &) = delete;
        Planner &operator= (const Planner &) = delete;

      private:
        bool out_of_time () const;

        const GridWorkspace &w_;
        Nba original_;
        PlannerConfig cfg_;
        const Prediction *pred_;
        Nba pruned_;
        TransitionTable table_;
        DistanceTable rho_;
        std::vector<int> feasible_;
        Rng rng_;
        Sampler sampler_;
        double start_time_ = 0.0;
        RunStats last_stats_;
    };

    /// Convenience wrapper around Planner.
    std::pair<Plan, RunStats> plan (const GridWorkspace &w, const Nba &nba, const PlannerConfig &cfg, const Prediction *pred = nullptr);

    /// Every consecutive plan edge (and the closing edge) passes segment_valid and
    /// the trace is accepted by `nba`.
    bool plan_is_valid (const GridWorkspace &w, const Nba &nba, const Plan &p);

    std::string plan_to_json (const Plan &p);
    Plan plan_from_json (std::string_view text, const GridWorkspace &w);
    std::string stats_to_json (const RunStats &s);

} // namespace nngtl
