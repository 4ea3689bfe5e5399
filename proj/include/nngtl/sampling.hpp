#pragma once
/**
 * @file  sampling.hpp
 * @brief Uniform, automaton-biased and prediction-guided samplers.
 *
 * A biased draw picks an accepting target, a tree vertex close to it in automaton
 * distance, two successive automaton states that make progress, and a point x_L
 * whose label enables the second transition. The spatial draw then leans from the
 * chosen vertex towards x_L (shortest grid path and a bearing distribution for the
 * biased sampler, heatmap mass inside the bounding rectangle for the guided one).
 */

#include "nngtl/buchi.hpp"
#include "nngtl/prediction.hpp"
#include "nngtl/tree.hpp"
#include "nngtl/workspace.hpp"

#include <numbers>
#include <optional>
#include <vector>

namespace nngtl
{
    enum class Strategy
    {
        Uniform,
        Biased,
        Guided,
    };

    const char *to_string (Strategy s) noexcept;
    Strategy strategy_from_string (std::string_view s);

    struct SamplerConfig
    {
        Strategy strategy = Strategy::Biased;
        double alpha = 0.8;
        double p_d = 0.9;
        double eta = 0.1;
        double sigma_angle = std::numbers::pi / 6.0;
        int s6_retries = 20;
        int rect_min_cells = 5;
        /// Guided vertex choice: p-weighted inside the two-tier D_min split (true)
        /// or p-weighted over the whole tree (false).
        bool guided_tiered_closest = true;
        /// C-2 rectangle spans the closest vertex and x_L (false) or the
        /// line-of-sight waypoint towards x_L (true). The waypoint variant keeps a
        /// detour around a wall inside the rectangle, but on the shipped benchmark it
        /// doubles the median iteration count, so it is opt-in.
        bool guided_rect_waypoint = false;
    };

    /// What the tree is trying to reach.
    struct SearchGoal
    {
        /// Prefix search: any of `targets` (feasible accepting states).
        /// Suffix search: back to the root vertex, `targets` = {root state}.
        bool suffix = false;
        std::vector<int> targets;
        Point root_point{};
    };

    struct BiasSelection
    {
        int q_feas = 0;
        int closest = 0; ///< tree vertex
        int q_succ1 = 0;
        int q_succ2 = 0;
        Point x_l{};
        /// Suffix search only: the closest vertex can close the cycle, x_L is the root.
        bool homing = false;
        /// Drawn on the prediction branch of a guided step (states weighted by p,
        /// spatial draw from the heatmap); otherwise the step is a biased one.
        bool predicted = false;
    };

    struct SamplerCounters
    {
        long uniform = 0;
        long biased = 0;
        long guided = 0;
        long dead_ends = 0;
        long s6_fallbacks = 0;
        long rect_fallbacks = 0;
    };

    class Sampler
    {
      public:
        /// `table` and `rho` must describe the same pruned automaton. `pred` is
        /// required for the guided strategy and must outlive the sampler.
        Sampler (const GridWorkspace &w, const TransitionTable &table, const DistanceTable &rho, const SamplerConfig &cfg,
                 const Prediction *pred = nullptr);

        /// One x_rand according to the configured strategy; always in free space.
        Point sample (const ProductTree &tree, const SearchGoal &goal, Rng &rng);

        [[nodiscard]] Point sample_uniform (Rng &rng) const;

        /// S-1..S-4. nullopt is a dead end (no progressing successor pair).
        std::optional<BiasSelection> biased_select (const ProductTree &tree, const SearchGoal &goal, Rng &rng) const;

        /// C-1: with probability alpha the state choices are weighted by p and
        /// `predicted` is set; otherwise identical to biased_select.
        std::optional<BiasSelection> guided_select (const ProductTree &tree, const SearchGoal &goal, Rng &rng) const;

        /// S-5 and S-6.
        Point biased_target_and_sample (const ProductTree &tree, const BiasSelection &sel, Rng &rng);

        /// Direction towards which S-6 samples (the pulled shortest-path waypoint).
        [[nodiscard]] Point biased_waypoint (const ProductTree &tree, const BiasSelection &sel) const;

        /// C-2.
        Point guided_rect_sample (const ProductTree &tree, const BiasSelection &sel, Rng &rng);

        /// The cell rectangle C-2 draws from: [col0, col1] x [row0, row1].
        struct Rect
        {
            int col0, row0, col1, row1;
        };
        [[nodiscard]] Rect sampling_rect (Point a, Point b) const;

        [[nodiscard]] const SamplerCounters &counters () const noexcept { return counters_; }

      private:
        struct Distances;
        std::optional<BiasSelection> select (const ProductTree &tree, const SearchGoal &goal, Rng &rng, bool weighted) const;
        std::optional<Point> sample_label_point (const Guard &g, Rng &rng) const;
        [[nodiscard]] double weight (int q) const;
        [[nodiscard]] double rect_sum (const std::vector<double> &sat, const Rect &r) const;
        std::optional<Cell> rect_draw (const std::vector<double> &sat, const std::vector<double> &cell_weight, const Rect &r, Rng &rng) const;

        const GridWorkspace &w_;
        const TransitionTable &table_;
        const DistanceTable &rho_;
        SamplerConfig cfg_;
        const Prediction *pred_;
        SamplerCounters counters_;

        // summed-area tables with a zero row and column prepended
        std::vector<double> heat_weight_;
        std::vector<double> heat_sat_;
        std::vector<double> free_weight_;
        std::vector<double> free_sat_;
    };

} // namespace nngtl
