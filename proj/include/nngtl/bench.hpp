#pragma once
/**
 * @file  bench.hpp
 * @brief Instance generation, strategy comparison and SVG rendering.
 */

#include "nngtl/planner.hpp"
#include "nngtl/prediction.hpp"
#include "nngtl/workspace.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nngtl
{
    /// 200x200 layout with the three case-study regions and two walls that make
    /// the l2 -> l3 -> l1 ordering the shorter one.
    GridWorkspace case_study_workspace ();
    /// "[]<> l1 && (!l1 U l2) && <> l3"
    const char *case_study_formula () noexcept;

    /// Formula templates over placeholders a, b, c (distinct region labels).
    struct FormulaTemplate
    {
        const char *name;
        const char *pattern;
        int arity;
    };
    const std::vector<FormulaTemplate> &formula_templates ();
    /// Substitutes l<labels[i]> for the i-th placeholder.
    std::string instantiate (const FormulaTemplate &t, const std::vector<int> &labels);

    struct Instance
    {
        std::string id;
        GridWorkspace workspace;
        std::string formula;
        std::string template_name;
        std::uint64_t seed = 0;
    };

    /// Deterministic batch; every formula has a feasible accepting state after pruning.
    std::vector<Instance> generate_instances (std::uint64_t seed, int count, const GenParams &params = {});

    /// <dir>/<id>/workspace.json, <dir>/<id>/formula.txt, <dir>/manifest.json.
    void save_instances (const std::vector<Instance> &instances, const std::filesystem::path &dir, std::uint64_t seed, const GenParams &params);
    std::vector<Instance> load_instances (const std::filesystem::path &dir);

    struct BenchRecord
    {
        std::string instance;
        Strategy strategy = Strategy::Uniform;
        std::uint64_t seed = 0;
        double T = 0.0;
        long n = 0;
        long m = 0;
        std::optional<double> len;
        bool timeout = false;

        [[nodiscard]] std::string key () const;
    };

    struct CompareConfig
    {
        std::vector<Strategy> strategies{Strategy::Uniform, Strategy::Biased, Strategy::Guided};
        int trials = 3;
        long max_iters = 50000;
        double time_limit_s = 60.0;
        /// Uniform-strategy mean T at or below this marks an instance "simple".
        double simple_threshold_s = 1.0;
        int workers = 0; ///< 0: NNGTL_WORKERS, else hardware concurrency
        PlannerConfig planner{};
    };

    /// One planning run on an instance; guided runs use the oracle prediction.
    BenchRecord run_trial (const Instance &inst, Strategy strategy, std::uint64_t seed, const CompareConfig &cfg, const Prediction *pred = nullptr);

    inline constexpr const char *kCsvHeader = "instance,strategy,seed,T,n,m,len,timeout";
    std::string to_csv_row (const BenchRecord &r);
    BenchRecord from_csv_row (std::string_view line);
    std::vector<BenchRecord> read_csv (const std::filesystem::path &file);

    /// Runs every (instance, strategy, trial) missing from `csv` and appends it.
    /// Rows already present are kept untouched, so rerunning a finished batch is
    /// a no-op. Returns all rows for the batch in key order.
    std::vector<BenchRecord> compare (const std::vector<Instance> &instances, const CompareConfig &cfg, const std::filesystem::path &csv);

    /// class,strategy,T,n,len,m,timeouts with per-class means (len over solved runs),
    /// followed by commented reference rows.
    std::string summarize (const std::vector<BenchRecord> &rows, const CompareConfig &cfg);

    /// Median iterations-to-first-feasible per strategy (timeouts count as the budget).
    double median_iterations (const std::vector<BenchRecord> &rows, Strategy s, long budget);

    struct RenderInput
    {
        const GridWorkspace *workspace = nullptr;
        const Plan *plan = nullptr;
        const std::vector<float> *heatmap = nullptr;
        int scale = 3; ///< pixels per cell
    };
    /// Throws DimensionMismatch when the heatmap does not match the grid.
    std::string render_svg (const RenderInput &in);

} // namespace nngtl
