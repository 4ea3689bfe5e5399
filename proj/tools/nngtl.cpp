// Command-line front end. Exit codes: 0 success, 1 other failure, 2 unsatisfiable
// task, 3 no plan within budget, 64 usage error.

#include "nngtl/bench.hpp"
#include "nngtl/encodings.hpp"
#include "nngtl/ltl.hpp"
#include "nngtl/planner.hpp"
#include "nngtl/prediction.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    using namespace nngtl;

    constexpr int kExitOther = 1;
    constexpr int kExitUnsatisfiable = 2;
    constexpr int kExitNoPlan = 3;
    constexpr int kExitUsage = 64;

    struct UsageError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    std::string read_text (const std::string &path)
    {
        std::ifstream in (path, std::ios::binary);
        if (!in)
            throw Error (ErrorCode::FormatError, "cannot read " + path);
        std::ostringstream ss;
        ss << in.rdbuf ();
        return ss.str ();
    }

    void write_text (const std::string &path, const std::string &text)
    {
        if (path.empty () || path == "-")
        {
            std::cout << text;
            return;
        }
        std::ofstream out (path, std::ios::binary);
        if (!out)
            throw Error (ErrorCode::FormatError, "cannot write " + path);
        out << text;
    }

    std::string trim (std::string s)
    {
        const auto b = s.find_first_not_of (" \t\r\n");
        const auto e = s.find_last_not_of (" \t\r\n");
        return b == std::string::npos ? std::string{} : s.substr (b, e - b + 1);
    }

    /// HOA when the text starts with "HOA:", JSON otherwise.
    Nba read_nba (const std::string &path)
    {
        const std::string text = read_text (path);
        return trim (text).rfind ("HOA:", 0) == 0 ? parse_hoa (text) : nba_from_json (text);
    }

    /// Exactly one of formula text, formula file or automaton file.
    struct TaskSource
    {
        std::string formula;
        std::string formula_file;
        std::string nba_file;

        void add (CLI::App *cmd)
        {
            auto *f = cmd->add_option ("--formula", formula, "LTL formula text");
            auto *ff = cmd->add_option ("--formula-file", formula_file, "file holding the LTL formula");
            auto *nf = cmd->add_option ("--nba", nba_file, "automaton in HOA or JSON");
            f->excludes (ff)->excludes (nf);
            ff->excludes (nf);
        }

        [[nodiscard]] Nba automaton () const
        {
            if (!nba_file.empty ())
                return read_nba (nba_file);
            if (!formula_file.empty ())
                return ltl_to_nba (parse_ltl (trim (read_text (formula_file))));
            if (!formula.empty ())
                return ltl_to_nba (parse_ltl (formula));
            throw UsageError ("one of --formula, --formula-file or --nba is required");
        }
    };

    std::vector<Strategy> parse_strategies (const std::string &list)
    {
        std::vector<Strategy> out;
        std::stringstream ss (list);
        std::string item;
        while (std::getline (ss, item, ','))
            if (!trim (item).empty ())
            {
                try
                {
                    out.push_back (strategy_from_string (trim (item)));
                }
                catch (const Error &e)
                {
                    throw UsageError (e.what ());
                }
            }
        if (out.empty ())
            throw UsageError ("empty strategy list");
        return out;
    }

    void print_rho (const Nba &b, const DistanceTable &d)
    {
        std::printf ("rho (row = from, '-' = unreachable; diagonal = shortest cycle):\n");
        for (int i = 0; i < b.state_count; ++i)
        {
            std::printf ("  %2d:", i);
            for (int j = 0; j < b.state_count; ++j)
                d.reachable (i, j) ? std::printf (" %2d", d (i, j)) : std::printf ("  -");
            std::printf ("\n");
        }
    }
} // namespace

int main (int argc, char **argv)
{
    CLI::App app{"Temporal-logic task planning with automaton-biased and prediction-guided sampling"};
    app.require_subcommand (1);

    // generate
    auto *gen = app.add_subcommand ("generate", "write a deterministic batch of workspace + formula instances");
    std::uint64_t gen_seed = 20260101;
    int gen_count = 20;
    std::string gen_out;
    GenParams gen_params;
    gen->add_option ("--seed", gen_seed, "batch seed")->capture_default_str ();
    gen->add_option ("--count", gen_count, "number of instances")->capture_default_str ()->check (CLI::PositiveNumber);
    gen->add_option ("--labels", gen_params.label_count, "regions per map")->capture_default_str ()->check (CLI::Range (1, 250));
    gen->add_option ("--out", gen_out, "output directory")->required ();
    bool gen_case = false;
    gen->add_flag ("--case-study", gen_case, "write the single three-region case-study instance instead");

    // translate
    auto *tr = app.add_subcommand ("translate", "translate an LTL formula to an automaton");
    std::string tr_formula, tr_format = "hoa", tr_out;
    int tr_prune = 0;
    tr->add_option ("formula", tr_formula, "LTL formula")->required ();
    tr->add_option ("--format", tr_format, "hoa or json")->check (CLI::IsMember ({"hoa", "json"}))->capture_default_str ();
    tr->add_option ("--prune", tr_prune, "remove edges no letter over this many labels satisfies");
    tr->add_option ("--out", tr_out, "output file (stdout when absent)");

    // nba info
    auto *nba_cmd = app.add_subcommand ("nba", "automaton utilities");
    nba_cmd->require_subcommand (1);
    auto *info = nba_cmd->add_subcommand ("info", "states, accepting sets and the distance table");
    std::string info_file;
    int info_labels = 0;
    info->add_option ("file", info_file, "automaton in HOA or JSON")->required ();
    info->add_option ("--labels", info_labels, "prune against this many labels first");

    // plan
    auto *pl = app.add_subcommand ("plan", "plan one task");
    std::string pl_ws, pl_pred, pl_plan_out = "plan.json", pl_stats_out = "stats.json", pl_strategy = "biased";
    TaskSource pl_task;
    PlannerConfig pc;
    bool pl_oracle = false, pl_full = false;
    pl->add_option ("--workspace", pl_ws, "workspace JSON")->required ();
    pl_task.add (pl);
    pl->add_option ("--strategy", pl_strategy, "uniform, biased or guided")->check (CLI::IsMember ({"uniform", "biased", "guided"}))->capture_default_str ();
    pl->add_option ("--prediction", pl_pred, "prediction file for the guided strategy");
    pl->add_flag ("--oracle", pl_oracle, "compute the guided prediction with the deterministic oracle");
    pl->add_option ("--alpha", pc.alpha, "probability of a prediction-guided step")->capture_default_str ();
    pl->add_option ("--pd", pc.p_d, "probability of drawing from the closest vertices")->capture_default_str ();
    pl->add_option ("--sigma-angle", pc.sigma_angle, "bearing spread (radians)")->capture_default_str ();
    pl->add_option ("--lambda", pc.lambda, "prefix weight in the plan cost")->capture_default_str ();
    pl->add_option ("--eta", pc.eta, "steering step")->capture_default_str ();
    pl->add_option ("--gamma", pc.gamma, "near-radius constant")->capture_default_str ();
    pl->add_option ("--iters", pc.max_iters, "iteration budget")->capture_default_str ();
    pl->add_option ("--time-limit", pc.time_limit_s, "seconds, 0 for none")->capture_default_str ();
    pl->add_option ("--seed", pc.seed, "random seed")->capture_default_str ();
    pl->add_flag ("--full", pl_full, "keep refining after the first feasible plan");
    pl->add_option ("--out", pl_plan_out, "plan file")->capture_default_str ();
    pl->add_option ("--stats", pl_stats_out, "statistics file")->capture_default_str ();

    // compare
    auto *cmp = app.add_subcommand ("compare", "run strategies over an instance batch");
    std::string cmp_dir, cmp_csv = "runs.csv", cmp_summary, cmp_strategies = "uniform,biased,guided";
    CompareConfig cc;
    cmp->add_option ("--instances", cmp_dir, "directory written by generate")->required ();
    cmp->add_option ("--strategies", cmp_strategies, "comma-separated list")->capture_default_str ();
    cmp->add_option ("--trials", cc.trials, "seeds per instance and strategy")->capture_default_str ()->check (CLI::PositiveNumber);
    cmp->add_option ("--iters", cc.max_iters, "iteration budget per run")->capture_default_str ();
    cmp->add_option ("--time-limit", cc.time_limit_s, "seconds per run")->capture_default_str ();
    cmp->add_option ("--simple-threshold", cc.simple_threshold_s, "uniform mean T splitting simple from complex")->capture_default_str ();
    cmp->add_option ("--workers", cc.workers, "parallel runs (0: NNGTL_WORKERS or all cores)")->capture_default_str ();
    cmp->add_option ("--csv", cmp_csv, "per-run CSV (appended)")->capture_default_str ();
    cmp->add_option ("--summary", cmp_summary, "summary CSV (stdout when absent)");

    // render
    auto *rd = app.add_subcommand ("render", "static SVG of a workspace with optional plan and heatmap");
    std::string rd_ws, rd_plan, rd_pred, rd_out = "map.svg";
    int rd_scale = 3;
    rd->add_option ("--workspace", rd_ws, "workspace JSON")->required ();
    rd->add_option ("--plan", rd_plan, "plan JSON");
    rd->add_option ("--prediction", rd_pred, "prediction file whose heatmap is overlaid");
    rd->add_option ("--scale", rd_scale, "pixels per cell")->capture_default_str ()->check (CLI::PositiveNumber);
    rd->add_option ("--out", rd_out, "SVG file")->capture_default_str ();

    // predict-oracle
    auto *po = app.add_subcommand ("predict-oracle", "write the deterministic oracle prediction");
    std::string po_ws, po_out = "prediction.json";
    TaskSource po_task;
    OracleConfig oc;
    po->add_option ("--workspace", po_ws, "workspace JSON")->required ();
    po_task.add (po);
    po->add_option ("--lambda", oc.lambda, "prefix weight")->capture_default_str ();
    po->add_option ("--sigma", oc.sigma_cells, "heatmap decay in cells")->capture_default_str ();
    po->add_option ("--out", po_out, ".json for JSON, anything else for binary")->capture_default_str ();

    // export-dataset
    auto *ex = app.add_subcommand ("export-dataset", "encode instances and expert plans for training");
    std::string ex_dir, ex_out;
    ExpertConfig ec;
    bool ex_first = false;
    ex->add_option ("--instances", ex_dir, "directory written by generate")->required ();
    ex->add_option ("--out", ex_out, "dataset directory")->required ();
    ex->add_option ("--iterations", ec.iterations, "expert iteration budget")->capture_default_str ();
    ex->add_option ("--seed", ec.seed, "expert planner seed")->capture_default_str ();
    ex->add_option ("--workers", ec.workers, "parallel instances")->capture_default_str ();
    ex->add_flag ("--first-solution", ex_first, "stop each expert run at its first feasible plan");

    try
    {
        app.parse (argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit (e);
        return code == 0 ? 0 : kExitUsage;
    }

    try
    {
        if (*gen)
        {
            const auto instances = gen_case ? std::vector<Instance>{Instance{"case_study", case_study_workspace (), case_study_formula (), "case_study", 0}}
                                            : generate_instances (gen_seed, gen_count, gen_params);
            save_instances (instances, gen_out, gen_seed, gen_params);
            std::printf ("wrote %zu instances to %s\n", instances.size (), gen_out.c_str ());
        }
        else if (*tr)
        {
            Nba b = ltl_to_nba (parse_ltl (tr_formula));
            if (tr_prune > 0)
                b = prune_infeasible (b, tr_prune);
            write_text (tr_out, tr_format == "hoa" ? to_hoa (b, tr_formula) : nba_to_json (b) + "\n");
        }
        else if (*info)
        {
            Nba b = read_nba (info_file);
            if (info_labels > 0)
                b = prune_infeasible (b, info_labels);
            const DistanceTable d = compute_rho (b);
            std::printf ("states %d, initial %d, edges %zu\naccepting:", b.state_count, b.init, b.edges.size ());
            for (int q = 0; q < b.state_count; ++q)
                if (b.is_accepting (q))
                    std::printf (" %d", q);
            std::printf ("\nfeasible accepting:");
            try
            {
                for (int q : feasible_accepting (b, d))
                    std::printf (" %d", q);
            }
            catch (const Error &)
            {
                std::printf (" none");
            }
            std::printf ("\n");
            for (const auto &e : b.edges)
                std::printf ("  %d -> %d : %s\n", e.src, e.dst, e.guard.to_string ().c_str ());
            print_rho (b, d);
        }
        else if (*pl)
        {
            const GridWorkspace w = workspace_from_json (read_text (pl_ws));
            const Nba nba = pl_task.automaton ();
            pc.strategy = strategy_from_string (pl_strategy);
            pc.first_solution_only = !pl_full;

            std::optional<Prediction> pred;
            if (pc.strategy == Strategy::Guided)
            {
                if (!pl_pred.empty ())
                    pred = load_prediction (pl_pred);
                else if (pl_oracle)
                {
                    const Nba pruned = prune_infeasible (nba, w.label_count ());
                    try
                    {
                        OracleConfig ocfg;
                        ocfg.lambda = pc.lambda;
                        pred = oracle_predict (w, pruned, compute_rho (pruned), ocfg);
                    }
                    catch (const Error &e)
                    {
                        if (e.code () != ErrorCode::NoRealizableRun)
                            throw;
                        std::fprintf (stderr, "warning: %s; running the biased strategy\n", e.what ());
                        pc.strategy = Strategy::Biased;
                    }
                }
                else
                    throw UsageError ("the guided strategy needs --prediction or --oracle");
            }

            Planner planner (w, nba, pc, pred ? &*pred : nullptr);
            try
            {
                const auto [plan, stats] = planner.plan ();
                write_text (pl_plan_out, plan_to_json (plan));
                write_text (pl_stats_out, stats_to_json (stats));
                std::printf ("plan found: cost %.6f after %ld iterations (%ld nodes)\n", plan.j, stats.n, stats.m);
            }
            catch (const Error &e)
            {
                if (e.code () == ErrorCode::NoPlanFound)
                    write_text (pl_stats_out, stats_to_json (planner.last_stats ()));
                throw;
            }
        }
        else if (*cmp)
        {
            cc.strategies = parse_strategies (cmp_strategies);
            const auto instances = load_instances (cmp_dir);
            const auto rows = compare (instances, cc, cmp_csv);
            write_text (cmp_summary, summarize (rows, cc));
            for (Strategy s : cc.strategies)
                std::fprintf (stderr, "median n %-8s %.1f\n", to_string (s), median_iterations (rows, s, cc.max_iters));
        }
        else if (*rd)
        {
            const GridWorkspace w = workspace_from_json (read_text (rd_ws));
            std::optional<Plan> plan;
            std::optional<Prediction> pred;
            if (!rd_plan.empty ())
                plan = plan_from_json (read_text (rd_plan), w);
            if (!rd_pred.empty ())
            {
                pred = load_prediction (rd_pred);
                if (pred->rows != w.height () || pred->cols != w.width ())
                    throw Error (ErrorCode::DimensionMismatch, "heatmap size does not match the grid");
            }
            RenderInput in;
            in.workspace = &w;
            in.plan = plan ? &*plan : nullptr;
            in.heatmap = pred ? &pred->heatmap : nullptr;
            in.scale = rd_scale;
            write_text (rd_out, render_svg (in));
        }
        else if (*po)
        {
            const GridWorkspace w = workspace_from_json (read_text (po_ws));
            const Nba pruned = prune_infeasible (po_task.automaton (), w.label_count ());
            save_prediction (oracle_predict (w, pruned, compute_rho (pruned), oc), po_out);
        }
        else if (*ex)
        {
            ec.refine = !ex_first;
            const auto entries = export_dataset (load_instances (ex_dir), ex_out, ec);
            std::size_t skipped = 0;
            for (const auto &e : entries)
                skipped += e.skipped;
            std::printf ("exported %zu instances (%zu skipped) to %s\n", entries.size () - skipped, skipped, ex_out.c_str ());
        }
    }
    catch (const UsageError &e)
    {
        std::fprintf (stderr, "usage error: %s\n", e.what ());
        return kExitUsage;
    }
    catch (const Error &e)
    {
        std::fprintf (stderr, "error (%s): %s\n", to_string (e.code ()), e.what ());
        switch (e.code ())
        {
        case ErrorCode::Unsatisfiable:
        case ErrorCode::NoFeasibleAccepting:
            return kExitUnsatisfiable;
        case ErrorCode::NoPlanFound:
            return kExitNoPlan;
        default:
            return kExitOther;
        }
    }
    catch (const std::exception &e)
    {
        std::fprintf (stderr, "error: %s\n", e.what ());
        return kExitOther;
    }
    return 0;
}
