#include "nngtl/bench.hpp"

#include "nngtl/ltl.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace nngtl
{
    GridWorkspace case_study_workspace ()
    {
        constexpr int W = 200, H = 200;
        std::vector<CellCode> g (static_cast<std::size_t> (W) * H, kFreeCode);
        auto fill = [&] (int c0, int r0, int c1, int r1, CellCode v) {
            for (int r = r0; r <= r1; ++r)
                for (int c = c0; c <= c1; ++c)
                    g[static_cast<std::size_t> (r) * W + c] = v;
        };
        fill (85, 0, 95, 120, kObstacleCode);
        fill (100, 110, 170, 122, kObstacleCode);
        fill (40, 20, 60, 40, region_code (2));
        fill (120, 60, 140, 80, region_code (3));
        fill (150, 150, 175, 175, region_code (1));
        return GridWorkspace (W, H, 3, std::move (g), {0.1, 0.1});
    }

    const char *case_study_formula () noexcept { return "[]<> l1 && (!l1 U l2) && <> l3"; }

    const std::vector<FormulaTemplate> &formula_templates ()
    {
        static const std::vector<FormulaTemplate> t{
            {"reach", "<> a", 1},
            {"reach_both", "<> a && <> b", 2},
            {"sequence", "<> (a && <> b)", 2},
            {"avoid_until", "(!b U a) && <> b", 2},
            {"recur", "[]<> a && <> b", 2},
            {"patrol", "[]<> a && []<> b", 2},
            {"ordered_recur", "[]<> a && (!a U b) && <> c", 3},
            {"sequence3", "<> (a && <> (b && <> c))", 3},
        };
        return t;
    }

    std::string instantiate (const FormulaTemplate &t, const std::vector<int> &labels)
    {
        if (static_cast<int> (labels.size ()) < t.arity)
            throw Error (ErrorCode::InvalidArgument, std::string ("template '") + t.name + "' needs " + std::to_string (t.arity) + " labels");
        std::string out;
        for (const char *p = t.pattern; *p; ++p)
        {
            if (*p >= 'a' && *p <= 'c')
                out += "l" + std::to_string (labels[static_cast<std::size_t> (*p - 'a')]);
            else
                out += *p;
        }
        return out;
    }

    namespace
    {
        bool has_feasible_goal (const std::string &formula, int label_count)
        {
            const Nba pruned = prune_infeasible (ltl_to_nba (parse_ltl (formula)), label_count);
            return !feasible_accepting (pruned, compute_rho (pruned)).empty ();
        }

        std::string instance_id (int i)
        {
            char buf[16];
            std::snprintf (buf, sizeof buf, "inst%03d", i);
            return buf;
        }

        std::string read_file (const std::filesystem::path &p)
        {
            std::ifstream in (p, std::ios::binary);
            if (!in)
                throw Error (ErrorCode::FormatError, "cannot read " + p.string ());
            std::ostringstream ss;
            ss << in.rdbuf ();
            return ss.str ();
        }

        void write_file (const std::filesystem::path &p, const std::string &text)
        {
            std::ofstream out (p, std::ios::binary);
            if (!out)
                throw Error (ErrorCode::FormatError, "cannot write " + p.string ());
            out << text;
        }

        nlohmann::json params_json (const GenParams &p)
        {
            return {{"width", p.width},
                    {"height", p.height},
                    {"label_count", p.label_count},
                    {"obstacle_count", {p.obstacle_count_min, p.obstacle_count_max}},
                    {"obstacle_size", {p.obstacle_size_min, p.obstacle_size_max}},
                    {"region_size", {p.region_size_min, p.region_size_max}}};
        }

        std::string fmt_double (double v)
        {
            char buf[64];
            std::snprintf (buf, sizeof buf, "%.6g", v);
            return buf;
        }
    } // namespace

    std::vector<Instance> generate_instances (std::uint64_t seed, int count, const GenParams &params)
    {
        if (count < 0)
            throw Error (ErrorCode::InvalidArgument, "instance count must be non-negative");
        const auto &templates = formula_templates ();
        std::vector<Instance> out;
        out.reserve (static_cast<std::size_t> (count));
        for (int i = 0; i < count; ++i)
        {
            bool done = false;
            for (int attempt = 0; attempt < params.max_retries && !done; ++attempt)
            {
                const std::uint64_t sub = seed * 1'000'003ULL + static_cast<std::uint64_t> (i) * 1'009ULL + static_cast<std::uint64_t> (attempt);
                Rng rng (sub);
                GridWorkspace w = generate_random_workspace (sub, params);
                const auto &t = templates[rng.below (templates.size ())];
                if (t.arity > w.label_count ())
                    continue;
                std::vector<int> labels (static_cast<std::size_t> (w.label_count ()));
                for (int k = 0; k < w.label_count (); ++k)
                    labels[static_cast<std::size_t> (k)] = k + 1;
                for (std::size_t k = labels.size (); k > 1; --k)
                    std::swap (labels[k - 1], labels[rng.below (k)]);
                const std::string formula = instantiate (t, labels);
                if (!has_feasible_goal (formula, w.label_count ()))
                    continue;
                out.push_back (Instance{instance_id (i), std::move (w), formula, t.name, sub});
                done = true;
            }
            if (!done)
                throw Error (ErrorCode::GenerationFailed, "instance " + std::to_string (i) + ": no satisfiable formula after retries");
        }
        return out;
    }

    void save_instances (const std::vector<Instance> &instances, const std::filesystem::path &dir, std::uint64_t seed, const GenParams &params)
    {
        std::filesystem::create_directories (dir);
        nlohmann::json manifest;
        manifest["seed"] = seed;
        manifest["count"] = instances.size ();
        manifest["params"] = params_json (params);
        nlohmann::json tpl = nlohmann::json::array ();
        for (const auto &t : formula_templates ())
            tpl.push_back ({{"name", t.name}, {"pattern", t.pattern}});
        manifest["templates"] = tpl;
        nlohmann::json list = nlohmann::json::array ();
        for (const auto &inst : instances)
        {
            const auto sub = dir / inst.id;
            std::filesystem::create_directories (sub);
            write_file (sub / "workspace.json", workspace_to_json (inst.workspace));
            write_file (sub / "formula.txt", inst.formula + "\n");
            list.push_back ({{"id", inst.id}, {"template", inst.template_name}, {"formula", inst.formula}, {"seed", inst.seed}});
        }
        manifest["instances"] = list;
        write_file (dir / "manifest.json", manifest.dump (2) + "\n");
    }

    std::vector<Instance> load_instances (const std::filesystem::path &dir)
    {
        nlohmann::json manifest;
        try
        {
            manifest = nlohmann::json::parse (read_file (dir / "manifest.json"));
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error (ErrorCode::FormatError, std::string ("manifest: ") + e.what ());
        }
        std::vector<Instance> out;
        for (const auto &e : manifest.at ("instances"))
        {
            const std::string id = e.at ("id").get<std::string> ();
            std::string formula = read_file (dir / id / "formula.txt");
            while (!formula.empty () && (formula.back () == '\n' || formula.back () == '\r'))
                formula.pop_back ();
            out.push_back (Instance{id, workspace_from_json (read_file (dir / id / "workspace.json")), formula, e.value ("template", std::string{}),
                                    e.value ("seed", std::uint64_t{0})});
        }
        return out;
    }

    std::string BenchRecord::key () const { return instance + "|" + to_string (strategy) + "|" + std::to_string (seed); }

    BenchRecord run_trial (const Instance &inst, Strategy strategy, std::uint64_t seed, const CompareConfig &cfg, const Prediction *pred)
    {
        const Nba nba = ltl_to_nba (parse_ltl (inst.formula));
        PlannerConfig pc = cfg.planner;
        pc.strategy = strategy;
        pc.seed = seed;
        pc.max_iters = cfg.max_iters;
        pc.time_limit_s = cfg.time_limit_s;
        pc.first_solution_only = true;

        std::optional<Prediction> own;
        if (strategy == Strategy::Guided && !pred)
        {
            const Nba pruned = prune_infeasible (nba, inst.workspace.label_count ());
            try
            {
                own = oracle_predict (inst.workspace, pruned, compute_rho (pruned));
                pred = &*own;
            }
            catch (const Error &e)
            {
                // no realizable lasso: the run degrades to the biased strategy
                if (e.code () != ErrorCode::NoRealizableRun)
                    throw;
                pc.strategy = Strategy::Biased;
            }
        }
        BenchRecord r{inst.id, strategy, seed, 0.0, 0, 0, std::nullopt, false};
        Planner planner (inst.workspace, nba, pc, pc.strategy == Strategy::Guided ? pred : nullptr);
        try
        {
            const auto [plan, stats] = planner.plan ();
            r.T = stats.T;
            r.n = stats.n;
            r.m = stats.m;
            r.len = stats.len;
        }
        catch (const Error &e)
        {
            if (e.code () != ErrorCode::NoPlanFound)
                throw;
            const RunStats &s = planner.last_stats ();
            r.T = s.T;
            r.n = s.n;
            r.m = s.m;
            r.timeout = true;
        }
        return r;
    }

    std::string to_csv_row (const BenchRecord &r)
    {
        return r.instance + "," + to_string (r.strategy) + "," + std::to_string (r.seed) + "," + fmt_double (r.T) + "," + std::to_string (r.n) + "," +
               std::to_string (r.m) + "," + (r.len ? fmt_double (*r.len) : std::string{}) + "," + (r.timeout ? "1" : "0");
    }

    BenchRecord from_csv_row (std::string_view line)
    {
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true)
        {
            const auto comma = line.find (',', start);
            f.emplace_back (line.substr (start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (f.size () != 8)
            throw Error (ErrorCode::FormatError, "expected 8 CSV fields, got " + std::to_string (f.size ()));
        try
        {
            BenchRecord r;
            r.instance = f[0];
            r.strategy = strategy_from_string (f[1]);
            r.seed = std::stoull (f[2]);
            r.T = std::stod (f[3]);
            r.n = std::stol (f[4]);
            r.m = std::stol (f[5]);
            if (!f[6].empty ())
                r.len = std::stod (f[6]);
            r.timeout = f[7] == "1";
            return r;
        }
        catch (const std::logic_error &)
        {
            throw Error (ErrorCode::FormatError, "malformed CSV row: " + std::string (line));
        }
    }

    std::vector<BenchRecord> read_csv (const std::filesystem::path &file)
    {
        std::vector<BenchRecord> out;
        std::ifstream in (file);
        if (!in)
            return out;
        std::string line;
        while (std::getline (in, line))
        {
            if (line.empty () || line == kCsvHeader)
                continue;
            out.push_back (from_csv_row (line));
        }
        return out;
    }

    std::vector<BenchRecord> compare (const std::vector<Instance> &instances, const CompareConfig &cfg, const std::filesystem::path &csv)
    {
        std::map<std::string, BenchRecord> done;
        for (auto &r : read_csv (csv))
            done.emplace (r.key (), std::move (r));

        struct Task
        {
            const Instance *inst;
            Strategy s;
            std::uint64_t seed;
        };
        std::vector<Task> todo;
        std::vector<std::string> keys;
        for (const auto &inst : instances)
            for (Strategy s : cfg.strategies)
                for (int t = 0; t < cfg.trials; ++t)
                {
                    const BenchRecord probe{inst.id, s, static_cast<std::uint64_t> (t), 0.0, 0, 0, std::nullopt, false};
                    keys.push_back (probe.key ());
                    if (!done.count (probe.key ()))
                        todo.push_back ({&inst, s, static_cast<std::uint64_t> (t)});
                }

        // oracle predictions are shared by every guided trial of an instance
        std::map<std::string, Prediction> preds;
        for (const auto &task : todo)
            if (task.s == Strategy::Guided && !preds.count (task.inst->id))
            {
                const Nba pruned = prune_infeasible (ltl_to_nba (parse_ltl (task.inst->formula)), task.inst->workspace.label_count ());
                try
                {
                    preds.emplace (task.inst->id, oracle_predict (task.inst->workspace, pruned, compute_rho (pruned)));
                }
                catch (const Error &e)
                {
                    if (e.code () != ErrorCode::NoRealizableRun)
                        throw;
                }
            }

        int workers = cfg.workers;
        if (workers <= 0)
        {
            if (const char *env = std::getenv ("NNGTL_WORKERS"))
                workers = std::atoi (env);
            if (workers <= 0)
                workers = static_cast<int> (std::max (1u, std::thread::hardware_concurrency ()));
        }
        workers = std::max (1, std::min<int> (workers, static_cast<int> (todo.size ())));

        const bool fresh = !std::filesystem::exists (csv) || std::filesystem::file_size (csv) == 0;
        std::ofstream out (csv, std::ios::app);
        if (!out)
            throw Error (ErrorCode::FormatError, "cannot write " + csv.string ());
        if (fresh)
            out << kCsvHeader << "\n";

        std::mutex mu;
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        auto work = [&] {
            while (true)
            {
                const std::size_t i = next++;
                if (i >= todo.size ())
                    return;
                try
                {
                    const Task &task = todo[i];
                    const auto it = preds.find (task.inst->id);
                    BenchRecord r = run_trial (*task.inst, task.s, task.seed, cfg, it == preds.end () ? nullptr : &it->second);
                    std::lock_guard lock (mu);
                    out << to_csv_row (r) << "\n";
                    out.flush ();
                    done.emplace (r.key (), std::move (r));
                }
                catch (...)
                {
                    std::lock_guard lock (mu);
                    if (!failure)
                        failure = std::current_exception ();
                    next = todo.size ();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int k = 1; k < workers; ++k)
            pool.emplace_back (work);
        work ();
        for (auto &t : pool)
            t.join ();
        if (failure)
            std::rethrow_exception (failure);

        std::vector<BenchRecord> rows;
        for (const auto &k : keys)
            rows.push_back (done.at (k));
        return rows;
    }

    std::string summarize (const std::vector<BenchRecord> &rows, const CompareConfig &cfg)
    {
        // instance class from the uniform strategy's mean T
        std::map<std::string, std::pair<double, int>> uniform_t;
        for (const auto &r : rows)
            if (r.strategy == Strategy::Uniform)
            {
                auto &[sum, k] = uniform_t[r.instance];
                sum += r.timeout ? std::max (r.T, cfg.time_limit_s) : r.T;
                ++k;
            }
        auto class_of = [&] (const std::string &id) -> std::string {
            const auto it = uniform_t.find (id);
            if (it == uniform_t.end ())
                return "all";
            return it->second.first / it->second.second <= cfg.simple_threshold_s ? "simple" : "complex";
        };

        struct Acc
        {
            double t = 0, n = 0, m = 0, len = 0;
            int runs = 0, solved = 0, timeouts = 0;
        };
        std::map<std::pair<std::string, int>, Acc> acc;
        for (const auto &r : rows)
        {
            Acc &a = acc[{class_of (r.instance), static_cast<int> (r.strategy)}];
            a.t += r.T;
            a.n += static_cast<double> (r.n);
            a.m += static_cast<double> (r.m);
            ++a.runs;
            if (r.timeout)
                ++a.timeouts;
            else if (r.len)
            {
                a.len += *r.len;
                ++a.solved;
            }
        }
        std::string out = "class,strategy,T,n,len,m,timeouts\n";
        for (const auto &[key, a] : acc)
        {
            out += key.first + "," + to_string (static_cast<Strategy> (key.second)) + "," + fmt_double (a.t / a.runs) + "," + fmt_double (a.n / a.runs) + "," +
                   (a.solved ? fmt_double (a.len / a.solved) : std::string{}) + "," + fmt_double (a.m / a.runs) + "," + std::to_string (a.timeouts) + "\n";
        }
        // published reference values (simple / complex task classes)
        out += "reference_simple,uniform,54.2475,1908.13,0.78789,3167.63,\n";
        out += "reference_simple,biased,1.03305,101.000,0.80842,200.307,\n";
        out += "reference_simple,guided,0.09518,22.8941,0.90546,48.1395,\n";
        out += "reference_complex,uniform,1401.78,7401.27,,21501.2,\n";
        out += "reference_complex,biased,15.5639,321.553,1.08553,704.082,\n";
        out += "reference_complex,guided,2.19490,44.8549,1.12555,182.743,\n";
        return out;
    }

    double median_iterations (const std::vector<BenchRecord> &rows, Strategy s, long budget)
    {
        std::vector<double> v;
        for (const auto &r : rows)
            if (r.strategy == s)
                v.push_back (r.timeout ? static_cast<double> (std::max (budget, r.n)) : static_cast<double> (r.n));
        if (v.empty ())
            return 0.0;
        std::sort (v.begin (), v.end ());
        const std::size_t k = v.size () / 2;
        return v.size () % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
    }

    std::string render_svg (const RenderInput &in)
    {
        if (!in.workspace)
            throw Error (ErrorCode::InvalidArgument, "render needs a workspace");
        const GridWorkspace &w = *in.workspace;
        const int s = std::max (1, in.scale);
        const int W = w.width () * s, H = w.height () * s;
        if (in.heatmap && in.heatmap->size () != static_cast<std::size_t> (w.width ()) * w.height ())
            throw Error (ErrorCode::DimensionMismatch, "heatmap size does not match the grid");

        std::ostringstream o;
        // y grows upwards in the workspace, downwards in SVG
        auto px = [&] (double x) { return x * W; };
        auto py = [&] (double y) { return H - y * H; };
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
        o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

        // horizontal runs of equal code keep the file small
        o << "<g id=\"cells\">\n";
        std::map<int, std::pair<double, double>> label_pos;
        std::map<int, int> label_count;
        for (int r = 0; r < w.height (); ++r)
        {
            int c = 0;
            while (c < w.width ())
            {
                const CellCode v = w.code ({c, r});
                int e = c;
                while (e + 1 < w.width () && w.code ({e + 1, r}) == v)
                    ++e;
                if (v != kFreeCode)
                {
                    const bool obstacle = v == kObstacleCode;
                    o << "<rect x=\"" << c * s << "\" y=\"" << H - (r + 1) * s << "\" width=\"" << (e - c + 1) * s << "\" height=\"" << s << "\" fill=\""
                      << (obstacle ? "#808080" : "#7fc97f") << "\"/>\n";
                    if (!obstacle)
                    {
                        auto &[sx, sy] = label_pos[v - 1];
                        sx += (c + e + 1) * 0.5 * (e - c + 1);
                        sy += (r + 0.5) * (e - c + 1);
                        label_count[v - 1] += e - c + 1;
                    }
                }
                c = e + 1;
            }
        }
        o << "</g>\n";
        o << "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"" << 5 * s << "\" text-anchor=\"middle\">\n";
        for (const auto &[label, pos] : label_pos)
        {
            const double k = label_count[label];
            o << "<text x=\"" << pos.first / k * s << "\" y=\"" << H - pos.second / k * s << "\">l" << label << "</text>\n";
        }
        o << "</g>\n";

        if (in.heatmap)
        {
            o << "<g id=\"heatmap\" fill=\"#d62728\">\n";
            const auto &h = *in.heatmap;
            for (int r = 0; r < w.height (); ++r)
            {
                int c = 0;
                while (c < w.width ())
                {
                    const float v = h[static_cast<std::size_t> (r) * w.width () + c];
                    int e = c;
                    while (e + 1 < w.width () && h[static_cast<std::size_t> (r) * w.width () + e + 1] == v)
                        ++e;
                    if (v > 0.0f)
                        o << "<rect x=\"" << c * s << "\" y=\"" << H - (r + 1) * s << "\" width=\"" << (e - c + 1) * s << "\" height=\"" << s
                          << "\" fill-opacity=\"" << fmt_double (std::clamp (static_cast<double> (v), 0.0, 1.0) * 0.6) << "\"/>\n";
                    c = e + 1;
                }
            }
            o << "</g>\n";
        }

        if (in.plan)
        {
            auto polyline = [&] (const std::vector<PlanVertex> &vs, const char *id, const char *color) {
                o << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << s << "\" points=\"";
                for (std::size_t i = 0; i < vs.size (); ++i)
                    o << (i ? " " : "") << fmt_double (px (vs[i].x.x)) << "," << fmt_double (py (vs[i].x.y));
                o << "\"/>\n";
            };
            polyline (in.plan->prefix, "prefix", "#d62728");
            polyline (in.plan->suffix, "suffix", "#1f77b4");
        }
        const Point x0 = w.init ();
        o << "<circle id=\"init\" cx=\"" << fmt_double (px (x0.x)) << "\" cy=\"" << fmt_double (py (x0.y)) << "\" r=\"" << 2 * s
          << "\" fill=\"black\"/>\n";
        o << "</svg>\n";
        return o.str ();
    }

} // namespace nngtl
