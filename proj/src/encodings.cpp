#include "nngtl/encodings.hpp"

#include "nngtl/ltl.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

namespace nngtl
{
    namespace
    {
        static_assert (std::endian::native == std::endian::little, "binary arrays are written in host order");

        template <class T> void append_raw (std::string &out, const std::vector<T> &v)
        {
            static_assert (sizeof (T) == 4);
            const auto old = out.size ();
            out.resize (old + v.size () * 4);
            std::memcpy (out.data () + old, v.data (), v.size () * 4);
        }

        template <class T> std::vector<T> read_raw (const std::string &bytes, std::size_t offset, std::size_t count)
        {
            if (offset + count * 4 > bytes.size ())
                throw Error (ErrorCode::FormatError, "array extends past the end of the binary file");
            std::vector<T> v (count);
            std::memcpy (v.data (), bytes.data () + offset, count * 4);
            return v;
        }

        nlohmann::json array_entry (const char *name, const char *dtype, std::vector<int> shape, std::size_t offset)
        {
            return {{"name", name}, {"dtype", dtype}, {"shape", shape}, {"offset", offset}};
        }

        struct ArrayMeta
        {
            std::vector<std::size_t> shape;
            std::size_t offset = 0;
            std::size_t count = 1;
        };

        ArrayMeta find_array (const std::string &meta, const char *name, const char *dtype)
        {
            try
            {
                const auto j = nlohmann::json::parse (meta);
                for (const auto &a : j.at ("arrays"))
                    if (a.at ("name") == name)
                    {
                        if (a.at ("dtype") != dtype)
                            throw Error (ErrorCode::FormatError, std::string{"array "} + name + " has dtype " + a.at ("dtype").get<std::string> ());
                        ArrayMeta m;
                        m.shape = a.at ("shape").get<std::vector<std::size_t>> ();
                        m.offset = a.at ("offset").get<std::size_t> ();
                        for (auto s : m.shape)
                            m.count *= s;
                        return m;
                    }
            }
            catch (const nlohmann::json::exception &e)
            {
                throw Error (ErrorCode::FormatError, std::string{"bad sidecar: "} + e.what ());
            }
            throw Error (ErrorCode::FormatError, std::string{"sidecar lacks array "} + name);
        }

        void write_file (const std::filesystem::path &p, const std::string &text)
        {
            std::ofstream out (p, std::ios::binary);
            if (!out)
                throw Error (ErrorCode::FormatError, "cannot write " + p.string ());
            out << text;
        }

        int worker_count (int requested, std::size_t tasks)
        {
            int workers = requested;
            if (workers <= 0)
            {
                if (const char *env = std::getenv ("NNGTL_WORKERS"))
                    workers = std::atoi (env);
                if (workers <= 0)
                    workers = static_cast<int> (std::max (1u, std::thread::hardware_concurrency ()));
            }
            return std::max (1, std::min<int> (workers, static_cast<int> (tasks)));
        }
    } // namespace

    WorkspaceTensor encode_workspace (const GridWorkspace &w)
    {
        WorkspaceTensor t;
        t.channels = w.label_count () + 1;
        t.rows = w.height ();
        t.cols = w.width ();
        const std::size_t plane = static_cast<std::size_t> (t.rows) * t.cols;
        t.data.assign (plane * t.channels, 0.0f);
        const auto cells = w.cells ();
        for (std::size_t i = 0; i < plane; ++i)
        {
            const CellCode c = cells[i];
            if (c == kObstacleCode)
                t.data[i] = 1.0f;
            else if (c >= 2)
                t.data[static_cast<std::size_t> (c - 1) * plane + i] = 1.0f;
        }
        // the init marker wins over region membership only in channel 0
        t.data[w.index (w.cell_of (w.init ()))] = -1.0f;
        return t;
    }

    HeteroGraph encode_nba (const Nba &b, const DistanceTable &d, int label_count)
    {
        HeteroGraph g;
        const int n = b.state_count;

        std::vector<int> feasible;
        try
        {
            feasible = feasible_accepting (b, d);
        }
        catch (const Error &e)
        {
            if (e.code () != ErrorCode::NoFeasibleAccepting)
                throw;
        }

        std::vector<int> nearest (static_cast<std::size_t> (n), DistanceTable::kInfinity);
        int max_finite = 0;
        for (int q = 0; q < n; ++q)
        {
            for (int f : feasible)
                nearest[static_cast<std::size_t> (q)] = std::min (nearest[static_cast<std::size_t> (q)], d.to_target (q, f));
            if (nearest[static_cast<std::size_t> (q)] != DistanceTable::kInfinity)
                max_finite = std::max (max_finite, nearest[static_cast<std::size_t> (q)]);
        }

        g.state_features.resize (static_cast<std::size_t> (n));
        for (int q = 0; q < n; ++q)
        {
            const int dq = nearest[static_cast<std::size_t> (q)];
            float v3 = 1.0f;
            if (dq != DistanceTable::kInfinity)
                v3 = max_finite == 0 ? 0.0f : static_cast<float> (static_cast<double> (dq) / max_finite);
            const bool feas = std::find (feasible.begin (), feasible.end (), q) != feasible.end ();
            g.state_features[static_cast<std::size_t> (q)] = {q == b.init ? 1.0f : 0.0f, feas ? 1.0f : 0.0f, v3};
        }

        for (std::size_t k = 0; k < b.edges.size (); ++k)
        {
            const NbaEdge &e = b.edges[k];
            for (const Conjunct &c : e.guard.disjuncts ())
            {
                HeteroGraph::EdgeNode node{e.src, e.dst, static_cast<int> (k), std::vector<float> (static_cast<std::size_t> (label_count), 0.0f)};
                for (const Literal &l : c)
                {
                    if (l.label < 1 || l.label > label_count)
                        throw Error (ErrorCode::InvalidArgument, "guard literal l" + std::to_string (l.label) + " outside 1.." + std::to_string (label_count));
                    node.features[static_cast<std::size_t> (l.label - 1)] = l.positive ? 1.0f : -1.0f;
                }
                g.edge_nodes.push_back (std::move (node));
            }
        }

        const int pool = g.pooling_node ();
        for (std::size_t k = 0; k < g.edge_nodes.size (); ++k)
        {
            const int id = n + static_cast<int> (k);
            g.links.emplace_back (g.edge_nodes[k].src, id);
            g.links.emplace_back (id, g.edge_nodes[k].dst);
        }
        for (int v = 0; v < pool; ++v)
            g.links.emplace_back (v, v);
        for (int v = 0; v < pool; ++v)
            g.links.emplace_back (v, pool);
        return g;
    }

    std::string graph_to_json (const HeteroGraph &g)
    {
        nlohmann::json j;
        j["state_count"] = g.state_count ();
        j["node_count"] = g.node_count ();
        j["pooling_node"] = g.pooling_node ();
        j["state_features"] = g.state_features;
        nlohmann::json edges = nlohmann::json::array ();
        for (const auto &e : g.edge_nodes)
            edges.push_back ({{"src", e.src}, {"dst", e.dst}, {"edge", e.edge}, {"features", e.features}});
        j["edge_nodes"] = std::move (edges);
        nlohmann::json links = nlohmann::json::array ();
        for (const auto &[a, b] : g.links)
            links.push_back ({a, b});
        j["links"] = std::move (links);
        return j.dump () + "\n";
    }

    ExpertLabels encode_expert (const Plan &plan, const GridWorkspace &w, int state_count)
    {
        ExpertLabels l;
        l.rows = w.height ();
        l.cols = w.width ();
        l.path_mask.assign (static_cast<std::size_t> (l.rows) * l.cols, 0);
        l.state_mask.assign (static_cast<std::size_t> (state_count), 0);

        auto mark = [&] (Cell c) {
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                {
                    const Cell n{c.col + dc, c.row + dr};
                    if (w.in_bounds (n))
                        l.path_mask[w.index (n)] = 1;
                }
        };
        auto rasterize = [&] (const std::vector<PlanVertex> &vs, bool closed) {
            if (vs.size () == 1)
                mark (w.cell_of (vs.front ().x));
            for (std::size_t i = 0; i + 1 < vs.size (); ++i)
                for (Cell c : supercover (w, vs[i].x, vs[i + 1].x))
                    mark (c);
            if (closed && vs.size () > 1)
                for (Cell c : supercover (w, vs.back ().x, vs.front ().x))
                    mark (c);
        };
        rasterize (plan.prefix, false);
        rasterize (plan.suffix, true);

        for (const auto *part : {&plan.prefix, &plan.suffix})
            for (const PlanVertex &v : *part)
            {
                if (v.q < 0 || v.q >= state_count)
                    throw Error (ErrorCode::DimensionMismatch, "plan state " + std::to_string (v.q) + " outside the automaton");
                l.state_mask[static_cast<std::size_t> (v.q)] = 1;
            }
        return l;
    }

    EncodedArrays tensor_to_binary (const WorkspaceTensor &t)
    {
        EncodedArrays out;
        append_raw (out.bytes, t.data);
        nlohmann::json meta;
        meta["byte_order"] = "little";
        meta["arrays"] = {array_entry ("workspace", "float32", {t.channels, t.rows, t.cols}, 0)};
        out.meta = meta.dump (2) + "\n";
        return out;
    }

    WorkspaceTensor tensor_from_binary (const std::string &bytes, const std::string &meta)
    {
        const ArrayMeta a = find_array (meta, "workspace", "float32");
        if (a.shape.size () != 3)
            throw Error (ErrorCode::FormatError, "workspace tensor must have rank 3");
        WorkspaceTensor t;
        t.channels = static_cast<int> (a.shape[0]);
        t.rows = static_cast<int> (a.shape[1]);
        t.cols = static_cast<int> (a.shape[2]);
        t.data = read_raw<float> (bytes, a.offset, a.count);
        return t;
    }

    EncodedArrays labels_to_binary (const ExpertLabels &l)
    {
        EncodedArrays out;
        append_raw (out.bytes, l.path_mask);
        const std::size_t state_offset = out.bytes.size ();
        append_raw (out.bytes, l.state_mask);
        nlohmann::json meta;
        meta["byte_order"] = "little";
        meta["arrays"] = {array_entry ("path_mask", "int32", {l.rows, l.cols}, 0),
                          array_entry ("state_mask", "int32", {static_cast<int> (l.state_mask.size ())}, state_offset)};
        out.meta = meta.dump (2) + "\n";
        return out;
    }

    ExpertLabels labels_from_binary (const std::string &bytes, const std::string &meta)
    {
        const ArrayMeta pm = find_array (meta, "path_mask", "int32");
        const ArrayMeta sm = find_array (meta, "state_mask", "int32");
        if (pm.shape.size () != 2 || sm.shape.size () != 1)
            throw Error (ErrorCode::FormatError, "label arrays have the wrong rank");
        ExpertLabels l;
        l.rows = static_cast<int> (pm.shape[0]);
        l.cols = static_cast<int> (pm.shape[1]);
        l.path_mask = read_raw<std::int32_t> (bytes, pm.offset, pm.count);
        l.state_mask = read_raw<std::int32_t> (bytes, sm.offset, sm.count);
        return l;
    }

    std::vector<ManifestEntry> export_dataset (const std::vector<Instance> &instances, const std::filesystem::path &out_dir, const ExpertConfig &cfg)
    {
        std::filesystem::create_directories (out_dir);
        std::vector<ManifestEntry> entries (instances.size ());

        auto export_one = [&] (std::size_t i) {
            const Instance &inst = instances[i];
            ManifestEntry &entry = entries[i];
            entry.id = inst.id;
            entry.seed = inst.seed;

            const GridWorkspace &w = inst.workspace;
            const Nba nba = ltl_to_nba (parse_ltl (inst.formula));
            PlannerConfig pc;
            pc.strategy = Strategy::Biased;
            pc.max_iters = cfg.iterations;
            pc.seed = cfg.seed;
            pc.lambda = cfg.lambda;
            pc.first_solution_only = !cfg.refine;

            std::optional<Plan> expert;
            int state_count = 0;
            Nba pruned;
            DistanceTable rho;
            try
            {
                Planner planner (w, nba, pc);
                pruned = planner.pruned ();
                rho = planner.rho ();
                state_count = pruned.state_count;
                expert = planner.plan ().first;
            }
            catch (const Error &e)
            {
                if (e.code () != ErrorCode::Unsatisfiable && e.code () != ErrorCode::NoPlanFound)
                    throw;
                entry.skipped = true;
                entry.reason = to_string (e.code ());
                return;
            }
            entry.cost = expert->j;

            const auto sub = out_dir / inst.id;
            std::filesystem::create_directories (sub);
            write_file (sub / "workspace.json", workspace_to_json (w));
            write_file (sub / "formula.txt", inst.formula + "\n");
            write_file (sub / "nba.json", nba_to_json (pruned));
            const EncodedArrays tensor = tensor_to_binary (encode_workspace (w));
            write_file (sub / "tensor.bin", tensor.bytes);
            write_file (sub / "tensor.meta.json", tensor.meta);
            write_file (sub / "graph.json", graph_to_json (encode_nba (pruned, rho, w.label_count ())));
            const EncodedArrays labels = labels_to_binary (encode_expert (*expert, w, state_count));
            write_file (sub / "labels.bin", labels.bytes);
            write_file (sub / "labels.meta.json", labels.meta);
        };

        // every task writes only its own directory and manifest slot
        std::mutex mu;
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        auto work = [&] {
            while (true)
            {
                const std::size_t i = next++;
                if (i >= instances.size ())
                    return;
                try
                {
                    export_one (i);
                }
                catch (...)
                {
                    std::lock_guard lock (mu);
                    if (!failure)
                        failure = std::current_exception ();
                    next = instances.size ();
                }
            }
        };
        const int workers = worker_count (cfg.workers, instances.size ());
        std::vector<std::thread> pool;
        for (int k = 1; k < workers; ++k)
            pool.emplace_back (work);
        work ();
        for (auto &t : pool)
            t.join ();
        if (failure)
            std::rethrow_exception (failure);

        nlohmann::json manifest;
        manifest["expert"] = {{"strategy", "biased"}, {"iterations", cfg.iterations}, {"seed", cfg.seed}, {"refine", cfg.refine}, {"lambda", cfg.lambda}};
        nlohmann::json list = nlohmann::json::array ();
        for (std::size_t i = 0; i < entries.size (); ++i)
        {
            const ManifestEntry &e = entries[i];
            nlohmann::json j{{"id", e.id}, {"seed", e.seed}, {"formula", instances[i].formula}, {"skipped", e.skipped}};
            if (e.skipped)
                j["reason"] = e.reason;
            else
                j["cost"] = e.cost;
            list.push_back (std::move (j));
        }
        manifest["instances"] = std::move (list);
        write_file (out_dir / "manifest.json", manifest.dump (2) + "\n");
        return entries;
    }

} // namespace nngtl
