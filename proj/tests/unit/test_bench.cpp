#include "fixtures.hpp"

#include "nngtl/bench.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <unistd.h>

using namespace nngtl;

namespace
{
    std::filesystem::path temp_dir (const std::string &name)
    {
        const auto d = std::filesystem::temp_directory_path () / ("nngtl_bench_" + std::to_string (::getpid ()) + "_" + name);
        std::filesystem::remove_all (d);
        std::filesystem::create_directories (d);
        return d;
    }

    long count (const std::string &text, const std::string &needle)
    {
        long k = 0;
        for (std::size_t pos = text.find (needle); pos != std::string::npos; pos = text.find (needle, pos + 1))
            ++k;
        return k;
    }

    std::size_t line_count (const std::filesystem::path &f)
    {
        std::ifstream in (f);
        std::size_t n = 0;
        for (std::string line; std::getline (in, line);)
            ++n;
        return n;
    }
} // namespace

TEST (Bench, GenerationIsReproducibleAndFeasible)
{
    const auto a = generate_instances (7, 4);
    const auto b = generate_instances (7, 4);
    ASSERT_EQ (a.size (), 4u);
    for (std::size_t i = 0; i < a.size (); ++i)
    {
        EXPECT_EQ (a[i].id, b[i].id);
        EXPECT_EQ (a[i].formula, b[i].formula);
        EXPECT_EQ (workspace_to_json (a[i].workspace), workspace_to_json (b[i].workspace));
        const Nba pruned = prune_infeasible (ltl_to_nba (parse_ltl (a[i].formula)), a[i].workspace.label_count ());
        EXPECT_NO_THROW (feasible_accepting (pruned, compute_rho (pruned))) << a[i].formula;
    }
    EXPECT_NE (workspace_to_json (generate_instances (8, 1)[0].workspace), workspace_to_json (a[0].workspace));
}

TEST (Bench, TemplatesInstantiateWithLabels)
{
    for (const auto &t : formula_templates ())
    {
        std::vector<int> labels;
        for (int i = 1; i <= t.arity; ++i)
            labels.push_back (i);
        const std::string f = instantiate (t, labels);
        EXPECT_NO_THROW (parse_ltl (f)) << t.name << ": " << f;
        EXPECT_EQ (f.find ('{'), std::string::npos);
    }
}

TEST (Bench, InstancesSaveAndLoad)
{
    const auto dir = temp_dir ("instances");
    const auto inst = generate_instances (5, 3);
    save_instances (inst, dir, 5, {});
    EXPECT_TRUE (std::filesystem::exists (dir / "manifest.json"));
    const auto back = load_instances (dir);
    ASSERT_EQ (back.size (), inst.size ());
    for (std::size_t i = 0; i < inst.size (); ++i)
    {
        EXPECT_EQ (back[i].id, inst[i].id);
        EXPECT_EQ (back[i].formula, inst[i].formula);
        EXPECT_EQ (back[i].workspace.init (), inst[i].workspace.init ());
        EXPECT_TRUE (std::equal (back[i].workspace.cells ().begin (), back[i].workspace.cells ().end (), inst[i].workspace.cells ().begin (),
                                 inst[i].workspace.cells ().end ()));
    }
    std::filesystem::remove_all (dir);
}

TEST (Bench, CsvRowsRoundTrip)
{
    const BenchRecord solved{"inst003", Strategy::Guided, 2, 0.125, 431, 912, 1.0625, false};
    const BenchRecord timed{"inst004", Strategy::Uniform, 0, 60.0, 50000, 48000, std::nullopt, true};
    for (const auto &r : {solved, timed})
    {
        const BenchRecord back = from_csv_row (to_csv_row (r));
        EXPECT_EQ (back.key (), r.key ());
        EXPECT_EQ (back.n, r.n);
        EXPECT_EQ (back.m, r.m);
        EXPECT_EQ (back.len, r.len);
        EXPECT_EQ (back.timeout, r.timeout);
        EXPECT_NEAR (back.T, r.T, 1e-9);
    }
    EXPECT_EQ (count (to_csv_row (solved), ","), count (kCsvHeader, ","));
    EXPECT_THROW (from_csv_row ("a,b"), Error);
}

TEST (Bench, CompareResumesFromExistingCsv)
{
    const auto dir = temp_dir ("compare");
    const auto csv = dir / "runs.csv";
    const std::vector<Instance> inst{{"small", fixtures::ascii_map ({"...1", "....", "S..2"}, 2), "<> l1 && <> l2", "test", 0}};
    CompareConfig cfg;
    cfg.trials = 2;
    cfg.max_iters = 50000;
    cfg.workers = 1;
    const auto first = compare (inst, cfg, csv);
    ASSERT_EQ (first.size (), 6u);
    const std::size_t lines = line_count (csv);
    EXPECT_EQ (lines, 7u);
    const auto second = compare (inst, cfg, csv);
    EXPECT_EQ (line_count (csv), lines);
    for (std::size_t i = 0; i < first.size (); ++i)
        EXPECT_EQ (to_csv_row (first[i]), to_csv_row (second[i]));
    for (const auto &r : first)
        EXPECT_FALSE (r.timeout) << to_csv_row (r);
    EXPECT_EQ (read_csv (csv).size (), 6u);
    std::filesystem::remove_all (dir);
}

TEST (Bench, SummaryColumnsAndReferenceRows)
{
    std::vector<BenchRecord> rows{{"a", Strategy::Uniform, 0, 0.5, 100, 90, 1.0, false},
                                  {"a", Strategy::Biased, 0, 0.1, 10, 9, 1.2, false},
                                  {"b", Strategy::Uniform, 0, 60.0, 50000, 40000, std::nullopt, true},
                                  {"b", Strategy::Biased, 0, 2.0, 300, 200, 2.0, false}};
    CompareConfig cfg;
    const std::string s = summarize (rows, cfg);
    std::istringstream in (s);
    std::string line;
    std::getline (in, line);
    EXPECT_EQ (line, "class,strategy,T,n,len,m,timeouts");
    while (std::getline (in, line))
        EXPECT_EQ (count (line, ","), 6) << line;
    EXPECT_NE (s.find ("simple,uniform,0.5,100,1,90,0"), std::string::npos) << s;
    EXPECT_NE (s.find ("complex,uniform,60,50000,,40000,1"), std::string::npos) << s;
    EXPECT_NE (s.find ("reference_simple,guided,0.09518,22.8941,0.90546,48.1395"), std::string::npos);
    EXPECT_NE (s.find ("reference_complex,biased,15.5639,321.553,1.08553,704.082"), std::string::npos);
}

TEST (Bench, MedianCountsTimeoutsAtTheBudget)
{
    std::vector<BenchRecord> rows{{"a", Strategy::Biased, 0, 0, 10, 0, 1.0, false},
                                  {"b", Strategy::Biased, 0, 0, 30, 0, 1.0, false},
                                  {"c", Strategy::Biased, 0, 0, 700, 0, std::nullopt, true},
                                  {"d", Strategy::Biased, 0, 0, 20, 0, 1.0, false}};
    EXPECT_DOUBLE_EQ (median_iterations (rows, Strategy::Biased, 1000), 25.0);
    rows.pop_back ();
    EXPECT_DOUBLE_EQ (median_iterations (rows, Strategy::Biased, 1000), 30.0);
    EXPECT_DOUBLE_EQ (median_iterations (rows, Strategy::Guided, 1000), 0.0);
}

TEST (Bench, RenderDrawsRegionsHeatAndPlan)
{
    const GridWorkspace w = fixtures::ascii_map ({"11..", "....", "#..2", "S..."}, 2);
    std::vector<float> heat (16, 0.0f);
    heat[0] = 0.5f;
    heat[1] = 0.5f;  // one run
    heat[6] = 1.0f;  // another run
    heat[15] = 0.2f; // third run
    Plan p;
    p.prefix = {{{0.1, 0.1}, 0, {}}, {{0.6, 0.6}, 1, {}}, {{0.9, 0.4}, 2, {}}};
    p.suffix = {{{0.9, 0.4}, 2, {}}, {{0.7, 0.3}, 2, {}}};
    RenderInput in;
    in.workspace = &w;
    in.plan = &p;
    in.heatmap = &heat;
    in.scale = 2;
    const std::string svg = render_svg (in);
    EXPECT_EQ (svg.rfind ("<svg", 0), 0u);
    EXPECT_NE (svg.find ("width=\"8\" height=\"8\""), std::string::npos);
    EXPECT_NE (svg.find (">l1</text>"), std::string::npos);
    EXPECT_NE (svg.find (">l2</text>"), std::string::npos);

    const auto heat_begin = svg.find ("<g id=\"heatmap\"");
    ASSERT_NE (heat_begin, std::string::npos);
    const std::string heat_group = svg.substr (heat_begin, svg.find ("</g>", heat_begin) - heat_begin);
    EXPECT_EQ (count (heat_group, "<rect"), 3);

    const std::regex points ("id=\"(prefix|suffix)\"[^>]*points=\"([^\"]*)\"");
    std::map<std::string, long> vertices;
    for (auto it = std::sregex_iterator (svg.begin (), svg.end (), points); it != std::sregex_iterator (); ++it)
        vertices[(*it)[1]] = count ((*it)[2], ",");
    EXPECT_EQ (vertices["prefix"], 3);
    EXPECT_EQ (vertices["suffix"], 2);

    std::vector<float> wrong (3, 0.0f);
    in.heatmap = &wrong;
    EXPECT_THROW (render_svg (in), Error);
}
