#include "fixtures.hpp"

#include "nngtl/encodings.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace nngtl;

namespace
{
    std::string slurp (const std::filesystem::path &p)
    {
        std::ifstream in (p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf ();
        return s.str ();
    }

    PlanVertex at (double x, double y, int q) { return {{x, y}, q, Symbol{0}}; }
} // namespace

TEST (Encodings, WorkspaceTensorChannels)
{
    const GridWorkspace w = fixtures::ascii_map ({"1.#", "S#2", "..2"}, 2);
    const WorkspaceTensor t = encode_workspace (w);
    ASSERT_EQ (t.channels, 3);
    ASSERT_EQ (t.rows, 3);
    ASSERT_EQ (t.cols, 3);
    ASSERT_EQ (t.data.size (), 27u);
    const Cell init = w.cell_of (w.init ());
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col)
        {
            const Cell c{col, row};
            const float expect0 = c == init ? -1.0f : (w.is_obstacle (c) ? 1.0f : 0.0f);
            EXPECT_EQ (t.at (0, row, col), expect0);
            for (int l = 1; l <= 2; ++l)
                EXPECT_EQ (t.at (l, row, col), w.code (c) == region_code (l) ? 1.0f : 0.0f);
        }
    // region channels partition the labelled cells
    float sum = 0;
    for (int ch = 1; ch < 3; ++ch)
        for (int i = 0; i < 9; ++i)
            sum += t.data[static_cast<std::size_t> (ch * 9 + i)];
    EXPECT_EQ (sum, 3.0f);
}

TEST (Encodings, TensorBinaryRoundTrip)
{
    const WorkspaceTensor t = encode_workspace (generate_random_workspace (3, {}));
    const EncodedArrays a = tensor_to_binary (t);
    EXPECT_EQ (a.bytes.size (), t.data.size () * 4);
    const auto meta = nlohmann::json::parse (a.meta);
    EXPECT_EQ (meta.at ("byte_order"), "little");
    EXPECT_EQ (meta.at ("arrays").at (0).at ("shape"), (std::vector<int>{t.channels, t.rows, t.cols}));
    EXPECT_EQ (tensor_from_binary (a.bytes, a.meta), t);
    EXPECT_THROW (tensor_from_binary (a.bytes.substr (1), a.meta), Error);
    EXPECT_THROW (tensor_from_binary (a.bytes, "{}"), Error);
    EXPECT_THROW (tensor_from_binary (a.bytes, "not json"), Error);
}

TEST (Encodings, AutomatonGraphOfDrawnCaseStudy)
{
    const Nba b = prune_infeasible (fixtures::drawn_case_study_nba (), 3);
    const HeteroGraph g = encode_nba (b, compute_rho (b), 3);
    ASSERT_EQ (g.state_count (), 5);
    ASSERT_EQ (g.edge_nodes.size (), b.edges.size ()); // every guard is a single conjunction
    EXPECT_EQ (g.node_count (), 5 + 11 + 1);

    EXPECT_EQ (g.state_features[0][0], 1.0f);
    EXPECT_EQ (g.state_features[0][1], 0.0f);
    EXPECT_EQ (g.state_features[4][1], 1.0f);
    for (int q = 1; q < 5; ++q)
        EXPECT_EQ (g.state_features[static_cast<std::size_t> (q)][0], 0.0f);
    // steps to state 4 after pruning: 3, 2, 2, 1, 0; scaled by the largest
    EXPECT_FLOAT_EQ (g.state_features[0][2], 1.0f);
    EXPECT_FLOAT_EQ (g.state_features[1][2], 2.0f / 3.0f);
    EXPECT_FLOAT_EQ (g.state_features[3][2], 1.0f / 3.0f);
    EXPECT_FLOAT_EQ (g.state_features[4][2], 0.0f);

    for (const auto &e : g.edge_nodes)
    {
        ASSERT_EQ (e.features.size (), 3u);
        const Guard &guard = b.edges[static_cast<std::size_t> (e.edge)].guard;
        if (e.src == 0 && e.dst == 1)
            EXPECT_EQ (e.features, (std::vector<float>{-1, 0, 1}));
        if (guard.is_true ())
            EXPECT_EQ (e.features, (std::vector<float>{0, 0, 0}));
    }

    const int pool = g.pooling_node ();
    EXPECT_EQ (g.links.size (), 2 * 11 + 16 + 16u);
    for (int v = 0; v < pool; ++v)
    {
        EXPECT_NE (std::find (g.links.begin (), g.links.end (), std::pair{v, v}), g.links.end ());
        EXPECT_NE (std::find (g.links.begin (), g.links.end (), std::pair{v, pool}), g.links.end ());
    }
    EXPECT_EQ (std::find (g.links.begin (), g.links.end (), std::pair{pool, pool}), g.links.end ());
    for (std::size_t i = 0; i < g.edge_nodes.size (); ++i)
    {
        const int node = 5 + static_cast<int> (i);
        EXPECT_NE (std::find (g.links.begin (), g.links.end (), std::pair{g.edge_nodes[i].src, node}), g.links.end ());
        EXPECT_NE (std::find (g.links.begin (), g.links.end (), std::pair{node, g.edge_nodes[i].dst}), g.links.end ());
    }

    const auto j = nlohmann::json::parse (graph_to_json (g));
    EXPECT_EQ (j.at ("node_count"), 17);
    EXPECT_EQ (j.at ("links").size (), g.links.size ());
}

TEST (Encodings, DisjunctiveGuardsSplitIntoEdgeNodes)
{
    Nba b;
    b.state_count = 1;
    b.accepting = {true};
    b.edges = {{0, parse_guard ("l1 || l2"), 0}};
    const HeteroGraph g = encode_nba (b, compute_rho (b), 2);
    ASSERT_EQ (g.edge_nodes.size (), 2u);
    EXPECT_EQ (g.edge_nodes[0].edge, 0);
    EXPECT_EQ (g.edge_nodes[1].edge, 0);
    EXPECT_THROW (encode_nba (b, compute_rho (b), 1), Error);
}

TEST (Encodings, ExpertBandIsThreeCellsThick)
{
    const GridWorkspace w = GridWorkspace::empty (20, 20, 1, {0.225, 0.525});
    Plan p;
    p.prefix = {at (0.225, 0.525, 0), at (0.475, 0.525, 2), at (0.775, 0.525, 4)};
    p.suffix = {at (0.775, 0.525, 4), at (0.625, 0.525, 3)};
    const ExpertLabels l = encode_expert (p, w, 5);
    ASSERT_EQ (l.rows, 20);
    ASSERT_EQ (l.cols, 20);
    long marked = 0;
    for (int row = 0; row < 20; ++row)
        for (int col = 0; col < 20; ++col)
        {
            const bool expect = row >= 9 && row <= 11 && col >= 3 && col <= 16;
            EXPECT_EQ (l.path_mask[static_cast<std::size_t> (row * 20 + col)], expect ? 1 : 0) << col << "," << row;
            marked += l.path_mask[static_cast<std::size_t> (row * 20 + col)];
        }
    EXPECT_EQ (marked, 42);
    EXPECT_EQ (l.state_mask, (std::vector<std::int32_t>{1, 0, 1, 1, 1}));
    EXPECT_THROW (encode_expert (p, w, 3), Error);

    const EncodedArrays a = labels_to_binary (l);
    EXPECT_EQ (a.bytes.size (), (400u + 5u) * 4u);
    const ExpertLabels back = labels_from_binary (a.bytes, a.meta);
    EXPECT_EQ (back.path_mask, l.path_mask);
    EXPECT_EQ (back.state_mask, l.state_mask);
}

TEST (Encodings, ExportWritesDatasetAndSkipsUnsatisfiable)
{
    const auto dir = std::filesystem::temp_directory_path () / ("nngtl_dataset_" + std::to_string (::getpid ()));
    std::filesystem::remove_all (dir);
    const GridWorkspace w = fixtures::ascii_map ({"....11....", "..........", "..##......", "..##...2..", "S........."}, 2);
    const std::vector<Instance> instances{{"reach", w, "<> l1 && <> l2", "test", 1}, {"clash", w, "<> (l1 && l2)", "test", 2}};
    ExpertConfig cfg;
    cfg.iterations = 3000;
    cfg.workers = 1;
    const auto entries = export_dataset (instances, dir, cfg);
    ASSERT_EQ (entries.size (), 2u);
    EXPECT_FALSE (entries[0].skipped);
    EXPECT_GT (entries[0].cost, 0.0);
    EXPECT_TRUE (entries[1].skipped);
    EXPECT_EQ (entries[1].reason, "Unsatisfiable");

    for (const char *f : {"workspace.json", "formula.txt", "nba.json", "tensor.bin", "tensor.meta.json", "graph.json", "labels.bin", "labels.meta.json"})
        EXPECT_TRUE (std::filesystem::exists (dir / "reach" / f)) << f;
    EXPECT_FALSE (std::filesystem::exists (dir / "clash" / "labels.bin"));

    EXPECT_EQ (tensor_from_binary (slurp (dir / "reach" / "tensor.bin"), slurp (dir / "reach" / "tensor.meta.json")), encode_workspace (w));
    const ExpertLabels l = labels_from_binary (slurp (dir / "reach" / "labels.bin"), slurp (dir / "reach" / "labels.meta.json"));
    const Nba stored = nba_from_json (slurp (dir / "reach" / "nba.json"));
    EXPECT_EQ (l.state_mask.size (), static_cast<std::size_t> (stored.state_count));
    EXPECT_EQ (l.state_mask[static_cast<std::size_t> (stored.init)], 1);

    const auto manifest = nlohmann::json::parse (slurp (dir / "manifest.json"));
    EXPECT_EQ (manifest.at ("expert").at ("strategy"), "biased");
    EXPECT_EQ (manifest.at ("instances").size (), 2u);
    EXPECT_EQ (manifest.at ("instances").at (1).at ("reason"), "Unsatisfiable");
    std::filesystem::remove_all (dir);
}
