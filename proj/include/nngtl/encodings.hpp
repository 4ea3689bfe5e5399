#pragma once
/**
 * @file  encodings.hpp
 * @brief Network inputs (workspace tensor, automaton graph), training targets from
 *        an expert plan, and the on-disk dataset consumed by the trainer.
 *
 * Dataset layout, one directory per instance:
 *
 *     <id>/workspace.json   <id>/nba.json (pruned automaton)   <id>/formula.txt
 *     <id>/tensor.bin       <id>/tensor.meta.json
 *     <id>/graph.json
 *     <id>/labels.bin       <id>/labels.meta.json
 *     manifest.json
 *
 * Binary arrays are little endian. A sidecar lists each array as
 * {"name", "dtype" ("float32" | "int32"), "shape", "offset" (bytes)}.
 */

#include "nngtl/bench.hpp"
#include "nngtl/buchi.hpp"
#include "nngtl/planner.hpp"
#include "nngtl/workspace.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nngtl
{
    /// (m + 1) x rows x cols, channel major then row major. Channel 0: -1 at the init
    /// cell, 1 on obstacles, 0 elsewhere. Channel i: 1 on region i.
    struct WorkspaceTensor
    {
        int channels = 0;
        int rows = 0;
        int cols = 0;
        std::vector<float> data;

        [[nodiscard]] float at (int ch, int row, int col) const
        {
            return data[(static_cast<std::size_t> (ch) * rows + row) * cols + col];
        }
        friend bool operator== (const WorkspaceTensor &, const WorkspaceTensor &) = default;
    };

    WorkspaceTensor encode_workspace (const GridWorkspace &w);

    /// Node order: automaton states, then one edge node per DNF disjunct of each
    /// edge (in edge order), then the pooling node.
    struct HeteroGraph
    {
        /// [initial, feasible accepting, normalized distance to the nearest
        /// feasible accepting state (1 when none is reachable)]
        std::vector<std::array<float, 3>> state_features;

        struct EdgeNode
        {
            int src = 0;
            int dst = 0;
            int edge = 0; ///< index into the automaton's edge list
            std::vector<float> features; ///< +1 l_i, -1 !l_i, 0 absent; length m
        };
        std::vector<EdgeNode> edge_nodes;

        /// Directed links: src -> edge node -> dst, a self-loop on every state and
        /// edge node, every other node -> pooling node.
        std::vector<std::pair<int, int>> links;

        [[nodiscard]] int state_count () const noexcept { return static_cast<int> (state_features.size ()); }
        [[nodiscard]] int node_count () const noexcept { return state_count () + static_cast<int> (edge_nodes.size ()) + 1; }
        [[nodiscard]] int pooling_node () const noexcept { return node_count () - 1; }
    };

    /// `b` must be pruned; `label_count` fixes the edge-feature length.
    HeteroGraph encode_nba (const Nba &b, const DistanceTable &d, int label_count);

    std::string graph_to_json (const HeteroGraph &g);

    struct ExpertLabels
    {
        int rows = 0;
        int cols = 0;
        std::vector<std::int32_t> path_mask;  ///< rows * cols
        std::vector<std::int32_t> state_mask; ///< one entry per automaton state
    };

    /// Cells touched by any plan edge (prefix, cycle and closing edge) and their
    /// 8-neighbours; states occurring anywhere along the plan.
    ExpertLabels encode_expert (const Plan &plan, const GridWorkspace &w, int state_count);

    /// Binary payload plus its JSON sidecar.
    struct EncodedArrays
    {
        std::string bytes;
        std::string meta;
    };
    EncodedArrays tensor_to_binary (const WorkspaceTensor &t);
    WorkspaceTensor tensor_from_binary (const std::string &bytes, const std::string &meta);
    EncodedArrays labels_to_binary (const ExpertLabels &l);
    ExpertLabels labels_from_binary (const std::string &bytes, const std::string &meta);

    struct ExpertConfig
    {
        long iterations = 10000;
        std::uint64_t seed = 0;
        /// Keep refining after the first feasible plan.
        bool refine = true;
        double lambda = 0.5;
        int workers = 0; ///< 0: NNGTL_WORKERS, else hardware concurrency
    };

    struct ManifestEntry
    {
        std::string id;
        std::uint64_t seed = 0;
        bool skipped = false;
        std::string reason; ///< error code name when skipped
        double cost = 0.0;
    };

    /// Encodes every instance, planning an expert run with the biased strategy.
    /// Instances without a plan are recorded as skipped. Writes manifest.json.
    std::vector<ManifestEntry> export_dataset (const std::vector<Instance> &instances, const std::filesystem::path &out_dir, const ExpertConfig &cfg = {});

} // namespace nngtl
