#pragma once
/**
 * @file  prediction.hpp
 * @brief State-probability vector and path heatmap consumed by guided sampling,
 *        their file formats, and a deterministic oracle that produces them.
 *
 * Binary layout (little endian): "NNTL1", u32 n_states, u32 rows, u32 cols,
 * n_states f32 (p), rows * cols f32 (heatmap, row major).
 */

#include "nngtl/buchi.hpp"
#include "nngtl/workspace.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nngtl
{
    struct Prediction
    {
        std::vector<float> p;
        int rows = 0;
        int cols = 0;
        std::vector<float> heatmap; ///< row major, rows * cols

        [[nodiscard]] float heat (Cell c) const { return heatmap[static_cast<std::size_t> (c.row) * cols + c.col]; }
        friend bool operator== (const Prediction &, const Prediction &) = default;
    };

    /// Checks sizes against an NBA and a grid (DimensionMismatch) and that every
    /// value is finite in [0, 1] (FormatError).
    void validate (const Prediction &pred, int n_states, int rows, int cols);

    std::string prediction_to_json (const Prediction &pred);
    Prediction prediction_from_json (std::string_view text);
    std::string prediction_to_binary (const Prediction &pred);
    Prediction prediction_from_binary (std::string_view bytes);

    /// JSON when the extension is ".json", binary otherwise.
    void save_prediction (const Prediction &pred, const std::filesystem::path &file);
    /// Format detected from the leading bytes.
    Prediction load_prediction (const std::filesystem::path &file);

    struct OracleConfig
    {
        int candidates = 5;        ///< symbolic lassos realized per call
        double sigma_cells = 3.0;  ///< heatmap decay length
        float floor = 0.05f;       ///< p for states off the best lasso
        double lambda = 0.5;
    };

    struct OracleLasso
    {
        std::vector<int> prefix_states; ///< init ... accepting state
        std::vector<int> cycle_states;  ///< accepting state ... accepting state
        CellPath prefix_cells;
        CellPath cycle_cells;
        /// Cells the heatmap is centred on: every leg replaced by its line-of-sight
        /// smoothing (the taut path a continuous planner would follow).
        CellPath ridge;
        double cost = 0.0;
    };

    /// Candidate lassos in rank order with their realized costs (infinite when a
    /// leg is unreachable). `b` must be pruned.
    std::vector<OracleLasso> oracle_lassos (const GridWorkspace &w, const Nba &b, const DistanceTable &d, const OracleConfig &cfg = {});

    /// Throws NoFeasibleAccepting or NoRealizableRun.
    Prediction oracle_predict (const GridWorkspace &w, const Nba &b, const DistanceTable &d, const OracleConfig &cfg = {});

} // namespace nngtl
