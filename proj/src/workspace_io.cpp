#include "nngtl/workspace.hpp"

#include <json.hpp>

namespace nngtl
{
    std::string workspace_to_json (const GridWorkspace &w)
    {
        nlohmann::ordered_json j;
        j["width"] = w.width ();
        j["height"] = w.height ();
        j["m"] = w.label_count ();
        j["init"] = {w.init ().x, w.init ().y};
        j["grid"] = std::vector<int> (w.cells ().begin (), w.cells ().end ());
        return j.dump ();
    }

    GridWorkspace workspace_from_json (std::string_view text)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse (text);
            const int width = j.at ("width").get<int> ();
            const int height = j.at ("height").get<int> ();
            const int m = j.at ("m").get<int> ();
            const auto init = j.at ("init").get<std::vector<double>> ();
            if (init.size () != 2)
                throw Error (ErrorCode::FormatError, "workspace JSON: init must have two coordinates");
            const auto raw = j.at ("grid").get<std::vector<int>> ();
            if (width <= 0 || height <= 0 || raw.size () != static_cast<std::size_t> (width) * static_cast<std::size_t> (height))
                throw Error (ErrorCode::FormatError, "workspace JSON: grid size does not match width * height");
            std::vector<CellCode> cells;
            cells.reserve (raw.size ());
            for (int v : raw)
            {
                if (v < 0 || v > 255)
                    throw Error (ErrorCode::FormatError, "workspace JSON: cell code out of range");
                cells.push_back (static_cast<CellCode> (v));
            }
            return GridWorkspace (width, height, m, std::move (cells), Point{init[0], init[1]});
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error (ErrorCode::FormatError, std::string ("workspace JSON: ") + e.what ());
        }
    }

} // namespace nngtl
