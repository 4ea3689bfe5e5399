#include "nngtl/tree.hpp"

#include <algorithm>

namespace nngtl
{
    ProductTree::ProductTree (Point root, Symbol root_symbol, int q_root, int state_count)
        : by_state_ (static_cast<std::size_t> (state_count))
    {
        if (q_root < 0 || q_root >= state_count)
            throw Error (ErrorCode::InvalidArgument, "root state out of range");
        const std::uint32_t p = add_point (root, root_symbol);
        add_vertex (p, q_root, -1, 0.0);
    }

    std::optional<int> ProductTree::find (std::uint32_t point, int q) const
    {
        for (int v : points_.at (point).vertices)
            if (vertices_[static_cast<std::size_t> (v)].q == q)
                return v;
        return std::nullopt;
    }

    std::uint32_t ProductTree::add_point (Point x, Symbol s)
    {
        const std::uint32_t id = index_.insert (x);
        points_.push_back ({x, s, {}});
        return id;
    }

    int ProductTree::add_vertex (std::uint32_t point, int q, int parent, double cost)
    {
        const int id = static_cast<int> (vertices_.size ());
        vertices_.push_back ({point, q, parent, cost, {}});
        points_.at (point).vertices.push_back (id);
        by_state_.at (static_cast<std::size_t> (q)).push_back (id);
        if (parent >= 0)
            vertices_[static_cast<std::size_t> (parent)].children.push_back (id);
        return id;
    }

    bool ProductTree::is_ancestor (int ancestor, int v) const
    {
        for (int u = v; u >= 0; u = vertices_[static_cast<std::size_t> (u)].parent)
            if (u == ancestor)
                return true;
        return false;
    }

    void ProductTree::reparent (int v, int new_parent)
    {
        if (is_ancestor (v, new_parent))
            throw Error (ErrorCode::InvalidArgument, "reparent would create a cycle");
        auto &node = vertices_.at (static_cast<std::size_t> (v));
        if (node.parent >= 0)
        {
            auto &siblings = vertices_[static_cast<std::size_t> (node.parent)].children;
            siblings.erase (std::find (siblings.begin (), siblings.end (), v));
        }
        node.parent = new_parent;
        vertices_[static_cast<std::size_t> (new_parent)].children.push_back (v);

        std::vector<int> stack{v};
        while (!stack.empty ())
        {
            const int u = stack.back ();
            stack.pop_back ();
            auto &un = vertices_[static_cast<std::size_t> (u)];
            const auto &pn = vertices_[static_cast<std::size_t> (un.parent)];
            un.cost = pn.cost + distance (points_[pn.point].x, points_[un.point].x);
            stack.insert (stack.end (), un.children.begin (), un.children.end ());
        }
    }

    std::vector<int> ProductTree::path_to (int v) const
    {
        std::vector<int> path;
        for (int u = v; u >= 0; u = vertices_.at (static_cast<std::size_t> (u)).parent)
            path.push_back (u);
        std::reverse (path.begin (), path.end ());
        return path;
    }

} // namespace nngtl
