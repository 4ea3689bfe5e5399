#pragma once
// Shared fixtures and independent reference implementations for the unit tests.

#include "nngtl/buchi.hpp"
#include "nngtl/core.hpp"
#include "nngtl/ltl.hpp"
#include "nngtl/workspace.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

namespace fixtures
{
    using namespace nngtl;

    /// The five-state automaton drawn for "[]<> l1 && (!l1 U l2) && <> l3",
    /// transcribed edge by edge (state 4 accepting).
    inline Nba drawn_case_study_nba ()
    {
        Nba b;
        b.state_count = 5;
        b.init = 0;
        b.accepting = {false, false, false, false, true};
        auto e = [&] (int s, const char *g, int d) { b.edges.push_back ({s, parse_guard (g), d}); };
        e (0, "!l1", 0);
        e (0, "!l1 && l3", 1);
        e (0, "l2", 2);
        e (0, "l2 && l3", 3);
        e (1, "!l1", 1);
        e (1, "l2", 3);
        e (2, "true", 2);
        e (2, "l3", 3);
        e (3, "true", 3);
        e (3, "l1", 4);
        e (4, "l1", 4);
        e (4, "true", 3);
        return b;
    }

    /// Floyd-Warshall on hop counts with an infinite initial diagonal, so d[i][i]
    /// ends up as the shortest nonempty cycle through i.
    inline std::vector<int> floyd_warshall (const Nba &b)
    {
        const int n = b.state_count;
        const long inf = std::numeric_limits<int>::max ();
        std::vector<long> d (static_cast<std::size_t> (n * n), inf);
        for (const auto &e : b.edges)
            if (!e.guard.is_false ())
                d[static_cast<std::size_t> (e.src * n + e.dst)] = 1;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                {
                    const long a = d[static_cast<std::size_t> (i * n + k)], c = d[static_cast<std::size_t> (k * n + j)];
                    if (a != inf && c != inf)
                        d[static_cast<std::size_t> (i * n + j)] = std::min (d[static_cast<std::size_t> (i * n + j)], a + c);
                }
        return {d.begin (), d.end ()};
    }

    /// Lasso acceptance via boolean relations over one pass of the cycle:
    /// R(s,t) iff reading the cycle moves s to t, A(s,t) iff some such run meets an
    /// accepting state. Accepted iff a state reachable after prefix . cycle^k is in a
    /// strongly connected loop of R that uses an A step.
    inline bool lasso_accepted_by_relations (const Nba &b, const Word &prefix, const Word &cycle)
    {
        const int n = b.state_count;
        auto step = [&] (int q, Symbol s) {
            std::vector<int> out;
            for (const auto &e : b.edges)
                if (e.src == q && e.guard.satisfied_by (s))
                    out.push_back (e.dst);
            return out;
        };
        std::vector<char> cur (static_cast<std::size_t> (n), 0);
        cur[static_cast<std::size_t> (b.init)] = 1;
        for (Symbol s : prefix)
        {
            std::vector<char> nxt (static_cast<std::size_t> (n), 0);
            for (int q = 0; q < n; ++q)
                if (cur[static_cast<std::size_t> (q)])
                    for (int t : step (q, s))
                        nxt[static_cast<std::size_t> (t)] = 1;
            cur = nxt;
        }
        // R and A from every start state: track (state, seen-accepting) pairs
        std::vector<char> R (static_cast<std::size_t> (n * n), 0), A (static_cast<std::size_t> (n * n), 0);
        for (int s0 = 0; s0 < n; ++s0)
        {
            std::vector<char> plain (static_cast<std::size_t> (n), 0), acc (static_cast<std::size_t> (n), 0);
            (b.is_accepting (s0) ? acc : plain)[static_cast<std::size_t> (s0)] = 1;
            for (Symbol s : cycle)
            {
                std::vector<char> np (static_cast<std::size_t> (n), 0), na (static_cast<std::size_t> (n), 0);
                for (int q = 0; q < n; ++q)
                    for (int t : step (q, s))
                    {
                        const bool ta = b.is_accepting (t);
                        if (acc[static_cast<std::size_t> (q)] || ta)
                            na[static_cast<std::size_t> (t)] |= plain[static_cast<std::size_t> (q)] | acc[static_cast<std::size_t> (q)];
                        else
                            np[static_cast<std::size_t> (t)] |= plain[static_cast<std::size_t> (q)];
                    }
                plain = np;
                acc = na;
            }
            for (int t = 0; t < n; ++t)
            {
                R[static_cast<std::size_t> (s0 * n + t)] = plain[static_cast<std::size_t> (t)] || acc[static_cast<std::size_t> (t)];
                A[static_cast<std::size_t> (s0 * n + t)] = acc[static_cast<std::size_t> (t)];
            }
        }
        // transitive closure of R, and of "R* A R*"
        std::vector<char> C = R;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (C[static_cast<std::size_t> (i * n + k)] && C[static_cast<std::size_t> (k * n + j)])
                        C[static_cast<std::size_t> (i * n + j)] = 1;
        auto reach_or_self = [&] (int i, int j) { return i == j || C[static_cast<std::size_t> (i * n + j)]; };
        // states at cycle boundaries reachable from the prefix end
        std::vector<char> start (static_cast<std::size_t> (n), 0);
        for (int q = 0; q < n; ++q)
            if (cur[static_cast<std::size_t> (q)])
                for (int t = 0; t < n; ++t)
                    if (reach_or_self (q, t))
                        start[static_cast<std::size_t> (t)] = 1;
        for (int s = 0; s < n; ++s)
            if (start[static_cast<std::size_t> (s)])
                for (int u = 0; u < n; ++u)
                    for (int v = 0; v < n; ++v)
                        if (A[static_cast<std::size_t> (u * n + v)] && reach_or_self (s, u) && reach_or_self (v, s))
                            return true;
        return false;
    }

    /// Every word of length `len` over letters 0..labels.
    inline void for_each_word (int len, int labels, const std::function<void (const Word &)> &f)
    {
        Word w (static_cast<std::size_t> (len));
        std::function<void (int)> rec = [&] (int i) {
            if (i == len)
            {
                f (w);
                return;
            }
            for (int s = 0; s <= labels; ++s)
            {
                w[static_cast<std::size_t> (i)] = Symbol{s};
                rec (i + 1);
            }
        };
        rec (0);
    }

    /// Every lasso (prefix, nonempty cycle) with |prefix| + |cycle| <= max_total.
    inline void for_each_lasso (int max_total, int labels, const std::function<void (const Word &, const Word &)> &f)
    {
        for (int total = 1; total <= max_total; ++total)
            for (int c = 1; c <= total; ++c)
                for_each_word (total - c, labels, [&] (const Word &p) { for_each_word (c, labels, [&] (const Word &cy) { f (p, cy); }); });
    }

    /// Random formula over labels 1..aps with nesting depth at most `depth`.
    inline Formula random_formula (Rng &rng, int aps, int depth)
    {
        if (depth == 0 || rng.bernoulli (0.25))
            return rng.bernoulli (0.1) ? Formula::truth () : Formula::ap (rng.between (1, aps));
        switch (rng.below (7))
        {
        case 0: return Formula::negation (random_formula (rng, aps, depth - 1));
        case 1: return Formula::conjunction (random_formula (rng, aps, depth - 1), random_formula (rng, aps, depth - 1));
        case 2: return Formula::disjunction (random_formula (rng, aps, depth - 1), random_formula (rng, aps, depth - 1));
        case 3: return Formula::until (random_formula (rng, aps, depth - 1), random_formula (rng, aps, depth - 1));
        case 4: return Formula::eventually (random_formula (rng, aps, depth - 1));
        case 5: return Formula::always (random_formula (rng, aps, depth - 1));
        default: return Formula::negation (Formula::until (random_formula (rng, aps, depth - 1), random_formula (rng, aps, depth - 1)));
        }
    }

    /// Random automaton with up to `max_states` states and `max_edges` edges
    /// carrying literal or true guards.
    inline Nba random_nba (Rng &rng, int max_states, int max_edges, int labels)
    {
        Nba b;
        b.state_count = rng.between (1, max_states);
        b.init = rng.between (0, b.state_count - 1);
        b.accepting.resize (static_cast<std::size_t> (b.state_count));
        for (int q = 0; q < b.state_count; ++q)
            b.accepting[static_cast<std::size_t> (q)] = rng.bernoulli (0.3);
        const int edges = rng.between (0, max_edges);
        for (int k = 0; k < edges; ++k)
        {
            Guard g = rng.bernoulli (0.3) ? Guard::truth () : Guard::literal (rng.between (1, labels), rng.bernoulli (0.6));
            b.edges.push_back ({rng.between (0, b.state_count - 1), g, rng.between (0, b.state_count - 1)});
        }
        return b;
    }

    /// Map from ASCII rows listed top (high y) to bottom: '.' free, '#' obstacle,
    /// '1'..'9' regions. Init at the centre of the cell marked 'S' (free).
    inline GridWorkspace ascii_map (const std::vector<std::string> &rows, int labels)
    {
        const int h = static_cast<int> (rows.size ());
        const int w = static_cast<int> (rows.front ().size ());
        std::vector<CellCode> cells (static_cast<std::size_t> (w * h), kFreeCode);
        Point init{0.5 / w, 0.5 / h};
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
            {
                const char ch = rows[static_cast<std::size_t> (h - 1 - r)][static_cast<std::size_t> (c)];
                CellCode v = kFreeCode;
                if (ch == '#')
                    v = kObstacleCode;
                else if (ch >= '1' && ch <= '9')
                    v = region_code (ch - '0');
                else if (ch == 'S')
                    init = {(c + 0.5) / w, (r + 0.5) / h};
                cells[static_cast<std::size_t> (r * w + c)] = v;
            }
        return GridWorkspace (w, h, labels, std::move (cells), init);
    }

    /// Independent BFS on 4-neighbours (no predecessor tie-breaking concerns):
    /// hop distance from `start` to every cell, -1 when unreachable.
    inline std::vector<int> bfs_hops (const GridWorkspace &w, Cell start, const std::function<bool (Cell)> &passable)
    {
        std::vector<int> d (static_cast<std::size_t> (w.width () * w.height ()), -1);
        std::deque<Cell> q{start};
        d[w.index (start)] = 0;
        while (!q.empty ())
        {
            const Cell c = q.front ();
            q.pop_front ();
            const Cell nb[4] = {{c.col + 1, c.row}, {c.col - 1, c.row}, {c.col, c.row + 1}, {c.col, c.row - 1}};
            for (Cell n : nb)
                if (w.in_bounds (n) && d[w.index (n)] < 0 && !w.is_obstacle (n) && passable (n))
                {
                    d[w.index (n)] = d[w.index (c)] + 1;
                    q.push_back (n);
                }
        }
        return d;
    }

} // namespace fixtures
