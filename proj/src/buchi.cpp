#include "nngtl/buchi.hpp"
#include "nngtl/ltl.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

namespace nngtl
{
    // ───────── Guard ─────────

    namespace
    {
        bool normalize_conjunct (Conjunct &c)
        {
            std::sort (c.begin (), c.end ());
            c.erase (std::unique (c.begin (), c.end ()), c.end ());
            for (std::size_t i = 1; i < c.size (); ++i)
                if (c[i].label == c[i - 1].label)
                    return false; // l and !l
            return true;
        }
    } // namespace

    Guard::Guard (std::vector<Conjunct> disjuncts)
    {
        std::vector<Conjunct> kept;
        for (auto &c : disjuncts)
            if (normalize_conjunct (c))
                kept.push_back (std::move (c));
        std::sort (kept.begin (), kept.end (), [] (const Conjunct &a, const Conjunct &b) {
            return a.size () != b.size () ? a.size () < b.size () : a < b;
        });
        kept.erase (std::unique (kept.begin (), kept.end ()), kept.end ());
        // absorption: drop any disjunct implied by a smaller one
        for (const auto &c : kept)
        {
            const bool absorbed = std::any_of (disjuncts_.begin (), disjuncts_.end (), [&] (const Conjunct &smaller) {
                return std::includes (c.begin (), c.end (), smaller.begin (), smaller.end ());
            });
            if (!absorbed)
                disjuncts_.push_back (c);
        }
        std::sort (disjuncts_.begin (), disjuncts_.end ());
    }

    bool conjunct_satisfied_by (const Conjunct &c, Symbol s) noexcept
    {
        for (const Literal &l : c)
        {
            const bool holds = s.label == l.label;
            if (holds != l.positive)
                return false;
        }
        return true;
    }

    bool Guard::satisfied_by (Symbol s) const noexcept
    {
        return std::any_of (disjuncts_.begin (), disjuncts_.end (), [&] (const Conjunct &c) { return conjunct_satisfied_by (c, s); });
    }

    int Guard::max_label () const noexcept
    {
        int m = 0;
        for (const auto &c : disjuncts_)
            for (const auto &l : c)
                m = std::max (m, l.label);
        return m;
    }

    std::string Guard::to_string () const
    {
        if (is_false ())
            return "false";
        if (is_true ())
            return "true";
        std::string out;
        for (std::size_t i = 0; i < disjuncts_.size (); ++i)
        {
            if (i)
                out += " || ";
            const auto &c = disjuncts_[i];
            const bool paren = disjuncts_.size () > 1 && c.size () > 1;
            if (paren)
                out += "(";
            for (std::size_t j = 0; j < c.size (); ++j)
            {
                if (j)
                    out += " && ";
                out += (c[j].positive ? "l" : "!l") + std::to_string (c[j].label);
            }
            if (paren)
                out += ")";
        }
        return out;
    }

    Guard operator|| (const Guard &a, const Guard &b)
    {
        std::vector<Conjunct> all = a.disjuncts_;
        all.insert (all.end (), b.disjuncts_.begin (), b.disjuncts_.end ());
        return Guard (std::move (all));
    }

    Guard operator&& (const Guard &a, const Guard &b)
    {
        std::vector<Conjunct> all;
        for (const auto &x : a.disjuncts_)
            for (const auto &y : b.disjuncts_)
            {
                Conjunct c = x;
                c.insert (c.end (), y.begin (), y.end ());
                all.push_back (std::move (c));
            }
        return Guard (std::move (all));
    }

    namespace
    {
        Guard to_dnf (const Formula &f, bool negated)
        {
            switch (f.op ())
            {
            case LtlOp::True: return negated ? Guard () : Guard::truth ();
            case LtlOp::Ap: return Guard::literal (f.label (), !negated);
            case LtlOp::Not: return to_dnf (f.lhs (), !negated);
            case LtlOp::And:
                return negated ? (to_dnf (f.lhs (), true) || to_dnf (f.rhs (), true)) : (to_dnf (f.lhs (), false) && to_dnf (f.rhs (), false));
            default: throw Error (ErrorCode::InvalidArgument, "temporal operator in a transition guard");
            }
        }
    } // namespace

    Guard parse_guard (std::string_view text)
    {
        return to_dnf (parse_ltl (text), false);
    }

    // ───────── Nba utilities ─────────

    int Nba::max_label () const noexcept
    {
        int m = 0;
        for (const auto &e : edges)
            m = std::max (m, e.guard.max_label ());
        return m;
    }

    void validate (const Nba &b)
    {
        if (b.state_count <= 0)
            throw Error (ErrorCode::InvalidArgument, "NBA has no states");
        if (b.init < 0 || b.init >= b.state_count)
            throw Error (ErrorCode::InvalidArgument, "NBA init out of range");
        if (b.accepting.size () != static_cast<std::size_t> (b.state_count))
            throw Error (ErrorCode::InvalidArgument, "NBA accepting vector size mismatch");
        for (const auto &e : b.edges)
            if (e.src < 0 || e.src >= b.state_count || e.dst < 0 || e.dst >= b.state_count)
                throw Error (ErrorCode::InvalidArgument, "NBA edge endpoint out of range");
    }

    Nba normalized (Nba b)
    {
        validate (b);
        std::map<std::pair<int, int>, Guard> merged;
        for (auto &e : b.edges)
        {
            auto [it, inserted] = merged.try_emplace ({e.src, e.dst}, e.guard);
            if (!inserted)
                it->second = it->second || e.guard;
        }
        b.edges.clear ();
        for (auto &[key, g] : merged)
            if (!g.is_false ())
                b.edges.push_back ({key.first, std::move (g), key.second});
        return b;
    }

    Nba remove_unreachable (const Nba &b)
    {
        validate (b);
        std::vector<std::vector<std::size_t>> out (static_cast<std::size_t> (b.state_count));
        for (std::size_t i = 0; i < b.edges.size (); ++i)
            if (!b.edges[i].guard.is_false ())
                out[static_cast<std::size_t> (b.edges[i].src)].push_back (i);

        std::vector<int> order (static_cast<std::size_t> (b.state_count), -1);
        std::vector<int> queue{b.init};
        order[static_cast<std::size_t> (b.init)] = 0;
        for (std::size_t head = 0; head < queue.size (); ++head)
        {
            std::vector<int> succ;
            for (std::size_t ei : out[static_cast<std::size_t> (queue[head])])
                succ.push_back (b.edges[ei].dst);
            std::sort (succ.begin (), succ.end ());
            for (int d : succ)
                if (order[static_cast<std::size_t> (d)] < 0)
                {
                    order[static_cast<std::size_t> (d)] = static_cast<int> (queue.size ());
                    queue.push_back (d);
                }
        }

        Nba r;
        r.state_count = static_cast<int> (queue.size ());
        r.init = 0;
        r.ap_names = b.ap_names;
        r.accepting.resize (queue.size ());
        for (std::size_t i = 0; i < queue.size (); ++i)
            r.accepting[i] = b.accepting[static_cast<std::size_t> (queue[i])];
        for (const auto &e : b.edges)
        {
            const int s = order[static_cast<std::size_t> (e.src)], d = order[static_cast<std::size_t> (e.dst)];
            if (s >= 0 && d >= 0 && !e.guard.is_false ())
                r.edges.push_back ({s, e.guard, d});
        }
        return normalized (std::move (r));
    }

    Nba reduce_bisimilar (const Nba &input)
    {
        const Nba b = normalized (input);
        const auto n = static_cast<std::size_t> (b.state_count);
        std::vector<int> cls (n);
        for (std::size_t q = 0; q < n; ++q)
            cls[q] = b.accepting[q] ? 1 : 0;

        using Signature = std::pair<int, std::vector<std::pair<int, Guard>>>;
        auto signature = [&] (std::size_t q) {
            std::map<int, Guard> by_class;
            for (const auto &e : b.edges)
                if (static_cast<std::size_t> (e.src) == q)
                {
                    auto [it, inserted] = by_class.try_emplace (cls[static_cast<std::size_t> (e.dst)], e.guard);
                    if (!inserted)
                        it->second = it->second || e.guard;
                }
            Signature s{cls[q], {}};
            for (auto &[c, g] : by_class)
                s.second.emplace_back (c, g);
            return s;
        };

        int count = -1;
        while (true)
        {
            std::map<Signature, int> ids;
            std::vector<int> next (n);
            for (std::size_t q = 0; q < n; ++q)
            {
                auto [it, inserted] = ids.try_emplace (signature (q), static_cast<int> (ids.size ()));
                next[q] = it->second;
            }
            // renumber classes by first occurrence so the init state keeps index 0
            std::vector<int> remap (ids.size (), -1);
            int fresh = 0;
            for (std::size_t q = 0; q < n; ++q)
            {
                if (remap[static_cast<std::size_t> (next[q])] < 0)
                    remap[static_cast<std::size_t> (next[q])] = fresh++;
                next[q] = remap[static_cast<std::size_t> (next[q])];
            }
            cls = std::move (next);
            if (fresh == count)
                break;
            count = fresh;
        }

        Nba r;
        r.state_count = count;
        r.init = cls[static_cast<std::size_t> (b.init)];
        r.ap_names = b.ap_names;
        r.accepting.assign (static_cast<std::size_t> (count), false);
        std::vector<bool> done (static_cast<std::size_t> (count), false);
        for (std::size_t q = 0; q < n; ++q)
        {
            const auto c = static_cast<std::size_t> (cls[q]);
            r.accepting[c] = b.accepting[q];
            if (done[c])
                continue;
            done[c] = true;
            for (const auto &e : b.edges)
                if (static_cast<std::size_t> (e.src) == q)
                    r.edges.push_back ({cls[q], e.guard, cls[static_cast<std::size_t> (e.dst)]});
        }
        return normalized (std::move (r));
    }

    std::optional<Symbol> guard_sat (const Guard &g, int label_count)
    {
        for (int s = 0; s <= label_count; ++s)
            if (g.satisfied_by (Symbol{s}))
                return Symbol{s};
        return std::nullopt;
    }

    Nba prune_infeasible (const Nba &b, int label_count)
    {
        validate (b);
        Nba r = b;
        r.edges.clear ();
        for (const auto &e : b.edges)
            if (guard_sat (e.guard, label_count))
                r.edges.push_back (e);
        return r;
    }

    DistanceTable compute_rho (const Nba &b)
    {
        validate (b);
        const auto n = static_cast<std::size_t> (b.state_count);
        std::vector<std::vector<int>> adj (n);
        for (const auto &e : b.edges)
            if (!e.guard.is_false ())
                adj[static_cast<std::size_t> (e.src)].push_back (e.dst);

        std::vector<int> d (n * n, DistanceTable::kInfinity);
        std::vector<int> queue;
        for (std::size_t s = 0; s < n; ++s)
        {
            int *row = &d[s * n];
            queue.clear ();
            // seed with the one-hop successors so the diagonal measures nonempty cycles
            for (int t : adj[s])
                if (row[t] == DistanceTable::kInfinity)
                {
                    row[t] = 1;
                    queue.push_back (t);
                }
            for (std::size_t head = 0; head < queue.size (); ++head)
            {
                const int u = queue[head];
                for (int v : adj[static_cast<std::size_t> (u)])
                    if (row[v] == DistanceTable::kInfinity)
                    {
                        row[v] = row[u] + 1;
                        queue.push_back (v);
                    }
            }
        }
        return DistanceTable (b.state_count, std::move (d));
    }

    std::vector<int> feasible_accepting (const Nba &b, const DistanceTable &d)
    {
        std::vector<int> out;
        for (int q = 0; q < b.state_count; ++q)
            if (b.is_accepting (q) && (q == b.init || d.reachable (b.init, q)) && d.reachable (q, q))
                out.push_back (q);
        if (out.empty ())
            throw Error (ErrorCode::NoFeasibleAccepting, "no accepting state is reachable and lies on a cycle");
        return out;
    }

    bool accepts_prefix_suffix (const Nba &b, const Word &prefix, const Word &suffix)
    {
        if (suffix.empty ())
            throw Error (ErrorCode::EmptySuffix, "suffix word must be nonempty");
        validate (b);
        Word word = prefix;
        word.insert (word.end (), suffix.begin (), suffix.end ());
        const std::size_t len = word.size ();
        const std::size_t loop = prefix.size ();
        const auto n = static_cast<std::size_t> (b.state_count);
        auto id = [&] (int q, std::size_t pos) { return static_cast<std::size_t> (q) * len + pos; };

        // product successors: (q, pos) --word[pos]--> (q', next(pos))
        std::vector<std::vector<std::size_t>> adj (n * len);
        for (const auto &e : b.edges)
            for (std::size_t pos = 0; pos < len; ++pos)
                if (e.guard.satisfied_by (word[pos]))
                    adj[id (e.src, pos)].push_back (id (e.dst, pos + 1 < len ? pos + 1 : loop));

        auto reach_from = [&] (std::size_t start, std::vector<char> &seen, bool include_start) {
            std::vector<std::size_t> stack;
            if (include_start)
            {
                seen[start] = 1;
                stack.push_back (start);
            }
            else
                for (std::size_t v : adj[start])
                    if (!seen[v])
                    {
                        seen[v] = 1;
                        stack.push_back (v);
                    }
            while (!stack.empty ())
            {
                const std::size_t u = stack.back ();
                stack.pop_back ();
                for (std::size_t v : adj[u])
                    if (!seen[v])
                    {
                        seen[v] = 1;
                        stack.push_back (v);
                    }
            }
        };

        std::vector<char> reachable (n * len, 0);
        reach_from (id (b.init, 0), reachable, true);
        for (int q = 0; q < b.state_count; ++q)
        {
            if (!b.is_accepting (q))
                continue;
            for (std::size_t pos = loop; pos < len; ++pos)
            {
                const std::size_t v = id (q, pos);
                if (!reachable[v])
                    continue;
                std::vector<char> seen (n * len, 0);
                reach_from (v, seen, false);
                if (seen[v])
                    return true;
            }
        }
        return false;
    }

    // ───────── TransitionTable ─────────

    TransitionTable::TransitionTable (const Nba &b, int label_count) : n_ (b.state_count), label_count_ (label_count)
    {
        validate (b);
        const auto n = static_cast<std::size_t> (n_);
        const auto letters = static_cast<std::size_t> (label_count) + 1;
        succ_.assign (n * letters, {});
        feasible_.assign (n, {});
        guards_.assign (n * n, Guard ());
        for (const auto &e : b.edges)
        {
            auto &g = guards_[static_cast<std::size_t> (e.src) * n + e.dst];
            g = g || e.guard;
        }
        for (std::size_t from = 0; from < n; ++from)
            for (std::size_t to = 0; to < n; ++to)
            {
                const Guard &g = guards_[from * n + to];
                if (g.is_false ())
                    continue;
                bool any = false;
                for (std::size_t s = 0; s < letters; ++s)
                    if (g.satisfied_by (Symbol{static_cast<int> (s)}))
                    {
                        succ_[from * letters + s].push_back (static_cast<int> (to));
                        any = true;
                    }
                if (any)
                    feasible_[from].push_back (static_cast<int> (to));
            }
    }

    std::span<const int> TransitionTable::successors (int q, Symbol s) const
    {
        return succ_.at (static_cast<std::size_t> (q) * (static_cast<std::size_t> (label_count_) + 1) + static_cast<std::size_t> (s.label));
    }

    bool TransitionTable::enabled (int from, Symbol s, int to) const
    {
        const auto succ = successors (from, s);
        return std::binary_search (succ.begin (), succ.end (), to);
    }

    const Guard &TransitionTable::guard (int from, int to) const
    {
        return guards_.at (static_cast<std::size_t> (from) * static_cast<std::size_t> (n_) + static_cast<std::size_t> (to));
    }

    // ───────── HOA ─────────

    namespace
    {
        struct HoaToken
        {
            enum Kind
            {
                Header,  // "Name:"
                Ident,
                Int,
                String,
                Punct,
                Body,
                End,
                Eof
            } kind;
            std::string text;
            int line;
        };

        std::vector<HoaToken> tokenize_hoa (std::string_view s)
        {
            std::vector<HoaToken> out;
            int line = 1;
            std::size_t i = 0;
            auto fail = [&] (const std::string &msg) -> void {
                throw SyntaxError (static_cast<std::size_t> (line), {}, "HOA syntax error on line " + std::to_string (line) + ": " + msg);
            };
            while (i < s.size ())
            {
                const char c = s[i];
                if (c == '\n')
                {
                    ++line;
                    ++i;
                    continue;
                }
                if (std::isspace (static_cast<unsigned char> (c)))
                {
                    ++i;
                    continue;
                }
                if (c == '/' && i + 1 < s.size () && s[i + 1] == '*')
                {
                    const std::size_t close = s.find ("*/", i + 2);
                    if (close == std::string_view::npos)
                        fail ("unterminated comment");
                    line += static_cast<int> (std::count (s.begin () + static_cast<std::ptrdiff_t> (i), s.begin () + static_cast<std::ptrdiff_t> (close), '\n'));
                    i = close + 2;
                    continue;
                }
                if (s.substr (i, 8) == "--BODY--")
                {
                    out.push_back ({HoaToken::Body, "--BODY--", line});
                    i += 8;
                    continue;
                }
                if (s.substr (i, 7) == "--END--")
                {
                    out.push_back ({HoaToken::End, "--END--", line});
                    i += 7;
                    continue;
                }
                if (c == '"')
                {
                    std::string str;
                    ++i;
                    while (i < s.size () && s[i] != '"')
                    {
                        if (s[i] == '\\' && i + 1 < s.size ())
                            ++i;
                        if (s[i] == '\n')
                            ++line;
                        str += s[i++];
                    }
                    if (i >= s.size ())
                        fail ("unterminated string");
                    ++i;
                    out.push_back ({HoaToken::String, str, line});
                    continue;
                }
                if (std::isdigit (static_cast<unsigned char> (c)))
                {
                    const std::size_t start = i;
                    while (i < s.size () && std::isdigit (static_cast<unsigned char> (s[i])))
                        ++i;
                    out.push_back ({HoaToken::Int, std::string (s.substr (start, i - start)), line});
                    continue;
                }
                if (std::isalpha (static_cast<unsigned char> (c)) || c == '_' || c == '@')
                {
                    const std::size_t start = i;
                    ++i;
                    while (i < s.size () && (std::isalnum (static_cast<unsigned char> (s[i])) || s[i] == '_' || s[i] == '-'))
                        ++i;
                    std::string word (s.substr (start, i - start));
                    if (i < s.size () && s[i] == ':')
                    {
                        ++i;
                        out.push_back ({HoaToken::Header, word, line});
                    }
                    else
                        out.push_back ({HoaToken::Ident, word, line});
                    continue;
                }
                if (std::string_view ("[]{}()!&|").find (c) != std::string_view::npos)
                {
                    out.push_back ({HoaToken::Punct, std::string (1, c), line});
                    ++i;
                    continue;
                }
                fail (std::string ("unexpected character '") + c + "'");
            }
            out.push_back ({HoaToken::Eof, "", line});
            return out;
        }

        class HoaParser
        {
          public:
            explicit HoaParser (std::string_view text) : toks_ (tokenize_hoa (text)) {}

            Nba parse ()
            {
                expect_header ("HOA");
                const auto &version = take ();
                if (version.kind != HoaToken::Ident || version.text != "v1")
                    syntax (version, "expected version v1");

                int states = -1;
                std::vector<int> starts;
                bool all_accepting = false;
                bool have_acceptance = false;
                while (peek ().kind == HoaToken::Header)
                {
                    const HoaToken h = take ();
                    if (h.text == "States")
                        states = take_int ();
                    else if (h.text == "Start")
                    {
                        starts.push_back (take_int ());
                        if (peek ().kind == HoaToken::Punct && peek ().text == "&")
                            unsupported ("alternating start (conjunction of initial states)");
                    }
                    else if (h.text == "AP")
                    {
                        const int count = take_int ();
                        for (int k = 0; k < count; ++k)
                        {
                            const HoaToken &name = take ();
                            if (name.kind != HoaToken::String)
                                syntax (name, "expected AP name string");
                            ap_names_.push_back (name.text);
                        }
                    }
                    else if (h.text == "Acceptance")
                    {
                        have_acceptance = true;
                        const int sets = take_int ();
                        if (sets == 0)
                        {
                            const HoaToken &t = take ();
                            if (t.kind != HoaToken::Ident || t.text != "t")
                                unsupported ("acceptance condition other than Inf(0) or t");
                            all_accepting = true;
                        }
                        else
                        {
                            if (sets != 1)
                                unsupported ("more than one acceptance set");
                            const HoaToken &cond = take ();
                            if (cond.kind != HoaToken::Ident || cond.text != "Inf")
                                unsupported ("acceptance condition " + cond.text);
                            expect_punct ("(");
                            if (take_int () != 0)
                                unsupported ("acceptance set other than 0");
                            expect_punct (")");
                            if (peek ().kind == HoaToken::Punct && (peek ().text == "&" || peek ().text == "|"))
                                unsupported ("compound acceptance condition");
                        }
                    }
                    else
                    {
                        // other headers (name, tool, acc-name, properties, ...) are skipped
                        while (peek ().kind != HoaToken::Header && peek ().kind != HoaToken::Body && peek ().kind != HoaToken::Eof)
                            take ();
                    }
                }
                if (peek ().kind != HoaToken::Body)
                    syntax (peek (), "expected --BODY--");
                take ();
                if (states < 0)
                    syntax (peek (), "missing States header");
                if (starts.size () != 1)
                    unsupported ("exactly one Start state is required");
                if (!have_acceptance)
                    syntax (peek (), "missing Acceptance header");

                Nba b;
                b.state_count = states;
                b.init = starts.front ();
                b.accepting.assign (static_cast<std::size_t> (states), all_accepting);
                b.ap_names = ap_names_;

                while (peek ().kind == HoaToken::Header && peek ().text == "State")
                {
                    take ();
                    if (peek ().kind == HoaToken::Punct && peek ().text == "[")
                        unsupported ("state labels");
                    const int q = take_int ();
                    if (q < 0 || q >= states)
                        syntax (toks_[pos_ - 1], "state index out of range");
                    if (peek ().kind == HoaToken::String)
                        take ();
                    if (peek ().kind == HoaToken::Punct && peek ().text == "{")
                    {
                        take ();
                        while (!(peek ().kind == HoaToken::Punct && peek ().text == "}"))
                        {
                            if (take_int () != 0)
                                unsupported ("acceptance set other than 0");
                            b.accepting[static_cast<std::size_t> (q)] = true;
                        }
                        take ();
                    }
                    while (peek ().kind == HoaToken::Punct && peek ().text == "[")
                    {
                        take ();
                        Guard g = parse_or ();
                        expect_punct ("]");
                        const int dst = take_int ();
                        if (dst < 0 || dst >= states)
                            syntax (toks_[pos_ - 1], "edge target out of range");
                        if (peek ().kind == HoaToken::Punct && peek ().text == "&")
                            unsupported ("alternating transitions");
                        if (peek ().kind == HoaToken::Punct && peek ().text == "{")
                            unsupported ("transition-based acceptance");
                        b.edges.push_back ({q, std::move (g), dst});
                    }
                    if (peek ().kind == HoaToken::Int)
                        unsupported ("implicit edge labels");
                }
                if (peek ().kind != HoaToken::End)
                    syntax (peek (), "expected State: or --END--");
                return normalized (std::move (b));
            }

          private:
            [[noreturn]] void syntax (const HoaToken &t, const std::string &msg) const
            {
                throw SyntaxError (static_cast<std::size_t> (t.line), {}, "HOA syntax error on line " + std::to_string (t.line) + ": " + msg);
            }
            [[noreturn]] void unsupported (const std::string &what) const
            {
                throw Error (ErrorCode::UnsupportedFeature, "HOA feature not supported: " + what);
            }

            const HoaToken &peek () const { return toks_[pos_]; }
            const HoaToken &take ()
            {
                const HoaToken &t = toks_[pos_];
                if (t.kind != HoaToken::Eof)
                    ++pos_;
                return t;
            }
            int take_int ()
            {
                const HoaToken &t = take ();
                if (t.kind != HoaToken::Int)
                    syntax (t, "expected integer");
                return std::stoi (t.text);
            }
            void expect_header (const std::string &name)
            {
                const HoaToken &t = take ();
                if (t.kind != HoaToken::Header || t.text != name)
                    syntax (t, "expected " + name + ":");
            }
            void expect_punct (const std::string &p)
            {
                const HoaToken &t = take ();
                if (t.kind != HoaToken::Punct || t.text != p)
                    syntax (t, "expected '" + p + "'");
            }

            int label_of_ap (int index) const
            {
                if (index < 0 || index >= static_cast<int> (ap_names_.size ()))
                    throw SyntaxError (static_cast<std::size_t> (peek ().line), {}, "HOA syntax error: AP index " + std::to_string (index) + " out of range");
                const std::string &name = ap_names_[static_cast<std::size_t> (index)];
                std::string digits;
                if (name.size () > 1 && name[0] == 'l')
                    digits = name.substr (1);
                else if (name.size () > 2 && name.rfind ("pi", 0) == 0)
                    digits = name.substr (2);
                if (!digits.empty () && std::all_of (digits.begin (), digits.end (), [] (char c) { return std::isdigit (static_cast<unsigned char> (c)); }))
                    return std::stoi (digits);
                return index + 1;
            }

            Guard parse_or ()
            {
                Guard g = parse_and ();
                while (peek ().kind == HoaToken::Punct && peek ().text == "|")
                {
                    take ();
                    g = g || parse_and ();
                }
                return g;
            }
            Guard parse_and ()
            {
                Guard g = parse_not ();
                while (peek ().kind == HoaToken::Punct && peek ().text == "&")
                {
                    take ();
                    g = g && parse_not ();
                }
                return g;
            }
            Guard parse_not ()
            {
                if (peek ().kind == HoaToken::Punct && peek ().text == "!")
                {
                    take ();
                    return negate (parse_not ());
                }
                const HoaToken &t = take ();
                if (t.kind == HoaToken::Int)
                    return Guard::literal (label_of_ap (std::stoi (t.text)));
                if (t.kind == HoaToken::Ident && t.text == "t")
                    return Guard::truth ();
                if (t.kind == HoaToken::Ident && t.text == "f")
                    return Guard ();
                if (t.kind == HoaToken::Ident && t.text.front () == '@')
                    unsupported ("label aliases");
                if (t.kind == HoaToken::Punct && t.text == "(")
                {
                    Guard g = parse_or ();
                    expect_punct (")");
                    return g;
                }
                syntax (t, "expected label expression");
            }

            static Guard negate (const Guard &g)
            {
                // De Morgan over the DNF: AND over disjuncts of (OR of negated literals)
                Guard acc = Guard::truth ();
                for (const auto &c : g.disjuncts ())
                {
                    Guard clause;
                    for (const auto &l : c)
                        clause = clause || Guard::literal (l.label, !l.positive);
                    acc = acc && clause;
                }
                return acc;
            }

            std::vector<HoaToken> toks_;
            std::size_t pos_ = 0;
            std::vector<std::string> ap_names_;
        };
    } // namespace

    Nba parse_hoa (std::string_view text)
    {
        return HoaParser (text).parse ();
    }

    std::string to_hoa (const Nba &b, std::string_view name)
    {
        validate (b);
        const int m = b.max_label ();
        std::ostringstream os;
        os << "HOA: v1\n";
        if (!name.empty ())
            os << "name: \"" << name << "\"\n";
        os << "States: " << b.state_count << "\n";
        os << "Start: " << b.init << "\n";
        os << "AP: " << m;
        for (int i = 1; i <= m; ++i)
            os << " \"l" << i << "\"";
        os << "\n";
        os << "acc-name: Buchi\nAcceptance: 1 Inf(0)\nproperties: trans-labels explicit-labels state-acc\n--BODY--\n";
        for (int q = 0; q < b.state_count; ++q)
        {
            os << "State: " << q;
            if (b.is_accepting (q))
                os << " {0}";
            os << "\n";
            for (const auto &e : b.edges)
            {
                if (e.src != q || e.guard.is_false ())
                    continue;
                std::string expr;
                if (e.guard.is_true ())
                    expr = "t";
                else
                    for (std::size_t i = 0; i < e.guard.disjuncts ().size (); ++i)
                    {
                        if (i)
                            expr += " | ";
                        const auto &c = e.guard.disjuncts ()[i];
                        for (std::size_t j = 0; j < c.size (); ++j)
                        {
                            if (j)
                                expr += "&";
                            expr += (c[j].positive ? "" : "!") + std::to_string (c[j].label - 1);
                        }
                    }
                os << "[" << expr << "] " << e.dst << "\n";
            }
        }
        os << "--END--\n";
        return os.str ();
    }

    // ───────── JSON ─────────

    Nba nba_from_json (std::string_view text)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse (text);
            Nba b;
            b.state_count = j.at ("n").get<int> ();
            b.init = j.at ("init").get<int> ();
            b.accepting.assign (static_cast<std::size_t> (std::max (b.state_count, 0)), false);
            for (int q : j.at ("accepting").get<std::vector<int>> ())
            {
                if (q < 0 || q >= b.state_count)
                    throw Error (ErrorCode::FormatError, "accepting state out of range");
                b.accepting[static_cast<std::size_t> (q)] = true;
            }
            for (const auto &e : j.at ("edges"))
                b.edges.push_back ({e.at (0).get<int> (), parse_guard (e.at (1).get<std::string> ()), e.at (2).get<int> ()});
            if (j.contains ("ap"))
                b.ap_names = j.at ("ap").get<std::vector<std::string>> ();
            validate (b);
            return b;
        }
        catch (const nlohmann::json::exception &ex)
        {
            throw Error (ErrorCode::FormatError, std::string ("NBA JSON: ") + ex.what ());
        }
    }

    std::string nba_to_json (const Nba &b)
    {
        validate (b);
        nlohmann::ordered_json j;
        j["n"] = b.state_count;
        j["init"] = b.init;
        std::vector<int> acc;
        for (int q = 0; q < b.state_count; ++q)
            if (b.is_accepting (q))
                acc.push_back (q);
        j["accepting"] = acc;
        nlohmann::ordered_json edges = nlohmann::ordered_json::array ();
        for (const auto &e : b.edges)
            edges.push_back ({e.src, e.guard.to_string (), e.dst});
        j["edges"] = edges;
        if (!b.ap_names.empty ())
            j["ap"] = b.ap_names;
        return j.dump ();
    }

} // namespace nngtl
