#include "nngtl/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

namespace nngtl
{
    // ───────── Formula ─────────

    Formula Formula::make (LtlOp op, int label, std::vector<Formula> children)
    {
        return Formula (std::make_shared<const Node> (Node{op, label, std::move (children)}));
    }

    Formula Formula::truth () { return make (LtlOp::True, 0, {}); }
    Formula Formula::ap (int label)
    {
        if (label < 1)
            throw Error (ErrorCode::InvalidArgument, "atomic proposition index must be >= 1");
        return make (LtlOp::Ap, label, {});
    }
    Formula Formula::negation (Formula f) { return make (LtlOp::Not, 0, {std::move (f)}); }
    Formula Formula::conjunction (Formula a, Formula b) { return make (LtlOp::And, 0, {std::move (a), std::move (b)}); }
    Formula Formula::until (Formula a, Formula b) { return make (LtlOp::Until, 0, {std::move (a), std::move (b)}); }
    Formula Formula::disjunction (Formula a, Formula b) { return make (LtlOp::Or, 0, {std::move (a), std::move (b)}); }
    Formula Formula::eventually (Formula f) { return make (LtlOp::Eventually, 0, {std::move (f)}); }
    Formula Formula::always (Formula f) { return make (LtlOp::Always, 0, {std::move (f)}); }

    bool operator== (const Formula &a, const Formula &b)
    {
        if (a.node_ == b.node_)
            return true;
        return a.op () == b.op () && a.label () == b.label () && a.node_->children == b.node_->children;
    }

    // ───────── parser ─────────

    namespace
    {
        enum class Tok
        {
            End,
            LParen,
            RParen,
            Not,
            And,
            Or,
            Until,
            Eventually,
            Always,
            True,
            False,
            Ap,
        };

        struct Token
        {
            Tok kind;
            std::size_t offset;
            int label = 0;
        };

        const std::vector<std::string> kOperandStart = {"(", "!", "<>", "F", "[]", "G", "true", "false", "atomic proposition"};

        class Parser
        {
          public:
            explicit Parser (std::string_view text) : text_ (text) { advance (); }

            Formula parse ()
            {
                Formula f = parse_or ();
                if (tok_.kind != Tok::End)
                    fail ({"&&", "||", "U", ")", "end of input"}, "unexpected token");
                return f;
            }

          private:
            [[noreturn]] void fail (std::vector<std::string> expected, const std::string &msg) const
            {
                std::string what = "LTL syntax error at offset " + std::to_string (tok_.offset) + ": " + msg + "; expected one of:";
                for (const auto &e : expected)
                    what += " '" + e + "'";
                throw SyntaxError (tok_.offset, std::move (expected), what);
            }

            void advance ()
            {
                while (pos_ < text_.size () && std::isspace (static_cast<unsigned char> (text_[pos_])))
                    ++pos_;
                const std::size_t start = pos_;
                if (pos_ >= text_.size ())
                {
                    tok_ = {Tok::End, start};
                    return;
                }
                auto starts_with = [&] (std::string_view s) { return text_.substr (pos_, s.size ()) == s; };
                const char c = text_[pos_];
                if (c == '(' || c == ')' || c == '!')
                {
                    ++pos_;
                    tok_ = {c == '(' ? Tok::LParen : (c == ')' ? Tok::RParen : Tok::Not), start};
                    return;
                }
                if (starts_with ("&&") || starts_with ("||"))
                {
                    pos_ += 2;
                    tok_ = {c == '&' ? Tok::And : Tok::Or, start};
                    return;
                }
                if (c == '&' || c == '|')
                {
                    ++pos_;
                    tok_ = {c == '&' ? Tok::And : Tok::Or, start};
                    return;
                }
                if (starts_with ("<>") || starts_with ("[]"))
                {
                    pos_ += 2;
                    tok_ = {c == '<' ? Tok::Eventually : Tok::Always, start};
                    return;
                }
                if (std::isalpha (static_cast<unsigned char> (c)) || c == '_')
                {
                    while (pos_ < text_.size () && (std::isalnum (static_cast<unsigned char> (text_[pos_])) || text_[pos_] == '_'))
                        ++pos_;
                    const std::string_view word = text_.substr (start, pos_ - start);
                    if (word == "U")
                        tok_ = {Tok::Until, start};
                    else if (word == "F")
                        tok_ = {Tok::Eventually, start};
                    else if (word == "G")
                        tok_ = {Tok::Always, start};
                    else if (word == "true")
                        tok_ = {Tok::True, start};
                    else if (word == "false")
                        tok_ = {Tok::False, start};
                    else if (auto label = ap_index (word))
                        tok_ = {Tok::Ap, start, *label};
                    else
                    {
                        tok_ = {Tok::End, start};
                        fail (kOperandStart, "unknown identifier '" + std::string (word) + "'");
                    }
                    return;
                }
                if (c == '1' || c == '0')
                {
                    ++pos_;
                    tok_ = {c == '1' ? Tok::True : Tok::False, start};
                    return;
                }
                tok_ = {Tok::End, start};
                fail (kOperandStart, std::string ("unexpected character '") + c + "'");
            }

            static std::optional<int> ap_index (std::string_view word)
            {
                std::string_view digits;
                if (word.size () > 1 && word[0] == 'l')
                    digits = word.substr (1);
                else if (word.size () > 2 && word.substr (0, 2) == "pi")
                    digits = word.substr (2);
                else
                    return std::nullopt;
                if (digits.empty () || digits.size () > 6 || !std::all_of (digits.begin (), digits.end (), [] (char ch) { return std::isdigit (static_cast<unsigned char> (ch)); }))
                    return std::nullopt;
                const int v = std::stoi (std::string (digits));
                if (v < 1)
                    return std::nullopt;
                return v;
            }

            Formula parse_or ()
            {
                Formula f = parse_and ();
                while (tok_.kind == Tok::Or)
                {
                    advance ();
                    f = Formula::disjunction (f, parse_and ());
                }
                return f;
            }

            Formula parse_and ()
            {
                Formula f = parse_until ();
                while (tok_.kind == Tok::And)
                {
                    advance ();
                    f = Formula::conjunction (f, parse_until ());
                }
                return f;
            }

            Formula parse_until ()
            {
                Formula f = parse_unary ();
                if (tok_.kind == Tok::Until)
                {
                    advance ();
                    return Formula::until (f, parse_until ());
                }
                return f;
            }

            Formula parse_unary ()
            {
                switch (tok_.kind)
                {
                case Tok::Not: advance (); return Formula::negation (parse_unary ());
                case Tok::Eventually: advance (); return Formula::eventually (parse_unary ());
                case Tok::Always: advance (); return Formula::always (parse_unary ());
                default: return parse_atom ();
                }
            }

            Formula parse_atom ()
            {
                switch (tok_.kind)
                {
                case Tok::True: advance (); return Formula::truth ();
                case Tok::False: advance (); return Formula::negation (Formula::truth ());
                case Tok::Ap:
                {
                    const int label = tok_.label;
                    advance ();
                    return Formula::ap (label);
                }
                case Tok::LParen:
                {
                    advance ();
                    Formula f = parse_or ();
                    if (tok_.kind != Tok::RParen)
                        fail ({")", "&&", "||", "U"}, "unbalanced parenthesis");
                    advance ();
                    return f;
                }
                default: fail (kOperandStart, tok_.kind == Tok::End ? "unexpected end of input" : "expected an operand");
                }
            }

            std::string_view text_;
            std::size_t pos_ = 0;
            Token tok_{Tok::End, 0};
        };
    } // namespace

    Formula parse_ltl (std::string_view text)
    {
        return normalize (Parser (text).parse ());
    }

    Formula normalize (const Formula &f)
    {
        switch (f.op ())
        {
        case LtlOp::True:
        case LtlOp::Ap: return f;
        case LtlOp::Not:
        {
            Formula inner = normalize (f.lhs ());
            if (inner.op () == LtlOp::Not)
                return inner.lhs ();
            return Formula::negation (inner);
        }
        case LtlOp::And: return Formula::conjunction (normalize (f.lhs ()), normalize (f.rhs ()));
        case LtlOp::Until: return Formula::until (normalize (f.lhs ()), normalize (f.rhs ()));
        case LtlOp::Or:
            return normalize (Formula::negation (Formula::conjunction (Formula::negation (f.lhs ()), Formula::negation (f.rhs ()))));
        case LtlOp::Eventually: return Formula::until (Formula::truth (), normalize (f.lhs ()));
        case LtlOp::Always:
            return normalize (Formula::negation (Formula::until (Formula::truth (), Formula::negation (f.lhs ()))));
        }
        return f;
    }

    std::string pretty_print (const Formula &f)
    {
        const Formula n = normalize (f);
        std::function<std::string (const Formula &)> rec = [&] (const Formula &g) -> std::string {
            switch (g.op ())
            {
            case LtlOp::True: return "true";
            case LtlOp::Ap: return "l" + std::to_string (g.label ());
            case LtlOp::Not: return "!" + rec (g.lhs ());
            case LtlOp::And: return "(" + rec (g.lhs ()) + " && " + rec (g.rhs ()) + ")";
            case LtlOp::Until: return "(" + rec (g.lhs ()) + " U " + rec (g.rhs ()) + ")";
            default: break;
            }
            throw Error (ErrorCode::InvalidArgument, "pretty_print: derived operator survived normalization");
        };
        return rec (n);
    }

    std::set<int> atomic_propositions (const Formula &f)
    {
        std::set<int> out;
        std::function<void (const Formula &)> rec = [&] (const Formula &g) {
            if (g.op () == LtlOp::Ap)
                out.insert (g.label ());
            for (std::size_t i = 0; i < g.arity (); ++i)
                rec (i == 0 ? g.lhs () : g.rhs ());
        };
        rec (f);
        return out;
    }

    int depth (const Formula &f)
    {
        int d = 0;
        for (std::size_t i = 0; i < f.arity (); ++i)
            d = std::max (d, depth (i == 0 ? f.lhs () : f.rhs ()));
        return d + 1;
    }

    // ───────── lasso semantics ─────────

    bool eval_lasso (const Formula &f, const Word &prefix, const Word &cycle)
    {
        if (cycle.empty ())
            throw Error (ErrorCode::EmptyCycle, "lasso cycle must be nonempty");
        Word word = prefix;
        word.insert (word.end (), cycle.begin (), cycle.end ());
        const std::size_t len = word.size ();
        const std::size_t loop = prefix.size ();
        auto succ = [&] (std::size_t i) { return i + 1 < len ? i + 1 : loop; };

        std::function<std::vector<char> (const Formula &)> sat = [&] (const Formula &g) -> std::vector<char> {
            std::vector<char> out (len, 0);
            switch (g.op ())
            {
            case LtlOp::True: std::fill (out.begin (), out.end (), 1); break;
            case LtlOp::Ap:
                for (std::size_t i = 0; i < len; ++i)
                    out[i] = word[i].label == g.label ();
                break;
            case LtlOp::Not:
            {
                const auto a = sat (g.lhs ());
                for (std::size_t i = 0; i < len; ++i)
                    out[i] = !a[i];
                break;
            }
            case LtlOp::And:
            case LtlOp::Or:
            {
                const auto a = sat (g.lhs ()), b = sat (g.rhs ());
                for (std::size_t i = 0; i < len; ++i)
                    out[i] = g.op () == LtlOp::And ? (a[i] && b[i]) : (a[i] || b[i]);
                break;
            }
            case LtlOp::Until:
            case LtlOp::Eventually:
            {
                const std::vector<char> a = g.op () == LtlOp::Until ? sat (g.lhs ()) : std::vector<char> (len, 1);
                const std::vector<char> b = sat (g.op () == LtlOp::Until ? g.rhs () : g.lhs ());
                // least fixpoint of u = b | (a & X u)
                for (bool changed = true; changed;)
                {
                    changed = false;
                    for (std::size_t k = len; k-- > 0;)
                    {
                        const char v = b[k] || (a[k] && out[succ (k)]);
                        if (v != out[k])
                        {
                            out[k] = v;
                            changed = true;
                        }
                    }
                }
                break;
            }
            case LtlOp::Always:
            {
                const auto inner = sat (Formula::eventually (Formula::negation (g.lhs ())));
                for (std::size_t i = 0; i < len; ++i)
                    out[i] = !inner[i];
                break;
            }
            }
            return out;
        };
        return sat (f)[0] != 0;
    }

    // ───────── translation ─────────

    namespace
    {
        enum class NnfKind
        {
            True,
            False,
            Literal,
            And,
            Or,
            Until,
            Release,
        };

        struct NnfNode
        {
            NnfKind kind;
            int label = 0;
            bool positive = true;
            int a = -1, b = -1;
            std::string text;
        };

        /// Hash-consed negation normal form.
        class NnfStore
        {
          public:
            int intern (NnfKind kind, int label, bool positive, int a, int b)
            {
                const auto key = std::make_tuple (static_cast<int> (kind), label, positive, a, b);
                if (auto it = ids_.find (key); it != ids_.end ())
                    return it->second;
                NnfNode n{kind, label, positive, a, b, {}};
                switch (kind)
                {
                case NnfKind::True: n.text = "true"; break;
                case NnfKind::False: n.text = "false"; break;
                case NnfKind::Literal: n.text = (positive ? "l" : "!l") + std::to_string (label); break;
                case NnfKind::And: n.text = "(" + nodes_[a].text + " & " + nodes_[b].text + ")"; break;
                case NnfKind::Or: n.text = "(" + nodes_[a].text + " | " + nodes_[b].text + ")"; break;
                case NnfKind::Until: n.text = "(" + nodes_[a].text + " U " + nodes_[b].text + ")"; break;
                case NnfKind::Release: n.text = "(" + nodes_[a].text + " R " + nodes_[b].text + ")"; break;
                }
                nodes_.push_back (std::move (n));
                const int id = static_cast<int> (nodes_.size ()) - 1;
                ids_.emplace (key, id);
                return id;
            }

            int from (const Formula &f, bool negated)
            {
                switch (f.op ())
                {
                case LtlOp::True: return intern (negated ? NnfKind::False : NnfKind::True, 0, true, -1, -1);
                case LtlOp::Ap: return intern (NnfKind::Literal, f.label (), !negated, -1, -1);
                case LtlOp::Not: return from (f.lhs (), !negated);
                case LtlOp::And:
                {
                    const int a = from (f.lhs (), negated), b = from (f.rhs (), negated);
                    return intern (negated ? NnfKind::Or : NnfKind::And, 0, true, a, b);
                }
                case LtlOp::Until:
                {
                    const int a = from (f.lhs (), negated), b = from (f.rhs (), negated);
                    return intern (negated ? NnfKind::Release : NnfKind::Until, 0, true, a, b);
                }
                default: return from (normalize (f), negated);
                }
            }

            [[nodiscard]] const NnfNode &operator[] (int id) const { return nodes_[static_cast<std::size_t> (id)]; }
            [[nodiscard]] int size () const noexcept { return static_cast<int> (nodes_.size ()); }

          private:
            std::vector<NnfNode> nodes_;
            std::map<std::tuple<int, int, bool, int, int>, int> ids_;
        };

        /// One way of discharging a set of obligations in the current step: a
        /// letter constraint and the obligations postponed to the next step.
        struct Term
        {
            Conjunct letter; // sorted, consistent
            std::set<int> next;

            friend bool operator< (const Term &a, const Term &b) { return std::tie (a.letter, a.next) < std::tie (b.letter, b.next); }
            friend bool operator== (const Term &a, const Term &b) = default;
        };

        std::optional<Conjunct> conjoin (const Conjunct &a, const Conjunct &b)
        {
            Conjunct out;
            std::set_union (a.begin (), a.end (), b.begin (), b.end (), std::back_inserter (out));
            for (std::size_t i = 1; i < out.size (); ++i)
                if (out[i].label == out[i - 1].label)
                    return std::nullopt; // l and !l
            return out;
        }

        std::vector<Term> product (const std::vector<Term> &xs, const std::vector<Term> &ys)
        {
            std::vector<Term> out;
            for (const auto &x : xs)
                for (const auto &y : ys)
                    if (auto letter = conjoin (x.letter, y.letter))
                    {
                        Term t{std::move (*letter), x.next};
                        t.next.insert (y.next.begin (), y.next.end ());
                        out.push_back (std::move (t));
                    }
            return out;
        }

        /// Drops duplicates and terms made redundant by a term with a weaker letter
        /// and fewer postponed obligations (which also accepts at least as often).
        std::vector<Term> simplify (std::vector<Term> ts)
        {
            std::sort (ts.begin (), ts.end ());
            ts.erase (std::unique (ts.begin (), ts.end ()), ts.end ());
            std::vector<Term> out;
            for (std::size_t i = 0; i < ts.size (); ++i)
            {
                bool redundant = false;
                for (std::size_t j = 0; j < ts.size () && !redundant; ++j)
                    redundant = j != i && std::includes (ts[i].letter.begin (), ts[i].letter.end (), ts[j].letter.begin (), ts[j].letter.end ()) &&
                                std::includes (ts[i].next.begin (), ts[i].next.end (), ts[j].next.begin (), ts[j].next.end ()) &&
                                !(ts[i].letter == ts[j].letter && ts[i].next == ts[j].next);
                if (!redundant)
                    out.push_back (ts[i]);
            }
            return out;
        }

        class Expander
        {
          public:
            explicit Expander (const NnfStore &store) : store_ (store) {}

            const std::vector<Term> &expand (int id)
            {
                if (auto it = memo_.find (id); it != memo_.end ())
                    return it->second;
                const NnfNode &f = store_[id];
                std::vector<Term> out;
                switch (f.kind)
                {
                case NnfKind::True: out.push_back ({}); break;
                case NnfKind::False: break;
                case NnfKind::Literal: out.push_back ({{{f.label, f.positive}}, {}}); break;
                case NnfKind::And: out = product (expand (f.a), expand (f.b)); break;
                case NnfKind::Or:
                    out = expand (f.a);
                    out.insert (out.end (), expand (f.b).begin (), expand (f.b).end ());
                    break;
                case NnfKind::Until:
                    // b now, or a now and the whole until again next step
                    out = expand (f.b);
                    for (auto t : expand (f.a))
                    {
                        t.next.insert (id);
                        out.push_back (std::move (t));
                    }
                    break;
                case NnfKind::Release:
                    // a and b now, or b now and the whole release again next step
                    out = product (expand (f.a), expand (f.b));
                    for (auto t : expand (f.b))
                    {
                        t.next.insert (id);
                        out.push_back (std::move (t));
                    }
                    break;
                }
                return memo_.emplace (id, simplify (std::move (out))).first->second;
            }

            std::vector<Term> expand_set (const std::set<int> &obligations)
            {
                std::vector<Term> acc{Term{}};
                for (int id : obligations)
                    acc = simplify (product (acc, expand (id)));
                return acc;
            }

          private:
            const NnfStore &store_;
            std::map<int, std::vector<Term>> memo_;
        };
    } // namespace

    Nba ltl_to_nba (const Formula &f)
    {
        NnfStore store;
        const int root = store.from (normalize (f), false);

        // until obligations in lexicographic order of their text
        std::vector<int> untils;
        for (int id = 0; id < store.size (); ++id)
            if (store[id].kind == NnfKind::Until)
                untils.push_back (id);
        std::sort (untils.begin (), untils.end (), [&] (int a, int b) { return store[a].text < store[b].text; });
        const int k = static_cast<int> (untils.size ());

        // Transition-based generalized automaton over obligation sets. A transition
        // belongs to acceptance set i when it does not postpone until i.
        struct Transition
        {
            Conjunct letter;
            int dst;
            std::vector<bool> marks;
        };
        Expander ex (store);
        std::map<std::set<int>, int> ids;
        std::vector<std::set<int>> sets;
        std::vector<std::vector<Transition>> out;
        auto id_of = [&] (const std::set<int> &s) {
            auto [it, fresh] = ids.emplace (s, static_cast<int> (sets.size ()));
            if (fresh)
            {
                sets.push_back (s);
                out.emplace_back ();
            }
            return it->second;
        };
        id_of ({root});
        for (std::size_t q = 0; q < sets.size (); ++q)
        {
            const auto terms = ex.expand_set (sets[q]);
            for (const auto &t : terms)
            {
                std::vector<bool> marks (static_cast<std::size_t> (k));
                for (int i = 0; i < k; ++i)
                    marks[static_cast<std::size_t> (i)] = !t.next.contains (untils[static_cast<std::size_t> (i)]);
                const int dst = id_of (t.next);
                out[q].push_back ({t.letter, dst, std::move (marks)});
            }
        }

        const auto aps = atomic_propositions (f);
        std::vector<std::string> ap_names;
        for (int label = 1; label <= (aps.empty () ? 0 : *aps.rbegin ()); ++label)
            ap_names.push_back ("l" + std::to_string (label));

        // Degeneralization: a level counts the acceptance sets seen in a fixed
        // order; states at level k are accepting and restart the count. The order
        // changes the size of the result, so small k tries every order and keeps
        // the smallest automaton (first in lexicographic permutation order).
        auto degeneralize = [&] (const std::vector<int> &order) {
            Nba ba;
            ba.init = 0;
            std::map<std::pair<int, int>, int> ba_ids;
            std::vector<std::pair<int, int>> ba_states;
            auto ba_id = [&] (int q, int level) {
                auto [it, fresh] = ba_ids.emplace (std::make_pair (q, level), static_cast<int> (ba_states.size ()));
                if (fresh)
                    ba_states.emplace_back (q, level);
                return it->second;
            };
            ba_id (0, 0);
            for (std::size_t i = 0; i < ba_states.size (); ++i)
            {
                const auto [q, level] = ba_states[i];
                for (const auto &t : out[static_cast<std::size_t> (q)])
                {
                    int next = level == k ? 0 : level;
                    while (next < k && t.marks[static_cast<std::size_t> (order[static_cast<std::size_t> (next)])])
                        ++next;
                    const int dst = ba_id (t.dst, k == 0 ? 0 : next);
                    ba.edges.push_back ({static_cast<int> (i), Guard ({t.letter}), dst});
                }
            }
            ba.state_count = static_cast<int> (ba_states.size ());
            ba.accepting.resize (ba_states.size ());
            for (std::size_t i = 0; i < ba_states.size (); ++i)
                ba.accepting[i] = ba_states[i].second == k;
            ba.ap_names = ap_names;
            return normalized (reduce_bisimilar (remove_unreachable (normalized (std::move (ba)))));
        };

        constexpr int kMaxPermuted = 5;
        std::vector<int> order (static_cast<std::size_t> (k));
        for (int i = 0; i < k; ++i)
            order[static_cast<std::size_t> (i)] = i;
        Nba best = degeneralize (order);
        if (k <= kMaxPermuted)
            while (std::next_permutation (order.begin (), order.end ()))
            {
                Nba cand = degeneralize (order);
                if (std::make_pair (cand.state_count, cand.edges.size ()) < std::make_pair (best.state_count, best.edges.size ()))
                    best = std::move (cand);
            }
        return best;
    }

} // namespace nngtl
