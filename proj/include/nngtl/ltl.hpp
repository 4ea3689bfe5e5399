#pragma once
/**
 * @file  ltl.hpp
 * @brief Next-free LTL: parsing, normalization, lasso semantics and translation to NBA.
 *
 * Grammar (loosest binding first):
 *
 *     or     := and { ("||" | "|") and }
 *     and    := until { ("&&" | "&") until }
 *     until  := unary [ "U" until ]              right associative
 *     unary  := ("!" | "F" | "<>" | "G" | "[]") unary | atom
 *     atom   := "true" | "false" | l<i> | pi<i> | "(" or ")"
 *
 * parse_ltl() returns the normalized core form: <>f = true U f, []f = !(true U !f),
 * a || b = !(!a && !b), false = !true, and double negations removed.
 */

#include "nngtl/buchi.hpp"
#include "nngtl/core.hpp"

#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace nngtl
{
    enum class LtlOp
    {
        True,
        Ap,
        Not,
        And,
        Until,
        // derived
        Or,
        Eventually,
        Always,
    };

    class Formula
    {
      public:
        static Formula truth ();
        static Formula ap (int label);
        static Formula negation (Formula f);
        static Formula conjunction (Formula a, Formula b);
        static Formula until (Formula a, Formula b);
        static Formula disjunction (Formula a, Formula b);
        static Formula eventually (Formula f);
        static Formula always (Formula f);

        [[nodiscard]] LtlOp op () const noexcept { return node_->op; }
        [[nodiscard]] int label () const noexcept { return node_->label; }
        [[nodiscard]] const Formula &lhs () const { return node_->children.at (0); }
        [[nodiscard]] const Formula &rhs () const { return node_->children.at (1); }
        [[nodiscard]] std::size_t arity () const noexcept { return node_->children.size (); }

        friend bool operator== (const Formula &a, const Formula &b);

      private:
        struct Node
        {
            LtlOp op;
            int label = 0;
            std::vector<Formula> children;
        };
        explicit Formula (std::shared_ptr<const Node> n) : node_ (std::move (n)) {}
        static Formula make (LtlOp op, int label, std::vector<Formula> children);

        std::shared_ptr<const Node> node_;
    };

    Formula parse_ltl (std::string_view text);

    /// Rewrites derived operators into core syntax and removes double negation.
    Formula normalize (const Formula &f);

    /// Fully parenthesized text that parse_ltl reads back as normalize(f).
    std::string pretty_print (const Formula &f);

    /// Labels mentioned by the formula.
    std::set<int> atomic_propositions (const Formula &f);

    int depth (const Formula &f);

    /// prefix . cycle^omega |= f under standard LTL semantics. Throws EmptyCycle.
    bool eval_lasso (const Formula &f, const Word &prefix, const Word &cycle);

    /// Transition-based generalized Büchi automaton whose states are sets of pending
    /// obligations (an edge is marked for an until when it does not carry that until
    /// forward), degeneralized with a level counter. Every ordering of the untils is
    /// tried when there are at most five; the smallest result after unreachable-state
    /// removal and bisimulation quotient wins. Single initial state.
    Nba ltl_to_nba (const Formula &f);

} // namespace nngtl
