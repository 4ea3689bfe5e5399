#pragma once
/**
 * @file  buchi.hpp
 * @brief Nondeterministic Büchi automata over mutually exclusive region labels.
 *
 * Guards are kept in disjunctive normal form over literals l_i / !l_i. A letter is
 * either the empty set or a single label, so `l1 && l2` is a well-formed guard that
 * no letter satisfies; prune_infeasible() removes such edges.
 *
 * DistanceTable convention: rho(q, q') for q != q' is the length of the shortest
 * nonempty path, and rho(q, q) is the length of the shortest cycle through q. A
 * zero diagonal would make "q can be revisited" indistinguishable from "q is a dead end".
 */

#include "nngtl/core.hpp"

#include <compare>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nngtl
{
    struct Literal
    {
        int label = 1;
        bool positive = true;

        friend auto operator<=> (const Literal &, const Literal &) = default;
    };

    using Conjunct = std::vector<Literal>;

    class Guard
    {
      public:
        /// The unsatisfiable guard (no disjunct).
        Guard () = default;

        static Guard truth () { return Guard ({Conjunct{}}); }
        static Guard literal (int label, bool positive = true) { return Guard ({Conjunct{{label, positive}}}); }

        /// Normalizes: sorted/deduplicated literals, propositionally contradictory
        /// disjuncts dropped, absorbed disjuncts dropped, disjuncts sorted.
        explicit Guard (std::vector<Conjunct> disjuncts);

        [[nodiscard]] const std::vector<Conjunct> &disjuncts () const noexcept { return disjuncts_; }
        [[nodiscard]] bool is_true () const noexcept { return disjuncts_.size () == 1 && disjuncts_.front ().empty (); }
        [[nodiscard]] bool is_false () const noexcept { return disjuncts_.empty (); }
        [[nodiscard]] bool satisfied_by (Symbol s) const noexcept;
        [[nodiscard]] int max_label () const noexcept;

        /// "true", "false", or disjuncts joined by " || " with literals joined by " && ".
        [[nodiscard]] std::string to_string () const;

        friend Guard operator|| (const Guard &a, const Guard &b);
        friend Guard operator&& (const Guard &a, const Guard &b);
        friend bool operator== (const Guard &, const Guard &) = default;
        friend auto operator<=> (const Guard &a, const Guard &b) { return a.disjuncts_ <=> b.disjuncts_; }

      private:
        std::vector<Conjunct> disjuncts_;
    };

    /// Conjunct satisfied by a letter under mutually exclusive labels.
    bool conjunct_satisfied_by (const Conjunct &c, Symbol s) noexcept;

    /// Parses a propositional guard ("!l1 && l3", "l2 || l3", "true", "1").
    Guard parse_guard (std::string_view text);

    struct NbaEdge
    {
        int src = 0;
        Guard guard;
        int dst = 0;

        friend bool operator== (const NbaEdge &, const NbaEdge &) = default;
    };

    struct Nba
    {
        int state_count = 0;
        int init = 0;
        std::vector<bool> accepting;
        std::vector<NbaEdge> edges;
        /// Atomic proposition names, in AP order (informational; guards use label indices).
        std::vector<std::string> ap_names;

        [[nodiscard]] bool is_accepting (int q) const { return accepting.at (static_cast<std::size_t> (q)); }
        [[nodiscard]] int max_label () const noexcept;
        friend bool operator== (const Nba &, const Nba &) = default;
    };

    /// Throws InvalidArgument when indices are out of range.
    void validate (const Nba &b);

    /// Merges parallel edges into one DNF guard per (src, dst), drops false guards,
    /// and sorts edges by (src, dst).
    Nba normalized (Nba b);

    /// Keeps only states reachable from init (through non-false guards), renumbered
    /// in BFS order.
    Nba remove_unreachable (const Nba &b);

    /// Quotient by bisimulation over (accepting, {(guard, class(dst))}).
    Nba reduce_bisimilar (const Nba &b);

    /// Witness letter in {empty, {l_1}, ..., {l_m}} satisfying g, empty set first.
    std::optional<Symbol> guard_sat (const Guard &g, int label_count);

    /// Removes every edge whose guard has no witness. States are unchanged.
    Nba prune_infeasible (const Nba &b, int label_count);

    class DistanceTable
    {
      public:
        static constexpr int kInfinity = std::numeric_limits<int>::max ();

        DistanceTable () = default;
        DistanceTable (int n, std::vector<int> entries) : n_ (n), d_ (std::move (entries)) {}

        [[nodiscard]] int size () const noexcept { return n_; }
        [[nodiscard]] int operator() (int from, int to) const { return d_.at (static_cast<std::size_t> (from) * n_ + to); }
        [[nodiscard]] bool reachable (int from, int to) const { return (*this) (from, to) != kInfinity; }

        /// Distance used when steering towards `target`: 0 at the target itself,
        /// rho otherwise.
        [[nodiscard]] int to_target (int from, int target) const { return from == target ? 0 : (*this) (from, target); }

        friend bool operator== (const DistanceTable &, const DistanceTable &) = default;

      private:
        int n_ = 0;
        std::vector<int> d_;
    };

    /// Hop-count distances on the edge relation (edges with false guards ignored).
    DistanceTable compute_rho (const Nba &b);

    /// Accepting states reachable from init that lie on a cycle. Throws NoFeasibleAccepting.
    std::vector<int> feasible_accepting (const Nba &b, const DistanceTable &d);

    /// Exact decision of whether prefix . suffix^omega has an accepting run.
    /// Throws EmptySuffix.
    bool accepts_prefix_suffix (const Nba &b, const Word &prefix, const Word &suffix);

    /// Successor lists per (state, letter) for letters 0..label_count.
    class TransitionTable
    {
      public:
        TransitionTable (const Nba &b, int label_count);

        [[nodiscard]] int label_count () const noexcept { return label_count_; }
        [[nodiscard]] std::span<const int> successors (int q, Symbol s) const;
        [[nodiscard]] bool enabled (int from, Symbol s, int to) const;
        /// Successors through any edge whose guard has a witness.
        [[nodiscard]] std::span<const int> feasible_successors (int q) const { return feasible_[static_cast<std::size_t> (q)]; }
        /// Guard of the merged edge from -> to (false guard when absent).
        [[nodiscard]] const Guard &guard (int from, int to) const;

      private:
        int n_;
        int label_count_;
        std::vector<std::vector<int>> succ_; // index q * (m + 1) + s
        std::vector<std::vector<int>> feasible_;
        std::vector<Guard> guards_; // index from * n + to
    };

    /// HOA v1 subset: state-based Büchi acceptance "Inf(0)" (or "t"), one start
    /// state, explicit edge labels. Throws SyntaxError (position = line) or
    /// UnsupportedFeature.
    Nba parse_hoa (std::string_view text);
    std::string to_hoa (const Nba &b, std::string_view name = "");

    /// {"n":..,"init":..,"accepting":[..],"edges":[[src,"guard",dst],..]}
    Nba nba_from_json (std::string_view text);
    std::string nba_to_json (const Nba &b);

} // namespace nngtl
