#include "fixtures.hpp"

#include "nngtl/ltl.hpp"

#include <gtest/gtest.h>

using namespace nngtl;

namespace
{
    Word w (std::initializer_list<int> labels)
    {
        Word out;
        for (int l : labels)
            out.push_back (Symbol{l});
        return out;
    }
} // namespace

TEST (Ltl, ParsesDerivedOperatorsIntoCoreForm)
{
    EXPECT_EQ (parse_ltl ("<> l1"), Formula::until (Formula::truth (), Formula::ap (1)));
    EXPECT_EQ (parse_ltl ("F l1"), parse_ltl ("<> l1"));
    EXPECT_EQ (parse_ltl ("[] l2"), Formula::negation (Formula::until (Formula::truth (), Formula::negation (Formula::ap (2)))));
    EXPECT_EQ (parse_ltl ("G l2"), parse_ltl ("[] l2"));
    EXPECT_EQ (parse_ltl ("!!l3"), Formula::ap (3));
    EXPECT_EQ (parse_ltl ("l1 || l2"), Formula::negation (Formula::conjunction (Formula::negation (Formula::ap (1)), Formula::negation (Formula::ap (2)))));
    EXPECT_EQ (parse_ltl ("pi4"), Formula::ap (4));
}

TEST (Ltl, UntilIsRightAssociativeAndBindsTighterThanAnd)
{
    EXPECT_EQ (parse_ltl ("l1 U l2 U l3"), Formula::until (Formula::ap (1), Formula::until (Formula::ap (2), Formula::ap (3))));
    EXPECT_EQ (parse_ltl ("l1 && l2 U l3"), Formula::conjunction (Formula::ap (1), Formula::until (Formula::ap (2), Formula::ap (3))));
}

TEST (Ltl, SyntaxErrorsCarryPositionAndExpectedTokens)
{
    try
    {
        parse_ltl ("l1 && ");
        FAIL ();
    }
    catch (const SyntaxError &e)
    {
        EXPECT_EQ (e.position (), 6u);
        EXPECT_FALSE (e.expected ().empty ());
    }
    EXPECT_THROW (parse_ltl ("(l1"), SyntaxError);
    EXPECT_THROW (parse_ltl ("l1 l2"), SyntaxError);
    EXPECT_THROW (parse_ltl ("X l1"), Error);
}

TEST (Ltl, PrettyPrintRoundTrips)
{
    Rng rng (5);
    for (int i = 0; i < 300; ++i)
    {
        const Formula f = fixtures::random_formula (rng, 3, 4);
        const Formula n = normalize (f);
        EXPECT_EQ (parse_ltl (pretty_print (f)), n) << pretty_print (f);
    }
}

TEST (Ltl, AtomicPropositionsAndDepth)
{
    const Formula f = parse_ltl ("[]<> l1 && (!l1 U l2) && <> l3");
    EXPECT_EQ (atomic_propositions (f), (std::set<int>{1, 2, 3}));
    EXPECT_EQ (depth (parse_ltl ("l1")), 1); // atoms count as one level
    EXPECT_EQ (depth (Formula::until (Formula::ap (1), Formula::ap (2))), 2);
}

TEST (Ltl, EvalLassoOnHandCheckedWords)
{
    const Formula reach = parse_ltl ("<> l1");
    EXPECT_TRUE (eval_lasso (reach, w ({0, 0, 1}), w ({0})));
    EXPECT_TRUE (eval_lasso (reach, {}, w ({0, 1})));
    EXPECT_FALSE (eval_lasso (reach, w ({2}), w ({0})));

    const Formula recur = parse_ltl ("[]<> l1");
    EXPECT_TRUE (eval_lasso (recur, w ({0}), w ({0, 1})));
    EXPECT_FALSE (eval_lasso (recur, w ({1, 1}), w ({0})));

    const Formula until = parse_ltl ("!l1 U l2");
    EXPECT_TRUE (eval_lasso (until, w ({0, 3, 2}), w ({1})));
    EXPECT_FALSE (eval_lasso (until, w ({0, 1, 2}), w ({0})));
    EXPECT_FALSE (eval_lasso (until, {}, w ({0}))); // l2 never arrives

    const Formula task = parse_ltl ("[]<> l1 && (!l1 U l2) && <> l3");
    EXPECT_TRUE (eval_lasso (task, w ({0, 2, 0, 3}), w ({1})));
    EXPECT_FALSE (eval_lasso (task, w ({1, 2, 3}), w ({1})));
    EXPECT_FALSE (eval_lasso (task, w ({2}), w ({1}))); // l3 missing

    EXPECT_THROW (eval_lasso (reach, w ({1}), {}), Error);
}

TEST (Ltl, TranslationAgreesWithLassoSemanticsOnRandomFormulas)
{
    Rng rng (2024);
    for (int i = 0; i < 40; ++i)
    {
        const Formula f = fixtures::random_formula (rng, 3, 4);
        const Nba b = ltl_to_nba (f);
        ASSERT_NO_THROW (validate (b));
        long mismatches = 0;
        fixtures::for_each_lasso (5, 3, [&] (const Word &p, const Word &c) {
            if (accepts_prefix_suffix (b, p, c) != eval_lasso (f, p, c))
                ++mismatches;
        });
        EXPECT_EQ (mismatches, 0) << pretty_print (f);
    }
}

TEST (Ltl, CaseStudyTranslationMatchesDrawnAutomatonLanguage)
{
    const Formula f = parse_ltl ("[]<> l1 && (!l1 U l2) && <> l3");
    const Nba b = ltl_to_nba (f);
    const Nba drawn = fixtures::drawn_case_study_nba ();
    EXPECT_EQ (b.state_count, 5);
    long checked = 0;
    fixtures::for_each_lasso (6, 3, [&] (const Word &p, const Word &c) {
        const bool truth = eval_lasso (f, p, c);
        ASSERT_EQ (accepts_prefix_suffix (b, p, c), truth);
        ASSERT_EQ (accepts_prefix_suffix (drawn, p, c), truth);
        ++checked;
    });
    EXPECT_GT (checked, 5000);
}

TEST (Ltl, TrivialFormulas)
{
    const Nba t = ltl_to_nba (parse_ltl ("true"));
    EXPECT_TRUE (accepts_prefix_suffix (t, {}, w ({0})));
    const Nba f = ltl_to_nba (parse_ltl ("false"));
    EXPECT_FALSE (accepts_prefix_suffix (f, {}, w ({0})));
    EXPECT_FALSE (accepts_prefix_suffix (f, w ({1}), w ({2})));
}
