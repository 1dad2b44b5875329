import pytest
from hypothesis import given
from hypothesis import strategies as st

from derivparse import GrammarGraph, solve
from derivparse.derive import DerivationState
from derivparse.fixpoint import is_empty, is_solved, null_parses, nullable
from derivparse.forest import INFINITE, ParseForest, count_trees
from derivparse.gen import gen_random_grammar
from derivparse.grammar_file import elaborate
from derivparse.kernel import F_AMB, FOREST_EMPTY, FOREST_EPS
from derivparse.lexer import tokens_from_classes

from _util import build, kleene


def parens(kernel):
    g = GrammarGraph(kernel)
    (s,) = g.recursive(1)
    g.tie(s, g.alt(g.cat(g.terminal("("), g.cat(s, g.terminal(")"))), g.epsilon()))
    return g, s


def test_nullable_examples(kernel):
    g = GrammarGraph(kernel)
    assert nullable(g, g.epsilon())
    assert not nullable(g, g.terminal("a"))
    assert not nullable(g, g.empty())
    pg, s = parens(kernel)
    assert nullable(pg, s)
    (loop,) = g.recursive(1)
    g.tie(loop, loop)
    assert not nullable(g, loop)


def test_is_empty_examples(kernel):
    g = GrammarGraph(kernel)
    assert is_empty(g, g.empty())
    assert not is_empty(g, g.terminal("a"))
    assert not is_empty(g, g.epsilon())
    (loop,) = g.recursive(1)
    g.tie(loop, loop)
    assert is_empty(g, loop)
    # productive but not nullable
    (s,) = g.recursive(1)
    g.tie(s, g.alt(g.cat(g.terminal("a"), s), g.terminal("b")))
    assert not is_empty(g, s) and not nullable(g, s)
    # recursion with no base case is empty
    (t,) = g.recursive(1)
    g.tie(t, g.cat(g.terminal("a"), t))
    assert is_empty(g, t)


def test_null_parses_examples(kernel):
    g = GrammarGraph(kernel)
    r = g.forest_tag(g.forest_leaf("x"), "r")
    assert null_parses(g, g.epsilon(r)) == r
    assert null_parses(g, g.terminal("a")) == FOREST_EMPTY
    both = g.alt(g.epsilon(), g.epsilon())
    f = null_parses(g, both)
    kind, left, right = g.kernel.forest(f)
    assert (kind, left, right) == (F_AMB, FOREST_EPS, FOREST_EPS)
    assert count_trees(ParseForest(g, f)) == 2


def test_null_parses_of_cyclic_epsilon_is_cyclic(kernel):
    g = GrammarGraph(kernel)
    (s,) = g.recursive(1)
    g.tie(s, g.alt(g.red(s, "t"), g.epsilon()))
    f = ParseForest(g, null_parses(g, s))
    assert count_trees(f) == INFINITE
    assert len(f.trees(5)) == 5


def test_solve_single_epsilon(kernel):
    g = GrammarGraph(kernel)
    e = g.raw_epsilon()
    assert solve(g, "nullable") == 0
    assert nullable(g, e)


def test_solve_balanced_parens_within_two_passes(kernel):
    g, s = parens(kernel)
    assert not is_solved(g, s)
    evals = solve(g, "nullable")
    region = g.kernel.last_solve_region
    assert region > 0
    # both properties together: at most two evaluations per node each
    assert evals <= 4 * region
    assert nullable(g, s) and not is_empty(g, s)
    assert solve(g, "nullable") == 0  # idempotent


def test_solve_rejects_unknown_property(kernel):
    g, _ = parens(kernel)
    with pytest.raises(ValueError):
        solve(g, "reachable")


def test_solve_null_parses_populates_forests(kernel):
    g, s, _ = build('start S; S -> S S | "a" | ;', kernel)
    solve(g, "null_parses")
    assert count_trees(ParseForest(g, null_parses(g, s))) == INFINITE


@pytest.mark.parametrize("seed", range(200))
def test_fixpoint_matches_bounded_derivation_oracle(kernel, seed):
    spec = gen_random_grammar(seed, 8, 3)
    g, _ = elaborate(spec, kernel=kernel)
    want_null, want_prod = kleene(spec, depth=12)
    for name, h in g.nonterminals.items():
        assert nullable(g, h) == want_null[name], name
        assert is_empty(g, h) == (not want_prod[name]), name


@given(st.integers(0, 10 ** 6))
def test_evaluations_are_bounded_by_region(kernel, seed):
    spec = gen_random_grammar(seed, 8, 3)
    g, _ = elaborate(spec, kernel=kernel)
    evals = solve(g, "nullable")
    assert evals <= 4 * g.kernel.last_solve_region


@given(st.integers(0, 10 ** 6), st.lists(st.sampled_from("ab"), max_size=8))
def test_on_demand_matches_solving_from_scratch(kernel, seed, word):
    spec = gen_random_grammar(seed, 6, 3)
    # graph 1: nullability queried after every token
    g1, s1 = elaborate(spec, kernel=kernel)
    state = DerivationState(g1, s1)
    for tok in tokens_from_classes(word):
        state.consume(tok)
        nullable(g1, state.current)
    # graph 2: rebuilt, every node solved at once before the query
    g2, s2 = elaborate(spec, kernel=kernel)
    node = s2
    for c in word:
        node = g2.kernel.derive(node, g2.class_id(c))
    solve(g2, "nullable")
    assert nullable(g1, state.current) == nullable(g2, node)
    assert is_empty(g1, state.current) == is_empty(g2, node)
