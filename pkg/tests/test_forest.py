import pytest
from hypothesis import given
from hypothesis import strategies as st

from derivparse import GrammarGraph, ReductionTag
from derivparse.derive import DerivationState
from derivparse.forest import (
    EPS, INFINITE, Leaf, Node, Pair, ParseForest, Saturated, count_trees,
    enumerate_trees, quote_atom, serialize_tree, tree_depth, tree_leaves,
)
from derivparse.gen import gen_random_grammar
from derivparse.grammar_file import elaborate
from derivparse.kernel import FOREST_EMPTY
from derivparse.lexer import Token

from _util import build, language, parse_classes

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862]


def ambiguous(kernel):
    g, s, _ = build('start S; S -> S S | "a";', kernel)
    return g, s


def test_enumerate_empty_forest(kernel):
    g = GrammarGraph(kernel)
    assert enumerate_trees(ParseForest(g, FOREST_EMPTY), 10) == []
    assert count_trees(ParseForest(g, FOREST_EMPTY)) == 0


def test_enumerate_aaa_gives_two_trees(kernel):
    g, s = ambiguous(kernel)
    trees = parse_classes(g, s, "aaa").forest().trees(10)
    assert len(trees) == 2
    assert len(set(map(serialize_tree, trees))) == 2


def test_cyclic_forest_enumerates_by_unrolling_depth(kernel):
    g = GrammarGraph(kernel)
    (s,) = g.recursive(1)
    g.tie(s, g.alt(g.red(s, "w"), g.epsilon()))
    forest = parse_classes(g, s, "").forest()
    trees = forest.trees(3)
    assert [tree_depth(t) for t in trees] == [0, 1, 2]
    assert count_trees(forest, cap=5) == INFINITE


def test_count_examples(kernel):
    g, s, _ = build('start S; S -> "(" S ")" | ;', kernel)
    assert parse_classes(g, s, "(())").forest().count(cap=100) == 1
    ga, sa = ambiguous(kernel)
    assert parse_classes(ga, sa, "aaaaa").forest().count(cap=1000) == 14


def test_count_saturates_at_cap(kernel):
    g, s = ambiguous(kernel)
    c = parse_classes(g, s, "a" * 10).forest().count(cap=100)
    assert isinstance(c, Saturated) and c == 100


def test_count_rejects_bad_cap(kernel):
    g, s = ambiguous(kernel)
    with pytest.raises(ValueError):
        parse_classes(g, s, "a").forest().count(cap=0)
    with pytest.raises(ValueError):
        parse_classes(g, s, "a").forest().trees(-1)


@pytest.mark.parametrize("n", range(1, 11))
def test_catalan_counts(kernel, n):
    g, s = ambiguous(kernel)
    forest = parse_classes(g, s, "a" * n).forest()
    assert forest.count() == CATALAN[n - 1]
    if n <= 7:
        trees = forest.trees(CATALAN[n - 1] + 1)
        assert len(trees) == CATALAN[n - 1]
        assert len(set(trees)) == len(trees)


@pytest.mark.parametrize("n", range(1, 13))
def test_forest_size_grows_polynomially(kernel, n):
    g, s = ambiguous(kernel)
    forest = parse_classes(g, s, "a" * n).forest()
    assert forest.size() <= 3 * n ** 3


# -- serialization --------------------------------------------------------------

def tok(lexeme):
    return Token("x", lexeme, 0)


def test_serialize_leaf():
    assert serialize_tree(Leaf(tok("a"))) == "a"


def test_serialize_wrap_quotes_delimiters():
    tree = Node(ReductionTag("sexp"),
                Pair(Leaf(tok("(")), Pair(Leaf(tok("b")), Leaf(tok(")")))))
    assert serialize_tree(tree) == '(sexp "(" b ")")'


def test_serialize_arities():
    kids = Pair(Leaf(tok("a")), Pair(EPS, Leaf(tok("b"))))
    assert serialize_tree(Node(ReductionTag("w"), kids)) == "(w a b)"
    assert serialize_tree(Node(ReductionTag("f", "flatten"), kids)) == "a b"
    assert serialize_tree(Node(ReductionTag("l", "leaf"), kids)) == "l"
    outer = Node(ReductionTag("o"), Pair(Node(ReductionTag("f", "flatten"), kids),
                                         Leaf(tok("c"))))
    assert serialize_tree(outer) == "(o a b c)"
    with pytest.raises(ValueError):
        ReductionTag("bad", "pairs")


@pytest.mark.parametrize("atom, text", [
    ("", '""'), ("a b", '"a b"'), ('q"', '"q\\""'), ("back\\", '"back\\\\"'),
    ("tab\t", '"tab\\t"'), ("plain-atom", "plain-atom"), ("é", "é"),
])
def test_quote_atom(atom, text):
    assert quote_atom(atom) == text


def test_serialization_is_deep_safe():
    tree = Leaf(tok("z"))
    for _ in range(50000):
        tree = Node(ReductionTag("n"), tree)
    text = serialize_tree(tree)
    assert text.startswith("(n (n") and text.endswith("z" + ")" * 50000)


# -- properties over random grammars ------------------------------------------

def sample_parses(kernel, seed, max_len=5):
    spec = gen_random_grammar(seed, 6, 3)
    g, s = elaborate(spec, kernel=kernel)
    for w in sorted(language(g, s, "ab", max_len)):
        toks = [Token(c, "%s%d" % (c, i), i) for i, c in enumerate(w)]
        yield toks, DerivationState(g, s).feed(toks).forest()


@given(st.integers(0, 10 ** 6))
def test_yield_equals_input(kernel, seed):
    for toks, forest in sample_parses(kernel, seed):
        for tree in forest.trees(10):
            assert tree_leaves(tree) == toks


@given(st.integers(0, 10 ** 6))
def test_count_and_enumerate_agree(kernel, seed):
    for _, forest in sample_parses(kernel, seed):
        k = forest.count(cap=200)
        if k != INFINITE and k < 200:
            assert len(forest.trees(k + 1)) == k
        else:
            assert len(forest.trees(7)) == 7


@given(st.integers(0, 10 ** 6))
def test_enumeration_is_deterministic(kernel, seed):
    for _, forest in sample_parses(kernel, seed, 4):
        assert forest.trees(15) == forest.trees(15)


@given(st.integers(0, 10 ** 6))
def test_serialization_is_injective_over_parses(kernel, seed):
    texts = {}
    for _, forest in sample_parses(kernel, seed):
        for tree in forest.trees(15):
            text = serialize_tree(tree)
            assert texts.setdefault(text, tree) == tree
