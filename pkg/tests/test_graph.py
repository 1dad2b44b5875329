import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derivparse import GrammarGraph, NodeKind, UntiedPlaceholderError, lex
from derivparse.derive import DerivationState
from derivparse.forest import INFINITE, ParseForest
from derivparse.gen import gen_corpus, gen_random_grammar
from derivparse.grammar_file import elaborate, load_bundled
from derivparse.kernel import R_COMPOSE

from _util import build, language, parse_classes

ABC = ("a", "b", "c")


def test_alt_with_empty_returns_the_other_child(kernel):
    g = GrammarGraph(kernel)
    a = g.terminal("a")
    assert g.alt(g.empty(), a) == a
    assert g.alt(a, g.empty()) == a


def test_cat_with_empty_is_empty(kernel):
    g = GrammarGraph(kernel)
    a = g.terminal("a")
    assert g.cat(g.empty(), a) == g.empty()
    assert g.cat(a, g.empty()) == g.empty()


def test_red_of_red_composes_tags(kernel):
    g = GrammarGraph(kernel)
    x = g.cat(g.terminal("a"), g.terminal("b"))
    r = g.red(g.red(x, "t1"), "t2")
    assert g.kind(r) == NodeKind.RED
    assert g.children(r) == (x,)
    kind, _, red, _ = g.kernel.node(r)
    assert g.kernel.reduction(red)[0] == R_COMPOSE
    assert g.reduction_tag(r) is None


def test_red_of_empty_is_empty(kernel):
    g = GrammarGraph(kernel)
    assert g.red(g.empty(), "t") == g.empty()


def test_cat_with_epsilon_becomes_red(kernel):
    g = GrammarGraph(kernel)
    a = g.terminal("a")
    assert g.kind(g.cat(g.epsilon(), a)) == NodeKind.RED
    assert g.kind(g.cat(a, g.epsilon())) == NodeKind.RED


def test_balanced_paren_structure(kernel):
    g = GrammarGraph(kernel)
    (s,) = g.recursive(1)
    body = g.cat(g.terminal("("), g.cat(s, g.terminal(")")))
    g.tie(s, g.alt(body, g.epsilon()))
    g.check_tied()
    top = g.resolve(s)
    assert g.kind(top) == NodeKind.ALT
    left, right = g.children(top)
    assert g.kind(left) == NodeKind.CAT
    assert g.kind(right) == NodeKind.EPSILON
    assert g.terminal_class(g.children(left)[0]) == "("
    assert language(g, s, "()", 4) == {(), ("(", ")"), ("(", "(", ")", ")")}


def test_tying_twice_is_an_error(kernel):
    g = GrammarGraph(kernel)
    (s,) = g.recursive(1)
    g.tie(s, g.terminal("a"))
    with pytest.raises(ValueError):
        g.tie(s, g.terminal("b"))


def test_tying_a_non_placeholder_is_an_error(kernel):
    g = GrammarGraph(kernel)
    with pytest.raises(ValueError):
        g.tie(g.terminal("a"), g.epsilon())


def test_untied_placeholder_is_reported(kernel):
    g = GrammarGraph(kernel)
    (s,) = g.recursive(1)
    node = g.alt(g.terminal("a"), s)
    with pytest.raises(UntiedPlaceholderError):
        g.check_tied()
    with pytest.raises(UntiedPlaceholderError):
        g.kernel.nullable(node)
    with pytest.raises(UntiedPlaceholderError):
        g.kernel.derive(node, g.class_id("b"))


def test_self_loop_recognizes_nothing(kernel):
    g = GrammarGraph(kernel)
    (s,) = g.recursive(1)
    g.tie(s, s)
    assert g.kernel.is_empty(s)
    assert not g.kernel.nullable(s)
    assert language(g, s, "ab", 4) == set()
    graph, start, _ = build("start S; S -> S;", kernel)
    assert graph.kernel.is_empty(start)
    for word in ["", "a", "aa"]:
        assert not parse_classes(graph, start, list(word)).accepted


# -- compaction soundness ------------------------------------------------------

def exprs():
    leaf = st.one_of(
        st.sampled_from(ABC).map(lambda c: ("t", c)),
        st.just(("eps",)),
        st.just(("empty",)),
    )
    return st.recursive(leaf, lambda inner: st.one_of(
        st.tuples(st.just("alt"), inner, inner),
        st.tuples(st.just("cat"), inner, inner),
        st.tuples(st.just("red"), inner, st.sampled_from(["r1", "r2"])),
        st.tuples(st.just("star"), inner),
    ), max_leaves=8)


def lower(g, e, compact):
    op = e[0]
    if op == "t":
        return g.terminal(e[1])
    if op == "eps":
        return g.epsilon() if compact else g.raw_epsilon()
    if op == "empty":
        return g.empty()
    if op == "red":
        x = lower(g, e[1], compact)
        return g.red(x, e[2]) if compact else g.raw_red(x, e[2])
    if op == "star":
        x = lower(g, e[1], compact)
        (p,) = g.recursive(1)
        if compact:
            g.tie(p, g.alt(g.epsilon(), g.cat(x, p)))
        else:
            g.tie(p, g.raw_alt(g.raw_epsilon(), g.raw_cat(x, p)))
        return p
    x = lower(g, e[1], compact)
    y = lower(g, e[2], compact)
    if op == "alt":
        return g.alt(x, y) if compact else g.raw_alt(x, y)
    return g.cat(x, y) if compact else g.raw_cat(x, y)


@given(exprs())
@settings(max_examples=80)
def test_compaction_preserves_language_and_trees(kernel, e):
    compact = GrammarGraph(kernel)
    raw = GrammarGraph(kernel)
    x = lower(compact, e, True)
    y = lower(raw, e, False)
    lx = language(compact, x, ABC, 6)
    assert lx == language(raw, y, ABC, 6)
    for word in sorted(w for w in lx if len(w) <= 3):
        fx = parse_classes(compact, x, word).forest()
        fy = parse_classes(raw, y, word).forest()
        cx = fx.count(cap=100)
        assert cx == fy.count(cap=100)
        if cx != INFINITE and cx < 100:
            assert set(fx.trees(100)) == set(fy.trees(100))


# -- handles and memo -----------------------------------------------------------

def test_handles_are_stable_across_parsing(kernel):
    spec = load_bundled("sexpr")
    g, start = elaborate(spec, kernel=kernel)
    before = [g.kernel.node(h) for h in range(g.size())]
    st_ = DerivationState(g, start).feed(lex("sexpr", "(a (b c) ((d)) e)"))
    assert st_.accepted
    after = [g.kernel.node(h) for h in range(len(before))]
    assert [n[0] for n in after] == [n[0] for n in before]
    # non-delay nodes are immutable outright
    assert [n for n in after if n[0] != NodeKind.DELAY] == \
        [n for n in before if n[0] != NodeKind.DELAY]


@given(st.integers(0, 10 ** 6), st.lists(st.sampled_from("ab"), max_size=6))
def test_memo_is_idempotent(kernel, seed, word):
    spec = gen_random_grammar(seed, 6, 3)
    g, start = elaborate(spec, kernel=kernel)
    k = g.kernel
    node = start
    for c in word:
        cid = g.class_id(c)
        d1 = k.derive(node, cid)
        size = g.size()
        d2 = k.derive(node, cid)
        assert d1 == d2
        assert g.size() == size
        node = d1


@pytest.mark.parametrize("n", [10 ** 3, 10 ** 4, 10 ** 5])
def test_arena_growth_is_linear_in_tokens(kernel, n):
    spec = load_bundled("sexpr")
    toks = lex("sexpr", gen_corpus(spec, 7, n, "sexpr"))
    g, start = elaborate(spec, kernel=kernel)
    base = g.size()
    state = DerivationState(g, start, keep_tokens=False).feed(toks)
    assert state.accepted
    assert g.size() / len(toks) <= 200
    assert (g.size() - base) / len(toks) < 10


def test_forest_of_unrelated_root_is_empty(kernel):
    g = GrammarGraph(kernel)
    assert ParseForest(g, 0).is_empty
