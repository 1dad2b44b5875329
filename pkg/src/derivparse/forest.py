"""Shared parse forests: counting, bounded enumeration and serialization.

A forest node in the kernel is one of EMPTY, EPS, LEAF, PAIR, TAG or AMB;
TAG applies a reduction, which is either a label (a tree constructor), a
prepend/append of another forest, or a composition of two reductions.

Leaves store only their token class. Every tree of a complete parse yields
the input in order, so the i-th leaf of a materialized tree is bound to the
i-th input token.
"""

import gc
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass

from . import kernel as _k
from .lexer import Token

INFINITE = math.inf


@contextmanager
def _gc_paused():
    # traversals build millions of short-lived acyclic tuples; collection
    # passes over them only cost time
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


class Saturated(int):
    """Returned by :func:`count_trees` when the count reached ``cap``."""

    def __repr__(self):
        return "Saturated(>=%d)" % int(self)

    __str__ = __repr__


@dataclass(frozen=True)
class Leaf:
    token: Token


@dataclass(frozen=True)
class Pair:
    left: object
    right: object


@dataclass(frozen=True)
class Node:
    tag: object  # ReductionTag
    child: object


@dataclass(frozen=True)
class Eps:
    pass


EPS = Eps()

# raw (unbound) trees are tuples: ("E",), ("L", cls), ("P", l, r), ("T", tag, c)
_E = ("E",)


class ParseForest:
    """A forest root plus the tokens its leaves stand for."""

    def __init__(self, graph, root, tokens=None):
        self.graph = graph
        self.root = root
        self.tokens = None if tokens is None else list(tokens)

    @property
    def is_empty(self):
        return self.root == _k.FOREST_EMPTY

    def count(self, cap=10 ** 6):
        return count_trees(self, cap)

    def trees(self, limit):
        return enumerate_trees(self, limit)

    def size(self):
        """Number of forest and reduction units reachable from the root."""
        return len(_reachable(self.graph.kernel, self.root))


def _units(kernel, u):
    """Children of a counting unit (forest id * 2, or reduction id * 2 + 1)."""
    if u & 1:
        rk, ra, rb = kernel.reduction(u >> 1)
        if rk == _k.R_LABEL:
            return ()
        if rk == _k.R_COMPOSE:
            return (ra * 2 + 1, rb * 2 + 1)
        return (ra * 2,)
    fk, fa, fb = kernel.forest(u >> 1)
    if fk == _k.F_PAIR or fk == _k.F_AMB:
        return (fa * 2, fb * 2)
    if fk == _k.F_TAG:
        return (fa * 2, fb * 2 + 1)
    return ()


def _reachable(kernel, root):
    seen = {root * 2}
    stack = [root * 2]
    while stack:
        u = stack.pop()
        for v in _units(kernel, u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def count_trees(forest, cap=10 ** 6):
    """Number of derivations in ``forest``.

    Exact int below ``cap``; ``Saturated(cap)`` once the count reaches cap;
    ``INFINITE`` when a cycle lies on a counted path.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    with _gc_paused():
        return _count(forest, cap)


def _count(forest, cap):
    kernel = forest.graph.kernel
    done = {}
    on_stack = set()
    root = forest.root * 2
    stack = [(root, _units(kernel, root), [])]
    on_stack.add(root)
    while stack:
        u, kids, vals = stack[-1]
        if len(vals) < len(kids):
            v = kids[len(vals)]
            if v in done:
                vals.append(done[v])
            elif v in on_stack:
                vals.append(INFINITE)
            else:
                on_stack.add(v)
                stack.append((v, _units(kernel, v), []))
            continue
        stack.pop()
        on_stack.discard(u)
        val = _combine(kernel, u, vals, cap)
        done[u] = val
        if stack:
            stack[-1][2].append(val)
    val = done[root]
    if val == INFINITE:
        return INFINITE
    if val >= cap:
        return Saturated(cap)
    return val


def _combine(kernel, u, vals, cap):
    if u & 1:
        if not vals:
            return 1
        return _product(vals, cap)
    fk = kernel.forest(u >> 1)[0]
    if fk == _k.F_EMPTY:
        return 0
    if fk == _k.F_EPS or fk == _k.F_LEAF:
        return 1
    if fk == _k.F_AMB:
        a, b = vals
        if a == INFINITE or b == INFINITE:
            return INFINITE
        return min(a + b, cap)
    return _product(vals, cap)


def _product(vals, cap):
    if 0 in vals:
        return 0
    if INFINITE in vals:
        return INFINITE
    out = 1
    for v in vals:
        out = min(out * v, cap)
    return out


# -- enumeration -------------------------------------------------------------

class _Gen:
    def __init__(self, kernel):
        self.kernel = kernel
        self.truncated = False

    def gen(self, e, budget, path):
        """Raw trees of expression ``e`` using at most ``budget`` constructors
        on any root-to-leaf path (None: unbounded)."""
        kernel = self.kernel
        if type(e) is tuple:
            red, inner = e
            rk, ra, rb = kernel.reduction(red)
            if rk == _k.R_COMPOSE:
                yield from self.gen((ra, (rb, inner)), budget, path)
                return
            if budget == 0:
                self.truncated = True
                return
            sub = None if budget is None else budget - 1
            if rk == _k.R_LABEL:
                for c in self.gen(inner, sub, frozenset()):
                    yield ("T", ra, c)
            elif rk == _k.R_PREPEND:
                rights = list(self.gen(inner, sub, frozenset()))
                for p in self.gen(ra, sub, frozenset()):
                    for c in rights:
                        yield ("P", p, c)
            else:
                rights = list(self.gen(ra, sub, frozenset()))
                for c in self.gen(inner, sub, frozenset()):
                    for p in rights:
                        yield ("P", c, p)
            return
        fk, fa, fb = kernel.forest(e)
        if fk == _k.F_EPS:
            yield _E
        elif fk == _k.F_LEAF:
            yield ("L", fa)
        elif fk == _k.F_AMB:
            if e in path:
                return
            path = path | {e}
            yield from self.gen(fa, budget, path)
            yield from self.gen(fb, budget, path)
        elif fk == _k.F_TAG:
            yield from self.gen((fb, fa), budget, path)
        elif fk == _k.F_PAIR:
            if budget == 0:
                self.truncated = True
                return
            sub = None if budget is None else budget - 1
            rights = list(self.gen(fb, sub, frozenset()))
            for left in self.gen(fa, sub, frozenset()):
                for right in rights:
                    yield ("P", left, right)


def enumerate_trees(forest, limit):
    """Up to ``limit`` distinct trees, in a deterministic order.

    Acyclic forests are expanded directly. Cyclic ones are expanded by
    iterative deepening over constructor depth, so every tree is reached
    eventually and the call terminates for any finite ``limit``.
    """
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if limit == 0 or forest.is_empty:
        return []
    with _gc_paused():
        return _enumerate(forest, limit)


def _enumerate(forest, limit):
    kernel = forest.graph.kernel
    total = count_trees(forest, cap=2)
    if total == 1:
        return [bind_tree(forest, _single_raw(kernel, forest.root))]
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 20000))
    try:
        seen = set()
        out = []
        if total != INFINITE:
            for raw in _Gen(kernel).gen(forest.root, None, frozenset()):
                if raw not in seen:
                    seen.add(raw)
                    out.append(raw)
                    if len(out) >= limit:
                        break
        else:
            depth = 0
            while len(out) < limit:
                g = _Gen(kernel)
                for raw in g.gen(forest.root, depth, frozenset()):
                    if raw not in seen:
                        seen.add(raw)
                        out.append(raw)
                        if len(out) >= limit:
                            break
                if not g.truncated:
                    break
                depth += 1
    finally:
        sys.setrecursionlimit(old_limit)
    return [bind_tree(forest, raw) for raw in out]


def _single_raw(kernel, root):
    """Materialize the only tree of an AMB-free acyclic forest, iteratively."""
    # work items: ("f", fid) / ("r", red, expr) to expand, ("P",) / ("T", tag) to build
    work = [("f", root)]
    vals = []
    while work:
        item = work.pop()
        op = item[0]
        if op == "f":
            fk, fa, fb = kernel.forest(item[1])
            if fk == _k.F_EPS:
                vals.append(_E)
            elif fk == _k.F_LEAF:
                vals.append(("L", fa))
            elif fk == _k.F_PAIR:
                work.append(("P",))
                work.append(("f", fb))
                work.append(("f", fa))
            elif fk == _k.F_TAG:
                work.append(("r", fb, ("f", fa)))
            else:
                raise ValueError("forest is not a single tree")
        elif op == "r":
            rk, ra, rb = kernel.reduction(item[1])
            inner = item[2]
            if rk == _k.R_COMPOSE:
                work.append(("r", ra, ("r", rb, inner)))
            elif rk == _k.R_LABEL:
                work.append(("T", ra))
                work.append(inner)
            elif rk == _k.R_PREPEND:
                work.append(("P",))
                work.append(inner)
                work.append(("f", ra))
            else:
                work.append(("P",))
                work.append(("f", ra))
                work.append(inner)
        elif op == "P":
            right = vals.pop()
            left = vals.pop()
            vals.append(("P", left, right))
        else:
            vals.append(("T", item[1], vals.pop()))
    (raw,) = vals
    return raw


def bind_tree(forest, raw):
    """Turn a raw tree into :class:`Leaf`/:class:`Pair`/:class:`Node` values,
    binding leaves to the forest's tokens left to right."""
    graph = forest.graph
    tokens = forest.tokens
    pos = 0
    work = [(raw, False)]
    vals = []
    while work:
        t, built = work.pop()
        op = t[0]
        if op == "E":
            vals.append(EPS)
        elif op == "L":
            if tokens is None:
                name = graph.class_name(t[1])
                vals.append(Leaf(Token(name, name, -1)))
            else:
                if pos >= len(tokens):
                    raise ValueError("tree has more leaves than input tokens")
                vals.append(Leaf(tokens[pos]))
            pos += 1
        elif op == "P":
            if built:
                right = vals.pop()
                left = vals.pop()
                vals.append(Pair(left, right))
            else:
                work.append((t, True))
                work.append((t[2], False))
                work.append((t[1], False))
        else:
            if built:
                vals.append(Node(graph.tags[t[1]], vals.pop()))
            else:
                work.append((t, True))
                work.append((t[2], False))
    if tokens is not None and pos != len(tokens):
        raise ValueError("tree has %d leaves for %d tokens" % (pos, len(tokens)))
    (tree,) = vals
    return tree


# -- tree utilities ------------------------------------------------------------

def tree_leaves(tree):
    """Leaf tokens of ``tree`` in left-to-right order."""
    out = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            out.append(t.token)
        elif isinstance(t, Pair):
            stack.append(t.right)
            stack.append(t.left)
        elif isinstance(t, Node):
            stack.append(t.child)
    return out


def tree_depth(tree):
    """Nesting depth counted in tagged nodes."""
    best = 0
    stack = [(tree, 0)]
    while stack:
        t, d = stack.pop()
        if isinstance(t, Node):
            d += 1
            best = max(best, d)
            stack.append((t.child, d))
        elif isinstance(t, Pair):
            stack.append((t.left, d))
            stack.append((t.right, d))
    return best


_SPECIAL = set(' \t\n\r\f\v()"\\')


def quote_atom(s):
    if s and not any(ch in _SPECIAL for ch in s):
        return s
    body = (s.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r"))
    return '"%s"' % body


def serialize_tree(tree):
    """Canonical text form.

    A leaf prints its lexeme, quoted when it contains whitespace, parens,
    quotes or backslashes (or is empty). A ``wrap`` node prints
    ``(label child...)`` where the children are its pair tree flattened left
    to right with epsilons dropped; ``flatten`` nodes splice their children
    into the parent and ``leaf`` nodes print only their label.
    """
    frags = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, str):
            frags.append(t)
        elif isinstance(t, Leaf):
            frags.append(quote_atom(t.token.lexeme))
        elif isinstance(t, Pair):
            stack.append(t.right)
            stack.append(t.left)
        elif isinstance(t, Node):
            arity = t.tag.arity
            if arity == "leaf":
                frags.append(quote_atom(t.tag.label))
            elif arity == "flatten":
                stack.append(t.child)
            else:
                stack.append(")")
                stack.append(t.child)
                frags.append("(" + quote_atom(t.tag.label))
    out = []
    for f in frags:
        if out and f != ")":
            out.append(" ")
        out.append(f)
    return "".join(out)
