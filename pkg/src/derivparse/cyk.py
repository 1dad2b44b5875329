"""CYK differential oracle, independent of the derivative engine.

The grammar is binarized into Chomsky-normal shape (every production is
``A -> ε``, ``A -> B``, ``A -> B C`` or ``T -> c``) with fresh helper
symbols, each of which has exactly one production, so derivation counts are
preserved one-for-one. Epsilon and unit productions are not eliminated;
instead each chart cell is closed under them, which keeps counts exact and
makes infinite ambiguity (a pumpable unit/epsilon cycle) visible as
``math.inf``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf
DEFAULT_MAX_LEN = 16


class OracleError(Exception):
    pass


def _mul(a, b):
    if a == 0 or b == 0:
        return 0
    if a == INF or b == INF:
        return INF
    return a * b


@dataclass
class BinaryGrammar:
    symbols: list
    start: int
    eps: list = field(default_factory=list)       # eps[A] = number of A -> ε
    units: list = field(default_factory=list)     # (A, B)
    binaries: list = field(default_factory=list)  # (A, B, C)
    lexical: dict = field(default_factory=dict)   # class name -> [T]
    null: list = None                             # ε-derivation counts


def binarize(spec):
    symbols = []
    index = {}

    def sym(name):
        if name not in index:
            index[name] = len(symbols)
            symbols.append(name)
        return index[name]

    for nt in spec.rules:
        sym(("nt", nt))
    g = BinaryGrammar(symbols=symbols, start=index[("nt", spec.start)])
    units = []
    binaries = []
    eps = {}
    lexical = {}

    def rhs_symbol(s):
        if s.kind == "nt":
            return index[("nt", s.name)]
        key = ("t", s.name)
        if key not in index:
            t = sym(key)
            lexical.setdefault(s.name, []).append(t)
        return index[key]

    for nt, alts in spec.rules.items():
        a = index[("nt", nt)]
        for i, alt in enumerate(alts):
            ys = [rhs_symbol(s) for s in alt]
            if not ys:
                eps[a] = eps.get(a, 0) + 1
            elif len(ys) == 1:
                units.append((a, ys[0]))
            else:
                head = a
                for j in range(len(ys) - 2):
                    h = sym(("h", nt, i, j))
                    binaries.append((head, ys[j], h))
                    head = h
                binaries.append((head, ys[-2], ys[-1]))
    n = len(symbols)
    g.eps = [eps.get(s, 0) for s in range(n)]
    g.units = units
    g.binaries = binaries
    g.lexical = lexical
    g.null = _null_counts(g)
    return g


def _solve_cell(n, base, edges):
    """Least solution of x = base + M x over counts with infinity.

    ``edges`` holds (A, B, coeff) meaning x[A] += coeff * x[B].
    """
    nonzero = [base[s] != 0 for s in range(n)]
    changed = True
    while changed:
        changed = False
        for a, b, c in edges:
            if not nonzero[a] and nonzero[b] and c != 0:
                nonzero[a] = True
                changed = True
    deps = [[] for _ in range(n)]
    for a, b, c in edges:
        if c != 0 and nonzero[b]:
            deps[a].append((b, c))
    val = [None] * n
    state = [0] * n  # 0 new, 1 on stack, 2 done
    for root in range(n):
        if state[root]:
            continue
        stack = [(root, 0)]
        state[root] = 1
        while stack:
            a, i = stack[-1]
            if i < len(deps[a]):
                stack[-1] = (a, i + 1)
                b = deps[a][i][0]
                if state[b] == 0:
                    state[b] = 1
                    stack.append((b, 0))
                elif state[b] == 1:
                    val[b] = INF  # on a cycle of nonzero symbols
                continue
            stack.pop()
            total = INF if val[a] == INF else base[a]
            if total != INF:
                for b, c in deps[a]:
                    vb = val[b]
                    if vb is None or vb == INF or c == INF:
                        total = INF
                        break
                    total += c * vb
            val[a] = total
            state[a] = 2
    return val


def _null_counts(g):
    n = len(g.symbols)
    # A -> B C over the empty string: x[A] += x[B] * x[C]; nonlinear, so
    # iterate the boolean part first and then evaluate in dependency order
    nullable = [g.eps[s] > 0 for s in range(n)]
    changed = True
    while changed:
        changed = False
        for a, b in g.units:
            if nullable[b] and not nullable[a]:
                nullable[a] = changed = True
        for a, b, c in g.binaries:
            if nullable[b] and nullable[c] and not nullable[a]:
                nullable[a] = changed = True
    # dependency graph among nullable symbols
    deps = [[] for _ in range(n)]
    for a, b in g.units:
        if nullable[b]:
            deps[a].append((b,))
    for a, b, c in g.binaries:
        if nullable[b] and nullable[c]:
            deps[a].append((b, c))
    val = [None] * n
    state = [0] * n
    for root in range(n):
        if state[root] or not nullable[root]:
            if not nullable[root]:
                val[root] = 0
            continue
        stack = [(root, 0, 0)]
        state[root] = 1
        while stack:
            a, i, j = stack[-1]
            if i < len(deps[a]):
                kids = deps[a][i]
                if j < len(kids):
                    stack[-1] = (a, i, j + 1)
                    b = kids[j]
                    if state[b] == 0:
                        state[b] = 1
                        stack.append((b, 0, 0))
                    elif state[b] == 1:
                        val[b] = INF
                else:
                    stack[-1] = (a, i + 1, 0)
                continue
            stack.pop()
            if val[a] == INF:
                state[a] = 2
                continue
            total = g.eps[a]
            for kids in deps[a]:
                term = 1
                for b in kids:
                    term = _mul(term, val[b] if val[b] is not None else INF)
                if term == INF:
                    total = INF
                    break
                total += term
            val[a] = total
            state[a] = 2
    return [0 if v is None else v for v in val]


def cyk_oracle(spec, classes, max_len=DEFAULT_MAX_LEN, grammar=None):
    """``(accepted, derivation_count)`` of the token-class string ``classes``.

    The count is ``math.inf`` for infinitely ambiguous inputs.
    """
    classes = list(classes)
    if len(classes) > max_len:
        raise OracleError("input of length %d exceeds the oracle bound %d"
                          % (len(classes), max_len))
    g = grammar or binarize(spec)
    n = len(classes)
    ns = len(g.symbols)
    if n == 0:
        c = g.null[g.start]
        return c != 0, c
    chart = {}
    for i in range(n + 1):
        chart[(i, i)] = g.null
    for length in range(1, n + 1):
        for i in range(n - length + 1):
            j = i + length
            base = [0] * ns
            if length == 1:
                for t in g.lexical.get(classes[i], ()):
                    base[t] += 1
            edges = [(a, b, 1) for a, b in g.units]
            for a, b, c in g.binaries:
                for k in range(i + 1, j):
                    base[a] = _add(base[a], _mul(chart[(i, k)][b], chart[(k, j)][c]))
                # empty left or right part: linear in the same cell
                edges.append((a, c, g.null[b]))
                edges.append((a, b, g.null[c]))
            chart[(i, j)] = _solve_cell(ns, base, edges)
    c = chart[(0, n)][g.start]
    return c != 0, c


def _add(a, b):
    if a == INF or b == INF:
        return INF
    return a + b


def recognize_all(spec, alphabet, length, grammar=None):
    """Acceptance of every string of exactly ``length`` classes over ``alphabet``.

    Vectorized boolean CYK over the same binarized grammar; strings are
    ordered as base-``len(alphabet)`` numerals, most significant first.
    """
    g = grammar or binarize(spec)
    ns = len(g.symbols)
    nullable = np.array([v != 0 for v in g.null], dtype=bool)
    if length == 0:
        return np.array([bool(nullable[g.start])])
    m = len(alphabet)
    count = m ** length
    digits = np.empty((count, length), dtype=np.int64)
    idx = np.arange(count)
    for pos in range(length - 1, -1, -1):
        digits[:, pos] = idx % m
        idx //= m
    units = g.units
    bins = g.binaries
    # same-cell implications: A <= B (unit), A <= C if B nullable, A <= B if C nullable
    implic = [(a, b) for a, b in units]
    for a, b, c in bins:
        if nullable[b]:
            implic.append((a, c))
        if nullable[c]:
            implic.append((a, b))
    chart = {}
    for length_ in range(1, length + 1):
        for i in range(length - length_ + 1):
            j = i + length_
            cell = np.zeros((count, ns), dtype=bool)
            if length_ == 1:
                for ai, cls in enumerate(alphabet):
                    hit = digits[:, i] == ai
                    for t in g.lexical.get(cls, ()):
                        cell[:, t] |= hit
            for a, b, c in bins:
                for k in range(i + 1, j):
                    cell[:, a] |= chart[(i, k)][:, b] & chart[(k, j)][:, c]
            changed = True
            while changed:
                changed = False
                for a, b in implic:
                    new = cell[:, b] & ~cell[:, a]
                    if new.any():
                        cell[:, a] |= new
                        changed = True
            chart[(i, j)] = cell
    return chart[(0, length)][:, g.start].copy()
