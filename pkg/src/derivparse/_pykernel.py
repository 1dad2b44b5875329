"""Pure-Python derivative kernel.

This module and ``_ckernel.pyx`` implement the same ``Kernel`` class; the
compiled one is preferred at import time (see ``derivparse.kernel``).

Three arenas live in a kernel, all addressed by dense ints:

* grammar nodes: ``k`` (kind), ``a``/``b``/``c`` (operands), ``st`` (fixpoint
  state bits), ``nf`` (cached null-parse forest), ``mc``/``mr`` (one-entry
  derivative memo, overflow in ``memo``);
* forest nodes: ``fk``/``fa``/``fb``;
* reductions: ``rk``/``ra``/``rb``.

Operand layout per node kind::

    EMPTY   -
    EPS     a = forest
    TERM    a = token class
    ALT     a, b = children
    CAT     a, b = children
    RED     a = inner, b = reduction
    DELAY   a = forced target (NONE while unforced), b = source node
            (NONE for a placeholder), c = token class
"""

NONE = -1
PENDING = -2

EMPTY = 0
EPS = 1
TERM = 2
ALT = 3
CAT = 4
RED = 5
DELAY = 6

F_EMPTY = 0
F_EPS = 1
F_LEAF = 2
F_PAIR = 3
F_TAG = 4
F_AMB = 5

R_LABEL = 0
R_PREPEND = 1
R_APPEND = 2
R_COMPOSE = 3

ST_FINAL = 1
ST_NULL = 2
ST_EMPTY = 4
ST_DEAD = ST_FINAL | ST_EMPTY

EMPTY_NODE = 0
EPS_NODE = 1
FOREST_EMPTY = 0
FOREST_EPS = 1

# memo overflow key: node * stride + class
_STRIDE = 1 << 24


class UntiedPlaceholderError(Exception):
    """An analysis reached a recursive placeholder that was never tied."""


class KernelError(Exception):
    """Internal invariant violated; indicates a bug, not bad input."""


class Kernel:
    name = "python"

    def __init__(self):
        self.k = []
        self.a = []
        self.b = []
        self.c = []
        self.st = []
        self.nf = []
        self.mc = []
        self.mr = []
        self.memo = {}
        self.fk = [F_EMPTY, F_EPS]
        self.fa = [NONE, NONE]
        self.fb = [NONE, NONE]
        self.rk = []
        self.ra = []
        self.rb = []
        self._labels = {}
        self._leaf_eps = {}
        self._leaf_forest = {}
        self.last_solve_evals = 0
        self.last_solve_region = 0
        self._new(EMPTY, NONE, NONE, NONE, ST_DEAD)
        self._new(EPS, FOREST_EPS, NONE, NONE, ST_FINAL | ST_NULL)

    # -- arena ------------------------------------------------------------

    def _new(self, kind, a, b, c, st):
        n = len(self.k)
        self.k.append(kind)
        self.a.append(a)
        self.b.append(b)
        self.c.append(c)
        self.st.append(st)
        self.nf.append(NONE)
        self.mc.append(NONE)
        self.mr.append(NONE)
        return n

    def num_nodes(self):
        return len(self.k)

    def num_forests(self):
        return len(self.fk)

    def num_reductions(self):
        return len(self.rk)

    def node(self, n):
        return self.k[n], self.a[n], self.b[n], self.c[n]

    def state(self, n):
        return self.st[n]

    def forest(self, f):
        return self.fk[f], self.fa[f], self.fb[f]

    def reduction(self, r):
        return self.rk[r], self.ra[r], self.rb[r]

    def resolve(self, n):
        k = self.k
        a = self.a
        while k[n] == DELAY and a[n] != NONE:
            n = a[n]
        return n

    # -- forests and reductions ------------------------------------------

    def _falloc(self, kind, a, b):
        f = len(self.fk)
        self.fk.append(kind)
        self.fa.append(a)
        self.fb.append(b)
        return f

    def f_leaf(self, cls):
        f = self._leaf_forest.get(cls)
        if f is None:
            f = self._leaf_forest[cls] = self._falloc(F_LEAF, cls, NONE)
        return f

    def f_pair(self, l, r):
        if l == FOREST_EMPTY or r == FOREST_EMPTY:
            return FOREST_EMPTY
        return self._falloc(F_PAIR, l, r)

    def f_tag(self, f, red):
        if f == FOREST_EMPTY:
            return FOREST_EMPTY
        return self._falloc(F_TAG, f, red)

    def f_amb(self, l, r):
        if l == FOREST_EMPTY:
            return r
        if r == FOREST_EMPTY:
            return l
        return self._falloc(F_AMB, l, r)

    def _ralloc(self, kind, a, b):
        r = len(self.rk)
        self.rk.append(kind)
        self.ra.append(a)
        self.rb.append(b)
        return r

    def red_label(self, tag):
        r = self._labels.get(tag)
        if r is None:
            r = self._labels[tag] = self._ralloc(R_LABEL, tag, NONE)
        return r

    def red_prepend(self, f):
        return self._ralloc(R_PREPEND, f, NONE)

    def red_append(self, f):
        return self._ralloc(R_APPEND, f, NONE)

    def red_compose(self, outer, inner):
        return self._ralloc(R_COMPOSE, outer, inner)

    # -- constructors -----------------------------------------------------

    def mk_empty(self):
        return EMPTY_NODE

    def mk_eps(self, f):
        if f == FOREST_EMPTY:
            return EMPTY_NODE
        if f == FOREST_EPS:
            return EPS_NODE
        return self._new(EPS, f, NONE, NONE, ST_FINAL | ST_NULL)

    def mk_term(self, cls):
        return self._new(TERM, cls, NONE, NONE, ST_FINAL)

    def _eps_leaf(self, cls):
        n = self._leaf_eps.get(cls)
        if n is None:
            n = self._leaf_eps[cls] = self._new(
                EPS, self.f_leaf(cls), NONE, NONE, ST_FINAL | ST_NULL)
        return n

    def mk_alt(self, x, y):
        k = self.k
        a = self.a
        st = self.st
        while k[x] == DELAY and a[x] != NONE:
            x = a[x]
        while k[y] == DELAY and a[y] != NONE:
            y = a[y]
        sx = st[x]
        sy = st[y]
        if sx & ST_DEAD == ST_DEAD:
            return y
        if sy & ST_DEAD == ST_DEAD:
            return x
        s = 0
        if sx & sy & ST_FINAL:
            s = ST_FINAL | ((sx | sy) & ST_NULL)
        return self._new(ALT, x, y, NONE, s)

    def mk_cat(self, x, y):
        k = self.k
        a = self.a
        st = self.st
        while k[x] == DELAY and a[x] != NONE:
            x = a[x]
        while k[y] == DELAY and a[y] != NONE:
            y = a[y]
        sx = st[x]
        sy = st[y]
        if sx & ST_DEAD == ST_DEAD or sy & ST_DEAD == ST_DEAD:
            return EMPTY_NODE
        if k[x] == EPS:
            return self.mk_red(y, self.red_prepend(a[x]))
        if k[y] == EPS:
            return self.mk_red(x, self.red_append(a[y]))
        s = 0
        if sx & sy & ST_FINAL:
            s = ST_FINAL | (sx & sy & ST_NULL)
        return self._new(CAT, x, y, NONE, s)

    def mk_red(self, x, red):
        k = self.k
        a = self.a
        while k[x] == DELAY and a[x] != NONE:
            x = a[x]
        sx = self.st[x]
        if sx & ST_DEAD == ST_DEAD:
            return EMPTY_NODE
        kx = k[x]
        if kx == EPS:
            return self.mk_eps(self.f_tag(a[x], red))
        if kx == RED:
            return self._new(RED, a[x], self.red_compose(red, self.b[x]),
                             NONE, sx & (ST_FINAL | ST_NULL))
        return self._new(RED, x, red, NONE, sx & (ST_FINAL | ST_NULL))

    # uncompacted twins, for compaction-soundness checks
    def raw_eps(self, f):
        return self._new(EPS, f, NONE, NONE, ST_FINAL | ST_NULL)

    def raw_alt(self, x, y):
        return self._new(ALT, x, y, NONE, self._raw_state(ALT, x, y))

    def raw_cat(self, x, y):
        return self._new(CAT, x, y, NONE, self._raw_state(CAT, x, y))

    def raw_red(self, x, red):
        return self._new(RED, x, red, NONE, self._raw_state(RED, x, x))

    def _raw_state(self, kind, x, y):
        sx = self.st[self.resolve(x)]
        sy = self.st[self.resolve(y)]
        if not (sx & sy & ST_FINAL):
            return 0
        if kind == ALT:
            return ST_FINAL | ((sx | sy) & ST_NULL) | (sx & sy & ST_EMPTY)
        if kind == CAT:
            return ST_FINAL | (sx & sy & ST_NULL) | ((sx | sy) & ST_EMPTY)
        return sx

    def mk_placeholder(self):
        return self._new(DELAY, NONE, NONE, NONE, 0)

    def tie(self, p, target):
        if self.k[p] != DELAY or self.b[p] != NONE:
            raise ValueError("handle %d is not a placeholder" % p)
        if self.a[p] != NONE:
            raise ValueError("placeholder %d is already tied" % p)
        self._force(p, target)

    def is_tied(self, p):
        return self.k[p] != DELAY or self.a[p] != NONE

    def _force(self, d, r):
        r = self.resolve(r)
        if r == d:
            # pure forwarding cycle: least fixpoint is the empty language
            r = EMPTY_NODE
        self.a[d] = r
        s = self.st[r]
        self.st[d] = s if s & ST_FINAL else 0

    # -- derivative -------------------------------------------------------

    def derive(self, n, cls):
        k = self.k
        a = self.a
        while k[n] == DELAY and a[n] != NONE:
            n = a[n]
        kind = k[n]
        if kind <= EPS:
            return EMPTY_NODE
        if kind == TERM:
            if a[n] == cls:
                return self._eps_leaf(cls)
            return EMPTY_NODE
        if kind == DELAY:
            if self.b[n] == NONE:
                raise UntiedPlaceholderError("placeholder %d was never tied" % n)
            raise KernelError("derivative reached unforced node %d" % n)
        mc = self.mc[n]
        if mc == cls:
            hit = self.mr[n]
            if hit == PENDING:
                hit = self.mr[n] = self._new(DELAY, NONE, n, cls, 0)
            return self.resolve(hit)
        if mc != NONE:
            key = n * _STRIDE + cls
            hit = self.memo.get(key)
            if hit is not None:
                if hit == PENDING:
                    hit = self.memo[key] = self._new(DELAY, NONE, n, cls, 0)
                return self.resolve(hit)
        # checked after the memo so a repeated call returns the same handle
        if self.st[n] & ST_DEAD == ST_DEAD:
            return EMPTY_NODE
        if mc != NONE:
            self.memo[key] = PENDING
        else:
            key = NONE
            self.mc[n] = cls
            self.mr[n] = PENDING
        if kind == ALT:
            r = self.mk_alt(self.derive(a[n], cls), self.derive(self.b[n], cls))
        elif kind == CAT:
            first = a[n]
            second = self.b[n]
            r = self.mk_cat(self.derive(first, cls), second)
            if self.nullable(first):
                r = self.mk_alt(r, self.mk_red(
                    self.derive(second, cls),
                    self.red_prepend(self.null_parses(first))))
        else:
            r = self.mk_red(self.derive(a[n], cls), self.b[n])
        # a Delay exists only if a cycle reached this entry while in progress
        d = self.mr[n] if key == NONE else self.memo[key]
        if d == PENDING:
            r = self.resolve(r)
        else:
            self._force(d, r)
            r = self.resolve(d)
        if key == NONE:
            self.mr[n] = r
        else:
            self.memo[key] = r
        return r

    # -- fixpoints --------------------------------------------------------

    def nullable(self, n):
        n = self.resolve(n)
        s = self.st[n]
        if not s & ST_FINAL:
            self._solve([n])
            s = self.st[n]
        return bool(s & ST_NULL)

    def is_empty(self, n):
        n = self.resolve(n)
        s = self.st[n]
        if not s & ST_FINAL:
            self._solve([n])
            s = self.st[n]
        return bool(s & ST_EMPTY)

    def solve_all(self):
        st = self.st
        return self._solve([n for n in range(len(st)) if not st[n] & ST_FINAL])

    def _solve(self, roots):
        """Horn-style least fixpoint over every unsolved node reachable from roots.

        Both properties (nullable, productive) start at bottom and only ever
        flip once, so evaluations stay within 2x the region per property.
        """
        k = self.k
        a = self.a
        b = self.b
        st = self.st
        index = {}
        region = []
        stack = list(roots)
        while stack:
            m = stack.pop()
            if st[m] & ST_FINAL or m in index:
                continue
            index[m] = len(region)
            region.append(m)
            km = k[m]
            if km == ALT or km == CAT:
                stack.append(a[m])
                stack.append(b[m])
            elif km == RED:
                stack.append(a[m])
            elif km == DELAY:
                if a[m] == NONE:
                    if b[m] == NONE:
                        raise UntiedPlaceholderError(
                            "placeholder %d was never tied" % m)
                    raise KernelError("fixpoint reached unforced node %d" % m)
                stack.append(a[m])
            else:
                raise KernelError("leaf node %d is not final" % m)
        size = len(region)
        if not size:
            self.last_solve_evals = 0
            self.last_solve_region = 0
            return 0
        parents = [[] for _ in range(size)]
        evals = 0
        results = []
        for bit in (ST_NULL, ST_EMPTY):
            # value "true" means nullable (bit=ST_NULL) or productive (ST_EMPTY)
            need = [0] * size
            value = [False] * size
            queue = []
            for i in range(size):
                m = region[i]
                evals += 1
                km = k[m]
                if km == CAT:
                    kids = (a[m], b[m])
                    conj = True
                else:
                    kids = (a[m], b[m]) if km == ALT else (a[m],)
                    conj = False
                cnt = 0
                hit = False
                dead = False
                for ch in kids:
                    j = index.get(ch)
                    if j is not None:
                        cnt += 1
                        if bit == ST_NULL:
                            parents[j].append(i)
                        continue
                    sc = st[ch]
                    ok = bool(sc & ST_NULL) if bit == ST_NULL else not sc & ST_EMPTY
                    if ok:
                        hit = True
                    else:
                        dead = True
                if conj:
                    if dead:
                        need[i] = -1
                    elif cnt == 0:
                        value[i] = True
                        queue.append(i)
                    else:
                        need[i] = cnt
                else:
                    if hit:
                        value[i] = True
                        queue.append(i)
                    else:
                        need[i] = 1
            while queue:
                j = queue.pop()
                for p in parents[j]:
                    if value[p] or need[p] < 0:
                        continue
                    need[p] -= 1
                    if need[p] == 0:
                        evals += 1
                        value[p] = True
                        queue.append(p)
            results.append(value)
        if evals > 4 * size:
            raise KernelError("fixpoint exceeded its evaluation bound")
        nul, prod = results
        for i in range(size):
            s = ST_FINAL
            if nul[i]:
                s |= ST_NULL
            if not prod[i]:
                s |= ST_EMPTY
            st[region[i]] = s
        self.last_solve_evals = evals
        self.last_solve_region = size
        return evals

    def null_parses(self, n):
        if not self.nullable(n):
            return FOREST_EMPTY
        n0 = n
        if self.nf[n0] != NONE:
            return self.nf[n0]
        pending = []
        root = self._fref(n, pending)
        k = self.k
        a = self.a
        b = self.b
        fk = self.fk
        fa = self.fa
        fb = self.fb
        while pending:
            m = pending.pop()
            f = self.nf[m]
            km = k[m]
            if km == ALT:
                fk[f] = F_AMB
                fa[f] = self._fref(a[m], pending)
                fb[f] = self._fref(b[m], pending)
            elif km == CAT:
                fk[f] = F_PAIR
                fa[f] = self._fref(a[m], pending)
                fb[f] = self._fref(b[m], pending)
            else:
                fk[f] = F_TAG
                fa[f] = self._fref(a[m], pending)
                fb[f] = b[m]
        self.nf[n0] = root
        return root

    def _fref(self, m, pending):
        k = self.k
        a = self.a
        st = self.st
        while True:
            while k[m] == DELAY:
                m = a[m]
            if k[m] != ALT:
                break
            na = st[self.resolve(a[m])] & ST_NULL
            nb = st[self.resolve(self.b[m])] & ST_NULL
            if na and nb:
                break
            m = a[m] if na else self.b[m]
        if k[m] == EPS:
            return a[m]
        f = self.nf[m]
        if f == NONE:
            f = self.nf[m] = self._falloc(F_EMPTY, NONE, NONE)
            pending.append(m)
        return f
