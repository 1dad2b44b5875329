# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled derivative kernel; same interface and semantics as ``_pykernel``."""

from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map

from ._pykernel import KernelError, UntiedPlaceholderError

cdef enum:
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
    ST_DEAD = 5
    EMPTY_NODE = 0
    EPS_NODE = 1
    FOREST_EMPTY = 0
    FOREST_EPS = 1
    STRIDE = 16777216
    ERR_UNTIED = 1
    ERR_UNFORCED = 2
    ERR_LEAF = 3


cdef class Kernel:
    name = "cython"

    cdef vector[int] k, a, b, c, st, nf, mc, mr, idx
    cdef unordered_map[long long, int] memo
    cdef vector[int] fk, fa, fb, rk, ra, rb
    cdef unordered_map[int, int] labels, leaf_eps, leaf_forest
    cdef public long last_solve_evals
    cdef public long last_solve_region

    def __init__(self):
        self.fk.push_back(F_EMPTY)
        self.fa.push_back(NONE)
        self.fb.push_back(NONE)
        self.fk.push_back(F_EPS)
        self.fa.push_back(NONE)
        self.fb.push_back(NONE)
        self.last_solve_evals = 0
        self.last_solve_region = 0
        self._new(EMPTY, NONE, NONE, NONE, ST_DEAD)
        self._new(EPS, FOREST_EPS, NONE, NONE, ST_FINAL | ST_NULL)

    # -- arena ------------------------------------------------------------

    cdef inline int _new(self, int kind, int a, int b, int c, int st):
        cdef int n = <int>self.k.size()
        self.k.push_back(kind)
        self.a.push_back(a)
        self.b.push_back(b)
        self.c.push_back(c)
        self.st.push_back(st)
        self.nf.push_back(NONE)
        self.mc.push_back(NONE)
        self.mr.push_back(NONE)
        self.idx.push_back(NONE)
        return n

    def num_nodes(self):
        return self.k.size()

    def num_forests(self):
        return self.fk.size()

    def num_reductions(self):
        return self.rk.size()

    cdef inline void _check(self, int n, Py_ssize_t size) except *:
        if n < 0 or n >= size:
            raise IndexError("handle %d out of range" % n)

    def node(self, int n):
        self._check(n, self.k.size())
        return self.k[n], self.a[n], self.b[n], self.c[n]

    def state(self, int n):
        self._check(n, self.k.size())
        return self.st[n]

    def forest(self, int f):
        self._check(f, self.fk.size())
        return self.fk[f], self.fa[f], self.fb[f]

    def reduction(self, int r):
        self._check(r, self.rk.size())
        return self.rk[r], self.ra[r], self.rb[r]

    cdef inline int _resolve(self, int n):
        while self.k[n] == DELAY and self.a[n] != NONE:
            n = self.a[n]
        return n

    def resolve(self, int n):
        self._check(n, self.k.size())
        return self._resolve(n)

    # -- forests and reductions ------------------------------------------

    cdef inline int _falloc(self, int kind, int a, int b):
        cdef int f = <int>self.fk.size()
        self.fk.push_back(kind)
        self.fa.push_back(a)
        self.fb.push_back(b)
        return f

    cdef int _f_leaf(self, int cls):
        if self.leaf_forest.count(cls):
            return self.leaf_forest[cls]
        cdef int f = self._falloc(F_LEAF, cls, NONE)
        self.leaf_forest[cls] = f
        return f

    def f_leaf(self, int cls):
        return self._f_leaf(cls)

    def f_pair(self, int l, int r):
        if l == FOREST_EMPTY or r == FOREST_EMPTY:
            return FOREST_EMPTY
        return self._falloc(F_PAIR, l, r)

    cdef inline int _f_tag(self, int f, int red):
        if f == FOREST_EMPTY:
            return FOREST_EMPTY
        return self._falloc(F_TAG, f, red)

    def f_tag(self, int f, int red):
        return self._f_tag(f, red)

    def f_amb(self, int l, int r):
        if l == FOREST_EMPTY:
            return r
        if r == FOREST_EMPTY:
            return l
        return self._falloc(F_AMB, l, r)

    cdef inline int _ralloc(self, int kind, int a, int b):
        cdef int r = <int>self.rk.size()
        self.rk.push_back(kind)
        self.ra.push_back(a)
        self.rb.push_back(b)
        return r

    def red_label(self, int tag):
        if self.labels.count(tag):
            return self.labels[tag]
        cdef int r = self._ralloc(R_LABEL, tag, NONE)
        self.labels[tag] = r
        return r

    def red_prepend(self, int f):
        return self._ralloc(R_PREPEND, f, NONE)

    def red_append(self, int f):
        return self._ralloc(R_APPEND, f, NONE)

    def red_compose(self, int outer, int inner):
        return self._ralloc(R_COMPOSE, outer, inner)

    # -- constructors -----------------------------------------------------

    def mk_empty(self):
        return EMPTY_NODE

    cdef inline int _mk_eps(self, int f):
        if f == FOREST_EMPTY:
            return EMPTY_NODE
        if f == FOREST_EPS:
            return EPS_NODE
        return self._new(EPS, f, NONE, NONE, ST_FINAL | ST_NULL)

    def mk_eps(self, int f):
        self._check(f, self.fk.size())
        return self._mk_eps(f)

    def mk_term(self, int cls):
        return self._new(TERM, cls, NONE, NONE, ST_FINAL)

    cdef int _eps_leaf(self, int cls):
        if self.leaf_eps.count(cls):
            return self.leaf_eps[cls]
        cdef int n = self._new(EPS, self._f_leaf(cls), NONE, NONE, ST_FINAL | ST_NULL)
        self.leaf_eps[cls] = n
        return n

    cdef int _mk_alt(self, int x, int y):
        x = self._resolve(x)
        y = self._resolve(y)
        cdef int sx = self.st[x]
        cdef int sy = self.st[y]
        if sx & ST_DEAD == ST_DEAD:
            return y
        if sy & ST_DEAD == ST_DEAD:
            return x
        cdef int s = 0
        if sx & sy & ST_FINAL:
            s = ST_FINAL | ((sx | sy) & ST_NULL)
        return self._new(ALT, x, y, NONE, s)

    def mk_alt(self, int x, int y):
        self._check(x, self.k.size())
        self._check(y, self.k.size())
        return self._mk_alt(x, y)

    cdef int _mk_cat(self, int x, int y):
        x = self._resolve(x)
        y = self._resolve(y)
        cdef int sx = self.st[x]
        cdef int sy = self.st[y]
        if sx & ST_DEAD == ST_DEAD or sy & ST_DEAD == ST_DEAD:
            return EMPTY_NODE
        if self.k[x] == EPS:
            return self._mk_red(y, self._ralloc(R_PREPEND, self.a[x], NONE))
        if self.k[y] == EPS:
            return self._mk_red(x, self._ralloc(R_APPEND, self.a[y], NONE))
        cdef int s = 0
        if sx & sy & ST_FINAL:
            s = ST_FINAL | (sx & sy & ST_NULL)
        return self._new(CAT, x, y, NONE, s)

    def mk_cat(self, int x, int y):
        self._check(x, self.k.size())
        self._check(y, self.k.size())
        return self._mk_cat(x, y)

    cdef int _mk_red(self, int x, int red):
        x = self._resolve(x)
        cdef int sx = self.st[x]
        if sx & ST_DEAD == ST_DEAD:
            return EMPTY_NODE
        cdef int kx = self.k[x]
        if kx == EPS:
            return self._mk_eps(self._f_tag(self.a[x], red))
        if kx == RED:
            return self._new(RED, self.a[x],
                             self._ralloc(R_COMPOSE, red, self.b[x]),
                             NONE, sx & (ST_FINAL | ST_NULL))
        return self._new(RED, x, red, NONE, sx & (ST_FINAL | ST_NULL))

    def mk_red(self, int x, int red):
        self._check(x, self.k.size())
        self._check(red, self.rk.size())
        return self._mk_red(x, red)

    # uncompacted twins, for compaction-soundness checks
    def raw_eps(self, int f):
        return self._new(EPS, f, NONE, NONE, ST_FINAL | ST_NULL)

    def raw_alt(self, int x, int y):
        return self._new(ALT, x, y, NONE, self._raw_state(ALT, x, y))

    def raw_cat(self, int x, int y):
        return self._new(CAT, x, y, NONE, self._raw_state(CAT, x, y))

    def raw_red(self, int x, int red):
        return self._new(RED, x, red, NONE, self._raw_state(RED, x, x))

    cdef int _raw_state(self, int kind, int x, int y):
        cdef int sx = self.st[self._resolve(x)]
        cdef int sy = self.st[self._resolve(y)]
        if not (sx & sy & ST_FINAL):
            return 0
        if kind == ALT:
            return ST_FINAL | ((sx | sy) & ST_NULL) | (sx & sy & ST_EMPTY)
        if kind == CAT:
            return ST_FINAL | (sx & sy & ST_NULL) | ((sx | sy) & ST_EMPTY)
        return sx

    def mk_placeholder(self):
        return self._new(DELAY, NONE, NONE, NONE, 0)

    def tie(self, int p, int target):
        self._check(p, self.k.size())
        self._check(target, self.k.size())
        if self.k[p] != DELAY or self.b[p] != NONE:
            raise ValueError("handle %d is not a placeholder" % p)
        if self.a[p] != NONE:
            raise ValueError("placeholder %d is already tied" % p)
        self._force(p, target)

    def is_tied(self, int p):
        self._check(p, self.k.size())
        return self.k[p] != DELAY or self.a[p] != NONE

    cdef void _force(self, int d, int r):
        r = self._resolve(r)
        if r == d:
            # pure forwarding cycle: least fixpoint is the empty language
            r = EMPTY_NODE
        self.a[d] = r
        cdef int s = self.st[r]
        self.st[d] = s if s & ST_FINAL else 0

    # -- derivative -------------------------------------------------------

    def derive(self, int n, int cls):
        self._check(n, self.k.size())
        return self._derive(n, cls)

    cdef int _derive(self, int n, int cls) except -100:
        cdef int kind, mc, hit, d, r, first, second
        cdef long long key = NONE
        n = self._resolve(n)
        kind = self.k[n]
        if kind <= EPS:
            return EMPTY_NODE
        if kind == TERM:
            if self.a[n] == cls:
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
                hit = self._new(DELAY, NONE, n, cls, 0)
                self.mr[n] = hit
            return self._resolve(hit)
        if mc != NONE:
            key = <long long>n * STRIDE + cls
            if self.memo.count(key):
                hit = self.memo[key]
                if hit == PENDING:
                    hit = self._new(DELAY, NONE, n, cls, 0)
                    self.memo[key] = hit
                return self._resolve(hit)
        # checked after the memo so a repeated call returns the same handle
        if self.st[n] & ST_DEAD == ST_DEAD:
            return EMPTY_NODE
        if mc != NONE:
            self.memo[key] = PENDING
        else:
            self.mc[n] = cls
            self.mr[n] = PENDING
        if kind == ALT:
            first = self._derive(self.a[n], cls)
            second = self._derive(self.b[n], cls)
            r = self._mk_alt(first, second)
        elif kind == CAT:
            first = self.a[n]
            second = self.b[n]
            r = self._mk_cat(self._derive(first, cls), second)
            if self._nullable(first):
                d = self._derive(second, cls)
                r = self._mk_alt(r, self._mk_red(
                    d, self._ralloc(R_PREPEND, self._null_parses(first), NONE)))
        else:
            r = self._mk_red(self._derive(self.a[n], cls), self.b[n])
        # a Delay exists only if a cycle reached this entry while in progress
        d = self.mr[n] if key == NONE else self.memo[key]
        if d == PENDING:
            r = self._resolve(r)
        else:
            self._force(d, r)
            r = self._resolve(d)
        if key == NONE:
            self.mr[n] = r
        else:
            self.memo[key] = r
        return r

    # -- fixpoints --------------------------------------------------------

    cdef int _nullable(self, int n) except -1:
        n = self._resolve(n)
        if not self.st[n] & ST_FINAL:
            self._solve1(n)
        return 1 if self.st[n] & ST_NULL else 0

    def nullable(self, int n):
        self._check(n, self.k.size())
        return bool(self._nullable(n))

    def is_empty(self, int n):
        self._check(n, self.k.size())
        n = self._resolve(n)
        if not self.st[n] & ST_FINAL:
            self._solve1(n)
        return bool(self.st[n] & ST_EMPTY)

    def solve_all(self):
        cdef vector[int] roots
        cdef int n
        for n in range(<int>self.st.size()):
            if not self.st[n] & ST_FINAL:
                roots.push_back(n)
        return self._solve(roots)

    cdef long _solve1(self, int n) except -1:
        cdef vector[int] roots
        roots.push_back(n)
        return self._solve(roots)

    cdef long _solve(self, vector[int]& roots) except -1:
        """Horn-style least fixpoint over every unsolved node reachable from
        roots; see the pure kernel for the argument on the evaluation bound."""
        cdef vector[int] region
        cdef vector[int] stack = roots
        cdef int m, km, err = 0, bad = NONE
        while stack.size():
            m = stack.back()
            stack.pop_back()
            if self.st[m] & ST_FINAL or self.idx[m] != NONE:
                continue
            self.idx[m] = <int>region.size()
            region.push_back(m)
            km = self.k[m]
            if km == ALT or km == CAT:
                stack.push_back(self.a[m])
                stack.push_back(self.b[m])
            elif km == RED:
                stack.push_back(self.a[m])
            elif km == DELAY:
                if self.a[m] == NONE:
                    err = ERR_UNTIED if self.b[m] == NONE else ERR_UNFORCED
                    bad = m
                    break
                stack.push_back(self.a[m])
            else:
                err = ERR_LEAF
                bad = m
                break
        cdef Py_ssize_t size = region.size()
        cdef Py_ssize_t i
        if err:
            for i in range(size):
                self.idx[region[i]] = NONE
            if err == ERR_UNTIED:
                raise UntiedPlaceholderError("placeholder %d was never tied" % bad)
            if err == ERR_UNFORCED:
                raise KernelError("fixpoint reached unforced node %d" % bad)
            raise KernelError("leaf node %d is not final" % bad)
        if not size:
            self.last_solve_evals = 0
            self.last_solve_region = 0
            return 0
        cdef vector[vector[int]] parents
        parents.resize(size)
        cdef vector[int] need
        cdef vector[char] nul, prod
        cdef vector[char]* value
        cdef vector[int] queue
        cdef long evals = 0
        cdef int bit, pass_, cnt, ch, j, p, sc, nkids, t
        cdef bint conj, hit, dead, ok
        cdef int kids[2]
        for pass_ in range(2):
            bit = ST_NULL if pass_ == 0 else ST_EMPTY
            value = &nul if pass_ == 0 else &prod
            value.assign(size, 0)
            need.assign(size, 0)
            queue.clear()
            for i in range(size):
                m = region[i]
                evals += 1
                km = self.k[m]
                kids[0] = self.a[m]
                kids[1] = self.b[m]
                nkids = 2 if km == ALT or km == CAT else 1
                conj = km == CAT
                cnt = 0
                hit = False
                dead = False
                for t in range(nkids):
                    ch = kids[t]
                    j = self.idx[ch]
                    if j != NONE:
                        cnt += 1
                        if pass_ == 0:
                            parents[j].push_back(<int>i)
                        continue
                    sc = self.st[ch]
                    if bit == ST_NULL:
                        ok = (sc & ST_NULL) != 0
                    else:
                        ok = (sc & ST_EMPTY) == 0
                    if ok:
                        hit = True
                    else:
                        dead = True
                if conj:
                    if dead:
                        need[i] = -1
                    elif cnt == 0:
                        value[0][i] = 1
                        queue.push_back(<int>i)
                    else:
                        need[i] = cnt
                else:
                    if hit:
                        value[0][i] = 1
                        queue.push_back(<int>i)
                    else:
                        need[i] = 1
            while queue.size():
                j = queue.back()
                queue.pop_back()
                for p in parents[j]:
                    if value[0][p] or need[p] < 0:
                        continue
                    need[p] -= 1
                    if need[p] == 0:
                        evals += 1
                        value[0][p] = 1
                        queue.push_back(p)
        for i in range(size):
            self.idx[region[i]] = NONE
        if evals > 4 * size:
            raise KernelError("fixpoint exceeded its evaluation bound")
        cdef int s
        for i in range(size):
            s = ST_FINAL
            if nul[i]:
                s |= ST_NULL
            if not prod[i]:
                s |= ST_EMPTY
            self.st[region[i]] = s
        self.last_solve_evals = evals
        self.last_solve_region = size
        return evals

    def null_parses(self, int n):
        self._check(n, self.k.size())
        return self._null_parses(n)

    cdef int _null_parses(self, int n) except -1:
        if not self._nullable(n):
            return FOREST_EMPTY
        if self.nf[n] != NONE:
            return self.nf[n]
        cdef vector[int] pending
        cdef int root = self._fref(n, pending)
        cdef int m, f, km, x
        while pending.size():
            m = pending.back()
            pending.pop_back()
            f = self.nf[m]
            km = self.k[m]
            if km == ALT:
                x = self._fref(self.a[m], pending)
                self.fk[f] = F_AMB
                self.fa[f] = x
                self.fb[f] = self._fref(self.b[m], pending)
            elif km == CAT:
                x = self._fref(self.a[m], pending)
                self.fk[f] = F_PAIR
                self.fa[f] = x
                self.fb[f] = self._fref(self.b[m], pending)
            else:
                x = self._fref(self.a[m], pending)
                self.fk[f] = F_TAG
                self.fa[f] = x
                self.fb[f] = self.b[m]
        self.nf[n] = root
        return root

    cdef int _fref(self, int m, vector[int]& pending):
        cdef int na, nb, f
        while True:
            while self.k[m] == DELAY:
                m = self.a[m]
            if self.k[m] != ALT:
                break
            na = self.st[self._resolve(self.a[m])] & ST_NULL
            nb = self.st[self._resolve(self.b[m])] & ST_NULL
            if na and nb:
                break
            m = self.a[m] if na else self.b[m]
        if self.k[m] == EPS:
            return self.a[m]
        f = self.nf[m]
        if f == NONE:
            f = self._falloc(F_EMPTY, NONE, NONE)
            self.nf[m] = f
            pending.push_back(m)
        return f
