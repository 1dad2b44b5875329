"""Grammar graphs: arena-backed, possibly cyclic, built from seven node kinds."""

from dataclasses import dataclass
from enum import IntEnum
from typing import NewType

from . import kernel as _k
from .kernel import UntiedPlaceholderError, get_kernel

NodeHandle = NewType("NodeHandle", int)
ForestRef = NewType("ForestRef", int)

ARITIES = ("wrap", "flatten", "leaf")


class NodeKind(IntEnum):
    EMPTY = _k.EMPTY
    EPSILON = _k.EPS
    TERMINAL = _k.TERM
    ALT = _k.ALT
    CAT = _k.CAT
    RED = _k.RED
    DELAY = _k.DELAY


@dataclass(frozen=True)
class ReductionTag:
    """Symbolic semantic action attached to a ``Red`` node.

    ``arity`` only affects serialization: ``wrap`` renders ``(label kids...)``,
    ``flatten`` splices the children into the parent, ``leaf`` renders the
    bare label.
    """

    label: str
    arity: str = "wrap"

    def __post_init__(self):
        if self.arity not in ARITIES:
            raise ValueError("unknown arity %r" % (self.arity,))


class GrammarGraph:
    """Owns the node arena, memo tables and fixpoint caches of one session.

    Handles are plain ints valid only for the graph that issued them. A graph
    must stay on one thread while in use.
    """

    def __init__(self, kernel=None):
        if kernel is None or isinstance(kernel, str):
            kernel = get_kernel(kernel)
        self.kernel = kernel
        self.tags = []
        self._tag_ids = {}
        self.classes = []
        self._class_ids = {}
        self._terminals = {}
        self._placeholders = []
        self.nonterminals = {}
        self.start = None

    @property
    def kernel_name(self):
        return self.kernel.name

    # -- interning --------------------------------------------------------

    def class_id(self, name):
        cid = self._class_ids.get(name)
        if cid is None:
            cid = self._class_ids[name] = len(self.classes)
            self.classes.append(name)
        return cid

    def class_name(self, cid):
        return self.classes[cid]

    def tag_id(self, tag):
        if isinstance(tag, str):
            tag = ReductionTag(tag)
        tid = self._tag_ids.get(tag)
        if tid is None:
            tid = self._tag_ids[tag] = len(self.tags)
            self.tags.append(tag)
        return tid

    def _reduction(self, tag):
        return self.kernel.red_label(self.tag_id(tag))

    # -- smart constructors -----------------------------------------------

    def empty(self):
        return NodeHandle(_k.EMPTY_NODE)

    def epsilon(self, result=_k.FOREST_EPS):
        """Epsilon carrying ``result`` (a ForestRef); an empty forest gives Empty."""
        return NodeHandle(self.kernel.mk_eps(result))

    def terminal(self, cls):
        cid = self.class_id(cls)
        h = self._terminals.get(cid)
        if h is None:
            h = self._terminals[cid] = self.kernel.mk_term(cid)
        return NodeHandle(h)

    def alt(self, x, y):
        return NodeHandle(self.kernel.mk_alt(x, y))

    def cat(self, x, y):
        return NodeHandle(self.kernel.mk_cat(x, y))

    def red(self, x, tag):
        return NodeHandle(self.kernel.mk_red(x, self._reduction(tag)))

    def alts(self, handles):
        """Right-nested union of ``handles``; Empty for none."""
        handles = list(handles)
        if not handles:
            return self.empty()
        acc = handles[-1]
        for h in reversed(handles[:-1]):
            acc = self.alt(h, acc)
        return acc

    def cats(self, handles):
        """Right-nested concatenation of ``handles``; plain Epsilon for none."""
        handles = list(handles)
        if not handles:
            return self.epsilon()
        acc = handles[-1]
        for h in reversed(handles[:-1]):
            acc = self.cat(h, acc)
        return acc

    # uncompacted variants
    def raw_epsilon(self, result=_k.FOREST_EPS):
        return NodeHandle(self.kernel.raw_eps(result))

    def raw_alt(self, x, y):
        return NodeHandle(self.kernel.raw_alt(x, y))

    def raw_cat(self, x, y):
        return NodeHandle(self.kernel.raw_cat(x, y))

    def raw_red(self, x, tag):
        return NodeHandle(self.kernel.raw_red(x, self._reduction(tag)))

    # -- recursion --------------------------------------------------------

    def recursive(self, count):
        """Allocate ``count`` placeholders to be tied later with :meth:`tie`."""
        hs = [NodeHandle(self.kernel.mk_placeholder()) for _ in range(count)]
        self._placeholders.extend(hs)
        return hs

    def tie(self, placeholder, definition):
        self.kernel.tie(placeholder, definition)

    def check_tied(self):
        for p in self._placeholders:
            if not self.kernel.is_tied(p):
                raise UntiedPlaceholderError("placeholder %d was never tied" % p)

    # -- forests ----------------------------------------------------------

    def forest_leaf(self, cls):
        return ForestRef(self.kernel.f_leaf(self.class_id(cls)))

    def forest_pair(self, left, right):
        return ForestRef(self.kernel.f_pair(left, right))

    def forest_tag(self, inner, tag):
        return ForestRef(self.kernel.f_tag(inner, self._reduction(tag)))

    def forest_amb(self, left, right):
        return ForestRef(self.kernel.f_amb(left, right))

    # -- inspection -------------------------------------------------------

    def kind(self, h):
        return NodeKind(self.kernel.node(h)[0])

    def children(self, h):
        kind, a, b, _ = self.kernel.node(h)
        if kind in (_k.ALT, _k.CAT):
            return (a, b)
        if kind == _k.RED:
            return (a,)
        if kind == _k.DELAY and a != _k.NONE:
            return (a,)
        return ()

    def resolve(self, h):
        """Follow forced Delay links to the node they stand for."""
        return NodeHandle(self.kernel.resolve(h))

    def terminal_class(self, h):
        kind, a, _, _ = self.kernel.node(h)
        if kind != _k.TERM:
            raise ValueError("node %d is not a terminal" % h)
        return self.classes[a]

    def reduction_tag(self, h):
        """The tag of a Red node whose reduction is a plain label, else None."""
        kind, _, red, _ = self.kernel.node(h)
        if kind != _k.RED:
            raise ValueError("node %d is not a Red node" % h)
        rk, ra, _ = self.kernel.reduction(red)
        return self.tags[ra] if rk == _k.R_LABEL else None

    def __len__(self):
        return self.kernel.num_nodes()

    def size(self):
        return self.kernel.num_nodes()

    def forest_size(self):
        return self.kernel.num_forests()
