"""Online parsing by repeated derivatives."""

from .forest import ParseForest
from .kernel import EMPTY_NODE
from .lexer import Token


def _class_of(token):
    return token.cls if isinstance(token, Token) else token


def derive(graph, node, token):
    """Derivative of ``node`` by one token (a :class:`Token` or a class name).

    Memoized per (node, token class); the result never aliases a node that is
    still being built once this returns.
    """
    return graph.kernel.derive(node, graph.class_id(_class_of(token)))


class DerivationState:
    """Grammar derived by every token consumed so far.

    ``failed_at`` is the index of the token after which the remaining
    language became empty (0 if the start language is empty); once set it
    stays set.
    """

    def __init__(self, graph, start, keep_tokens=True):
        self.graph = graph
        self.current = start
        self.consumed = 0
        self.failed_at = 0 if graph.kernel.is_empty(start) else None
        self.tokens = [] if keep_tokens else None

    def consume(self, token):
        kernel = self.graph.kernel
        if self.tokens is not None:
            self.tokens.append(token if isinstance(token, Token)
                               else Token(token, token, self.consumed))
        if self.current != EMPTY_NODE:
            cid = self.graph.class_id(_class_of(token))
            self.current = kernel.derive(self.current, cid)
            if self.failed_at is None and kernel.is_empty(self.current):
                self.failed_at = self.consumed
        self.consumed += 1
        return self

    def feed(self, tokens):
        for t in tokens:
            self.consume(t)
        return self

    @property
    def accepted(self):
        return self.graph.kernel.nullable(self.current)

    def forest(self):
        """Every parse of the tokens consumed so far."""
        root = self.graph.kernel.null_parses(self.current)
        return ParseForest(self.graph, root, self.tokens)


def consume(state, token):
    return state.consume(token)


def recognize(graph, start, tokens):
    """True iff the class string of ``tokens`` is in the language of ``start``."""
    return DerivationState(graph, start, keep_tokens=False).feed(tokens).accepted


def parse(graph, start, tokens):
    """Parse forest of ``tokens``; empty iff :func:`recognize` is false."""
    return DerivationState(graph, start).feed(tokens).forest()
