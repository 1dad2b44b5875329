"""Least-fixpoint analyses over a grammar graph.

Values are cached per node and never change once a node is solved, so every
query after the first is O(1). Unsolved nodes (anything built on top of an
unforced Delay or placeholder) are solved on demand, region by region.
"""

from .kernel import ST_FINAL

PROPERTIES = ("nullable", "empty", "null_parses")


def nullable(graph, node):
    """True iff the empty string is in the node's language."""
    return graph.kernel.nullable(node)


def is_empty(graph, node):
    """True iff the node's language has no strings at all."""
    return graph.kernel.is_empty(node)


def null_parses(graph, node):
    """ForestRef of every parse of the empty string at ``node``.

    Cyclic when there are infinitely many; the empty forest when the node is
    not nullable.
    """
    return graph.kernel.null_parses(node)


def is_solved(graph, node):
    return bool(graph.kernel.state(graph.kernel.resolve(node)) & ST_FINAL)


def solve(graph, prop="nullable"):
    """Bring every materialized node to the least fixpoint of ``prop``.

    ``nullable`` and ``empty`` are computed together. Returns the number of
    node evaluations performed (0 when nothing was pending).
    """
    if prop not in PROPERTIES:
        raise ValueError("unknown property %r" % (prop,))
    k = graph.kernel
    evals = k.solve_all()
    if prop == "null_parses":
        for n in range(k.num_nodes()):
            if k.nullable(n):
                k.null_parses(n)
    return evals
