"""Parsing context-free grammars with derivatives.

Typical use::

    from derivparse import load_grammar, elaborate, lex, parse, serialize_tree

    spec = load_grammar('start S; S -> "(" S ")" | ;')
    graph, start = elaborate(spec)
    forest = parse(graph, start, lex("char", "(())"))
    for tree in forest.trees(5):
        print(serialize_tree(tree))
"""

from .derive import DerivationState, consume, derive, parse, recognize
from .fixpoint import is_empty, null_parses, nullable, solve
from .forest import (
    INFINITE, Eps, Leaf, Node, Pair, ParseForest, Saturated,
    count_trees, enumerate_trees, serialize_tree, tree_leaves,
)
from .grammar_file import (
    GrammarError, GrammarSpec, Symbol, TokenClass,
    dump_grammar, elaborate, load_bundled, load_grammar,
)
from .graph import GrammarGraph, NodeKind, ReductionTag
from .kernel import DEFAULT_KERNEL, KernelError, UntiedPlaceholderError, get_kernel
from .lexer import LexError, Lexer, Token, lex

__version__ = "0.1.0"
