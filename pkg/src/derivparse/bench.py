"""Throughput harness: generate a corpus, lex it, time the consume loop."""

import json
import time
from dataclasses import asdict, dataclass

from .derive import DerivationState
from .forest import INFINITE, enumerate_trees
from .gen import gen_corpus
from .grammar_file import elaborate
from .lexer import Lexer, lex

# fixed field names of the JSON line, in order
JSON_FIELDS = (
    "grammar", "lexer", "kernel", "seed", "tokens", "seconds_parse",
    "seconds_total", "tokens_per_second", "peak_nodes", "nodes_per_token",
    "accepted", "tree_count", "trees_requested", "trees_produced",
)


@dataclass
class BenchReport:
    grammar: str
    lexer: str
    kernel: str
    seed: int
    tokens: int
    seconds_parse: float    # consume loop only
    seconds_total: float    # generation + lexing + parsing + extraction
    tokens_per_second: float
    peak_nodes: int
    nodes_per_token: float
    accepted: bool
    tree_count: object
    trees_requested: int
    trees_produced: int

    def to_json(self):
        d = asdict(self)
        if d["tree_count"] == INFINITE:
            d["tree_count"] = "infinite"
        else:
            d["tree_count"] = int(d["tree_count"])
        return json.dumps({k: d[k] for k in JSON_FIELDS})

    def to_text(self):
        return "\n".join([
            "grammar            %s (lexer %s, kernel %s, seed %d)"
            % (self.grammar, self.lexer, self.kernel, self.seed),
            "tokens             %d" % self.tokens,
            "parse loop         %.3f s" % self.seconds_parse,
            "total              %.3f s" % self.seconds_total,
            "throughput         %.0f tokens/s" % self.tokens_per_second,
            "peak arena nodes   %d (%.2f per token)" % (self.peak_nodes,
                                                      self.nodes_per_token),
            "accepted           %s" % ("yes" if self.accepted else "no"),
            "trees              %d produced of %d requested (count %s)"
            % (self.trees_produced, self.trees_requested,
               "infinite" if self.tree_count == INFINITE else int(self.tree_count)),
        ])


def run_bench(spec, name="grammar", lexer="sexpr", tokens=10 ** 6, seed=0,
              kernel=None, max_trees=1, count_cap=10 ** 6):
    """Parse a generated corpus of about ``tokens`` tokens; see :class:`BenchReport`.

    ``peak_nodes`` is the arena size after the run. The arena never frees,
    so the final size is the peak.
    """
    t_start = time.perf_counter()
    text = gen_corpus(spec, seed, tokens, lexer)
    toks = lex(Lexer(lexer, spec), text)
    graph, start = elaborate(spec, kernel=kernel)
    state = DerivationState(graph, start)
    step = state.consume
    t0 = time.perf_counter()
    for tok in toks:
        step(tok)
    seconds_parse = time.perf_counter() - t0
    peak = graph.size()
    forest = state.forest()
    count = forest.count(cap=count_cap)
    produced = len(enumerate_trees(forest, max_trees)) if max_trees > 0 else 0
    seconds_total = time.perf_counter() - t_start
    n = len(toks)
    return BenchReport(
        grammar=name, lexer=lexer, kernel=graph.kernel_name, seed=seed,
        tokens=n, seconds_parse=seconds_parse, seconds_total=seconds_total,
        tokens_per_second=n / seconds_parse if seconds_parse > 0 else float("inf"),
        peak_nodes=peak, nodes_per_token=peak / max(n, 1),
        accepted=state.accepted, tree_count=count,
        trees_requested=max_trees, trees_produced=produced,
    )
