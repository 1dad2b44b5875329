"""Parse-loop throughput of the pure-Python and compiled kernels on the same corpus.

    python benchmarks/compare_kernels.py --tokens 1000000 --repeat 3

Both kernels build identical arenas, so besides timing this checks that
node counts and tree counts agree.
"""

import argparse
import json
import time

from derivparse.derive import DerivationState
from derivparse.gen import gen_corpus
from derivparse.grammar_file import elaborate, load_bundled
from derivparse.kernel import KERNELS
from derivparse.lexer import Lexer, lex


def time_kernel(spec, tokens, kernel, repeat):
    best = None
    for _ in range(repeat):
        graph, start = elaborate(spec, kernel=kernel)
        state = DerivationState(graph, start)
        step = state.consume
        t0 = time.perf_counter()
        for tok in tokens:
            step(tok)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    count = state.forest().count(cap=10 ** 6)
    return best, graph.size(), state.accepted, int(count)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grammar", default="sexpr")
    ap.add_argument("--lexer", default="sexpr")
    ap.add_argument("--tokens", type=int, default=300000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    spec = load_bundled(args.grammar)
    toks = lex(Lexer(args.lexer, spec), gen_corpus(spec, args.seed, args.tokens, args.lexer))
    n = len(toks)
    results = {}
    print("%-8s %10s %14s %12s %8s" % ("kernel", "seconds", "tokens/s", "nodes", "trees"))
    for name in sorted(KERNELS, reverse=True):
        dt, nodes, accepted, count = time_kernel(spec, toks, name, args.repeat)
        results[name] = dict(seconds=dt, tokens_per_second=n / dt, nodes=nodes,
                             accepted=accepted, trees=count)
        print("%-8s %10.3f %14.0f %12d %8d" % (name, dt, n / dt, nodes, count))
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        if (py["nodes"], py["trees"]) != (cy["nodes"], cy["trees"]):
            raise SystemExit("kernels disagree: %r vs %r" % (py, cy))
        print("speedup  %.1fx" % (py["seconds"] / cy["seconds"]))
    else:
        print("compiled kernel not built; only the pure-Python kernel was timed")
    print(json.dumps({"grammar": args.grammar, "tokens": n, "kernels": results}))


if __name__ == "__main__":
    main()
