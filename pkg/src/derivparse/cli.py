"""``derivparse`` command line.

Exit codes: 0 success or ACCEPT, 1 REJECT or oracle disagreement, 2 usage,
load or lexing error.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .bench import run_bench
from .cyk import binarize, cyk_oracle, recognize_all
from .derive import DerivationState
from .forest import INFINITE, ParseForest, count_trees, enumerate_trees, serialize_tree
from .gen import CorpusError, gen_random_grammar
from .grammar_file import BUNDLED, GrammarError, dump_grammar, elaborate, load_bundled, load_grammar
from .kernel import EMPTY_NODE, KERNELS
from .lexer import LEXER_MODES, LexError, Lexer, lex, tokens_from_classes


class UsageError(Exception):
    pass


def _load_spec(arg):
    if arg in BUNDLED and not os.path.exists(arg):
        return load_bundled(arg)
    try:
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError("--grammar: cannot read %r: %s" % (arg, exc.strerror))
    try:
        return load_grammar(text)
    except GrammarError as exc:
        raise UsageError("--grammar %s: %s" % (arg, exc))


def _read_input(args):
    if args.text is not None:
        return args.text, "--text"
    src = args.input or "-"
    if src == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(src, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError("input file %r: %s" % (src, exc.strerror))
    if args.lexer == "char" and text.endswith("\n"):
        # a file or pipe normally ends with one newline that is not input
        text = text[:-1]
    return text, src


def _run_input(args):
    spec = _load_spec(args.grammar)
    text, src = _read_input(args)
    try:
        tokens = lex(Lexer(args.lexer, spec), text)
    except LexError as exc:
        raise UsageError("input %s: %s" % (src, exc))
    graph, start = elaborate(spec, kernel=args.kernel)
    state = DerivationState(graph, start).feed(tokens)
    return state, tokens


def _reject_line(state, tokens):
    at = state.failed_at
    if at is None:
        return "REJECT failedAt=%d (end of input)" % len(tokens)
    where = "byte %d" % tokens[at].pos if at < len(tokens) else "start"
    return "REJECT failedAt=%d (%s)" % (at, where)


def cmd_recognize(args):
    state, tokens = _run_input(args)
    if state.accepted:
        print("ACCEPT")
        return 0
    print(_reject_line(state, tokens))
    return 1


def cmd_parse(args):
    if args.max_trees < 0:
        raise UsageError("--max-trees must be >= 0")
    state, tokens = _run_input(args)
    if not state.accepted:
        print(_reject_line(state, tokens))
        return 1
    for tree in state.forest().trees(args.max_trees):
        print(serialize_tree(tree))
    return 0


def cmd_analyze(args):
    spec = _load_spec(args.grammar)
    graph, _ = elaborate(spec, kernel=args.kernel)
    k = graph.kernel
    rows = []
    for name, h in graph.nonterminals.items():
        nullable = k.nullable(h)
        empty = k.is_empty(h)
        count = count_trees(ParseForest(graph, k.null_parses(h)), cap=10 ** 6) \
            if nullable else 0
        shown = "infinite" if count == INFINITE else repr(count)
        rows.append((name, nullable, empty, shown))
    width = max(len(r[0]) for r in rows)
    for name, nullable, empty, shown in rows:
        print("%-*s  nullable=%s empty=%s productive=%s eps_trees=%s"
              % (width, name, str(nullable).lower(), str(empty).lower(),
                 str(not empty).lower(), shown))
    return 0


def cmd_bench(args):
    if args.tokens < 1:
        raise UsageError("--tokens must be >= 1")
    spec = _load_spec(args.grammar)
    name = os.path.splitext(os.path.basename(args.grammar))[0]
    try:
        report = run_bench(spec, name=name, lexer=args.lexer, tokens=args.tokens,
                           seed=args.seed, kernel=args.kernel,
                           max_trees=args.max_trees)
    except CorpusError as exc:
        raise UsageError("--grammar %s: %s" % (args.grammar, exc))
    except LexError as exc:
        raise UsageError("--lexer %s cannot lex the generated corpus: %s"
                         % (args.lexer, exc))
    print(report.to_text())
    print(report.to_json())
    return 0


# -- oracle check ----------------------------------------------------------------

def grammar_seed(seed, index):
    return seed * 1000003 + index


def check_grammar(seed, max_len, count_len=4, max_nonterminals=8, max_prods=3,
                  alphabet=("a", "b"), kernel=None):
    """Differential check of one random grammar.

    Returns ``(disagreements, grammar_text)``.

    The derivative side walks the trie of all class strings up to
    ``max_len``, pruning prefixes whose derivative is empty. The CYK side
    recognizes every string of each length at once. Tree counts are also
    compared for accepted strings up to ``count_len``.
    """
    spec = gen_random_grammar(seed, max_nonterminals, max_prods, alphabet)
    graph, start = elaborate(spec, kernel=kernel)
    k = graph.kernel
    cids = [graph.class_id(c) for c in alphabet]
    m = len(alphabet)
    accepted = [set() for _ in range(max_len + 1)]
    stack = [(start, 0, 0)]
    while stack:
        node, depth, index = stack.pop()
        if k.nullable(node):
            accepted[depth].add(index)
        if depth == max_len:
            continue
        for ai, cid in enumerate(cids):
            d = k.derive(node, cid)
            if d != EMPTY_NODE and not k.is_empty(d):
                stack.append((d, depth + 1, index * m + ai))
    bg = binarize(spec)
    problems = []
    for length in range(max_len + 1):
        ref = recognize_all(spec, alphabet, length, grammar=bg)
        got = accepted[length]
        for index in range(len(ref)):
            if bool(ref[index]) != (index in got):
                word = _word(index, length, alphabet)
                problems.append("grammar seed %d: %r derivatives=%s cyk=%s"
                                % (seed, word, index in got, bool(ref[index])))
        if length <= count_len:
            for index in sorted(got):
                word = _word(index, length, alphabet)
                _, want = cyk_oracle(spec, word, grammar=bg)
                st = DerivationState(graph, start).feed(tokens_from_classes(word))
                have = st.forest().count(cap=10 ** 9)
                if (want == INFINITE) != (have == INFINITE) or \
                        (want != INFINITE and want != have):
                    problems.append("grammar seed %d: %r tree count derivatives=%s cyk=%s"
                                    % (seed, word, have, want))
    return problems, dump_grammar(spec)


def _word(index, length, alphabet):
    m = len(alphabet)
    out = []
    for _ in range(length):
        out.append(alphabet[index % m])
        index //= m
    return out[::-1]


def _check_one(job):
    return check_grammar(*job)


def cmd_oracle_check(args):
    if args.grammars < 1 or args.max_len < 0 or args.jobs < 1:
        raise UsageError("--grammars and --jobs must be >= 1, --max-len >= 0")
    jobs = [(grammar_seed(args.seed, i), args.max_len, args.count_len,
             args.max_nonterminals, args.max_prods, tuple(args.alphabet), args.kernel)
            for i in range(args.grammars)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_check_one, jobs, chunksize=4))
    else:
        results = [_check_one(j) for j in jobs]
    bad = 0
    for (seed, *_), (problems, text) in zip(jobs, results):
        bad += len(problems)
        for msg in problems[:20]:
            print(msg)
        if problems:
            print("grammar seed %d:\n%s" % (seed, text))
    strings = sum(len(args.alphabet) ** n for n in range(args.max_len + 1))
    print("oracle-check: %d grammars, %d strings each, %d disagreements"
          % (args.grammars, strings, bad))
    return 0 if not bad else 1


# -- entry point ----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="derivparse",
                                description="Parse context-free grammars with derivatives.")
    p.add_argument("--kernel", choices=sorted(KERNELS), default=None,
                   help="derivative kernel (default: compiled if available)")
    sub = p.add_subparsers(dest="command", required=True)

    def grammar_flag(sp, default=None):
        sp.add_argument("--grammar", required=default is None, default=default,
                        help="grammar file, or a bundled name: %s" % ", ".join(BUNDLED))

    for name, fn, doc in (("recognize", cmd_recognize, "accept or reject one input"),
                          ("parse", cmd_parse, "print parse trees, one per line")):
        sp = sub.add_parser(name, help=doc)
        grammar_flag(sp)
        sp.add_argument("--lexer", choices=LEXER_MODES, default="char")
        sp.add_argument("input", nargs="?", default="-", help="input file, or - for stdin")
        sp.add_argument("--text", help="take the input from this string instead")
        if name == "parse":
            sp.add_argument("--max-trees", type=int, default=10)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("analyze", help="nullable/empty/productive per nonterminal")
    grammar_flag(sp)
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("bench", help="time the parse loop on a generated corpus")
    grammar_flag(sp, "sexpr")
    sp.add_argument("--lexer", choices=LEXER_MODES, default="sexpr")
    sp.add_argument("--tokens", type=int, default=10 ** 6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-trees", type=int, default=1)
    sp.set_defaults(fn=cmd_bench)

    sp = sub.add_parser("oracle-check", help="differential test against CYK")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--grammars", type=int, default=500)
    sp.add_argument("--max-len", type=int, default=10)
    sp.add_argument("--count-len", type=int, default=4,
                    help="also compare tree counts up to this length")
    sp.add_argument("--max-nonterminals", type=int, default=8)
    sp.add_argument("--max-prods", type=int, default=3)
    sp.add_argument("--alphabet", default="ab", help="terminal classes, one per character")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_oracle_check)
    return p


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.fn(args)
    except UsageError as exc:
        print("derivparse: error: %s" % exc, file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
