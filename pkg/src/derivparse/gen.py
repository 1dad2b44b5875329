"""Seeded generators: random grammars, in-language corpora, random regexes."""

import random

from .grammar_file import GrammarSpec, Symbol

DEFAULT_ALPHABET = ("a", "b")


class CorpusError(Exception):
    pass


def gen_random_grammar(seed, max_nonterminals=8, max_prods=3,
                       alphabet=DEFAULT_ALPHABET, max_rhs=3, grounded=0.85):
    """A well-formed random grammar over quoted single-class literals.

    Every referenced nonterminal is defined, by construction. Epsilon, unit
    and left-recursive productions all occur. With probability ``grounded``
    the first production of each ``Ni`` refers only to terminals and to
    ``Nj`` with ``j > i``, which makes every nonterminal productive;
    otherwise the language may well be empty.
    """
    if max_nonterminals < 1 or max_prods < 1:
        raise ValueError("bounds must be >= 1")
    rng = random.Random(seed)
    count = rng.randint(1, max_nonterminals)
    names = ["N%d" % i for i in range(count)]
    ground = rng.random() < grounded
    rules = {}
    for k, name in enumerate(names):
        alts = []
        for j in range(rng.randint(1, max_prods)):
            pool = names[k + 1:] if ground and j == 0 else names
            length = rng.choices(range(max_rhs + 1),
                                 weights=[1] + [3] * max_rhs)[0]
            alt = []
            for _ in range(length):
                if not pool or rng.random() < 0.5:
                    alt.append(Symbol("lit", rng.choice(alphabet)))
                else:
                    alt.append(Symbol("nt", rng.choice(pool)))
            alts.append(tuple(alt))
        rules[name] = alts
    return GrammarSpec(start=names[0], rules=rules)


def _min_yields(spec):
    """Per nonterminal: (min terminal yield, height) and the production index
    achieving it. Following the chosen productions always terminates, since
    height strictly decreases."""
    inf = (float("inf"), float("inf"))
    best = {nt: inf for nt in spec.rules}
    choice = {}
    changed = True
    while changed:
        changed = False
        for nt, alts in spec.rules.items():
            for i, alt in enumerate(alts):
                size, height = 0, 0
                for s in alt:
                    if s.kind == "nt":
                        ln, h = best[s.name]
                        size += ln
                        height = max(height, h)
                    else:
                        size += 1
                cand = (size, height + 1)
                if cand < best[nt]:
                    best[nt] = cand
                    choice[nt] = i
                    changed = True
    return best, choice


def _can_emit(spec):
    """Nonterminals that derive at least one non-empty sentence."""
    best, _ = _min_yields(spec)
    emits = {nt: False for nt in spec.rules}
    changed = True
    while changed:
        changed = False
        for nt, alts in spec.rules.items():
            if emits[nt]:
                continue
            for alt in alts:
                if all(s.kind != "nt" or best[s.name][0] != float("inf") for s in alt) \
                        and any(s.kind != "nt" or emits[s.name] for s in alt):
                    emits[nt] = True
                    changed = True
                    break
    return emits


def _lexeme(rng, cls, spec):
    decl = spec.token_classes.get(cls)
    if decl is None:
        return cls
    if decl.kind == "literal":
        return decl.value
    if decl.kind == "set":
        chars = sorted(decl.charset())
        return "".join(rng.choice(chars) for _ in range(rng.randint(1, 3)))
    return "%s%d" % (rng.choice("abcdefghxyz"), rng.randrange(1000))


def gen_classes(spec, seed, target_tokens, depth_scale=8):
    """Sample one derivation of the start symbol with about ``target_tokens``
    terminals; returns ``(classes, lexemes)``.

    While under budget, productions are drawn uniformly, except that the
    shortest-completing production is favoured with probability growing with
    the number of pending nonterminals (which bounds nesting), and that a
    lone pending nonterminal always takes a production that can grow. Once
    the budget is met, only shortest-completing productions are used.
    """
    rng = random.Random(seed)
    best, choice = _min_yields(spec)
    if best[spec.start][0] == float("inf"):
        raise CorpusError("grammar has an empty language; no corpus exists")
    productive = {
        nt: [i for i, alt in enumerate(alts)
             if all(s.kind != "nt" or best[s.name][0] != float("inf") for s in alt)]
        for nt, alts in spec.rules.items()
    }
    emits = _can_emit(spec)

    def grows(alt):
        return len(alt) >= 2 and any(s.kind == "nt" for s in alt) and \
            any(s.kind != "nt" or emits[s.name] for s in alt)

    growing = {nt: [i for i in ps if grows(spec.rules[nt][i])] or ps
               for nt, ps in productive.items()}
    # past this many expansions only shortest completions are taken, so
    # grammars whose sentences cannot grow still terminate
    max_steps = 50 * target_tokens + 10000
    steps = 0
    classes = []
    lexemes = []
    stack = [Symbol("nt", spec.start)]
    pending = best[spec.start][0]
    open_nts = 1
    while stack:
        sym = stack.pop()
        if sym.kind != "nt":
            classes.append(sym.name)
            lexemes.append(_lexeme(rng, sym.name, spec))
            pending -= 1
            continue
        open_nts -= 1
        steps += 1
        nt = sym.name
        pending -= best[nt][0]
        room = target_tokens - len(classes) - pending
        if room <= 0 or steps > max_steps:
            i = choice[nt]
        elif open_nts == 0:
            # nothing else pending: keep the derivation open
            i = rng.choice(growing[nt])
        else:
            q = min(0.95, open_nts / depth_scale)
            i = choice[nt] if rng.random() < q else rng.choice(productive[nt])
        alt = spec.rules[nt][i]
        for s in reversed(alt):
            stack.append(s)
            if s.kind == "nt":
                pending += best[s.name][0]
                open_nts += 1
            else:
                pending += 1
    return classes, lexemes


def join_lexemes(lexemes, lexer):
    if lexer == "char":
        return "".join(lexemes)
    if lexer == "sexpr":
        out = []
        prev = None
        for lx in lexemes:
            if out and prev != "(" and lx != ")":
                out.append(" ")
            out.append(lx)
            prev = lx
        return "".join(out)
    return " ".join(lexemes)


def gen_corpus(spec, seed, target_tokens, lexer="sexpr", depth_scale=8):
    """Text of one in-language sentence of roughly ``target_tokens`` tokens."""
    _, lexemes = gen_classes(spec, seed, target_tokens, depth_scale)
    return join_lexemes(lexemes, lexer)


# -- regular expressions --------------------------------------------------------

REGEX_ALPHABET = ("a", "b", "c")


def gen_random_regex(rng, depth=6, alphabet=REGEX_ALPHABET):
    """Random regex AST of at most ``depth`` levels.

    Nodes: ("chr", c), ("eps",), ("cat", r, s), ("alt", r, s), ("star", r),
    ("plus", r), ("opt", r).
    """
    if depth <= 1 or rng.random() < 0.25:
        return ("eps",) if rng.random() < 0.08 else ("chr", rng.choice(alphabet))
    op = rng.choices(("cat", "alt", "star", "plus", "opt"),
                     weights=(4, 3, 2, 1, 1))[0]
    if op in ("cat", "alt"):
        return (op, gen_random_regex(rng, depth - 1, alphabet),
                gen_random_regex(rng, depth - 1, alphabet))
    return (op, gen_random_regex(rng, depth - 1, alphabet))


def regex_to_python(r):
    op = r[0]
    if op == "chr":
        return r[1]
    if op == "eps":
        return "(?:)"
    if op == "cat":
        return "(?:%s%s)" % (regex_to_python(r[1]), regex_to_python(r[2]))
    if op == "alt":
        return "(?:%s|%s)" % (regex_to_python(r[1]), regex_to_python(r[2]))
    suffix = {"star": "*", "plus": "+", "opt": "?"}[op]
    return "(?:%s)%s" % (regex_to_python(r[1]), suffix)


def regex_to_graph(graph, r):
    """Build ``r`` into ``graph``; repetition becomes a tied recursive node."""
    op = r[0]
    if op == "chr":
        return graph.terminal(r[1])
    if op == "eps":
        return graph.epsilon()
    if op == "cat":
        return graph.cat(regex_to_graph(graph, r[1]), regex_to_graph(graph, r[2]))
    if op == "alt":
        return graph.alt(regex_to_graph(graph, r[1]), regex_to_graph(graph, r[2]))
    inner = regex_to_graph(graph, r[1])
    if op == "opt":
        return graph.alt(inner, graph.epsilon())
    (loop,) = graph.recursive(1)
    graph.tie(loop, graph.alt(graph.epsilon(), graph.cat(inner, loop)))
    if op == "star":
        return loop
    return graph.cat(inner, loop)


def sample_regex_string(rng, r, max_reps=3):
    """A random member of the language of ``r``."""
    op = r[0]
    if op == "chr":
        return r[1]
    if op == "eps":
        return ""
    if op == "cat":
        return sample_regex_string(rng, r[1], max_reps) + \
            sample_regex_string(rng, r[2], max_reps)
    if op == "alt":
        return sample_regex_string(rng, r[1 + rng.randrange(2)], max_reps)
    lo = 1 if op == "plus" else 0
    hi = 1 if op == "opt" else max_reps
    return "".join(sample_regex_string(rng, r[1], max_reps)
                   for _ in range(rng.randint(lo, hi)))
