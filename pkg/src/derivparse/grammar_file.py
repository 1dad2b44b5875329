"""Grammar files: reading, printing and elaboration onto a GrammarGraph.

Format (UTF-8)::

    # comment
    start Expr;
    token num = [0-9];        # character-set class (words lexer)
    token plus = "+";         # named literal class (words lexer)
    token atom;               # opaque class, produced by a built-in lexer
    Expr -> Expr plus num | num | "(" Expr ")" | ;

A quoted literal in a rule is a token class whose name is the literal text.
``atom``, the class the sexpr lexer emits, is declared implicitly when used.
An empty alternative is epsilon. ``start`` and ``token`` are keywords only
when not followed by ``->``.
"""

from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple

from .graph import GrammarGraph


class GrammarError(Exception):
    def __init__(self, message, line=None, col=None):
        where = "" if line is None else " (line %d, col %d)" % (line, col)
        super().__init__(message + where)
        self.message = message
        self.line = line
        self.col = col


class Symbol(NamedTuple):
    kind: str  # "nt", "class" or "lit"
    name: str

    @property
    def is_terminal(self):
        return self.kind != "nt"


@dataclass(frozen=True)
class TokenClass:
    kind: str  # "opaque", "literal" or "set"
    value: str = None

    def charset(self):
        """Characters admitted by a ``set`` class, ranges expanded."""
        out = set()
        v = self.value
        i = 0
        while i < len(v):
            if i + 2 < len(v) and v[i + 1] == "-":
                lo, hi = ord(v[i]), ord(v[i + 2])
                out.update(chr(c) for c in range(lo, hi + 1))
                i += 3
            else:
                out.add(v[i])
                i += 1
        return frozenset(out)


@dataclass
class GrammarSpec:
    start: str
    rules: dict = field(default_factory=dict)
    token_classes: dict = field(default_factory=dict)

    def literal_classes(self):
        seen = []
        for alts in self.rules.values():
            for alt in alts:
                for sym in alt:
                    if sym.kind == "lit" and sym.name not in seen:
                        seen.append(sym.name)
        return seen

    def terminal_classes(self):
        """Every token class name a rule can match, in first-use order."""
        seen = []
        for alts in self.rules.values():
            for alt in alts:
                for sym in alt:
                    if sym.is_terminal and sym.name not in seen:
                        seen.append(sym.name)
        return seen

    def nonterminals(self):
        return list(self.rules)


# classes the built-in lexers emit without being declared
BUILTIN_CLASSES = {"atom": TokenClass("opaque")}

# -- reader -----------------------------------------------------------------

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r"}


def _tokenize(text):
    toks = []
    line, col = 1, 1
    i = 0
    n = len(text)

    def advance(j):
        nonlocal line, col, i
        while i < j:
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n\f\v":
            advance(i + 1)
        elif ch == "#":
            j = text.find("\n", i)
            advance(n if j < 0 else j)
        elif ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(("ident", text[i:j], line, col))
            advance(j)
        elif ch == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] == "\n":
                    raise GrammarError("unterminated string literal", line, col)
                c = text[j]
                if c == "\\":
                    if j + 1 >= n:
                        raise GrammarError("unterminated string literal", line, col)
                    e = text[j + 1]
                    buf.append(_ESCAPES.get(e, e))
                    j += 2
                elif c == '"':
                    j += 1
                    break
                else:
                    buf.append(c)
                    j += 1
            if not buf:
                raise GrammarError("empty string literal", line, col)
            toks.append(("string", "".join(buf), line, col))
            advance(j)
        elif ch == "[":
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] == "\n":
                    raise GrammarError("unterminated character set", line, col)
                c = text[j]
                if c == "\\" and j + 1 < n:
                    buf.append(_ESCAPES.get(text[j + 1], text[j + 1]))
                    j += 2
                elif c == "]":
                    j += 1
                    break
                else:
                    buf.append(c)
                    j += 1
            if not buf:
                raise GrammarError("empty character set", line, col)
            toks.append(("charset", "".join(buf), line, col))
            advance(j)
        elif text.startswith("->", i):
            toks.append(("->", "->", line, col))
            advance(i + 2)
        elif ch in "|;=":
            toks.append((ch, ch, line, col))
            advance(i + 1)
        else:
            raise GrammarError("unexpected character %r" % ch, line, col)
    toks.append(("eof", "", line, col))
    return toks


def load_grammar(text):
    """Parse grammar text into a validated :class:`GrammarSpec`."""
    toks = _tokenize(text)
    pos = 0

    def peek(k=0):
        return toks[min(pos + k, len(toks) - 1)]

    def expect(kind, what):
        nonlocal pos
        t = toks[pos]
        if t[0] != kind:
            shown = "end of input" if t[0] == "eof" else repr(t[1])
            raise GrammarError("expected %s, found %s" % (what, shown), t[2], t[3])
        pos += 1
        return t

    start = None
    rules = {}
    classes = {}
    refs = []  # (name, line, col) of bare identifiers used in rules
    while peek()[0] != "eof":
        t = peek()
        if t[0] != "ident":
            raise GrammarError("expected a rule, 'start' or 'token', found %r"
                               % t[1], t[2], t[3])
        if t[1] == "start" and peek(1)[0] != "->":
            pos += 1
            name = expect("ident", "start symbol name")
            expect(";", "';' after start declaration")
            if start is not None:
                raise GrammarError("duplicate start declaration", t[2], t[3])
            start = name
            continue
        if t[1] == "token" and peek(1)[0] != "->":
            pos += 1
            name = expect("ident", "token class name")
            if name[1] in classes:
                raise GrammarError("duplicate token class %r" % name[1],
                                   name[2], name[3])
            if peek()[0] == "=":
                pos += 1
                v = peek()
                if v[0] == "string":
                    classes[name[1]] = TokenClass("literal", v[1])
                elif v[0] == "charset":
                    classes[name[1]] = TokenClass("set", v[1])
                else:
                    raise GrammarError("expected a string or [charset]", v[2], v[3])
                pos += 1
            else:
                classes[name[1]] = TokenClass("opaque")
            expect(";", "';' after token declaration")
            continue
        pos += 1
        expect("->", "'->'")
        if t[1] in rules:
            raise GrammarError("duplicate rule for nonterminal %r" % t[1], t[2], t[3])
        alts = []
        seq = []
        while True:
            s = peek()
            if s[0] == "ident":
                seq.append(s)
                refs.append((s[1], s[2], s[3]))
                pos += 1
            elif s[0] == "string":
                seq.append(s)
                pos += 1
            elif s[0] == "|":
                alts.append(seq)
                seq = []
                pos += 1
            elif s[0] == ";":
                alts.append(seq)
                pos += 1
                break
            else:
                shown = "end of input" if s[0] == "eof" else repr(s[1])
                raise GrammarError("expected a symbol, '|' or ';', found %s" % shown,
                                   s[2], s[3])
        rules[t[1]] = alts

    if start is None:
        raise GrammarError("missing start declaration ('start <Name>;')")
    for name, cls in classes.items():
        if name in rules:
            raise GrammarError("%r is declared both as a token class and a rule" % name)
    for name, line, col in refs:
        if name not in rules and name not in classes:
            if name not in BUILTIN_CLASSES:
                raise GrammarError("undefined nonterminal %r" % name, line, col)
            classes[name] = BUILTIN_CLASSES[name]
    if start[1] not in rules:
        raise GrammarError("undefined start nonterminal %r" % start[1],
                           start[2], start[3])

    spec_rules = {}
    for name, alts in rules.items():
        out = []
        for seq in alts:
            syms = []
            for kind, val, _, _ in seq:
                if kind == "string":
                    syms.append(Symbol("lit", val))
                elif val in rules:
                    syms.append(Symbol("nt", val))
                else:
                    syms.append(Symbol("class", val))
            out.append(tuple(syms))
        spec_rules[name] = out
    return GrammarSpec(start=start[1], rules=spec_rules, token_classes=classes)


# -- printer ----------------------------------------------------------------

def _quote(s, close='"'):
    out = []
    for ch in s:
        if ch in ("\\", close):
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        else:
            out.append(ch)
    return "".join(out)


def dump_grammar(spec):
    """Render ``spec`` in the file format; ``load_grammar`` inverts it."""
    lines = ["start %s;" % spec.start]
    for name, decl in spec.token_classes.items():
        if decl.kind == "opaque":
            lines.append("token %s;" % name)
        elif decl.kind == "literal":
            lines.append('token %s = "%s";' % (name, _quote(decl.value)))
        else:
            lines.append("token %s = [%s];" % (name, _quote(decl.value, "]")))
    for name, alts in spec.rules.items():
        rendered = []
        for alt in alts:
            rendered.append(" ".join(
                '"%s"' % _quote(s.name) if s.kind == "lit" else s.name for s in alt))
        body = " | ".join(rendered)
        lines.append("%s -> %s;" % (name, body))
    return "\n".join(lines) + "\n"


# -- elaboration --------------------------------------------------------------

def elaborate(spec, graph=None, kernel=None):
    """Lower ``spec`` onto a grammar graph; returns ``(graph, start_handle)``.

    Each production becomes ``Red(Cat(...), "Name/index")``; alternatives are
    right-nested ``Alt``s and nonterminals are tied placeholders.
    """
    if graph is None:
        graph = GrammarGraph(kernel)
    names = list(spec.rules)
    holes = dict(zip(names, graph.recursive(len(names))))
    for name in names:
        prods = []
        for i, alt in enumerate(spec.rules[name]):
            parts = [holes[s.name] if s.kind == "nt" else graph.terminal(s.name)
                     for s in alt]
            prods.append(graph.red(graph.cats(parts), "%s/%d" % (name, i)))
        graph.tie(holes[name], graph.alts(prods))
    graph.nonterminals = holes
    graph.start = holes[spec.start]
    graph.spec = spec
    return graph, holes[spec.start]


# -- bundled grammars -----------------------------------------------------------

BUNDLED = ("sexpr", "parens", "ambiguous", "leftrec", "arith")


def bundled_text(name):
    if name not in BUNDLED:
        raise KeyError("no bundled grammar %r" % name)
    return resources.files("derivparse").joinpath(
        "grammars", name + ".grammar").read_text(encoding="utf-8")


def load_bundled(name):
    return load_grammar(bundled_text(name))
