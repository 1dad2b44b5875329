"""Built-in lexers: ``char``, ``words`` and ``sexpr``.

Token positions are UTF-8 byte offsets into the input.
"""

from typing import NamedTuple

LEXER_MODES = ("char", "words", "sexpr")

# sexpr token classes; parens are named by their literal so grammars can say "("
LPAREN = "("
RPAREN = ")"
ATOM = "atom"

_WS = " \t\n\r\f\v"


class Token(NamedTuple):
    cls: str
    lexeme: str
    pos: int


class LexError(Exception):
    def __init__(self, message, pos):
        super().__init__("%s at byte %d" % (message, pos))
        self.pos = pos


class Lexer:
    """A lexer mode plus, for ``words``, the word-shape rules of a grammar."""

    def __init__(self, mode, spec=None):
        if mode not in LEXER_MODES:
            raise ValueError("unknown lexer mode %r (choose from %s)"
                             % (mode, ", ".join(LEXER_MODES)))
        self.mode = mode
        self.literals = set()
        self.named_literals = {}
        self.shapes = []
        if spec is not None:
            self.literals = set(spec.literal_classes())
            for name, decl in spec.token_classes.items():
                if decl.kind == "literal":
                    self.named_literals[decl.value] = name
                elif decl.kind == "set":
                    self.shapes.append((name, decl.charset()))

    def classify_word(self, word):
        if word in self.named_literals:
            return self.named_literals[word]
        if word in self.literals:
            return word
        for name, chars in self.shapes:
            if word and all(ch in chars for ch in word):
                return name
        return None


def _byte_offsets(text):
    offs = []
    pos = 0
    for ch in text:
        offs.append(pos)
        pos += len(ch.encode("utf-8"))
    offs.append(pos)
    return offs


def lex(lexer, text):
    """Split ``text`` into tokens according to ``lexer.mode``."""
    if isinstance(lexer, str):
        lexer = Lexer(lexer)
    offs = _byte_offsets(text)
    mode = lexer.mode
    if mode == "char":
        return [Token(ch, ch, offs[i]) for i, ch in enumerate(text)]
    out = []
    i = 0
    n = len(text)
    if mode == "sexpr":
        while i < n:
            ch = text[i]
            if ch in _WS:
                i += 1
            elif ch == "(" or ch == ")":
                out.append(Token(ch, ch, offs[i]))
                i += 1
            else:
                j = i + 1
                while j < n and text[j] not in _WS and text[j] not in "()":
                    j += 1
                out.append(Token(ATOM, text[i:j], offs[i]))
                i = j
        return out
    while i < n:
        if text[i] in _WS:
            i += 1
            continue
        j = i + 1
        while j < n and text[j] not in _WS:
            j += 1
        word = text[i:j]
        cls = lexer.classify_word(word)
        if cls is None:
            raise LexError("no token class matches %r" % word, offs[i])
        out.append(Token(cls, word, offs[i]))
        i = j
    return out


def token_classes(tokens):
    return [t.cls for t in tokens]


def tokens_from_classes(classes):
    """Synthetic tokens whose lexeme is the class name; handy for tests."""
    return [Token(c, c, i) for i, c in enumerate(classes)]
