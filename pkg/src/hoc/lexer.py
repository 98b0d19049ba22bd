"""Tokenizer for hO source text.

Produces a flat token list; all location accounting is byte-exact so that
token spans plus the skipped whitespace/comments reconstruct the source.
"""

from dataclasses import dataclass, field

# Token kinds
KW = "kw"
ID = "id"
INT = "int"
STR = "str"
OP = "op"
EOF = "eof"

# Every terminal keyword of the grammar.  Keywords are recognized in the
# ALL-UPPERCASE spelling and the all-lowercase alternate; any mixed-case
# spelling is an ordinary identifier.
KEYWORDS = frozenset([
    "AND", "ARRAY", "BEGIN", "CASE", "CONST", "CONTRACT", "DIV", "ELSE",
    "ELSIF", "END", "EXTERNAL", "FALSE", "IF", "IMPORT", "INCLUDE",
    "INVARIANT", "LOCAL", "LOG", "MOD", "MODULE", "NEXT", "NOT", "OF", "OR",
    "POINTER", "PROCEDURE", "PROVIDE", "RECORD", "REPEAT", "REQUIRE",
    "RETURN", "SELECT", "SIZE", "STATE", "THEN", "TIMES", "TO", "TRUE",
    "TYPE", "VAR", "VOLATILE", "WHILE",
])

# Longest match first.
OPERATORS = [
    ":=", "..", "<<", ">>", "<=", ">=", "/\\", "\\/", "><",
    ";", ",", ":", "=", "#", "<", ">", "+", "-", "*", "/",
    "(", ")", "[", "]", "^", ".", "|", "~",
]

MAX_LITERAL = 0xFFFFFFFF  # integer literals must fit unsigned 32 bits

_HEXDIGITS = set("0123456789abcdefABCDEF")
_LETTERS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_DIGITS = set("0123456789")


@dataclass(frozen=True)
class Loc:
    file: str
    line: int
    col: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


@dataclass
class Token:
    kind: str
    text: str
    loc: Loc = field(compare=False)
    value: int = 0
    offset: int = field(default=0, compare=False)  # byte offset of first char

    def is_kw(self, name):
        return self.kind == KW and self.text.upper() == name

    @property
    def canon(self):
        """Canonical (uppercase) spelling for keywords, text otherwise."""
        return self.text.upper() if self.kind == KW else self.text


class LexError(Exception):
    def __init__(self, loc, message, offending):
        super().__init__(f"{loc}: {message}: {offending!r}")
        self.loc = loc
        self.message = message
        self.offending = offending


def keyword_spellings(name):
    return (name, name.lower())


def tokenize(source, file_id="<input>"):
    """Tokenize hO source text into a list of Token, ending with an EOF token.

    Raises LexError on the first lexical error (unterminated comment or
    string, malformed number, illegal character, literal overflow).
    """
    toks = []
    pos = 0
    line = 1
    col = 1
    n = len(source)

    def loc():
        return Loc(file_id, line, col)

    def advance(k):
        nonlocal pos, line, col
        for _ in range(k):
            if source[pos] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            pos += 1

    while pos < n:
        ch = source[pos]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("(*", pos):
            start = loc()
            end = source.find("*)", pos + 2)  # comments do not nest
            if end < 0:
                raise LexError(start, "unterminated comment", source[pos:pos + 16])
            advance(end + 2 - pos)
            continue
        tok_loc = loc()
        tok_off = pos
        if ch in _LETTERS or ch == "_":
            j = pos
            while j < n and (source[j] in _LETTERS or source[j] in _DIGITS or source[j] == "_"):
                j += 1
            text = source[pos:j]
            is_kw = text in KEYWORDS or (text.islower() and text.upper() in KEYWORDS)
            toks.append(Token(KW if is_kw else ID, text, tok_loc, offset=tok_off))
            advance(j - pos)
            continue
        if ch in _DIGITS:
            j = pos
            while j < n and source[j] in _DIGITS:
                j += 1
            k = j
            while k < n and source[k] in _HEXDIGITS:
                k += 1
            if k < n and source[k] == "h":
                text = source[pos:k + 1]
                value = int(text[:-1], 16)
            elif k > j:
                raise LexError(tok_loc, "malformed number", source[pos:k])
            else:
                text = source[pos:j]
                value = int(text, 10)
            if value > MAX_LITERAL:
                raise LexError(tok_loc, "literal overflow", text)
            toks.append(Token(INT, text, tok_loc, value=value, offset=tok_off))
            advance(len(text))
            continue
        if ch == "'":
            j = source.find("'", pos + 1)
            if j < 0 or "\n" in source[pos + 1:j]:
                raise LexError(tok_loc, "malformed number", source[pos:pos + 8])
            inner = source[pos + 1:j]
            if len(inner) != 1 or not (32 <= ord(inner) <= 126):
                raise LexError(tok_loc, "malformed number", source[pos:j + 1])
            toks.append(Token(INT, source[pos:j + 1], tok_loc, value=ord(inner), offset=tok_off))
            advance(j + 1 - pos)
            continue
        if ch == '"':
            j = source.find('"', pos + 1)
            if j < 0 or "\n" in source[pos + 1:j]:
                raise LexError(tok_loc, "unterminated string", source[pos:pos + 16])
            inner = source[pos + 1:j]
            for c in inner:
                if not (32 <= ord(c) <= 126):
                    raise LexError(tok_loc, "illegal character", c)
            toks.append(Token(STR, source[pos:j + 1], tok_loc, offset=tok_off))
            advance(j + 1 - pos)
            continue
        for op in OPERATORS:
            if source.startswith(op, pos):
                toks.append(Token(OP, op, tok_loc, offset=tok_off))
                advance(len(op))
                break
        else:
            raise LexError(tok_loc, "illegal character", ch)

    toks.append(Token(EOF, "", Loc(file_id, line, col), offset=pos))
    return toks
