"""Resolved type representations and the `.hi` type surface syntax."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Numeric:
    width: int      # 8, 16 or 32
    signed: bool

    def __str__(self):
        return f"{'s' if self.signed else 'u'}{self.width}"


@dataclass(frozen=True)
class Boolean:
    def __str__(self):
        return "boolean"


@dataclass(frozen=True)
class PortType:
    def __str__(self):
        return "port"


@dataclass(frozen=True)
class Pointer:
    volatile: bool
    pointee: object

    def __str__(self):
        vol = "VOLATILE " if self.volatile else ""
        return f"{vol}POINTER TO {self.pointee}"


@dataclass(frozen=True)
class Array:
    length: int
    element: object

    def __str__(self):
        return f"ARRAY {self.length} OF {self.element}"


@dataclass(frozen=True)
class Record:
    fields: tuple  # of (name, type), declaration order

    def __str__(self):
        inner = " ; ".join(f"{n} : {t}" for n, t in self.fields)
        return f"RECORD {inner} END"


@dataclass(frozen=True)
class Unknown:
    """Placeholder for unresolved cross-module types in restricted mode."""

    def __str__(self):
        return "<unknown>"


U8 = Numeric(8, False)
U16 = Numeric(16, False)
U32 = Numeric(32, False)
S8 = Numeric(8, True)
S16 = Numeric(16, True)
S32 = Numeric(32, True)
BOOL = Boolean()
PORT = PortType()

BUILTIN_TYPES = {
    "u8": U8, "u16": U16, "u32": U32,
    "s8": S8, "s16": S16, "s32": S32,
    "boolean": BOOL, "port": PORT,
}

DATA_ARRAY = Array(4096, U8)


def is_numeric(t):
    return isinstance(t, Numeric)


def size_of(t):
    """Byte size of a type; ports are opaque (no size)."""
    if isinstance(t, Numeric):
        return t.width // 8
    if isinstance(t, Boolean):
        return 1
    if isinstance(t, Pointer):
        return 4
    if isinstance(t, Array):
        return t.length * size_of(t.element)
    if isinstance(t, Record):
        return sum(size_of(ft) for _, ft in t.fields)
    raise ValueError(f"type {t} has no size")


def align_of(t):
    if isinstance(t, Numeric):
        return t.width // 8
    if isinstance(t, Boolean):
        return 1
    if isinstance(t, (Pointer, PortType)):
        return 4
    if isinstance(t, Array):
        return align_of(t.element)
    if isinstance(t, Record):
        return max((align_of(ft) for _, ft in t.fields), default=1)
    raise ValueError(f"type {t} has no alignment")


def widen(a, b):
    """Nominal result type of mixed arithmetic: wider operand, unsigned ties."""
    if a.width != b.width:
        return a if a.width > b.width else b
    if a.signed != b.signed:
        return a if not a.signed else b
    return a


def value_range(t):
    if t.signed:
        return -(1 << (t.width - 1)), (1 << (t.width - 1)) - 1
    return 0, (1 << t.width) - 1


def fits(value, t):
    lo, hi = value_range(t)
    return lo <= value <= hi


def wrap_to(value, t):
    """Truncate a mathematical integer to the two's-complement range of t."""
    m = value & ((1 << t.width) - 1)
    if t.signed and m >= (1 << (t.width - 1)):
        m -= 1 << t.width
    return m


def type_text(t):
    """Render a type in the `.hi` surface syntax (single spaces)."""
    return str(t)


def parse_type_text(text):
    """Parse the `.hi` type surface syntax back into a type."""
    toks = text.replace(";", " ; ").replace(":", " : ").split()
    pos = 0

    def take(expect=None):
        nonlocal pos
        if pos >= len(toks):
            raise ValueError(f"bad type text: {text!r}")
        t = toks[pos]
        pos += 1
        if expect is not None and t != expect:
            raise ValueError(f"bad type text: expected {expect} in {text!r}")
        return t

    def parse():
        t = take()
        if t in BUILTIN_TYPES:
            return BUILTIN_TYPES[t]
        if t == "VOLATILE":
            take("POINTER")
            take("TO")
            return Pointer(True, parse())
        if t == "POINTER":
            take("TO")
            return Pointer(False, parse())
        if t == "ARRAY":
            n = int(take())
            take("OF")
            return Array(n, parse())
        if t == "RECORD":
            fields = []
            while True:
                name = take()
                take(":")
                fields.append((name, parse()))
                sep = take()
                if sep == "END":
                    break
                if sep != ";":
                    raise ValueError(f"bad type text: {text!r}")
            return Record(tuple(fields))
        raise ValueError(f"bad type text: {text!r}")

    out = parse()
    if pos != len(toks):
        raise ValueError(f"trailing junk in type text: {text!r}")
    return out
