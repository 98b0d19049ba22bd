"""Evaluation rules for hO operators, shared by the constant folder and
the interpreter.

All arithmetic happens in 64-bit two's-complement integers; operands carry
a nominal type used for widening.  Shifts and bitwise operators work on the
32-bit pattern of their operands and yield u32.  Division and modulo
truncate toward zero (matching the C backend).
"""

from . import types as ty

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1

# Runtime fault kinds
DIV_ZERO = "div-zero"
SHIFT_RANGE = "shift-range"
ARRAY_BOUNDS = "array-bounds"
EMPTY_PORT = "empty-port"
CONTRACT_FAIL = "contract-fail"
POOL_EXHAUSTED = "pool-exhausted"
NEW_ON_FULL = "new-on-full-port"
EXTEND_RANGE = "extend-range"
NARROWING = "narrowing"
MMIO_TRAP = "mmio-trap"


class ArithFault(Exception):
    """A dynamic check would fire: carries only the fault kind."""

    def __init__(self, kind):
        super().__init__(kind)
        self.kind = kind


def wrap64(v):
    v &= (1 << 64) - 1
    return v - (1 << 64) if v >= (1 << 63) else v


def pattern32(v):
    return v & 0xFFFFFFFF


def trunc_div(a, b):
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def trunc_mod(a, b):
    return a - trunc_div(a, b) * b


def eval_binop(op, lhs, rhs):
    """Apply a binary operator to (value, type) operands; returns (value, type).

    Boolean AND/OR are handled by the caller (short-circuit); comparison and
    arithmetic operands must be numeric.  Raises ArithFault for division by
    zero and out-of-range shift amounts.
    """
    lv, lt = lhs
    rv, rt = rhs
    if op in ("+", "-", "*"):
        v = lv + rv if op == "+" else lv - rv if op == "-" else lv * rv
        return wrap64(v), ty.widen(lt, rt)
    if op in ("/", "DIV", "MOD"):
        if rv == 0:
            raise ArithFault(DIV_ZERO)
        v = trunc_mod(lv, rv) if op == "MOD" else trunc_div(lv, rv)
        return wrap64(v), ty.widen(lt, rt)
    if op in ("<<", ">>"):
        if rv < 0 or rv >= 32:
            raise ArithFault(SHIFT_RANGE)
        pat = pattern32(lv)
        v = pattern32(pat << rv) if op == "<<" else pat >> rv
        return v, ty.U32
    if op in ("/\\", "\\/", "><"):
        a, b = pattern32(lv), pattern32(rv)
        v = a & b if op == "/\\" else a | b if op == "\\/" else a ^ b
        return v, ty.U32
    if op in ("=", "#", "<", ">", "<=", ">="):
        v = {"=": lv == rv, "#": lv != rv, "<": lv < rv,
             ">": lv > rv, "<=": lv <= rv, ">=": lv >= rv}[op]
        return (1 if v else 0), ty.BOOL
    raise ValueError(f"unknown binary operator {op!r}")


def eval_unop(op, operand):
    v, t = operand
    if op == "+":
        return v, t
    if op == "-":
        return wrap64(-v), t
    if op == "~":
        return pattern32(~pattern32(v)), ty.U32
    raise ValueError(f"unknown unary operator {op!r}")
