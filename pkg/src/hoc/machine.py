"""Runtime primitives: message blocks, ports, the block pool and the
scripted MMIO map.

These are the state-machine cores of the interpreter; the operations are
total functions over explicit state so they can be exercised directly by
property tests.  Faults carry only their kind; the interpreter attaches
check ids and source locations.
"""

from . import arith
from .arith import (ArithFault, DIV_ZERO, SHIFT_RANGE, ARRAY_BOUNDS,
                    EMPTY_PORT, CONTRACT_FAIL, POOL_EXHAUSTED, NEW_ON_FULL,
                    EXTEND_RANGE, NARROWING, MMIO_TRAP)

BLOCK_SIZE = 4096
FILL_PATTERN = 0xAA  # deterministic stand-in for "contains random data"


class MachineFault(Exception):
    def __init__(self, kind):
        super().__init__(kind)
        self.kind = kind


class Block:
    __slots__ = ("bytes", "used", "index")

    def __init__(self, index):
        self.bytes = bytearray(BLOCK_SIZE)
        self.used = 0
        self.index = index

    def __repr__(self):
        return f"<block {self.index} used={self.used}>"


class PortState:
    """A port holds at most one message block; initially empty."""

    __slots__ = ("block",)

    def __init__(self):
        self.block = None

    @property
    def pending(self):
        return self.block is not None


class BlockPool:
    """Free list of fixed-size blocks; freed blocks return to the front."""

    def __init__(self, capacity):
        if capacity < 1:
            raise ValueError("pool capacity must be at least 1")
        self.capacity = capacity
        self.blocks = [Block(i) for i in range(capacity)]
        self._free = list(reversed(self.blocks))  # pop() yields block 0 first
        self.allocated = 0

    @property
    def free_count(self):
        return len(self._free)

    def alloc(self):
        if not self._free:
            raise MachineFault(POOL_EXHAUSTED)
        self.allocated += 1
        return self._free.pop()

    def free(self, block):
        assert block not in self._free, "double free"
        self.allocated -= 1
        self._free.append(block)

    def conserved(self):
        return self.allocated + self.free_count == self.capacity


def port_send(src, dst):
    """Move the message from src to dst.  Truth table: only (src full,
    dst empty) moves and returns True; every other case is a no-op."""
    if src.block is not None and dst.block is None:
        dst.block = src.block
        src.block = None
        return True
    return False


_FILL = bytes([FILL_PATTERN]) * BLOCK_SIZE


def port_new(pool, port, size):
    if port.block is not None:
        raise MachineFault(NEW_ON_FULL)
    if not 0 < size <= BLOCK_SIZE:
        raise MachineFault(EXTEND_RANGE)
    block = pool.alloc()
    block.used = size
    block.bytes[:] = _FILL
    port.block = block


def port_dispose(pool, port):
    if port.block is not None:
        pool.free(port.block)
        port.block = None


def port_clone(pool, src, dst):
    if dst.block is not None:
        raise MachineFault(NEW_ON_FULL)
    if src.block is None:
        return
    block = pool.alloc()
    block.bytes[:] = src.block.bytes
    block.used = src.block.used
    dst.block = block


def port_extend(port, delta):
    if port.block is None:
        raise MachineFault(EMPTY_PORT)
    used = port.block.used + delta
    if not 0 <= used <= BLOCK_SIZE:
        raise MachineFault(EXTEND_RANGE)
    port.block.used = used


def port_count(port):
    if port.block is None:
        raise MachineFault(EMPTY_PORT)
    return port.block.used


class Mmio:
    """Scripted external memory: reads replay per-address value lists
    (repeating the last), writes are logged with their cycle number."""

    def __init__(self, script=None, strict=False):
        self.script = {addr: list(vals) for addr, vals in (script or {}).items()}
        self._next = {addr: 0 for addr in self.script}
        self.write_log = []
        self.strict = strict

    def read(self, addr):
        vals = self.script.get(addr)
        if vals is None or not vals:
            if self.strict and vals is None:
                raise MachineFault(MMIO_TRAP)
            return 0
        i = self._next[addr]
        if i < len(vals) - 1:
            self._next[addr] = i + 1
        return vals[i]

    def write(self, addr, value, cycle):
        if self.strict and addr not in self.script:
            raise MachineFault(MMIO_TRAP)
        self.write_log.append((addr, value, cycle))


# the arithmetic rules are shared with the constant folder
eval_binop = arith.eval_binop
eval_unop = arith.eval_unop
