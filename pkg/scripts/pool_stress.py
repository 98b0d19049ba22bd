#!/usr/bin/env python3
"""Randomized stress of the port/pool state machine: runs many random
NEW/SEND/CLONE/DISPOSE/EXTEND sequences, auditing pool conservation and
block ownership after every operation, and prints fault statistics."""

import collections
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hoc import machine  # noqa: E402
from hoc.machine import BlockPool, MachineFault, PortState  # noqa: E402


def stress(programs=1000, capacity=6, ports=8, steps=40, seed=0):
    faults = collections.Counter()
    ops = 0
    for n in range(programs):
        rng = random.Random(seed + n)
        pool = BlockPool(capacity)
        plist = [PortState() for _ in range(ports)]
        for _ in range(steps):
            op = rng.choice(("new", "send", "clone", "dispose", "extend"))
            p, q = rng.choice(plist), rng.choice(plist)
            ops += 1
            try:
                if op == "new":
                    machine.port_new(pool, p, rng.randint(1, 4096))
                elif op == "send":
                    machine.port_send(p, q)
                elif op == "clone":
                    machine.port_clone(pool, p, q)
                elif op == "dispose":
                    machine.port_dispose(pool, p)
                else:
                    machine.port_extend(p, rng.randint(-64, 64))
            except MachineFault as f:
                faults[f.kind] += 1
            live = [x.block for x in plist if x.block is not None]
            assert len({id(b) for b in live}) == len(live), "aliased block"
            assert pool.conserved(), "conservation violated"
        for p in plist:
            machine.port_dispose(pool, p)
        assert pool.free_count == capacity, "leaked blocks"
    return ops, faults


def main():
    programs = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    ops, faults = stress(programs=programs)
    print(f"{programs} programs, {ops} operations, zero leaks")
    for kind, count in sorted(faults.items()):
        print(f"  {kind:>18}: {count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
