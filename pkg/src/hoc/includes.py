"""INCLUDE resolution: splice included toplevels into the unit.

A file is included at most once per compilation (tracked by canonical
path); repeated or circular inclusion expands to nothing.  Inclusion is
depth-first in source order.
"""

import os

from . import ast
from .lexer import tokenize
from .parser import parse_unit


class IncludeError(Exception):
    def __init__(self, loc, path, searched):
        self.loc = loc
        self.path = path
        self.searched = list(searched)
        dirs = ", ".join(self.searched)
        super().__init__(f"{loc}: include file {path!r} not found (searched: {dirs})")


def resolve_includes(unit, include_dirs, origin_path):
    """Expand all INCLUDE toplevels of `unit` (parsed from `origin_path`).

    Returns (merged_unit, files) where files lists `origin_path` followed by
    every included file in first-inclusion order, using the paths they were
    opened with.
    """
    seen = {os.path.realpath(origin_path)}
    files = [origin_path]

    def expand(u, cur_path):
        out = []
        for top in u.toplevels:
            if not isinstance(top, ast.Include):
                out.append(top)
                continue
            searched = list(include_dirs) + [os.path.dirname(cur_path) or "."]
            target = None
            for d in searched:
                cand = os.path.join(d, top.path)
                if os.path.isfile(cand):
                    target = cand
                    break
            if target is None:
                raise IncludeError(top.loc, top.path, searched)
            real = os.path.realpath(target)
            if real in seen:
                continue
            seen.add(real)
            files.append(target)
            with open(target, "r") as f:
                sub = parse_unit(tokenize(f.read(), target))
            out.extend(expand(sub, target))
        return out

    merged = ast.Unit(unit.loc, expand(unit, origin_path))
    return merged, files
