"""Auxiliary compiler outputs: interface files, make dependency rules,
dot message-flow diagrams and runtime-error location maps."""

from . import types as ty
from .sema import ModuleSignature

# error-map kinds; other fault kinds (allocation protocol, mmio) have check
# ids but no map entry
MAP_KINDS = ("empty-port", "div-zero", "shift-range", "array-bounds",
             "contract", "narrowing")


def emit_interface(signatures):
    """Render module signatures in the `.hi` line format:
    `module <name> <instance-count>` then one `var <name> <type-text>` per
    exported variable."""
    lines = []
    for sig in signatures:
        lines.append(f"module {sig.name} {sig.instances}")
        for name, vty in sig.exports:
            lines.append(f"var {name} {ty.type_text(vty)}")
    return "".join(line + "\n" for line in lines)


def parse_interface(text):
    """Parse `.hi` text back into {name: ModuleSignature}."""
    sigs = {}
    cur = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if parts[0] == "module" and len(parts) == 3:
            if cur is not None:
                sigs[cur[0]] = ModuleSignature(cur[0], cur[1], tuple(cur[2]))
            cur = (parts[1], int(parts[2]), [])
        elif parts[0] == "var" and len(parts) == 3 and cur is not None:
            cur[2].append((parts[1], ty.parse_type_text(parts[2])))
        else:
            raise ValueError(f"bad interface line {lineno}: {raw!r}")
    if cur is not None:
        sigs[cur[0]] = ModuleSignature(cur[0], cur[1], tuple(cur[2]))
    return sigs


def emit_deps(dep_files, output_name):
    """One make rule: the output depends on the main file and every
    transitively included file, once each, in first-inclusion order."""
    return f"{output_name}: {' '.join(dep_files)}\n"


def emit_flow_dot(edges, nodes):
    """Graphviz digraph: one node per module instance, one labeled edge per
    flow edge; nodes and edges in sorted order for determinism."""
    lines = ["digraph message_flow {"]
    for n in sorted(nodes):
        lines.append(f'    "{n}";')
    for e in sorted(edges):
        lines.append(f'    "{e.src}" -> "{e.dst}" [label="{e.port}"];')
    lines.append("}")
    return "".join(line + "\n" for line in lines)


def flow_nodes(program):
    from .sema import instance_label
    return [instance_label(m.name, k, m.multi)
            for m in program.modules for k in range(m.instances)]


def emit_error_map(sites):
    """`<check-id> <kind> <file> <line> <col>` per mapped check site."""
    lines = []
    for s in sites:
        kind = "contract" if s.kind == "contract" else s.kind
        if kind in MAP_KINDS:
            lines.append(f"{s.check_id} {kind} {s.loc.file} {s.loc.line} {s.loc.col}")
    return "".join(line + "\n" for line in lines)


def parse_error_map(text):
    """{check-id: (kind, file, line, col)} from error-map text."""
    out = {}
    for raw in text.splitlines():
        if not raw.strip():
            continue
        cid, kind, file, line, col = raw.split()
        out[int(cid)] = (kind, file, int(line), int(col))
    return out
