"""The hoc driver: option parsing, pipeline orchestration, and the `run`
subcommand exposing the interpreter.

Exit codes: 0 success, 1 diagnostics with errors, 2 usage error,
3 runtime fault during `run`.
"""

import os
import sys

from . import artifacts, ast, codegen, sema
from .diagnostics import Diagnostic, ERROR, has_errors
from .includes import IncludeError, resolve_includes
from .interp import LoadError, load_image, parse_config, run_cycles, RunConfig
from .lexer import LexError, Loc, tokenize
from .parser import ParseError, parse_unit
from .pretty import pretty_print

USAGE = """\
usage: hoc [options] file.ho
       hoc run file.ho [--cycles N] [--config FILE]

options:
  -h            show this message
  -I directory  add a directory to the INCLUDE search path
  -d            write make(1) dependency rules to standard output
  -f            write a dot(1) message-flow diagram to standard output
  -o filename   use an alternative output filename
  -g            only generate an interface file (.hi extension)
  -k            keep intermediate files (.tokens, .ast, .tast)

run options:
  --cycles N    number of scheduler cycles to execute (default 1)
  --config F    runtime configuration file (pool size, mmio script)
"""


def usage_error(msg):
    print(f"hoc: {msg}", file=sys.stderr)
    print(USAGE, file=sys.stderr, end="")
    return 2


def report(diags):
    for d in diags:
        print(d, file=sys.stderr)


def out_name(input_path, override, ext):
    if override:
        return override
    stem, _ = os.path.splitext(input_path)
    return stem + ext


def front_end(path, include_dirs):
    """Read, tokenize, parse and resolve includes.  Returns
    (unit, dep_files) or an error Diagnostic."""
    try:
        with open(path, "r") as f:
            source = f.read()
    except OSError as e:
        return Diagnostic(ERROR, "E-IO", Loc(path, 1, 1),
                          f"cannot read {path}: {e.strerror}"), None
    try:
        unit = parse_unit(tokenize(source, path))
        return resolve_includes(unit, include_dirs, path)
    except LexError as e:
        return Diagnostic(ERROR, "E-LEX", e.loc, f"{e.message}: {e.offending!r}"), None
    except ParseError as e:
        found = e.found.text if e.found.text else "end of input"
        return Diagnostic(ERROR, "E-PARSE", e.loc,
                          f"expected {', '.join(e.expected)}, found {found!r}"), None
    except IncludeError as e:
        return Diagnostic(ERROR, "E-INCLUDE", e.loc,
                          f"include file {e.path!r} not found "
                          f"(searched: {', '.join(e.searched)})"), None


def load_known_signatures(unit, path, include_dirs):
    """Find `.hi` files for imported modules that have no body in the unit."""
    defined = {t.name for t in unit.toplevels if isinstance(t, ast.Module)}
    wanted = set()
    for t in unit.toplevels:
        if not isinstance(t, ast.Module):
            continue
        for st in t.body.stmts:
            if not isinstance(st, ast.Import):
                break
            for spec in st.specs:
                if spec.module not in defined:
                    wanted.add(spec.module)
    known = {}
    search = [os.path.dirname(path) or "."] + list(include_dirs)
    for name in sorted(wanted):
        for d in search:
            cand = os.path.join(d, name + ".hi")
            if os.path.isfile(cand):
                with open(cand) as f:
                    known.update(artifacts.parse_interface(f.read()))
                break
    return known


def write_intermediates(base, source_path, unit, program):
    with open(base + ".tokens", "w") as f:
        with open(source_path) as src:
            for tok in tokenize(src.read(), source_path):
                f.write(f"{tok.kind}\t{tok.text}\t{tok.loc.line}:{tok.loc.col}\n")
    with open(base + ".ast", "w") as f:
        f.write(pretty_print(unit))
    with open(base + ".tast", "w") as f:
        for d in program.diagnostics:
            f.write(str(d) + "\n")
        for name, sig in program.signatures.items():
            f.write(f"module {name} id={sig.module_id} instances={sig.instances} "
                    f"bound={program.module_by_name[name].bound}\n")
            for vname, vty in sig.exports:
                f.write(f"    var {vname}: {vty}\n")
        for s in program.sites:
            f.write(f"check {s.check_id} {s.kind} {s.loc}\n")


def cmd_compile(args):
    include_dirs = []
    input_path = None
    output = None
    mode_flags = []
    keep = False
    i = 0
    while i < len(args):
        a = args[i]
        if a == "-h":
            print(USAGE, end="")
            return 0
        if a == "-I":
            i += 1
            if i >= len(args):
                return usage_error("-I needs a directory")
            include_dirs.append(args[i])
        elif a.startswith("-I") and len(a) > 2:
            include_dirs.append(a[2:])
        elif a == "-o":
            i += 1
            if i >= len(args):
                return usage_error("-o needs a filename")
            output = args[i]
        elif a in ("-d", "-f", "-g"):
            mode_flags.append(a)
        elif a == "-k":
            keep = True
        elif a.startswith("-"):
            return usage_error(f"unknown option {a}")
        elif input_path is None:
            input_path = a
        else:
            return usage_error("more than one input file")
        i += 1
    if input_path is None:
        return usage_error("no input file")
    if len(mode_flags) > 1:
        return usage_error(f"options {' and '.join(mode_flags)} are mutually exclusive")
    mode = mode_flags[0] if mode_flags else None

    got = front_end(input_path, include_dirs)
    if isinstance(got[0], Diagnostic):
        report([got[0]])
        return 1
    unit, dep_files = got

    if mode == "-d":
        print(artifacts.emit_deps(dep_files, out_name(input_path, None, ".c")), end="")
        return 0

    known = load_known_signatures(unit, input_path, include_dirs)
    program = sema.analyze_unit(unit, known_signatures=known, restricted=(mode == "-g"))
    if mode != "-g":
        sema.check_bounded_execution(program)
    report(program.diagnostics)
    if has_errors(program.diagnostics):
        return 1

    if mode == "-g":
        hi = artifacts.emit_interface([sema.build_signature(m) for m in program.modules])
        with open(out_name(input_path, output, ".hi"), "w") as f:
            f.write(hi)
        return 0

    if mode == "-f":
        edges = sema.message_flow(program)
        print(artifacts.emit_flow_dot(edges, artifacts.flow_nodes(program)), end="")
        return 0

    target = out_name(input_path, output, ".c")
    with open(target, "w") as f:
        f.write(codegen.emit_c(program))
    with open(out_name(target, None, ".map"), "w") as f:
        f.write(artifacts.emit_error_map(program.sites))
    if keep:
        write_intermediates(os.path.splitext(target)[0], input_path, unit, program)
    return 0


def cmd_run(args):
    input_path = None
    cycles = 1
    config_path = None
    i = 0
    while i < len(args):
        a = args[i]
        if a == "--cycles":
            i += 1
            if i >= len(args):
                return usage_error("--cycles needs a number")
            try:
                cycles = int(args[i])
            except ValueError:
                return usage_error(f"bad cycle count {args[i]!r}")
        elif a == "--config":
            i += 1
            if i >= len(args):
                return usage_error("--config needs a file")
            config_path = args[i]
        elif a == "-h":
            print(USAGE, end="")
            return 0
        elif a.startswith("-"):
            return usage_error(f"unknown option {a}")
        elif input_path is None:
            input_path = a
        else:
            return usage_error("more than one input file")
        i += 1
    if input_path is None:
        return usage_error("no input file")

    got = front_end(input_path, [])
    if isinstance(got[0], Diagnostic):
        report([got[0]])
        return 1
    unit, _ = got
    program = sema.analyze_unit(unit)
    sema.check_bounded_execution(program)
    report(program.diagnostics)
    if has_errors(program.diagnostics):
        return 1

    config = RunConfig()
    if config_path is not None:
        try:
            with open(config_path) as f:
                config = parse_config(f.read())
        except OSError as e:
            return usage_error(f"cannot read {config_path}: {e.strerror}")
        except LoadError as e:
            return usage_error(str(e))
    try:
        image = load_image(program, config)
    except LoadError as e:
        print(f"hoc: {e}", file=sys.stderr)
        return 1
    transcript = run_cycles(image, cycles)
    for line in transcript:
        print(line)
    return 3 if image.faults else 0


def main(argv=None):
    args = list(sys.argv[1:] if argv is None else argv)
    if args and args[0] == "run":
        return cmd_run(args[1:])
    return cmd_compile(args)


if __name__ == "__main__":
    sys.exit(main())
