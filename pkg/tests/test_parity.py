"""Transcript parity between the interpreter and compiled C output.

Each fixture is compiled with the documented flags, linked against the C
runtime, run for the stated cycle count and config, and its standard
output must be byte-identical to the interpreter transcript.  Failing
checks additionally map back to the interpreter's fault location through
the emitted error-map file.
"""

import os
import re
import shutil
import subprocess

import pytest

from hoc.artifacts import emit_error_map, parse_error_map
from hoc.interp import RunConfig, load_image, parse_config, run_cycles, transcript_text
from hoc.codegen import emit_c

from conftest import compile_file

HERE = os.path.dirname(__file__)
PARITY = os.path.join(HERE, "parity")
RUNTIME = os.path.join(os.path.dirname(HERE), "runtime")
CFLAGS = ["-std=gnu99", "-fno-strict-aliasing", "-fwrapv"]

gcc = shutil.which("gcc") or shutil.which("cc")
pytestmark = pytest.mark.skipif(gcc is None, reason="no C compiler available")


def fixtures():
    return sorted(f for f in os.listdir(PARITY) if f.endswith(".ho"))


def fixture_meta(path):
    with open(path) as f:
        head = f.readline()
    cycles = int(re.search(r"cycles: (\d+)", head).group(1))
    m = re.search(r"config: (\S+?) ?\*\)", head)
    config = os.path.join(PARITY, m.group(1)) if m else None
    faults = "faults" in head
    return cycles, config, faults


@pytest.fixture(scope="session")
def runtime_obj(tmp_path_factory):
    build = tmp_path_factory.mktemp("runtime")
    obj = build / "ho_runtime.o"
    subprocess.run([gcc, *CFLAGS, "-c", "-o", str(obj),
                    os.path.join(RUNTIME, "ho_runtime.c")], check=True)
    return str(obj)


def build_fixture(path, tmp_path, runtime_obj, extra_cflags=()):
    program = compile_file(path, include_dirs=())
    assert not program.errors(), [str(d) for d in program.errors()]
    csrc = tmp_path / "prog.c"
    csrc.write_text(emit_c(program))
    exe = tmp_path / "prog"
    subprocess.run([gcc, *CFLAGS, *extra_cflags, "-I", RUNTIME,
                    "-o", str(exe), str(csrc), runtime_obj], check=True)
    return program, str(exe)


def interp_transcript(program, cycles, config_path, nocheck=False):
    config = RunConfig()
    if config_path:
        with open(config_path) as f:
            config = parse_config(f.read())
    if nocheck:
        config.checks_enabled = False
    image = load_image(program, config)
    lines = run_cycles(image, cycles)
    return transcript_text(lines), image


@pytest.mark.parametrize("name", fixtures())
def test_transcript_parity(name, tmp_path, runtime_obj):
    path = os.path.join(PARITY, name)
    cycles, config, faults = fixture_meta(path)
    program, exe = build_fixture(path, tmp_path, runtime_obj)

    expected, image = interp_transcript(program, cycles, config)
    argv = [exe, "--cycles", str(cycles)]
    if config:
        argv += ["--config", config]
    proc = subprocess.run(argv, capture_output=True, text=True)

    assert proc.stdout == expected, f"{name}: transcripts differ"
    assert proc.returncode == (3 if image.faults else 0)
    assert bool(image.faults) == faults


def test_runtime_self_test(tmp_path, runtime_obj):
    exe = tmp_path / "selftest"
    subprocess.run([gcc, *CFLAGS, "-I", RUNTIME, "-o", str(exe),
                    os.path.join(RUNTIME, "test_runtime.c"), runtime_obj],
                   check=True)
    proc = subprocess.run([str(exe)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "runtime self-test ok" in proc.stdout


def test_failing_check_maps_to_interpreter_location(tmp_path, runtime_obj):
    """The check id reported by a failing compiled run leads, through the
    error map, to the same source location the interpreter reports."""
    path = os.path.join(PARITY, "10_fault_div.ho")
    cycles, config, _ = fixture_meta(path)
    program, exe = build_fixture(path, tmp_path, runtime_obj)
    error_map = parse_error_map(emit_error_map(program.sites))

    proc = subprocess.run([exe, "--cycles", str(cycles)],
                          capture_output=True, text=True)
    fault_lines = [l for l in proc.stdout.splitlines() if l.startswith("FAULT")]
    assert fault_lines
    _, kind, cid, _, _, cloc = fault_lines[0].split()
    mkind, mfile, mline, _ = error_map[int(cid)]
    assert mkind == kind == "div-zero"

    _, image = interp_transcript(program, cycles, config)
    f = image.faults[0]
    assert (mfile, mline) == (f.loc.file, f.loc.line)
    assert cloc == f"{f.loc.file}:{f.loc.line}"


@pytest.mark.parametrize("name", ["06_arith_torture.ho", "08_loops_case.ho",
                                  "02_state_machine.ho"])
def test_ndebug_build_matches_nocheck_interpreter(name, tmp_path, runtime_obj):
    """-DNDEBUG removes guards and contract checks without changing the
    arithmetic: clean programs produce identical transcripts either way."""
    path = os.path.join(PARITY, name)
    cycles, config, _ = fixture_meta(path)
    program, exe = build_fixture(path, tmp_path, runtime_obj,
                                 extra_cflags=("-DNDEBUG",))
    expected, _ = interp_transcript(program, cycles, config, nocheck=True)
    proc = subprocess.run([exe, "--cycles", str(cycles)],
                          capture_output=True, text=True)
    assert proc.stdout == expected
    assert proc.returncode == 0
