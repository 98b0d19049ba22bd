"""Desk-scale soundness: every accepted corpus program loads and runs in
the interpreter without representation errors (only hO-level faults may
occur), and its emitted C is syntactically valid to the C compiler."""

import os
import shutil
import subprocess

import pytest

from hoc.codegen import emit_c
from hoc.interp import RunConfig, load_image, run_cycles

from conftest import compile_file, corpus_files

gcc = shutil.which("gcc") or shutil.which("cc")
RUNTIME = os.path.join(os.path.dirname(os.path.dirname(__file__)), "runtime")


@pytest.mark.parametrize("path", corpus_files("pos"))
def test_positive_corpus_runs_soundly(path):
    program = compile_file(path)
    assert not program.errors()
    image = load_image(program, RunConfig(audit=True))
    run_cycles(image, 3)          # hO faults are fine; Python faults are not
    assert image.pool.conserved()
    for mod in program.modules:
        if mod.name in image.step_stats:
            assert image.step_stats[mod.name] <= mod.bound


@pytest.mark.skipif(gcc is None, reason="no C compiler available")
@pytest.mark.parametrize("path", corpus_files("pos"))
def test_positive_corpus_transpiles_to_valid_c(path, tmp_path):
    program = compile_file(path)
    csrc = tmp_path / "out.c"
    csrc.write_text(emit_c(program))
    subprocess.run([gcc, "-std=gnu99", "-fno-strict-aliasing", "-fwrapv",
                    "-fsyntax-only", "-I", RUNTIME, str(csrc)], check=True)
