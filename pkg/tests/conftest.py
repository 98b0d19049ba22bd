import os
import re

import pytest

from hoc.includes import resolve_includes
from hoc.interp import RunConfig, load_image, run_cycles
from hoc.lexer import tokenize
from hoc.parser import parse_unit
from hoc.sema import analyze_unit, check_bounded_execution

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")
POS_DIR = os.path.join(CORPUS, "pos")
NEG_DIR = os.path.join(CORPUS, "neg")
INC_DIR = os.path.join(CORPUS, "inc")


def corpus_files(which):
    d = POS_DIR if which == "pos" else NEG_DIR
    return sorted(os.path.join(d, f) for f in os.listdir(d) if f.endswith(".ho"))


def directives(text, key):
    return re.findall(rf"\(\* {key}: ([\w-]+) \*\)", text)


def compile_source(src, name="<test>"):
    """Parse and fully analyze a source string; returns the Program."""
    unit = parse_unit(tokenize(src, name))
    program = analyze_unit(unit)
    check_bounded_execution(program)
    return program


def compile_file(path, include_dirs=(INC_DIR,)):
    with open(path) as f:
        src = f.read()
    unit = parse_unit(tokenize(src, path))
    merged, files = resolve_includes(unit, list(include_dirs), path)
    program = analyze_unit(merged)
    check_bounded_execution(program)
    return program


def run_source(src, cycles=1, config=None, name="<test>"):
    """Compile and interpret a source string; returns (transcript, image)."""
    program = compile_source(src, name)
    errors = [str(d) for d in program.errors()]
    assert not errors, errors
    image = load_image(program, config or RunConfig())
    transcript = run_cycles(image, cycles)
    return transcript, image


@pytest.fixture
def pingpong_src():
    return """\
MODULE a;
VAR out: port;
BEGIN
    IMPORT b;
    NEW(out, 16);
    SEND(out, b.inbox)
END a.

MODULE b;
VAR inbox*: port;
BEGIN
    IF PENDING(inbox) THEN
        LOG("got", COUNT(inbox));
        DISPOSE(inbox)
    END
END b.
"""
