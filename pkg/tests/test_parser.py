import os

import pytest
from hypothesis import given, strategies as st

from hoc import ast
from hoc.includes import IncludeError, resolve_includes
from hoc.lexer import tokenize
from hoc.parser import ParseError, parse_unit
from hoc.pretty import pretty_print

from conftest import INC_DIR, corpus_files


def parse(src, name="<t>"):
    return parse_unit(tokenize(src, name))


def parse_body(stmts):
    unit = parse(f"MODULE t;\nBEGIN\n{stmts}\nEND t.\n")
    return unit.toplevels[0].body


def test_module_skeleton_vars():
    unit = parse("""\
MODULE name;
VAR exported*: u32, listener*: port;
       secret, unknown: u32;
BEGIN
    ;
END name.
""")
    mod = unit.toplevels[0]
    assert mod.name == "name" and not mod.multi
    assert [(v.name, v.exported) for v in mod.vars] == [
        ("exported", True), ("listener", True), ("secret", False), ("unknown", False)]


def test_precedence_mul_over_add():
    body = parse_body("x := 1 + 2 * 3")
    assign = body.stmts[0]
    assert isinstance(assign.value, ast.BinOp) and assign.value.op == "+"
    assert isinstance(assign.value.rhs, ast.BinOp) and assign.value.rhs.op == "*"


def test_double_shift_rejected():
    with pytest.raises(ParseError):
        parse_body("x := a << b << c")


def test_chained_comparison_rejected():
    with pytest.raises(ParseError):
        parse_body("x := a = b = c")


def test_if_minimal():
    body = parse_body("IF x THEN RETURN END")
    node = body.stmts[0]
    assert isinstance(node, ast.If) and node.elifs == [] and node.orelse is None
    assert isinstance(node.then.stmts[0], ast.Return)


def test_zero_arg_call_rejected():
    with pytest.raises(ParseError):
        parse_body("f()")


def test_repeat_without_times_rejected():
    with pytest.raises(ParseError):
        parse_body("REPEAT 3 ; END")


def test_select_without_clause_rejected():
    with pytest.raises(ParseError):
        parse_body("SELECT s OF END")


def test_empty_begin_end_rejected():
    with pytest.raises(ParseError):
        parse("MODULE t;\nBEGIN END t.\n")


def test_lone_semicolon_body_ok():
    body = parse_body(";")
    assert body.stmts == []


def test_elsif_requires_condition():
    with pytest.raises(ParseError):
        parse_body("IF a THEN ; ELSIF THEN ; END")


def test_check_only_at_block_start():
    with pytest.raises(ParseError):
        parse_body("x := 1;\nREQUIRE c;\nx := 2")


def test_module_trailer_name_must_match():
    with pytest.raises(ParseError):
        parse("MODULE a;\nBEGIN\n;\nEND b.\n")


def test_unary_is_single_per_grammar():
    with pytest.raises(ParseError):
        parse_body("x := - - y")
    parse_body("x := -(-y)")


@pytest.mark.parametrize("path", corpus_files("pos"))
def test_roundtrip_corpus(path):
    with open(path) as f:
        unit = parse(f.read(), path)
    printed = pretty_print(unit)
    again = parse(printed, path + "<rt>")
    assert unit == again
    # printing is a fixed point modulo structure: print(parse(print(x)))
    assert pretty_print(again) == printed


def test_pretty_binop_roundtrip():
    body = parse_body("x := 1 + 2 * 3")
    assert parse_body(pretty_print(body)) == body


def test_pretty_select_roundtrip():
    body = parse_body("SELECT s OF\n0: x := 1\n| 1: x := 2\nEND")
    assert parse_body(pretty_print(body)) == body


# --- includes ----------------------------------------------------------------

def test_include_once(tmp_path):
    (tmp_path / "a.ho").write_text('INCLUDE "c.ho";\nINCLUDE "c.ho";\n')
    (tmp_path / "c.ho").write_text("CONST k = 1;\n")
    unit = parse((tmp_path / "a.ho").read_text(), str(tmp_path / "a.ho"))
    merged, files = resolve_includes(unit, [], str(tmp_path / "a.ho"))
    consts = [t for t in merged.toplevels if isinstance(t, ast.ConstDef)]
    assert len(consts) == 1
    assert [os.path.basename(f) for f in files] == ["a.ho", "c.ho"]


def test_include_missing_reports_dirs(tmp_path):
    (tmp_path / "a.ho").write_text('INCLUDE "nope.ho";\n')
    unit = parse((tmp_path / "a.ho").read_text(), str(tmp_path / "a.ho"))
    with pytest.raises(IncludeError) as e:
        resolve_includes(unit, ["/somewhere"], str(tmp_path / "a.ho"))
    assert "/somewhere" in e.value.searched and str(tmp_path) in e.value.searched


def test_mutual_include_each_once(tmp_path):
    (tmp_path / "a.ho").write_text('INCLUDE "b.ho";\nCONST in_a = 1;\n')
    (tmp_path / "b.ho").write_text('INCLUDE "a.ho";\nCONST in_b = 2;\n')
    unit = parse((tmp_path / "a.ho").read_text(), str(tmp_path / "a.ho"))
    merged, files = resolve_includes(unit, [], str(tmp_path / "a.ho"))
    names = [n for t in merged.toplevels if isinstance(t, ast.ConstDef) for n, _ in t.defs]
    assert names == ["in_b", "in_a"]


def test_diamond_include_once(tmp_path):
    (tmp_path / "a.ho").write_text('INCLUDE "b.ho";\nINCLUDE "c.ho";\n')
    (tmp_path / "b.ho").write_text('INCLUDE "d.ho";\n')
    (tmp_path / "c.ho").write_text('INCLUDE "d.ho";\n')
    (tmp_path / "d.ho").write_text("CONST deep = 4;\n")
    unit = parse((tmp_path / "a.ho").read_text(), str(tmp_path / "a.ho"))
    merged, files = resolve_includes(unit, [], str(tmp_path / "a.ho"))
    assert [os.path.basename(f) for f in files] == ["a.ho", "b.ho", "d.ho", "c.ho"]
    names = [n for t in merged.toplevels if isinstance(t, ast.ConstDef) for n, _ in t.defs]
    assert names == ["deep"]


# --- random expression round-trips -------------------------------------------

_names = st.sampled_from(["x", "y", "zz", "q0"])


def _exprs():
    leaves = st.one_of(
        st.integers(0, 2**32 - 1).map(lambda v: ("int", v)),
        st.booleans().map(lambda v: ("bool", v)),
        _names.map(lambda n: ("name", n)),
    )

    def extend(children):
        bin_ops = st.sampled_from(["+", "-", "*", "/", "MOD", "\\/", "><", "/\\"])
        return st.one_of(
            st.tuples(st.just("bin"), bin_ops, children, children),
            st.tuples(st.just("cmp"), st.sampled_from(["=", "#", "<", ">="]),
                      children, children),
            st.tuples(st.just("not"), children),
        )

    return st.recursive(leaves, extend, max_leaves=12)


def _build(spec):
    from hoc.lexer import Loc
    loc = Loc("<gen>", 1, 1)
    tag = spec[0]
    if tag == "int":
        return ast.IntLit(loc, spec[1])
    if tag == "bool":
        return ast.BoolLit(loc, spec[1])
    if tag == "name":
        return ast.Name(loc, spec[1])
    if tag in ("bin", "cmp"):
        return ast.BinOp(loc, spec[1], _build(spec[2]), _build(spec[3]))
    if tag == "not":
        return ast.UnOp(loc, "NOT", _build(spec[1]))
    raise AssertionError(spec)


@given(_exprs())
def test_random_expr_roundtrip(spec):
    tree = _build(spec)
    printed = pretty_print(tree)
    reparsed = parse_body(f"x := {printed}").stmts[0].value
    assert reparsed == tree
