import pytest

from hoc import types as ty
from hoc.artifacts import (emit_deps, emit_error_map, emit_flow_dot,
                           emit_interface, flow_nodes, parse_error_map,
                           parse_interface)
from hoc.sema import FlowEdge, ModuleSignature, build_signature, message_flow

from conftest import compile_source


def test_interface_skeleton_lines():
    prog = compile_source("""\
MODULE name;
VAR exported*: u32, listener*: port;
       secret: u32;
BEGIN
    ;
END name.
""")
    text = emit_interface([build_signature(m) for m in prog.modules])
    assert text == "module name 1\nvar exported u32\nvar listener port\n"


def test_interface_multi_instance_line():
    prog = compile_source("MODULE spw*;\nVAR v*: u32;\nBEGIN\n;\nEND spw.\n")
    text = emit_interface([build_signature(m) for m in prog.modules])
    assert text.splitlines()[0] == "module spw 2"


def test_interface_empty_exports_header_only():
    sig = ModuleSignature("quiet", 1, ())
    assert emit_interface([sig]) == "module quiet 1\n"


def test_interface_roundtrip_structured_types():
    sig = ModuleSignature("rich", 2, (
        ("a", ty.U8),
        ("b", ty.Pointer(True, ty.U32)),
        ("c", ty.Array(7, ty.Record((("x", ty.S16), ("y", ty.BOOL))))),
        ("d", ty.PORT),
    ))
    text = emit_interface([sig])
    back = parse_interface(text)
    assert back == {"rich": sig}


def test_interface_roundtrip_whole_program():
    prog = compile_source("""\
TYPE pair = RECORD x, y: s32 END;

MODULE a;
VAR one*: pair; two*: ARRAY 3 OF u8; hidden: u32;
BEGIN
    ;
END a.

MODULE b*;
VAR inbox*: port;
BEGIN
    ;
END b.
""")
    sigs = [build_signature(m) for m in prog.modules]
    back = parse_interface(emit_interface(sigs))
    assert back == {s.name: s for s in sigs}


def test_deps_direct():
    assert emit_deps(["a.ho", "b.ho"], "a.c") == "a.c: a.ho b.ho\n"


def test_deps_no_includes():
    assert emit_deps(["a.ho"], "a.c") == "a.c: a.ho\n"


def test_deps_diamond_once(tmp_path):
    from hoc.includes import resolve_includes
    from hoc.lexer import tokenize
    from hoc.parser import parse_unit
    (tmp_path / "a.ho").write_text('INCLUDE "b.ho";\nINCLUDE "c.ho";\n')
    (tmp_path / "b.ho").write_text('INCLUDE "d.ho";\n')
    (tmp_path / "c.ho").write_text('INCLUDE "d.ho";\n')
    (tmp_path / "d.ho").write_text("CONST k = 1;\n")
    path = str(tmp_path / "a.ho")
    unit = parse_unit(tokenize((tmp_path / "a.ho").read_text(), path))
    _, files = resolve_includes(unit, [], path)
    rule = emit_deps(files, "a.c")
    assert rule.count("d.ho") == 1
    assert rule.startswith("a.c: ")


def test_dot_single_edge():
    text = emit_flow_dot({FlowEdge("a", "b", "inbox")}, ["a", "b"])
    assert '"a" -> "b" [label="inbox"];' in text
    assert text.startswith("digraph")


def test_dot_nodes_only():
    text = emit_flow_dot(set(), ["only"])
    assert '"only";' in text and "->" not in text


def test_dot_self_loop():
    text = emit_flow_dot({FlowEdge("m", "m", "loop")}, ["m"])
    assert '"m" -> "m" [label="loop"];' in text


def test_dot_deterministic_order(pingpong_src):
    prog = compile_source(pingpong_src)
    edges = message_flow(prog)
    t1 = emit_flow_dot(edges, flow_nodes(prog))
    t2 = emit_flow_dot(message_flow(prog), flow_nodes(prog))
    assert t1 == t2


def test_error_map_guarded_division():
    prog = compile_source("""\
MODULE m;
VAR a: u32; b: u32;
BEGIN
    a := a / b
END m.
""")
    text = emit_error_map(prog.sites)
    lines = text.splitlines()
    assert len(lines) == 1
    cid, kind, file, line, col = lines[0].split()
    assert kind == "div-zero" and line == "4"


def test_error_map_empty_when_no_checks():
    prog = compile_source("MODULE m;\nVAR n: u32;\nBEGIN\nn := 1\nEND m.\n")
    assert emit_error_map(prog.sites) == ""


def test_error_map_contract_site():
    prog = compile_source("""\
CONTRACT ok
BEGIN
    RETURN TRUE
END;

MODULE m;
BEGIN
    REQUIRE ok;
    ;
END m.
""")
    entries = parse_error_map(emit_error_map(prog.sites))
    kinds = {kind for kind, *_ in entries.values()}
    assert kinds == {"contract"}
    (kind, file, line, col), = entries.values()
    assert line == 8  # the REQUIRE's assert location


def test_error_map_excludes_protocol_faults(pingpong_src):
    # NEW/CLONE sites carry check ids but are not mapped kinds
    prog = compile_source(pingpong_src)
    mapped = parse_error_map(emit_error_map(prog.sites))
    all_ids = {s.check_id for s in prog.sites}
    new_ids = {s.check_id for s in prog.sites if s.kind == "new-on-full-port"}
    assert new_ids and new_ids.isdisjoint(mapped.keys())
    assert set(mapped.keys()) <= all_ids
