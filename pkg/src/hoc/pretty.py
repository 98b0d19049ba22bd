"""AST pretty printer.

Output reparses to a structurally identical tree; nested operator
expressions are parenthesized outright so precedence never has to be
reconstructed.
"""

from . import ast

_ATOMIC = (ast.IntLit, ast.BoolLit, ast.Name, ast.Call, ast.FieldSel,
           ast.IndexSel, ast.Deref, ast.SizeOf)


def _sub(e):
    s = pp_expr(e)
    return s if isinstance(e, _ATOMIC) else f"({s})"


def pp_expr(e):
    if isinstance(e, ast.IntLit):
        return str(e.value)
    if isinstance(e, ast.BoolLit):
        return "TRUE" if e.value else "FALSE"
    if isinstance(e, ast.Name):
        return e.ident
    if isinstance(e, ast.BinOp):
        return f"{_sub(e.lhs)} {e.op} {_sub(e.rhs)}"
    if isinstance(e, ast.UnOp):
        return f"{e.op} {_sub(e.operand)}" if e.op == "NOT" else f"{e.op}{_sub(e.operand)}"
    if isinstance(e, ast.FieldSel):
        return f"{pp_expr(e.base)}.{e.field}"
    if isinstance(e, ast.IndexSel):
        return f"{pp_expr(e.base)}[{pp_expr(e.index)}]"
    if isinstance(e, ast.Deref):
        return f"{pp_expr(e.base)}^"
    if isinstance(e, ast.Call):
        return f"{e.name}({', '.join(pp_expr(a) for a in e.args)})"
    if isinstance(e, ast.SizeOf):
        return f"SIZE({pp_type(e.type)})"
    raise TypeError(f"not an expression node: {e!r}")


def pp_type(t):
    if isinstance(t, ast.NamedType):
        return t.name
    if isinstance(t, ast.PtrType):
        vol = "VOLATILE " if t.volatile else ""
        return f"{vol}POINTER TO {pp_type(t.target)}"
    if isinstance(t, ast.ArrayType):
        return f"ARRAY {pp_expr(t.count)} OF {pp_type(t.element)}"
    if isinstance(t, ast.RecordType):
        fields = "; ".join(f"{n}: {pp_type(ft)}" for n, ft in t.fields)
        return f"RECORD {fields} END"
    raise TypeError(f"not a type node: {t!r}")


def _assert_text(a):
    return pp_expr(a)


class _Printer:
    def __init__(self):
        self.lines = []
        self.depth = 0

    def emit(self, text):
        self.lines.append("    " * self.depth + text)

    def seq(self, s):
        for chk in s.checks:
            kw = chk.kind.upper()
            self.emit(f"{kw} {', '.join(_assert_text(a) for a in chk.asserts)};")
        if not s.stmts:
            self.emit(";")
        for st in s.stmts:
            self.stmt(st)

    def block(self, s):
        self.depth += 1
        self.seq(s)
        self.depth -= 1

    def stmt(self, st):
        if isinstance(st, ast.Assign):
            self.emit(f"{pp_expr(st.target)} := {pp_expr(st.value)};")
        elif isinstance(st, ast.CallStmt):
            self.emit(f"{pp_expr(st.call)};")
        elif isinstance(st, ast.Return):
            self.emit("RETURN;" if st.value is None else f"RETURN {pp_expr(st.value)};")
        elif isinstance(st, ast.If):
            self.emit(f"IF {pp_expr(st.cond)} THEN")
            self.block(st.then)
            for cond, body in st.elifs:
                self.emit(f"ELSIF {pp_expr(cond)} THEN")
                self.block(body)
            if st.orelse is not None:
                self.emit("ELSE")
                self.block(st.orelse)
            self.emit("END;")
        elif isinstance(st, ast.Loop):
            head = f"WHILE {pp_expr(st.guard)} " if st.guard is not None else ""
            self.emit(f"{head}REPEAT {pp_expr(st.count)} TIMES")
            self.block(st.body)
            self.emit("END;")
        elif isinstance(st, ast.Case):
            self.emit(f"CASE {pp_expr(st.subject)} OF")
            self.clauses(st.clauses)
            if st.orelse is not None:
                self.emit("ELSE")
                self.block(st.orelse)
            self.emit("END;")
        elif isinstance(st, ast.Select):
            self.emit(f"SELECT {pp_expr(st.subject)} OF")
            self.clauses(st.clauses)
            self.emit("END;")
        elif isinstance(st, ast.Next):
            self.emit(f"NEXT {pp_expr(st.value)};")
        elif isinstance(st, ast.Local):
            decls = ", ".join(
                f"{d.name} := {pp_expr(d.init)}" + (f": {pp_type(d.type)}" if d.type else "")
                for d in st.decls)
            self.emit(f"LOCAL {decls};")
        elif isinstance(st, ast.External):
            decls = ", ".join(f"{d.name} := {pp_expr(d.addr)}: {pp_type(d.type)}"
                              for d in st.decls)
            self.emit(f"EXTERNAL {decls};")
        elif isinstance(st, ast.StateDef):
            self.emit(f"STATE {', '.join(st.names)};")
        elif isinstance(st, ast.Import):
            specs = []
            for sp in st.specs:
                if sp.selector is None and sp.alias == sp.module:
                    specs.append(sp.alias)
                elif sp.selector is None:
                    specs.append(f"{sp.alias} := {sp.module}")
                elif sp.selector == "*":
                    specs.append(f"{sp.alias} := {sp.module}[*]")
                else:
                    specs.append(f"{sp.alias} := {sp.module}[{pp_expr(sp.selector)}]")
            self.emit(f"IMPORT {', '.join(specs)};")
        elif isinstance(st, ast.Log):
            if st.value is None:
                self.emit(f'LOG("{st.text}");')
            else:
                self.emit(f'LOG("{st.text}", {pp_expr(st.value)});')
        else:
            raise TypeError(f"not a statement node: {st!r}")

    def clauses(self, clauses):
        for i, cl in enumerate(clauses):
            ranges = ", ".join(
                pp_expr(r.lo) if r.hi is None else f"{pp_expr(r.lo)} .. {pp_expr(r.hi)}"
                for r in cl.ranges)
            self.emit(("| " if i else "") + f"{ranges}:")
            self.block(cl.body)

    def params(self, params):
        return ", ".join(("VAR " if p.var else "") + f"{p.name}: {pp_type(p.type)}"
                         for p in params)

    def proc(self, p):
        ret = f": {pp_type(p.ret)}" if p.ret is not None else ""
        self.emit(f"PROCEDURE {p.name}({self.params(p.params)}){ret}")
        self.emit("BEGIN")
        self.block(p.body)

    def toplevel(self, top):
        if isinstance(top, ast.Module):
            star = "*" if top.multi else ""
            self.emit(f"MODULE {top.name}{star};")
            if top.vars:
                self.emit("VAR " + "; ".join(
                    f"{v.name}{'*' if v.exported else ''}: {pp_type(v.type)}"
                    for v in top.vars) + ";")
            for p in top.procs:
                self.proc(p)
                self.emit("END;")
            self.emit("BEGIN")
            self.block(top.body)
            self.emit(f"END {top.name}.")
        elif isinstance(top, ast.Proc):
            self.proc(top)
            self.emit("END;")
        elif isinstance(top, ast.Contract):
            parens = f"({self.params(top.params)})" if top.params else ""
            self.emit(f"CONTRACT {top.name}{parens}")
            self.emit("BEGIN")
            self.block(top.body)
            self.emit("END;")
        elif isinstance(top, ast.ConstDef):
            self.emit("CONST " + " ".join(f"{n} = {pp_expr(e)};" for n, e in top.defs))
        elif isinstance(top, ast.TypeDef):
            self.emit("TYPE " + " ".join(f"{n} = {pp_type(t)};" for n, t in top.defs))
        elif isinstance(top, ast.Include):
            self.emit(f'INCLUDE "{top.path}";')
        else:
            raise TypeError(f"not a toplevel node: {top!r}")


def pretty_print(node):
    """Render a Unit (or single toplevel / statement / expression) as source."""
    if isinstance(node, (ast.BinOp, ast.UnOp, ast.IntLit, ast.BoolLit, ast.Name,
                         ast.Call, ast.FieldSel, ast.IndexSel, ast.Deref, ast.SizeOf)):
        return pp_expr(node)
    pr = _Printer()
    if isinstance(node, ast.Unit):
        for top in node.toplevels:
            pr.toplevel(top)
            pr.emit("")
    elif isinstance(node, ast.Seq):
        pr.seq(node)
    else:
        pr.toplevel(node)
    return "\n".join(pr.lines) + "\n"
