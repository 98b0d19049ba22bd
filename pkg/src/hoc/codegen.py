"""C99 emitter.

Contracts of the output: all module state is reached through a base
pointer handed to the body function (position-independent data), no
global variables, every local explicitly initialized, right shifts are
unsigned, division/modulo/shift/index guards call the runtime check hook
unless NDEBUG, and evaluation order matches the interpreter exactly
(expressions are flattened into int64_t temporaries in evaluation order,
so the two back ends fault at the same points and in the same order).

Multi-instance modules are emitted once per instance with MODULE_ID and
INSTANCE folded to constants; instances share neither code nor data.
"""

from dataclasses import dataclass

from . import arith, ast
from . import types as ty


@dataclass
class VarSlot:
    name: str
    offset: int
    size: int


@dataclass
class EmitPlan:
    """Per-module data-block layout plus the dynamic-check site table.

    Layout is declaration order with natural alignment padding to each
    field's alignment; every variable gets a unique offset.  Ports and
    pointers are planned at their 32-bit flight-target width.
    """
    layouts: dict      # module name -> list of VarSlot
    block_sizes: dict  # module name -> total size
    sites: list


def _plan_size(t):
    if isinstance(t, (ty.PortType, ty.Pointer)):
        return 4
    return ty.size_of(t)


def _plan_align(t):
    if isinstance(t, (ty.PortType, ty.Pointer)):
        return 4
    return ty.align_of(t)


def block_vars(mod):
    """Data-block field order: exported variables first, privates after,
    declaration order within each group.  The exported prefix is therefore
    fully determined by the module's interface, which is what lets other
    compilation units reach it through a `.hi` file alone."""
    vs = list(mod.vars.values())
    return [v for v in vs if v.exported] + [v for v in vs if not v.exported]


def plan_layout(program):
    layouts = {}
    sizes = {}
    for mod in program.modules:
        offset = 0
        slots = []
        for v in block_vars(mod):
            a = _plan_align(v.type)
            offset = (offset + a - 1) // a * a
            size = _plan_size(v.type)
            slots.append(VarSlot(v.name, offset, size))
            offset += size
        layouts[mod.name] = slots
        sizes[mod.name] = offset
    return EmitPlan(layouts, sizes, list(program.sites))

_CTYPE = {
    ty.U8: "uint8_t", ty.U16: "uint16_t", ty.U32: "uint32_t",
    ty.S8: "int8_t", ty.S16: "int16_t", ty.S32: "int32_t",
}

_NARROW = {
    ty.U8: "HO_NARROW_U8", ty.U16: "HO_NARROW_U16", ty.U32: "HO_NARROW_U32",
    ty.S8: "HO_NARROW_S8", ty.S16: "HO_NARROW_S16", ty.S32: "HO_NARROW_S32",
}

HEADER = """\
/*
 * Generated by hoc. Do not edit.
 * Compile with: -fno-strict-aliasing -fwrapv -std=gnu99
 */
#include "ho_runtime.h"
"""


def c_str(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


class Emitter:
    def __init__(self, program):
        self.program = program
        self.type_names = {}
        self.type_defs = []
        self.protos = []
        self.funcs = []

    # -- type mapping -----------------------------------------------------

    def c_type(self, t):
        if isinstance(t, ty.Numeric):
            return _CTYPE[t]
        if isinstance(t, ty.Boolean):
            return "uint8_t"
        if isinstance(t, ty.PortType):
            return "ho_port"
        if isinstance(t, ty.Pointer):
            return "ho_ptr"
        if t in self.type_names:
            return self.type_names[t]
        if isinstance(t, ty.Array):
            elem = self.c_type(t.element)
            name = f"ho_t{len(self.type_names)}"
            self.type_names[t] = name
            self.type_defs.append(f"typedef struct {{ {elem} e[{t.length}]; }} {name};")
            return name
        if isinstance(t, ty.Record):
            fields = [(n, self.c_type(ft)) for n, ft in t.fields]
            name = f"ho_t{len(self.type_names)}"
            self.type_names[t] = name
            body = " ".join(f"{ct} f_{n};" for n, ct in fields)
            self.type_defs.append(f"typedef struct {{ {body} }} {name};")
            return name
        raise TypeError(f"no C type for {t}")

    # -- program ------------------------------------------------------------

    def emit(self):
        prog = self.program
        data_structs = []
        for mod in prog.modules:
            fields = []
            for v in block_vars(mod):
                fields.append(f"    {self.c_type(v.type)} v_{v.name};")
            if not fields:
                fields.append("    uint8_t ho_unused;")
            data_structs.append(
                f"typedef struct {{\n" + "\n".join(fields) + f"\n}} ho_data_{mod.name};")
        # overlay structs for modules known only through their interface:
        # the exported prefix of the data block, reached by name at runtime
        foreign = sorted({imp.module
                          for mod in prog.modules for imp in mod.imports.values()
                          if imp.module not in prog.module_by_name
                          and imp.module in prog.known})
        for name in foreign:
            sig = prog.known[name]
            fields = [f"    {self.c_type(vt)} v_{vn};" for vn, vt in sig.exports]
            if not fields:
                fields.append("    uint8_t ho_unused;")
            data_structs.append(
                f"typedef struct {{\n" + "\n".join(fields) + f"\n}} ho_xdata_{name};")

        for info in prog.procs.values():
            self.emit_proc(info, None, 0)
        for info in prog.contracts.values():
            self.emit_proc(info, None, 0)
        for mod in prog.modules:
            for k in range(mod.instances):
                for p in mod.procs.values():
                    self.emit_proc(p, mod, k)
                self.emit_body(mod, k)

        sites = [f'    {{ {s.check_id}u, {c_str(s.kind)}, {c_str(s.loc.file)}, '
                 f'{s.loc.line}u, {s.loc.col}u }},'
                 for s in prog.sites]
        descs = []
        for mod in prog.modules:
            for k in range(mod.instances):
                descs.append(f'    {{ {c_str(mod.name)}, {mod.base_id + k}u, {k}u, '
                             f'ho_body_{mod.name}_{k}, sizeof(ho_data_{mod.name}) }},')

        parts = [HEADER]
        if self.type_defs:
            parts.append("\n".join(self.type_defs) + "\n")
        parts.append("\n\n".join(data_structs) + "\n")
        parts.append("static const ho_check_site ho_sites[] = {\n"
                     + "\n".join(sites) + ("\n" if sites else "")
                     + "};\n")
        parts.append("\n".join(self.protos) + "\n")
        parts.append("\n".join(self.funcs))
        parts.append("static const ho_module_desc ho_modules[] = {\n"
                     + "\n".join(descs) + ("\n" if descs else "")
                     + "};\n")
        parts.append("int main(int argc, char **argv)\n{\n"
                     f"    return ho_main(argc, argv, ho_modules, {sum(m.instances for m in prog.modules)}u, "
                     f"ho_sites, {len(prog.sites)}u);\n}}\n")
        return "\n".join(parts)

    # -- functions -----------------------------------------------------------

    def fn_name(self, info, mod, inst):
        if mod is None:
            return f"ho_fn_{info.name}"
        return f"ho_p_{mod.name}_{inst}_{info.name}"

    def proc_signature(self, info, mod, inst):
        params = ["ho_ctx *ctx"]
        if mod is not None:
            params.append(f"ho_data_{mod.name} *ho_m")
        else:
            params.append("uint32_t ho_mid")
            params.append("uint32_t ho_inst")
        for pname, pty, is_var in info.params:
            ct = self.c_type(pty)
            params.append(f"{ct} *p_{pname}" if is_var else f"{ct} p_{pname}")
        return f"static int64_t {self.fn_name(info, mod, inst)}({', '.join(params)})"

    def emit_proc(self, info, mod, inst):
        sig = self.proc_signature(info, mod, inst)
        self.protos.append(sig + ";")
        fn = _Fn(self, mod, inst)
        fn.ln(sig)
        fn.ln("{")
        fn.indent += 1
        fn.ln("if (ctx->fault) return 0;")
        fn.prologue()
        fn.emit_seq(info.node.body, "function", fn.ret_label)
        fn.ln(f"{fn.ret_label}: ;")
        fn.ln("return ho_ret;")
        fn.ln(f"{fn.abort_label}: ;")
        fn.ln("return 0;")
        fn.indent -= 1
        fn.ln("}")
        self.funcs.append("\n".join(fn.lines) + "\n")

    def emit_body(self, mod, inst):
        name = f"ho_body_{mod.name}_{inst}"
        sig = f"static void {name}(ho_ctx *ctx, void *ho_void)"
        self.protos.append(sig + ";")
        fn = _Fn(self, mod, inst)
        fn.ln(sig)
        fn.ln("{")
        fn.indent += 1
        fn.ln(f"ho_data_{mod.name} *ho_m = (ho_data_{mod.name} *)ho_void;")
        fn.ln("(void)ho_m;")
        fn.ln("if (ctx->fault) return;")
        fn.prologue()
        fn.emit_seq(mod.node.body, "function", fn.ret_label)
        fn.ln(f"{fn.ret_label}: ;")
        fn.ln("(void)ho_ret;")
        fn.ln("return;")
        fn.ln(f"{fn.abort_label}: ;")
        fn.ln("return;")
        fn.indent -= 1
        fn.ln("}")
        self.funcs.append("\n".join(fn.lines) + "\n")


class _Fn:
    """Per-function emission state: temporaries, labels, unwind plumbing."""

    def __init__(self, em, mod, inst):
        self.em = em
        self.mod = mod
        self.inst = inst
        self.lines = []
        self.indent = 0
        self.ntmp = 0
        self.nlabel = 0
        self.ret_label = "ho_fn_ret"
        self.abort_label = "ho_fn_abort"

    # -- plumbing

    def ln(self, s):
        self.lines.append("    " * self.indent + s)

    def raw(self, s):
        self.lines.append(s)

    def tmp(self, decl, init):
        self.ntmp += 1
        name = f"t{self.ntmp}"
        self.ln(f"{decl} {name} = {init};")
        return name

    def label(self, stem):
        self.nlabel += 1
        return f"L{stem}_{self.nlabel}"

    def prologue(self):
        self.ln("int64_t ho_ret = 0; int ho_returning = 0;")
        self.ln("int ho_nexting = 0; int64_t ho_nextv = 0;")
        self.ln("(void)ho_ret; (void)ho_returning; (void)ho_nexting; (void)ho_nextv;")

    def fault_check(self):
        self.ln(f"if (ctx->fault) goto {self.abort_label};")

    def mid_expr(self):
        if self.mod is not None:
            return str(self.mod.base_id + self.inst) + "u"
        return "ho_mid"

    def inst_expr(self):
        if self.mod is not None:
            return str(self.inst) + "u"
        return "ho_inst"

    def site(self, node):
        cid = getattr(node, "check_id", None)
        return str(cid or 0) + "u"

    # -- sequences with check/unwind handling

    def emit_seq(self, seq, kind, parent_label, discrim=None):
        for chk in seq.checks:
            if chk.kind in ("require", "invariant"):
                self.emit_checkgroup(chk)
        end = self.label("end")
        prev = getattr(self, "cur_end", None)
        self.cur_end = end
        for st in seq.stmts:
            self.stmt(st)
        self.cur_end = prev
        self.ln(f"{end}: ;")
        for chk in seq.checks:
            if chk.kind in ("provide", "invariant"):
                self.emit_checkgroup(chk)
        if kind == "function":
            self.ln(f"if (ho_returning) goto {self.ret_label};")
        elif kind == "loop":
            self.ln(f"if (ho_returning) goto {parent_label};")
        elif kind == "select-clause":
            self.ln(f"if (ho_returning) goto {parent_label};")
            self.ln("if (ho_nexting) {")
            self.indent += 1
            self.ln("ho_nexting = 0;")
            self.store(discrim, "ho_nextv", None, discrim_store=True)
            self.indent -= 1
            self.ln("}")
        else:  # plain nested sequence or CASE clause
            self.ln(f"if (ho_returning || ho_nexting) goto {parent_label};")

    def emit_checkgroup(self, chk):
        self.raw("#ifndef NDEBUG")
        for a in chk.asserts:
            args = a.args if isinstance(a, ast.Call) else []
            narrows = getattr(a, "arg_narrows", [None] * len(args))
            call = self.user_call_expr(a.contract, args, narrows)
            self.fault_check()
            tv = self.tmp("int64_t", call)
            self.fault_check()
            self.ln(f"if (!{tv}) ho_fail(ctx, {a.check_id}u, \"contract-fail\");")
            self.fault_check()
        self.raw("#endif")

    # -- statements

    def stmt(self, st):
        if isinstance(st, ast.Assign):
            if isinstance(st.target_ty, (ty.Array, ty.Record)):
                lv = self.lvalue(st.target)
                src = self.lvalue(st.value)
                self.fault_check()
                self.ln(f"{lv[1]} = {src[1]};")
                return
            lv = self.lvalue(st.target)
            tv = self.expr(st.value)
            self.fault_check()
            tv = self.narrowed(tv, st.target_ty, st.narrow_id, st)
            self.store(lv, tv, st.target_ty)
            self.fault_check()
        elif isinstance(st, ast.CallStmt):
            self.expr(st.call, void_ok=True)
            self.fault_check()
        elif isinstance(st, ast.Return):
            if st.value is not None:
                tv = self.expr(st.value)
                self.fault_check()
                rt = getattr(st, "ret_ty", None)
                if st.narrow_id is not None and rt is not None:
                    tv = self.narrowed(tv, rt, st.narrow_id, st)
                elif rt is not None and isinstance(rt, ty.Numeric):
                    tv = self.tmp("int64_t", f"(int64_t)({_CTYPE[rt]})({tv})")
                self.ln(f"ho_ret = {tv};")
            self.ln("ho_returning = 1;")
            self.ln(f"goto {self.cur_end};")
        elif isinstance(st, ast.If):
            self.emit_if([(st.cond, st.then)] + list(st.elifs), st.orelse)
        elif isinstance(st, ast.Loop):
            self.nlabel += 1
            i = f"ho_i_{self.nlabel}"
            self.ln("{")
            self.indent += 1
            self.ln(f"int64_t {i};")
            self.ln(f"for ({i} = 0; {i} < {st.count_value}LL; {i}++) {{")
            self.indent += 1
            if st.guard is not None:
                tg = self.expr(st.guard)
                self.fault_check()
                self.ln(f"if (!{tg}) break;")
            self.emit_seq(st.body, "loop", self.cur_end)
            self.indent -= 1
            self.ln("}")
            self.indent -= 1
            self.ln("}")
        elif isinstance(st, ast.Case):
            tsel = self.expr(st.subject)
            self.fault_check()
            self.emit_clauses(tsel, st.clauses, st.orelse, None)
        elif isinstance(st, ast.Select):
            lv = self.lvalue(st.subject)
            self.fault_check()
            tsel = self.load(lv)
            self.emit_clauses(tsel, st.clauses, None, lv)
        elif isinstance(st, ast.Next):
            self.ln(f"ho_nextv = {st.value_folded}LL;")
            self.ln("ho_nexting = 1;")
            self.ln(f"goto {self.cur_end};")
        elif isinstance(st, ast.Local):
            for d in st.decls:
                slot = mangle_slot(d.slot)
                if isinstance(d.ty, (ty.Array, ty.Record)):
                    src = self.lvalue(d.init)
                    self.fault_check()
                    self.ln(f"{self.em.c_type(d.ty)} {slot} = {src[1]};")
                elif isinstance(d.ty, ty.Pointer):
                    tp = self.expr(d.init)
                    self.fault_check()
                    self.ln(f"ho_ptr {slot} = {tp};")
                else:
                    tv = self.expr(d.init)
                    self.fault_check()
                    tv = self.narrowed(tv, d.ty, d.narrow_id, d)
                    self.ln(f"{self.em.c_type(d.ty)} {slot} = ({self.em.c_type(d.ty)}){tv};")
                self.ln(f"(void){slot};")
        elif isinstance(st, ast.External):
            for d in st.decls:
                slot = mangle_slot(d.slot)
                self.ln(f"ho_ptr {slot}; {slot}.is_mmio = 1; "
                        f"{slot}.addr = {d.addr_value}u; {slot}.mem = 0;")
                self.ln(f"(void){slot};")
        elif isinstance(st, (ast.StateDef, ast.Import)):
            self.ln(";")
        elif isinstance(st, ast.Log):
            if st.value is None:
                self.ln(f"ho_log(ctx, {c_str(st.text)}, 0, 0);")
            else:
                tv = self.expr(st.value)
                self.fault_check()
                self.ln(f"ho_log(ctx, {c_str(st.text)}, 1, {tv});")
        else:
            raise TypeError(f"cannot emit {st!r}")

    def emit_if(self, arms, orelse):
        cond, body = arms[0]
        tc = self.expr(cond)
        self.fault_check()
        self.ln(f"if ({tc}) {{")
        self.indent += 1
        self.emit_seq(body, "plain", self.cur_end)
        self.indent -= 1
        if len(arms) > 1 or orelse is not None:
            self.ln("} else {")
            self.indent += 1
            if len(arms) > 1:
                self.emit_if(arms[1:], orelse)
            else:
                self.emit_seq(orelse, "plain", self.cur_end)
            self.indent -= 1
        self.ln("}")

    def emit_clauses(self, tsel, clauses, orelse, discrim):
        kind = "select-clause" if discrim is not None else "plain"
        first = True
        for cl in clauses:
            conds = []
            for r in cl.ranges:
                if r.lo_value == r.hi_value:
                    conds.append(f"{tsel} == {r.lo_value}LL")
                else:
                    conds.append(f"({tsel} >= {r.lo_value}LL && {tsel} <= {r.hi_value}LL)")
            head = "if" if first else "} else if"
            self.ln(f"{head} ({' || '.join(conds)}) {{")
            self.indent += 1
            self.emit_seq(cl.body, kind, self.cur_end, discrim)
            self.indent -= 1
            first = False
        if orelse is not None:
            self.ln("} else {")
            self.indent += 1
            self.emit_seq(orelse, "plain", self.cur_end)
            self.indent -= 1
        if not first:
            self.ln("}")

    # -- values

    def narrowed(self, tv, target, site_id, node):
        if site_id is None or not isinstance(target, ty.Numeric):
            return tv
        out = self.tmp("int64_t", f"{_NARROW[target]}(ctx, {site_id}u, {tv})")
        self.fault_check()
        return out

    def expr(self, e, void_ok=False):
        """Emit evaluation code; returns the name of an int64_t temp (for
        numeric/boolean values) or a ho_ptr temp (for pointers)."""
        if isinstance(e, ast.IntLit):
            return self.tmp("int64_t", f"{e.value}LL")
        if isinstance(e, ast.BoolLit):
            return self.tmp("int64_t", "1" if e.value else "0")
        if isinstance(e, ast.SizeOf):
            return self.tmp("int64_t", f"{e.size_value}LL")
        if isinstance(e, ast.Name):
            b = e.binding
            if b.kind == "const":
                return self.tmp("int64_t", f"({b.value}LL)")
            if b.kind == "dynconst":
                src = self.mid_expr() if b.which == "module_id" else self.inst_expr()
                return self.tmp("int64_t", f"(int64_t){src}")
            lv = self.lvalue(e)
            return self.load(lv)
        if isinstance(e, (ast.FieldSel, ast.IndexSel, ast.Deref)):
            return self.load(self.lvalue(e))
        if isinstance(e, ast.BinOp):
            return self.binop(e)
        if isinstance(e, ast.UnOp):
            tv = self.expr(e.operand)
            if e.op == "NOT":
                return self.tmp("int64_t", f"!{tv}")
            if e.op == "+":
                return tv
            if e.op == "-":
                return self.tmp("int64_t", f"(int64_t)(0 - (uint64_t){tv})")
            return self.tmp("int64_t", f"(int64_t)(uint32_t)~(uint32_t){tv}")
        if isinstance(e, ast.Call):
            return self.call(e, void_ok)
        raise TypeError(f"cannot emit expression {e!r}")

    def binop(self, e):
        if e.op in ("AND", "OR"):
            out = self.tmp("int64_t", "0")
            tl = self.expr(e.lhs)
            if e.op == "AND":
                self.ln(f"if ({tl}) {{")
                self.indent += 1
                tr = self.expr(e.rhs)
                self.ln(f"{out} = {tr};")
                self.indent -= 1
                self.ln("}")
            else:
                self.ln(f"if ({tl}) {out} = 1;")
                self.ln("else {")
                self.indent += 1
                tr = self.expr(e.rhs)
                self.ln(f"{out} = {tr};")
                self.indent -= 1
                self.ln("}")
            return out
        tl = self.expr(e.lhs)
        tr = self.expr(e.rhs)
        sid = self.site(e)
        if e.op in ("+", "-", "*"):
            return self.tmp("int64_t", f"{tl} {e.op} {tr}")
        if e.op in ("/", "DIV"):
            return self.tmp("int64_t", f"HO_DIV(ctx, {sid}, {tl}, {tr})")
        if e.op == "MOD":
            return self.tmp("int64_t", f"HO_MOD(ctx, {sid}, {tl}, {tr})")
        if e.op == "<<":
            return self.tmp("int64_t", f"HO_SHL(ctx, {sid}, {tl}, {tr})")
        if e.op == ">>":
            return self.tmp("int64_t", f"HO_SHR(ctx, {sid}, {tl}, {tr})")
        if e.op == "/\\":
            return self.tmp("int64_t", f"(int64_t)((uint32_t){tl} & (uint32_t){tr})")
        if e.op == "\\/":
            return self.tmp("int64_t", f"(int64_t)((uint32_t){tl} | (uint32_t){tr})")
        if e.op == "><":
            return self.tmp("int64_t", f"(int64_t)((uint32_t){tl} ^ (uint32_t){tr})")
        cmp = {"=": "==", "#": "!=", "<": "<", ">": ">", "<=": "<=", ">=": ">="}[e.op]
        return self.tmp("int64_t", f"(int64_t)({tl} {cmp} {tr})")

    # -- locations: ("mem", c-lvalue, type) or ("ptr", temp, pointee, node)

    def lvalue(self, e):
        if isinstance(e, ast.Name):
            b = e.binding
            if b.kind == "local":
                return ("mem", mangle_slot(b.slot), b.ty)
            if b.kind == "param":
                return ("mem", f"(*p_{b.name})" if b.var else f"p_{b.name}", b.ty)
            if b.kind == "modvar":
                return ("mem", f"ho_m->v_{b.var.name}", b.var.type)
            if b.kind == "external":
                return ("mem", mangle_slot(b.slot), b.ty)
            raise TypeError(f"{e.ident} is not a location")
        if isinstance(e, ast.FieldSel):
            sel = e.sel
            if sel[0] == "import_var":
                imp, member, mty = sel[1], sel[2], sel[3]
                if imp.selector == "*":
                    k = self.inst
                elif imp.selector is None:
                    k = 0
                else:
                    k = imp.selector
                target = self.em.program.module_by_name.get(imp.module)
                if target is not None:
                    mid = target.base_id + k
                    base = f"((ho_data_{target.name} *)ho_mdata(ctx, {mid}u))"
                else:
                    # module lives in another unit: resolve by name at runtime
                    base = (f"((ho_xdata_{imp.module} *)"
                            f"ho_mdata_named(ctx, {c_str(imp.module)}, {k}u))")
                return ("mem", f"{base}->v_{member}", mty)
            base = self.lvalue(e.base)
            return ("mem", f"{base[1]}.f_{e.field}", e.ty)
        if isinstance(e, ast.IndexSel):
            if isinstance(e.base, ast.Call):  # DATA(p)[i]
                pa = self.port_addr(e.base.args[0])
                td = self.tmp("uint8_t *", f"HO_DATA(ctx, {self.site(e.base)}, {pa})")
                ti = self.expr(e.index)
                tj = self.tmp("int64_t", f"HO_IDX(ctx, {self.site(e)}, {ti}, 4096)")
                return ("mem", f"{td}[{tj}]", ty.U8)
            base = self.lvalue(e.base)
            ti = self.expr(e.index)
            tj = self.tmp("int64_t", f"HO_IDX(ctx, {self.site(e)}, {ti}, {e.length})")
            return ("mem", f"{base[1]}.e[{tj}]", e.ty)
        if isinstance(e, ast.Deref):
            tp = self.expr(e.base)
            return ("ptr", tp, e.ty, e)
        if isinstance(e, ast.Call):
            raise TypeError("calls are not locations (DATA is handled at indexing)")
        raise TypeError(f"not a designator: {e!r}")

    def load(self, lv):
        if lv[0] == "mem":
            t = lv[2]
            if isinstance(t, ty.Pointer):
                return self.tmp("ho_ptr", lv[1])
            return self.tmp("int64_t", f"(int64_t){lv[1]}")
        _, tp, pointee, node = lv
        w = pointee.width // 8 if isinstance(pointee, ty.Numeric) else 1
        sg = 1 if isinstance(pointee, ty.Numeric) and pointee.signed else 0
        out = self.tmp("int64_t", f"ho_ptr_load(ctx, {self.site(node)}, {tp}, {w}, {sg})")
        self.fault_check()
        return out

    def store(self, lv, tv, t, discrim_store=False):
        if lv[0] == "mem":
            target = lv[2]
            if isinstance(target, (ty.Numeric, ty.Boolean)):
                ct = self.em.c_type(target)
                self.ln(f"{lv[1]} = ({ct}){tv};")
            else:
                self.ln(f"{lv[1]} = {tv};")
            return
        _, tp, pointee, node = lv
        w = pointee.width // 8 if isinstance(pointee, ty.Numeric) else 1
        self.ln(f"ho_ptr_store(ctx, {self.site(node)}, {tp}, {w}, {tv});")
        if not discrim_store:
            self.fault_check()

    def port_addr(self, e):
        lv = self.lvalue(e)
        assert lv[0] == "mem"
        return f"(&{lv[1]})"

    # -- calls

    def user_call_expr(self, info, args, narrows):
        """Emit argument temps; returns the call expression text."""
        mod = info.module
        cargs = ["ctx"]
        if mod is not None:
            cargs.append("ho_m")
        else:
            cargs.append(self.mid_expr())
            cargs.append(self.inst_expr())
        for a, (pname, pty, is_var), nid in zip(args, info.params, narrows):
            if is_var:
                lv = self.lvalue(a)
                assert lv[0] == "mem", "VAR arguments are memory designators"
                cargs.append(f"&{lv[1]}")
            elif isinstance(pty, (ty.Array, ty.Record)):
                lv = self.lvalue(a)
                cargs.append(lv[1])
            elif isinstance(pty, ty.Pointer):
                cargs.append(self.expr(a))
            else:
                tv = self.expr(a)
                tv = self.narrowed(tv, pty, nid, a)
                ct = self.em.c_type(pty) if isinstance(pty, ty.Numeric) else "uint8_t"
                cargs.append(f"({ct}){tv}")
        inst = self.inst if mod is not None else None
        return f"{self.em.fn_name(info, mod, inst)}({', '.join(cargs)})"

    def call(self, e, void_ok):
        kind, target = e.callee
        if kind == "proc":
            narrows = getattr(e, "arg_narrows", [None] * len(e.args))
            cexpr = self.user_call_expr(target, e.args, narrows)
            return self.tmp("int64_t", cexpr)
        name = target
        a = e.args
        if name == "NEW":
            pa = self.port_addr(a[0])
            tv = self.expr(a[1])
            self.ln(f"ho_new(ctx, {self.site(e)}, {pa}, {tv});")
            return "0"
        if name == "DISPOSE":
            self.ln(f"ho_dispose(ctx, {self.port_addr(a[0])});")
            return "0"
        if name == "SEND":
            pa = self.port_addr(a[0])
            pb = self.port_addr(a[1])
            return self.tmp("int64_t", f"ho_send(ctx, {pa}, {pb})")
        if name == "CLONE":
            pa = self.port_addr(a[0])
            pb = self.port_addr(a[1])
            self.ln(f"ho_clone(ctx, {self.site(e)}, {pa}, {pb});")
            return "0"
        if name == "EXTEND":
            pa = self.port_addr(a[0])
            tv = self.expr(a[1])
            self.ln(f"HO_EXTEND(ctx, {self.site(e)}, {pa}, {tv});")
            return "0"
        if name in ("INC", "DEC"):
            lv = self.lvalue(a[0])
            tv = self.load(lv)
            op = "+" if name == "INC" else "-"
            t2 = self.tmp("int64_t", f"{tv} {op} 1")
            self.store(lv, t2, lv[2])
            return "0"
        if name == "COUNT":
            return self.tmp("int64_t", f"HO_COUNT(ctx, {self.site(e)}, {self.port_addr(a[0])})")
        if name == "PENDING":
            return self.tmp("int64_t", f"ho_pending({self.port_addr(a[0])})")
        if name == "ADR":
            lv = self.lvalue(a[0])
            if lv[0] == "ptr":
                return lv[1]
            out = self.tmp("ho_ptr", "{0, 0, 0}")
            self.ln(f"{out}.mem = (void *)&{lv[1]};")
            return out
        if name in ("MIN", "MAX"):
            ta = self.expr(a[0])
            tb = self.expr(a[1])
            op = "<" if name == "MIN" else ">"
            return self.tmp("int64_t", f"({ta} {op} {tb} ? {ta} : {tb})")
        raise TypeError(f"cannot emit builtin {name}")


def mangle_slot(slot):
    return "l_" + slot.replace("@", "_")


def emit_c(program):
    """Emit the whole typed program as one C99 translation unit."""
    assert not program.errors(), "emit_c requires an error-free program"
    return Emitter(program).emit()
