"""Semantic analysis for hO compilation units.

Resolves names and types, folds constants, enforces the language
restrictions (bounded loops, no recursion, contract rules, NEXT placement,
import discipline), assigns module ids and dynamic-check sites, and
computes module signatures, per-module step bounds and the static
message-flow graph.

The analyzer annotates AST nodes in place (`ty`, `binding`, `callee`,
`check_id`, ...); the interpreter and the C emitter both consume those
annotations, so the two back ends can never disagree about which checks
exist or what a name means.
"""

from dataclasses import dataclass, field

from . import arith, ast
from . import types as ty
from .diagnostics import Diagnostic, ERROR, WARNING, sorted_diags

MAX_INSTANCES = 2
MAX_BLOCK = 4096

BUILTIN_PROC_NAMES = frozenset([
    "NEW", "DISPOSE", "SEND", "CLONE", "EXTEND", "INC", "DEC",
    "COUNT", "DATA", "PENDING", "ADR", "MIN", "MAX",
])


class FoldError(Exception):
    def __init__(self, loc, reason, message):
        super().__init__(message)
        self.loc = loc
        self.reason = reason  # "non-constant" | "div-zero" | "shift-range" | "no-size"
        self.message = message


@dataclass
class VarInfo:
    name: str
    type: object
    exported: bool


@dataclass
class ProcInfo:
    name: str
    qual: str
    node: object
    params: list           # of (name, type, is_var)
    ret: object             # None for proper procedures, BOOL for contracts
    is_contract: bool
    module: object = None
    callees: set = field(default_factory=set)
    cost: object = None


@dataclass
class ImportInfo:
    alias: str
    module: str
    selector: object        # None, "*" or int
    node: object = None


@dataclass
class ModuleInfo:
    name: str
    multi: bool
    base_id: int
    node: object
    vars: dict = field(default_factory=dict)
    procs: dict = field(default_factory=dict)
    imports: dict = field(default_factory=dict)
    body_callees: set = field(default_factory=set)
    bound: object = None

    @property
    def instances(self):
        return 2 if self.multi else 1


@dataclass
class ModuleSignature:
    name: str
    instances: int
    exports: tuple          # of (name, TypeRepr), declaration order
    module_id: object = field(default=None, compare=False)


@dataclass
class CheckSite:
    check_id: int
    kind: str
    loc: object


@dataclass(frozen=True, order=True)
class FlowEdge:
    src: str
    dst: str
    port: str


@dataclass
class Program:
    unit: object
    consts: dict
    types: dict
    procs: dict
    contracts: dict
    modules: list
    module_by_name: dict
    known: dict
    sites: list
    diagnostics: list

    @property
    def signatures(self):
        return {m.name: build_signature(m) for m in self.modules}

    def errors(self):
        return [d for d in self.diagnostics if d.severity == ERROR]


def build_signature(mod):
    """Per-module exported interface; identical in restricted and full mode."""
    exports = tuple((v.name, v.type) for v in mod.vars.values() if v.exported)
    return ModuleSignature(mod.name, mod.instances, exports, mod.base_id)


def instance_label(name, instance, multi):
    return f"{name}{instance}" if multi else name


# --- constant folding -------------------------------------------------------

def _fold(e, lookup, types):
    if isinstance(e, ast.IntLit):
        return e.value, (ty.S32 if e.value <= 0x7FFFFFFF else ty.U32)
    if isinstance(e, ast.BoolLit):
        return (1 if e.value else 0), ty.BOOL
    if isinstance(e, ast.Name):
        got = lookup(e.ident)
        if got is None:
            raise FoldError(e.loc, "non-constant", f"{e.ident} is not a constant")
        return got
    if isinstance(e, ast.UnOp):
        v, t = _fold(e.operand, lookup, types)
        if e.op == "NOT":
            return (0 if v else 1), ty.BOOL
        return arith.eval_unop(e.op, (v, t))
    if isinstance(e, ast.BinOp):
        if e.op in ("AND", "OR"):
            try:
                lv, _ = _fold(e.lhs, lookup, types)
            except FoldError:
                lv = None
            try:
                rv, _ = _fold(e.rhs, lookup, types)
            except FoldError:
                rv = None
            if e.op == "OR":
                if lv == 1 or (lv == 0 and rv is not None):
                    return (1 if (lv == 1 or rv == 1) else 0), ty.BOOL
                if rv == 1:
                    return 1, ty.BOOL
            else:
                if lv == 0 or (lv == 1 and rv is not None):
                    return (1 if (lv == 1 and rv == 1) else 0), ty.BOOL
                if rv == 0:
                    return 0, ty.BOOL
            raise FoldError(e.loc, "non-constant", "operand is not constant")
        lhs = _fold(e.lhs, lookup, types)
        rhs = _fold(e.rhs, lookup, types)
        try:
            return arith.eval_binop(e.op, lhs, rhs)
        except arith.ArithFault as f:
            what = "division by zero" if f.kind == arith.DIV_ZERO else "shift out of range"
            raise FoldError(e.loc, f.kind, f"{what} in constant expression")
    if isinstance(e, ast.SizeOf):
        t = _resolve_static_type(e.type, types)
        if isinstance(t, ty.PortType) or t is None:
            raise FoldError(e.loc, "no-size", "SIZE is not defined for this type")
        return ty.size_of(t), ty.S32
    raise FoldError(e.loc, "non-constant", "expression is not constant")


def _resolve_static_type(node, types):
    # minimal resolver for SIZE() inside standalone fold_constant
    if isinstance(node, ast.NamedType):
        return types.get(node.name)
    if isinstance(node, ast.PtrType):
        inner = _resolve_static_type(node.target, types)
        return None if inner is None else ty.Pointer(node.volatile, inner)
    if isinstance(node, ast.ArrayType):
        try:
            n, _ = _fold(node.count, lambda _: None, types)
        except FoldError:
            return None
        inner = _resolve_static_type(node.element, types)
        return None if inner is None else ty.Array(n, inner)
    if isinstance(node, ast.RecordType):
        fields = []
        for name, ft in node.fields:
            inner = _resolve_static_type(ft, types)
            if inner is None:
                return None
            fields.append((name, inner))
        return ty.Record(tuple(fields))
    return None


def fold_constant(expr, env=None, types=None):
    """Evaluate a constant expression to a 64-bit integer value.

    `env` maps names to (value, type) pairs (CONST names, state constants).
    Raises FoldError on division by zero, non-constant references or
    unshiftable operands.
    """
    env = env or {}
    value, _ = _fold(expr, lambda n: env.get(n), types or dict(ty.BUILTIN_TYPES))
    return value


# --- scopes ------------------------------------------------------------------

class Binding:
    def __init__(self, kind, **data):
        self.kind = kind
        self.__dict__.update(data)


class Scope:
    def __init__(self, parent=None):
        self.parent = parent
        self.names = {}

    def lookup(self, name):
        s = self
        while s is not None:
            if name in s.names:
                return s.names[name]
            s = s.parent
        return None

    def define(self, name, binding):
        self.names[name] = binding


# --- the analyzer ------------------------------------------------------------

class _Ctx:
    """Per-body checking context."""

    def __init__(self, module, proc):
        self.module = module
        self.proc = proc                  # ProcInfo or None for a module body
        self.select_stack = []            # discriminant types of open SELECTs
        self.slot_counter = 0

    def add_callee(self, qual):
        if self.proc is not None:
            self.proc.callees.add(qual)
        elif self.module is not None:
            self.module.body_callees.add(qual)

    def new_slot(self, name):
        self.slot_counter += 1
        return f"{name}@{self.slot_counter}"


class Analyzer:
    def __init__(self, unit, known_signatures=None, restricted=False):
        self.unit = unit
        self.known = dict(known_signatures or {})
        self.restricted = restricted
        self.diags = []
        self.consts = {}
        self.types = dict(ty.BUILTIN_TYPES)
        self.procs = {}
        self.contracts = {}
        self.modules = []
        self.module_by_name = {}
        self.sites = []
        self.proc_table = {}
        self.globals = Scope()

    # -- diagnostics helpers

    def error(self, loc, code, message):
        self.diags.append(Diagnostic(ERROR, code, loc, message))

    def warn(self, loc, code, message):
        self.diags.append(Diagnostic(WARNING, code, loc, message))

    def new_site(self, kind, loc):
        site = CheckSite(len(self.sites) + 1, kind, loc)
        self.sites.append(site)
        return site.check_id

    # -- entry point

    def run(self):
        self.collect()
        self.check_bodies()
        return Program(
            unit=self.unit, consts=self.consts, types=self.types,
            procs=self.procs, contracts=self.contracts, modules=self.modules,
            module_by_name=self.module_by_name, known=self.known,
            sites=self.sites, diagnostics=sorted_diags(self.diags))

    # -- phase 1: collect toplevel entities in source order

    def collect(self):
        next_id = 0
        for top in self.unit.toplevels:
            if isinstance(top, ast.ConstDef):
                for name, expr in top.defs:
                    if not self.define_global(name, top.loc):
                        continue
                    try:
                        value, vty = _fold(expr, self.global_const_lookup, self.types)
                        self.consts[name] = (value, vty)
                        self.globals.define(name, Binding("const", value=value, ty=vty))
                    except FoldError as fe:
                        self.error(fe.loc, "E-CONST", fe.message)
            elif isinstance(top, ast.TypeDef):
                for name, tnode in top.defs:
                    if name in self.types:
                        self.error(top.loc, "E-REDEFINED", f"type {name} is already defined")
                        continue
                    self.types[name] = self.resolve_type(tnode)
            elif isinstance(top, ast.Proc):
                self.collect_proc(top, None)
            elif isinstance(top, ast.Contract):
                info = self.collect_proc(top, None, contract=True)
                if info is not None:
                    self.contracts[top.name] = info
            elif isinstance(top, ast.Module):
                next_id = self.collect_module(top, next_id)
            elif isinstance(top, ast.Include):
                self.error(top.loc, "E-INCLUDE", "unresolved INCLUDE (includes must be expanded first)")

        self.globals.define("MODULE_ID", Binding("dynconst", which="module_id"))
        self.globals.define("module_id", Binding("dynconst", which="module_id"))
        self.globals.define("INSTANCE", Binding("dynconst", which="instance"))
        self.globals.define("instance", Binding("dynconst", which="instance"))

    def global_const_lookup(self, name):
        return self.consts.get(name)

    def define_global(self, name, loc):
        if name in self.consts or name in self.procs or name in self.contracts:
            self.error(loc, "E-REDEFINED", f"{name} is already defined")
            return False
        return True

    def collect_proc(self, node, module, contract=False):
        table = self.contracts if contract else (module.procs if module else self.procs)
        namespace_ok = True
        if module is None:
            namespace_ok = self.define_global(node.name, node.loc)
        elif node.name in module.procs:
            self.error(node.loc, "E-REDEFINED", f"procedure {node.name} is already defined")
            namespace_ok = False
        params = []
        seen = set()
        for p in node.params:
            if p.name in seen:
                self.error(p.loc, "E-REDEFINED", f"duplicate parameter {p.name}")
            seen.add(p.name)
            pty = self.resolve_type(p.type)
            if contract and p.var:
                self.error(p.loc, "E-CONTRACT-VAR", "contracts may not use VAR arguments")
            if isinstance(pty, ty.PortType) and not p.var:
                self.error(p.loc, "E-PORT-ASSIGN", "ports may only be passed as VAR arguments")
            params.append((p.name, pty, p.var))
        ret = ty.BOOL if contract else (self.resolve_type(node.ret) if node.ret else None)
        if ret is not None and not isinstance(ret, (ty.Numeric, ty.Boolean, ty.Unknown)):
            self.error(node.loc, "E-TYPE", "procedures can only return numeric or boolean values")
            ret = ty.Unknown()
        if not namespace_ok:
            return None
        qual = node.name if module is None else f"{module.name}.{node.name}"
        info = ProcInfo(node.name, qual, node, params, ret, contract, module)
        table[node.name] = info
        self.proc_table[qual] = info
        if module is None:
            self.globals.define(node.name, Binding("proc", info=info))
        return info

    def collect_module(self, node, next_id):
        if node.name in self.module_by_name:
            self.error(node.loc, "E-REDEFINED", f"module {node.name} is already defined")
            return next_id
        mod = ModuleInfo(node.name, node.multi, next_id, node)
        next_id += mod.instances
        self.modules.append(mod)
        self.module_by_name[node.name] = mod
        for v in node.vars:
            if v.name in mod.vars:
                self.error(v.loc, "E-REDEFINED", f"variable {v.name} is already defined")
                continue
            mod.vars[v.name] = VarInfo(v.name, self.resolve_type(v.type), v.exported)
        for p in node.procs:
            self.collect_proc(p, mod)
        # imports are a static property of the module: collect the body prefix
        for st in node.body.stmts:
            if not isinstance(st, ast.Import):
                break
            for spec in st.specs:
                if spec.alias in mod.imports or spec.alias in mod.vars:
                    self.error(spec.loc, "E-REDEFINED", f"{spec.alias} is already defined")
                    continue
                selector = spec.selector
                if selector is not None and selector != "*":
                    try:
                        selector, _ = _fold(selector, self.global_const_lookup, self.types)
                    except FoldError as fe:
                        self.error(fe.loc, "E-IMPORT-SELECTOR", fe.message)
                        selector = 0
                mod.imports[spec.alias] = ImportInfo(spec.alias, spec.module, selector, spec)
        return next_id

    # -- types

    def resolve_type(self, node):
        if isinstance(node, ast.NamedType):
            t = self.types.get(node.name)
            if t is None:
                self.error(node.loc, "E-UNDEFINED", f"unknown type {node.name}")
                return ty.Unknown()
            return t
        if isinstance(node, ast.PtrType):
            inner = self.resolve_type(node.target)
            if isinstance(inner, ty.PortType):
                self.error(node.loc, "E-PORT-NESTED", "pointers to ports are not allowed")
                return ty.Unknown()
            return ty.Pointer(node.volatile, inner)
        if isinstance(node, ast.ArrayType):
            length = 1
            try:
                length, _ = _fold(node.count, self.global_const_lookup, self.types)
            except FoldError as fe:
                self.error(fe.loc, "E-ARRAY-LEN", f"array length must be a compile-time constant: {fe.message}")
            if length < 1:
                self.error(node.loc, "E-ARRAY-LEN", f"array length must be at least 1, got {length}")
                length = 1
            elem = self.resolve_type(node.element)
            if isinstance(elem, ty.PortType):
                self.error(node.loc, "E-PORT-NESTED", "arrays of ports are not allowed")
                return ty.Unknown()
            return ty.Array(length, elem)
        if isinstance(node, ast.RecordType):
            fields = []
            seen = set()
            for name, ft in node.fields:
                if name in seen:
                    self.error(node.loc, "E-REDEFINED", f"duplicate record field {name}")
                    continue
                seen.add(name)
                resolved = self.resolve_type(ft)
                if isinstance(resolved, ty.PortType):
                    self.error(node.loc, "E-PORT-NESTED", "ports may not be record fields")
                    resolved = ty.Unknown()
                fields.append((name, resolved))
            return ty.Record(tuple(fields))
        raise TypeError(f"not a type node: {node!r}")

    # -- phase 2: bodies

    def check_bodies(self):
        for info in self.procs.values():
            self.check_proc(info, self.globals)
        for info in self.contracts.values():
            self.check_proc(info, self.globals)
        for mod in self.modules:
            mscope = Scope(self.globals)
            for v in mod.vars.values():
                mscope.define(v.name, Binding("modvar", var=v, module=mod))
            for p in mod.procs.values():
                mscope.define(p.name, Binding("proc", info=p))
            for imp in mod.imports.values():
                mscope.define(imp.alias, Binding("import", info=imp))
                self.check_import_spec(imp, mod)
            for p in mod.procs.values():
                self.check_proc(p, mscope)
            ctx = _Ctx(mod, None)
            self.check_seq(mod.node.body, Scope(mscope), ctx, module_body=True)

    def check_import_spec(self, imp, mod):
        target = self.module_by_name.get(imp.module)
        sig = self.known.get(imp.module)
        loc = imp.node.loc
        if target is None and sig is None:
            if not self.restricted:
                self.error(loc, "E-IMPORT-UNKNOWN", f"unknown module {imp.module}")
            return
        instances = target.instances if target is not None else sig.instances
        if imp.selector == "*":
            if instances < 2 or not mod.multi:
                self.error(loc, "E-IMPORT-SELECTOR",
                           "[*] requires both importer and importee to be multi-instance")
        elif imp.selector is None:
            if instances > 1:
                self.error(loc, "E-IMPORT-SELECTOR",
                           f"module {imp.module} is multi-instance; select [*] or an instance")
        else:
            if not (0 <= imp.selector < instances):
                self.error(loc, "E-IMPORT-SELECTOR",
                           f"instance selector {imp.selector} out of range (module has {instances})")

    def check_proc(self, info, outer):
        scope = Scope(outer)
        for name, pty, is_var in info.params:
            scope.define(name, Binding("param", name=name, ty=pty, var=is_var))
        ctx = _Ctx(info.module, info)
        self.check_seq(info.node.body, Scope(scope), ctx)

    # -- statements

    def check_seq(self, seq, scope, ctx, module_body=False):
        for chk in seq.checks:
            for a in chk.asserts:
                self.check_assert(a, scope, ctx)
        import_prefix = module_body
        for st in seq.stmts:
            if not isinstance(st, ast.Import):
                import_prefix = False
            self.check_stmt(st, scope, ctx, import_ok=import_prefix)

    def check_assert(self, a, scope, ctx):
        a.check_id = self.new_site("contract", a.loc)
        name = a.ident if isinstance(a, ast.Name) else a.name
        b = scope.lookup(name)
        info = b.info if (b is not None and b.kind == "proc" and b.info.is_contract) else None
        a.contract = info
        if info is None:
            self.error(a.loc, "E-CHECK-TARGET", f"{name} is not a contract")
            if isinstance(a, ast.Call):
                for arg in a.args:
                    self.check_expr(arg, scope, ctx)
            return
        ctx.add_callee(info.qual)
        if isinstance(a, ast.Name):
            if info.params:
                self.error(a.loc, "E-CALL-ARGS",
                           f"contract {name} needs {len(info.params)} arguments")
        else:
            self.check_call(a, scope, ctx)

    def check_stmt(self, st, scope, ctx, import_ok=False):
        if isinstance(st, ast.Assign):
            self.check_assign(st, scope, ctx)
        elif isinstance(st, ast.CallStmt):
            self.check_call(st.call, scope, ctx, as_stmt=True)
            for a in st.call.args:
                self.warn_const(a, scope)
        elif isinstance(st, ast.Return):
            self.check_return(st, scope, ctx)
        elif isinstance(st, ast.If):
            self.check_cond(st.cond, scope, ctx)
            self.check_seq(st.then, Scope(scope), ctx)
            for cond, body in st.elifs:
                self.check_cond(cond, scope, ctx)
                self.check_seq(body, Scope(scope), ctx)
            if st.orelse is not None:
                self.check_seq(st.orelse, Scope(scope), ctx)
        elif isinstance(st, ast.Loop):
            if st.guard is not None:
                self.check_cond(st.guard, scope, ctx)
            cty = self.check_expr(st.count, scope, ctx)
            if not isinstance(cty, (ty.Numeric, ty.Unknown)):
                self.error(st.count.loc, "E-TYPE", "loop count must be numeric")
            st.count_value = self.try_fold(st.count, scope)
            if st.count_value is not None:
                st.count_value = st.count_value[0]
            self.check_seq(st.body, Scope(scope), ctx)
        elif isinstance(st, ast.Case):
            sty = self.check_expr(st.subject, scope, ctx)
            if not isinstance(sty, (ty.Numeric, ty.Unknown)):
                self.error(st.subject.loc, "E-TYPE", "CASE subject must be numeric")
            self.warn_const(st.subject, scope)
            self.check_clauses(st.clauses, scope, ctx)
            if st.orelse is not None:
                self.check_seq(st.orelse, Scope(scope), ctx)
        elif isinstance(st, ast.Select):
            if isinstance(st.subject, ast.Deref):
                self.error(st.subject.loc, "E-SELECT-DISCRIM",
                           "the SELECT discriminant may not be a pointer dereference")
            sty = self.check_designator(st.subject, scope, ctx, assignable=True)
            if not (isinstance(sty, ty.Numeric) and sty.width == 32) and not isinstance(sty, ty.Unknown):
                self.error(st.subject.loc, "E-SELECT-DISCRIM",
                           "SELECT discriminant must be an assignable 32-bit numeric")
                sty = ty.S32
            st.discrim_ty = sty if isinstance(sty, ty.Numeric) else ty.S32
            ctx.select_stack.append(st.discrim_ty)
            self.check_clauses(st.clauses, scope, ctx)
            ctx.select_stack.pop()
        elif isinstance(st, ast.Next):
            self.check_expr(st.value, scope, ctx)
            st.value_folded = 0
            try:
                st.value_folded, _ = self.fold_in_scope(st.value, scope)
            except FoldError as fe:
                self.error(fe.loc, "E-CONST", f"NEXT needs a constant state: {fe.message}")
            if not ctx.select_stack:
                self.error(st.loc, "E-NEXT-PLACE", "NEXT is only allowed inside a SELECT clause")
            else:
                dty = ctx.select_stack[-1]
                if not ty.fits(st.value_folded, dty):
                    self.error(st.loc, "E-RANGE",
                               f"state value {st.value_folded} does not fit {dty}")
        elif isinstance(st, ast.Local):
            self.check_local(st, scope, ctx)
        elif isinstance(st, ast.External):
            self.check_external(st, scope, ctx)
        elif isinstance(st, ast.StateDef):
            for i, name in enumerate(st.names):
                if name in scope.names:
                    self.error(st.loc, "E-REDEFINED", f"{name} is already defined")
                    continue
                scope.define(name, Binding("const", value=i, ty=ty.S32))
            st.values = {name: i for i, name in enumerate(st.names)}
        elif isinstance(st, ast.Import):
            if not import_ok:
                self.error(st.loc, "E-IMPORT-PLACE",
                           "IMPORT is only allowed at the start of a module body")
        elif isinstance(st, ast.Log):
            if st.value is not None:
                vty = self.check_expr(st.value, scope, ctx)
                if not isinstance(vty, (ty.Numeric, ty.Unknown)):
                    self.error(st.value.loc, "E-TYPE", "LOG value must be numeric")
                self.warn_const(st.value, scope)
        else:
            raise TypeError(f"not a statement node: {st!r}")

    def check_cond(self, cond, scope, ctx):
        cty = self.check_expr(cond, scope, ctx)
        if not isinstance(cty, (ty.Boolean, ty.Unknown)):
            self.error(cond.loc, "E-TYPE", "condition must be boolean")
        self.warn_const(cond, scope)

    def check_clauses(self, clauses, scope, ctx):
        covered = []
        for cl in clauses:
            for r in cl.ranges:
                self.check_expr(r.lo, scope, ctx)
                lo = hi = None
                try:
                    lo, _ = self.fold_in_scope(r.lo, scope)
                    hi = lo
                except FoldError as fe:
                    self.error(fe.loc, "E-CASE-RANGE", f"clause label must be constant: {fe.message}")
                if r.hi is not None:
                    self.check_expr(r.hi, scope, ctx)
                    try:
                        hi, _ = self.fold_in_scope(r.hi, scope)
                    except FoldError as fe:
                        self.error(fe.loc, "E-CASE-RANGE", f"clause label must be constant: {fe.message}")
                if lo is None or hi is None:
                    r.lo_value, r.hi_value = 0, 0
                    continue
                if hi < lo:
                    self.error(r.loc, "E-CASE-RANGE", f"empty range {lo} .. {hi}")
                r.lo_value, r.hi_value = lo, hi
                for plo, phi in covered:
                    if lo <= phi and plo <= hi:
                        self.error(r.loc, "E-CASE-OVERLAP",
                                   f"range {lo}..{hi} overlaps {plo}..{phi}")
                        break
                covered.append((lo, hi))
            self.check_seq(cl.body, Scope(scope), ctx)

    def check_assign(self, st, scope, ctx):
        tty = self.check_designator(st.target, scope, ctx, assignable=True)
        vty = self.check_expr(st.value, scope, ctx)
        self.warn_const(st.value, scope)
        if isinstance(tty, ty.PortType) or isinstance(vty, ty.PortType):
            self.error(st.loc, "E-PORT-ASSIGN", "ports cannot be assigned or copied")
            st.narrow_id = None
            st.target_ty = ty.Unknown()
            return
        st.target_ty = tty
        st.narrow_id = self.bind_value(st.value, vty, tty, st.loc, scope)

    def bind_value(self, src_expr, src_ty, dst_ty, loc, scope):
        """Check a value binding (store, argument, return); returns the
        narrowing check site id, or None when no runtime check is needed."""
        if isinstance(src_ty, ty.Unknown) or isinstance(dst_ty, ty.Unknown):
            return None
        if isinstance(dst_ty, ty.Numeric) and isinstance(src_ty, ty.Numeric):
            if dst_ty == src_ty:
                return None
            folded = self.try_fold(src_expr, scope)
            if folded is not None:
                if not ty.fits(folded[0], dst_ty):
                    self.error(loc, "E-RANGE", f"value {folded[0]} does not fit {dst_ty}")
                return None
            return self.new_site(arith.NARROWING, loc)
        if src_ty != dst_ty:
            self.error(loc, "E-TYPE", f"cannot assign {src_ty} to {dst_ty}")
        return None

    def check_return(self, st, scope, ctx):
        proc = ctx.proc
        if proc is None:
            if st.value is not None:
                self.error(st.loc, "E-RETURN", "a module body cannot return a value")
                self.check_expr(st.value, scope, ctx)
            st.narrow_id = None
            return
        if proc.ret is None:
            if st.value is not None:
                self.error(st.loc, "E-RETURN", f"{proc.name} does not return a value")
                self.check_expr(st.value, scope, ctx)
            st.narrow_id = None
            return
        if st.value is None:
            code = "E-CONTRACT-RETURN" if proc.is_contract else "E-RETURN"
            self.error(st.loc, code, f"{proc.name} must return a value")
            st.narrow_id = None
            return
        vty = self.check_expr(st.value, scope, ctx)
        self.warn_const(st.value, scope)
        st.ret_ty = proc.ret
        if proc.is_contract:
            if not isinstance(vty, (ty.Boolean, ty.Unknown)):
                self.error(st.loc, "E-CONTRACT-RETURN", "a contract must return a boolean")
            st.narrow_id = None
            return
        st.narrow_id = self.bind_value(st.value, vty, proc.ret, st.loc, scope)

    def check_local(self, st, scope, ctx):
        for d in st.decls:
            ity = self.check_expr(d.init, scope, ctx)
            self.warn_const(d.init, scope)
            declared = self.resolve_type(d.type) if d.type is not None else None
            if isinstance(ity, ty.PortType) or isinstance(declared, ty.PortType):
                self.error(d.loc, "E-PORT-ASSIGN", "ports cannot be copied into locals")
                ity = ty.Unknown()
            d.narrow_id = None
            if declared is not None:
                d.narrow_id = self.bind_value(d.init, ity, declared, d.loc, scope)
                d.ty = declared
            else:
                d.ty = ity
            self.declare_scoped(d, scope, ctx)
            scope.define(d.name, Binding("local", slot=d.slot, ty=d.ty))

    def declare_scoped(self, d, scope, ctx):
        """Shared LOCAL/EXTERNAL declaration bookkeeping: shadow warning,
        same-block redefinition error, slot assignment."""
        if d.name in scope.names:
            self.error(d.loc, "E-REDEFINED", f"{d.name} is already defined in this block")
        elif (outer := scope.lookup(d.name)) is not None and outer.kind in (
                "local", "param", "modvar", "external"):
            self.warn(d.loc, "W-SHADOW", f"{d.name} shadows a variable in an outer scope")
        d.slot = ctx.new_slot(d.name)
        return d.slot

    def check_external(self, st, scope, ctx):
        for d in st.decls:
            pty = self.resolve_type(d.type)
            if not isinstance(pty, ty.Pointer):
                self.error(d.loc, "E-EXTERNAL-TYPE", "EXTERNAL variables must have a pointer type")
                pty = ty.Pointer(True, ty.U32)
            elif not isinstance(pty.pointee, (ty.Numeric, ty.Boolean)):
                self.error(d.loc, "E-EXTERNAL-TYPE", "EXTERNAL pointers must point at a numeric type")
                pty = ty.Pointer(pty.volatile, ty.U32)
            d.addr_value = 0
            try:
                d.addr_value, _ = self.fold_in_scope(d.addr, scope)
            except FoldError as fe:
                self.error(fe.loc, "E-CONST", f"EXTERNAL address must be constant: {fe.message}")
            if not 0 <= d.addr_value <= 0xFFFFFFFF:
                self.error(d.loc, "E-RANGE", f"address {d.addr_value} does not fit u32")
            d.ty = pty
            self.declare_scoped(d, scope, ctx)
            scope.define(d.name, Binding("external", slot=d.slot, ty=pty, addr=d.addr_value))

    # -- expressions

    def check_expr(self, e, scope, ctx):
        t = self._expr(e, scope, ctx)
        e.ty = t
        return t

    def _expr(self, e, scope, ctx):
        if isinstance(e, ast.IntLit):
            return ty.S32 if e.value <= 0x7FFFFFFF else ty.U32
        if isinstance(e, ast.BoolLit):
            return ty.BOOL
        if isinstance(e, (ast.Name, ast.FieldSel, ast.IndexSel, ast.Deref, ast.Call)):
            return self.check_designator(e, scope, ctx, assignable=False)
        if isinstance(e, ast.BinOp):
            lt = self.check_expr(e.lhs, scope, ctx)
            rt = self.check_expr(e.rhs, scope, ctx)
            if e.op in ("AND", "OR"):
                if not all(isinstance(t, (ty.Boolean, ty.Unknown)) for t in (lt, rt)):
                    self.error(e.loc, "E-BOOL-OP", f"{e.op} needs boolean operands")
                return ty.BOOL
            if e.op in ("=", "#", "<", ">", "<=", ">="):
                if not all(isinstance(t, (ty.Numeric, ty.Unknown)) for t in (lt, rt)):
                    self.error(e.loc, "E-CMP-OP", "comparisons need numeric operands")
                return ty.BOOL
            if not all(isinstance(t, (ty.Numeric, ty.Unknown)) for t in (lt, rt)):
                self.error(e.loc, "E-NUM-OP", f"{e.op} needs numeric operands")
                return ty.Unknown()
            if isinstance(lt, ty.Unknown) or isinstance(rt, ty.Unknown):
                return ty.Unknown()
            if e.op in ("/", "DIV", "MOD"):
                folded = self.try_fold(e.rhs, scope)
                e.check_id = None if (folded is not None and folded[0] != 0) \
                    else self.new_site(arith.DIV_ZERO, e.loc)
                return ty.widen(lt, rt)
            if e.op in ("<<", ">>"):
                folded = self.try_fold(e.rhs, scope)
                e.check_id = None if (folded is not None and 0 <= folded[0] < 32) \
                    else self.new_site(arith.SHIFT_RANGE, e.loc)
                return ty.U32
            if e.op in ("/\\", "\\/", "><"):
                return ty.U32
            return ty.widen(lt, rt)
        if isinstance(e, ast.UnOp):
            t = self.check_expr(e.operand, scope, ctx)
            if e.op == "NOT":
                if not isinstance(t, (ty.Boolean, ty.Unknown)):
                    self.error(e.loc, "E-BOOL-OP", "NOT needs a boolean operand")
                return ty.BOOL
            if not isinstance(t, (ty.Numeric, ty.Unknown)):
                self.error(e.loc, "E-NUM-OP", f"unary {e.op} needs a numeric operand")
                return ty.Unknown()
            return ty.U32 if e.op == "~" else t
        if isinstance(e, ast.SizeOf):
            t = self.resolve_type(e.type)
            if isinstance(t, ty.PortType):
                self.error(e.loc, "E-SIZE-PORT", "SIZE is not defined for ports")
                e.size_value = 0
            elif isinstance(t, ty.Unknown):
                e.size_value = 0
            else:
                e.size_value = ty.size_of(t)
            return ty.S32
        raise TypeError(f"not an expression node: {e!r}")

    def check_designator(self, e, scope, ctx, assignable, data_ok=False):
        t = self._designator(e, scope, ctx, assignable, data_ok)
        e.ty = t
        return t

    def _designator(self, e, scope, ctx, assignable, data_ok):
        if isinstance(e, ast.Name):
            b = scope.lookup(e.ident)
            if b is None:
                b = self.builtin_binding(e.ident)
            e.binding = b
            if b is None:
                self.error(e.loc, "E-UNDEFINED", f"{e.ident} is not defined")
                return ty.Unknown()
            if b.kind in ("local", "param"):
                return b.ty
            if b.kind == "modvar":
                return b.var.type
            if b.kind == "external":
                if assignable:
                    self.error(e.loc, "E-ASSIGN-TARGET", "EXTERNAL bindings cannot be reassigned")
                return b.ty
            if b.kind in ("const", "dynconst"):
                if assignable:
                    self.error(e.loc, "E-ASSIGN-TARGET", f"{e.ident} is a constant")
                return b.ty if b.kind == "const" else ty.U32
            if b.kind == "import":
                self.error(e.loc, "E-TYPE", f"module alias {e.ident} is not a value")
                return ty.Unknown()
            self.error(e.loc, "E-TYPE", f"{e.ident} is not a variable")
            return ty.Unknown()
        if isinstance(e, ast.FieldSel):
            if isinstance(e.base, ast.Name):
                b = scope.lookup(e.base.ident)
                if b is not None and b.kind == "import":
                    e.base.binding = b
                    e.base.ty = ty.Unknown()
                    return self.import_member(e, b.info, assignable)
            bty = self.check_designator(e.base, scope, ctx, assignable)
            if isinstance(bty, ty.Unknown):
                return bty
            if not isinstance(bty, ty.Record):
                self.error(e.loc, "E-TYPE", f"{bty} has no fields")
                return ty.Unknown()
            for name, fty in bty.fields:
                if name == e.field:
                    e.sel = ("field", e.field)
                    return fty
            self.error(e.loc, "E-UNDEFINED", f"record has no field {e.field}")
            return ty.Unknown()
        if isinstance(e, ast.IndexSel):
            bty = self.check_designator(e.base, scope, ctx, assignable, data_ok=True)
            ity = self.check_expr(e.index, scope, ctx)
            if not isinstance(ity, (ty.Numeric, ty.Unknown)):
                self.error(e.index.loc, "E-TYPE", "array index must be numeric")
            if isinstance(bty, ty.Unknown):
                return bty
            if not isinstance(bty, ty.Array):
                self.error(e.loc, "E-TYPE", f"{bty} cannot be indexed")
                return ty.Unknown()
            e.length = bty.length
            folded = self.try_fold(e.index, scope)
            e.check_id = None if (folded is not None and 0 <= folded[0] < bty.length) \
                else self.new_site(arith.ARRAY_BOUNDS, e.loc)
            return bty.element
        if isinstance(e, ast.Deref):
            bty = self.check_designator(e.base, scope, ctx, assignable=False)
            if isinstance(bty, ty.Unknown):
                return bty
            if not isinstance(bty, ty.Pointer):
                self.error(e.loc, "E-TYPE", f"{bty} cannot be dereferenced")
                return ty.Unknown()
            if not isinstance(bty.pointee, (ty.Numeric, ty.Boolean, ty.Unknown)):
                self.error(e.loc, "E-TYPE",
                           "only pointers to numeric or boolean values can be dereferenced")
                return ty.Unknown()
            e.check_id = self.new_site(arith.MMIO_TRAP, e.loc)
            return bty.pointee
        if isinstance(e, ast.Call):
            if assignable and not data_ok:
                self.error(e.loc, "E-ASSIGN-TARGET", "a call is not assignable")
            return self.check_call(e, scope, ctx, data_ok=data_ok)
        raise TypeError(f"not a designator node: {e!r}")

    def import_member(self, e, imp, assignable):
        target = self.module_by_name.get(imp.module)
        if target is not None:
            v = target.vars.get(e.field)
            if v is None:
                self.error(e.loc, "E-UNDEFINED", f"module {imp.module} has no variable {e.field}")
                return ty.Unknown()
            if not v.exported:
                self.error(e.loc, "E-NOT-EXPORTED", f"{imp.module}.{e.field} is not exported")
                return ty.Unknown()
            e.sel = ("import_var", imp, e.field, v.type)
            return v.type
        sig = self.known.get(imp.module)
        if sig is not None:
            for name, vty in sig.exports:
                if name == e.field:
                    e.sel = ("import_var", imp, e.field, vty)
                    return vty
            self.error(e.loc, "E-NOT-EXPORTED", f"{imp.module}.{e.field} is not exported")
            return ty.Unknown()
        # unknown module in restricted mode
        e.sel = ("import_var", imp, e.field, ty.Unknown())
        return ty.Unknown()

    def builtin_binding(self, name):
        canon = name.upper() if name.islower() else name
        if canon in BUILTIN_PROC_NAMES and (name == canon or name.islower()):
            return Binding("builtin", name=canon)
        return None

    # -- calls

    def check_call(self, call, scope, ctx, as_stmt=False, data_ok=False):
        t = self._call(call, scope, ctx, as_stmt, data_ok)
        call.ty = t
        return t

    def _call(self, call, scope, ctx, as_stmt, data_ok):
        b = scope.lookup(call.name)
        if b is None:
            b = self.builtin_binding(call.name)
        if b is None:
            self.error(call.loc, "E-UNDEFINED", f"{call.name} is not defined")
            for a in call.args:
                self.check_expr(a, scope, ctx)
            call.callee = None
            return ty.Unknown()
        if b.kind == "proc":
            return self.check_user_call(call, b.info, scope, ctx, as_stmt)
        if b.kind == "builtin":
            return self.check_builtin_call(call, b.name, scope, ctx, as_stmt, data_ok)
        self.error(call.loc, "E-TYPE", f"{call.name} is not callable")
        for a in call.args:
            self.check_expr(a, scope, ctx)
        call.callee = None
        return ty.Unknown()

    def check_user_call(self, call, info, scope, ctx, as_stmt=False):
        call.callee = ("proc", info)
        ctx.add_callee(info.qual)
        if info.ret is None and not as_stmt:
            self.error(call.loc, "E-TYPE", f"{info.name} does not return a value")
        if len(call.args) != len(info.params):
            self.error(call.loc, "E-CALL-ARGS",
                       f"{info.name} needs {len(info.params)} arguments, got {len(call.args)}")
            for a in call.args:
                self.check_expr(a, scope, ctx)
            return info.ret if info.ret is not None else ty.Unknown()
        call.arg_narrows = []
        for a, (pname, pty, is_var) in zip(call.args, info.params):
            if is_var:
                aty = self.check_designator(a, scope, ctx, assignable=True)
                if not isinstance(aty, ty.Unknown) and not isinstance(pty, ty.Unknown) and aty != pty:
                    self.error(a.loc, "E-TYPE",
                               f"VAR argument {pname} must be exactly {pty}, got {aty}")
                call.arg_narrows.append(None)
            else:
                aty = self.check_expr(a, scope, ctx)
                if isinstance(aty, ty.PortType):
                    self.error(a.loc, "E-PORT-ASSIGN", "ports may only be passed as VAR arguments")
                    call.arg_narrows.append(None)
                else:
                    call.arg_narrows.append(self.bind_value(a, aty, pty, a.loc, scope))
        return info.ret if info.ret is not None else ty.Unknown()

    def check_builtin_call(self, call, name, scope, ctx, as_stmt, data_ok):
        call.callee = ("builtin", name)
        args = call.args
        if name in ("NEW", "DISPOSE", "CLONE", "EXTEND", "INC", "DEC") and not as_stmt:
            self.error(call.loc, "E-TYPE", f"{name} does not return a value")

        def arity(n):
            if len(args) != n:
                self.error(call.loc, "E-CALL-ARGS", f"{name} needs {n} arguments, got {len(args)}")
                return False
            return True

        def port_arg(a):
            t = self.check_designator(a, scope, ctx, assignable=True)
            if not isinstance(t, (ty.PortType, ty.Unknown)):
                self.error(a.loc, "E-TYPE", f"{name} needs a port, got {t}")

        def num_arg(a):
            t = self.check_expr(a, scope, ctx)
            if not isinstance(t, (ty.Numeric, ty.Unknown)):
                self.error(a.loc, "E-TYPE", f"{name} needs a numeric argument, got {t}")
            return t

        if name == "NEW":
            if arity(2):
                port_arg(args[0])
                num_arg(args[1])
            call.check_id = self.new_site(arith.NEW_ON_FULL, call.loc)
            return ty.Unknown()
        if name == "DISPOSE":
            if arity(1):
                port_arg(args[0])
            return ty.Unknown()
        if name == "SEND":
            if arity(2):
                port_arg(args[0])
                port_arg(args[1])
            return ty.BOOL
        if name == "CLONE":
            if arity(2):
                port_arg(args[0])
                port_arg(args[1])
            call.check_id = self.new_site(arith.NEW_ON_FULL, call.loc)
            return ty.Unknown()
        if name == "EXTEND":
            if arity(2):
                port_arg(args[0])
                num_arg(args[1])
            call.check_id = self.new_site(arith.EMPTY_PORT, call.loc)
            return ty.Unknown()
        if name in ("INC", "DEC"):
            if arity(1):
                t = self.check_designator(args[0], scope, ctx, assignable=True)
                if not isinstance(t, (ty.Numeric, ty.Unknown)):
                    self.error(args[0].loc, "E-TYPE", f"{name} needs a numeric variable")
            return ty.Unknown()
        if name == "COUNT":
            if arity(1):
                port_arg(args[0])
            call.check_id = self.new_site(arith.EMPTY_PORT, call.loc)
            return ty.S32
        if name == "DATA":
            if arity(1):
                port_arg(args[0])
            call.check_id = self.new_site(arith.EMPTY_PORT, call.loc)
            if not data_ok:
                self.error(call.loc, "E-DATA-BYTE",
                           "DATA gives byte-level access only; index it directly")
            return ty.DATA_ARRAY
        if name == "PENDING":
            if arity(1):
                port_arg(args[0])
            return ty.BOOL
        if name == "ADR":
            if arity(1):
                t = self.check_designator(args[0], scope, ctx, assignable=True)
                if isinstance(t, ty.PortType):
                    self.error(args[0].loc, "E-PORT-NESTED", "pointers to ports are not allowed")
                    t = ty.Unknown()
                return ty.Pointer(False, t)
            return ty.Unknown()
        if name in ("MIN", "MAX"):
            if arity(2):
                num_arg(args[0])
                num_arg(args[1])
            return ty.S32
        raise AssertionError(f"unhandled builtin {name}")

    # -- folding inside a scope

    def fold_in_scope(self, e, scope):
        def lookup(name):
            b = scope.lookup(name)
            if b is not None and b.kind == "const":
                return (b.value, b.ty)
            return None
        return _fold(e, lookup, self.types)

    def try_fold(self, e, scope):
        try:
            return self.fold_in_scope(e, scope)
        except FoldError:
            return None

    def warn_const(self, e, scope):
        """Warn on the outermost boolean/comparison operator folding constant."""
        if isinstance(e, ast.BinOp) and e.op in ("AND", "OR", "=", "#", "<", ">", "<=", ">=") \
                or isinstance(e, ast.UnOp) and e.op == "NOT":
            if self.try_fold(e, scope) is not None:
                self.warn(e.loc, "W-CONST", "expression always yields the same result")
                return
        for child in _expr_children(e):
            self.warn_const(child, scope)


def _expr_children(e):
    if isinstance(e, ast.BinOp):
        return (e.lhs, e.rhs)
    if isinstance(e, ast.UnOp):
        return (e.operand,)
    if isinstance(e, ast.FieldSel):
        return (e.base,)
    if isinstance(e, ast.IndexSel):
        return (e.base, e.index)
    if isinstance(e, ast.Deref):
        return (e.base,)
    if isinstance(e, ast.Call):
        return tuple(e.args)
    return ()


def analyze_unit(unit, known_signatures=None, restricted=False):
    """Type-check a merged compilation unit; returns a Program with
    diagnostics, annotations, module infos and check sites."""
    return Analyzer(unit, known_signatures, restricted).run()


# --- bounded execution -------------------------------------------------------

def check_bounded_execution(program):
    """Enforce the static termination rules and compute per-module step
    bounds: no recursion in the call graph, constant non-negative loop
    counts, and no NEXT inside a loop within its SELECT clause.

    Appends diagnostics to the program and returns the new ones.
    """
    diags = []

    def err(loc, code, msg):
        d = Diagnostic(ERROR, code, loc, msg)
        diags.append(d)

    # (a) call graph cycles
    table = {}
    for m in program.modules:
        table[f"<body {m.name}>"] = (m.body_callees, m.node.loc)
    for info in list(program.procs.values()) + list(program.contracts.values()):
        table[info.qual] = (info.callees, info.node.loc)
    for m in program.modules:
        for info in m.procs.values():
            table[info.qual] = (info.callees, info.node.loc)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {k: WHITE for k in table}
    stack = []
    cyclic = set()

    def visit(k):
        color[k] = GRAY
        stack.append(k)
        for callee in sorted(table[k][0]):
            if callee not in table:
                continue
            if color[callee] == GRAY:
                cycle = stack[stack.index(callee):]
                err(table[callee][1], "E-RECURSION",
                    "recursive call cycle: " + " -> ".join(cycle + [callee]))
                cyclic.update(cycle)
            elif color[callee] == WHITE:
                visit(callee)
        stack.pop()
        color[k] = BLACK

    for k in sorted(table):
        if color[k] == WHITE:
            visit(k)

    # (b) loop counts, (c) NEXT inside loops; walk every body
    def walk_stmts(seq, loop_depth, in_select_clause):
        for st in seq.stmts:
            if isinstance(st, ast.Loop):
                if getattr(st, "count_value", None) is None or st.count_value < 0:
                    err(st.loc, "E-LOOP-COUNT",
                        "loop count must be a compile-time constant >= 0")
                walk_stmts(st.body, loop_depth + 1, in_select_clause)
            elif isinstance(st, ast.If):
                walk_stmts(st.then, loop_depth, in_select_clause)
                for _, body in st.elifs:
                    walk_stmts(body, loop_depth, in_select_clause)
                if st.orelse is not None:
                    walk_stmts(st.orelse, loop_depth, in_select_clause)
            elif isinstance(st, ast.Case):
                for cl in st.clauses:
                    walk_stmts(cl.body, loop_depth, in_select_clause)
                if st.orelse is not None:
                    walk_stmts(st.orelse, loop_depth, in_select_clause)
            elif isinstance(st, ast.Select):
                for cl in st.clauses:
                    walk_stmts(cl.body, 0, True)
            elif isinstance(st, ast.Next):
                if in_select_clause and loop_depth > 0:
                    err(st.loc, "E-NEXT-IN-LOOP", "NEXT may not exit a looping construct")

    for m in program.modules:
        walk_stmts(m.node.body, 0, False)
        for info in m.procs.values():
            walk_stmts(info.node.body, 0, False)
    for info in list(program.procs.values()) + list(program.contracts.values()):
        walk_stmts(info.node.body, 0, False)

    # step bounds (only meaningful once the rules above hold)
    if not diags and not program.errors():
        memo = {}

        def proc_cost(qual):
            if qual in memo:
                return memo[qual]
            info = None
            for m in program.modules:
                for p in m.procs.values():
                    if p.qual == qual:
                        info = p
            info = info or program.procs.get(qual) or program.contracts.get(qual)
            if info is None:
                return 0
            memo[qual] = 0  # acyclicity was verified above
            c = seq_cost(info.node.body)
            memo[qual] = c
            info.cost = c
            return c

        def expr_cost(e):
            c = 0
            if isinstance(e, ast.Call) and getattr(e, "callee", None) \
                    and e.callee[0] == "proc":
                c += proc_cost(e.callee[1].qual)
            for child in _expr_children(e):
                c += expr_cost(child)
            return c

        def assert_cost(a):
            c = 1
            if getattr(a, "contract", None) is not None:
                c += proc_cost(a.contract.qual)
            if isinstance(a, ast.Call):
                c += sum(expr_cost(x) for x in a.args)
            return c

        def seq_cost(seq):
            c = 0
            start = end = 0
            for chk in seq.checks:
                cost = sum(assert_cost(a) for a in chk.asserts)
                if chk.kind in ("require", "invariant"):
                    start += cost
                if chk.kind in ("provide", "invariant"):
                    end += cost
            c += start + end
            for st in seq.stmts:
                c += stmt_cost(st)
            return c

        def stmt_cost(st):
            if isinstance(st, ast.Assign):
                return 1 + expr_cost(st.target) + expr_cost(st.value)
            if isinstance(st, ast.CallStmt):
                return 1 + expr_cost(st.call)
            if isinstance(st, ast.Return):
                return 1 + (expr_cost(st.value) if st.value else 0)
            if isinstance(st, ast.If):
                c = 1 + expr_cost(st.cond) + sum(expr_cost(c0) for c0, _ in st.elifs)
                branches = [seq_cost(st.then)] + [seq_cost(b) for _, b in st.elifs]
                branches.append(seq_cost(st.orelse) if st.orelse else 0)
                return c + max(branches)
            if isinstance(st, ast.Loop):
                per = (expr_cost(st.guard) if st.guard else 0) + seq_cost(st.body)
                return 1 + st.count_value * per
            if isinstance(st, (ast.Case, ast.Select)):
                subj = st.subject
                c = 1 + expr_cost(subj)
                branches = [seq_cost(cl.body) for cl in st.clauses]
                if isinstance(st, ast.Case) and st.orelse is not None:
                    branches.append(seq_cost(st.orelse))
                branches.append(0)
                return c + max(branches)
            if isinstance(st, ast.Local):
                return 1 + sum(expr_cost(d.init) for d in st.decls)
            if isinstance(st, ast.Log):
                return 1 + (expr_cost(st.value) if st.value else 0)
            return 1  # next, external, statedef, import

        for m in program.modules:
            m.bound = seq_cost(m.node.body)

    program.diagnostics.extend(diags)
    program.diagnostics[:] = sorted_diags(program.diagnostics)
    return diags


# --- message flow -------------------------------------------------------------

def message_flow(program):
    """Static message-flow edges: one edge per SEND/CLONE occurrence reachable
    from a module, resolved per instance.  Destinations naming an imported
    module's exported port become cross edges; everything else is a self edge."""
    edges = set()

    # collect SEND/CLONE destination designators per callable body
    def collect_sends(seq, out):
        def visit_expr(e):
            if isinstance(e, ast.Call):
                if getattr(e, "callee", None) and e.callee == ("builtin", "SEND") and len(e.args) == 2:
                    out.append(e.args[1])
                if getattr(e, "callee", None) and e.callee == ("builtin", "CLONE") and len(e.args) == 2:
                    out.append(e.args[1])
                for a in e.args:
                    visit_expr(a)
            else:
                for child in _expr_children(e):
                    visit_expr(child)

        def visit_seq(s):
            for chk in s.checks:
                for a in chk.asserts:
                    visit_expr(a)
            for st in s.stmts:
                for e in _stmt_exprs(st):
                    visit_expr(e)
                for sub in _stmt_seqs(st):
                    visit_seq(sub)

        visit_seq(seq)

    body_sends = {}
    body_callees = {}
    for name, info in list(program.procs.items()) + list(program.contracts.items()):
        sends = []
        collect_sends(info.node.body, sends)
        body_sends[info.qual] = sends
        body_callees[info.qual] = info.callees
    for m in program.modules:
        for p in m.procs.values():
            sends = []
            collect_sends(p.node.body, sends)
            body_sends[p.qual] = sends
            body_callees[p.qual] = p.callees
        sends = []
        collect_sends(m.node.body, sends)
        body_sends[f"<body {m.name}>"] = sends
        body_callees[f"<body {m.name}>"] = m.body_callees

    def closure(start):
        seen = set()
        work = [start]
        while work:
            k = work.pop()
            if k in seen:
                continue
            seen.add(k)
            work.extend(body_callees.get(k, ()))
        return seen

    for m in program.modules:
        dsts = []
        for k in sorted(closure(f"<body {m.name}>")):
            dsts.extend(body_sends.get(k, ()))
        for inst in range(m.instances):
            src = instance_label(m.name, inst, m.multi)
            for d in dsts:
                sel = getattr(d, "sel", None)
                if sel is not None and sel[0] == "import_var":
                    imp, member = sel[1], sel[2]
                    target = program.module_by_name.get(imp.module)
                    tmulti = target.multi if target else (
                        program.known[imp.module].instances > 1 if imp.module in program.known else False)
                    if imp.selector == "*":
                        tinst = inst
                    elif imp.selector is None:
                        tinst = 0
                    else:
                        tinst = imp.selector
                    edges.add(FlowEdge(src, instance_label(imp.module, tinst, tmulti), member))
                else:
                    edges.add(FlowEdge(src, src, _designator_root(d)))
    return edges


def _designator_root(d):
    if isinstance(d, ast.Name):
        return d.ident
    if isinstance(d, (ast.FieldSel, ast.IndexSel, ast.Deref)):
        return _designator_root(d.base)
    if isinstance(d, ast.Call):
        return d.name
    return "?"


def _stmt_exprs(st):
    if isinstance(st, ast.Assign):
        return [st.target, st.value]
    if isinstance(st, ast.CallStmt):
        return [st.call]
    if isinstance(st, ast.Return):
        return [st.value] if st.value is not None else []
    if isinstance(st, ast.If):
        return [st.cond] + [c for c, _ in st.elifs]
    if isinstance(st, ast.Loop):
        return ([st.guard] if st.guard is not None else []) + [st.count]
    if isinstance(st, (ast.Case, ast.Select)):
        return [st.subject]
    if isinstance(st, ast.Next):
        return [st.value]
    if isinstance(st, ast.Local):
        return [d.init for d in st.decls]
    if isinstance(st, ast.Log):
        return [st.value] if st.value is not None else []
    return []


def _stmt_seqs(st):
    if isinstance(st, ast.If):
        out = [st.then] + [b for _, b in st.elifs]
        if st.orelse is not None:
            out.append(st.orelse)
        return out
    if isinstance(st, ast.Loop):
        return [st.body]
    if isinstance(st, (ast.Case, ast.Select)):
        out = [cl.body for cl in st.clauses]
        if isinstance(st, ast.Case) and st.orelse is not None:
            out.append(st.orelse)
        return out
    return []
