"""Deterministic interpreter: a cyclic executive over module instances.

Each cycle runs every module instance to completion in module-id order.
Dynamic checks raise Fault; in debug mode a fault aborts the rest of the
module body for that cycle, is recorded in the transcript, and execution
resumes with the next module.  Pool exhaustion is fatal and stops the run.

Transcript line formats (bit-exact, shared with the C runtime):
    LOG <module> <instance> "<text>"[ <value>]
    FAULT <kind> <check-id> <module> <instance> <file>:<line>
"""

from dataclasses import dataclass, field

from . import arith, ast, machine
from . import types as ty
from .machine import BLOCK_SIZE, MachineFault, Mmio, BlockPool, PortState


class LoadError(Exception):
    pass


class Fault(Exception):
    def __init__(self, kind, check_id, loc):
        super().__init__(f"{kind} at {loc}")
        self.kind = kind
        self.check_id = check_id or 0
        self.loc = loc


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Next(Exception):
    def __init__(self, value):
        self.value = value


@dataclass
class RunConfig:
    pool_capacity: int = 32
    mmio_script: dict = field(default_factory=dict)
    strict_mmio: bool = False
    checks_enabled: bool = True
    audit: bool = False


def parse_config(text):
    """Parse the plain-text run configuration: `pool <n>` and
    `mmio <hex-addr> <v1> <v2> ...` lines, plus the `mmio-strict` and
    `nocheck` switches."""
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "pool" and len(parts) == 2:
                cfg.pool_capacity = int(parts[1])
            elif parts[0] == "mmio" and len(parts) >= 2:
                addr = int(parts[1], 16)
                cfg.mmio_script[addr] = [int(v, 0) for v in parts[2:]]
            elif parts[0] == "mmio-strict" and len(parts) == 1:
                cfg.strict_mmio = True
            elif parts[0] == "nocheck" and len(parts) == 1:
                cfg.checks_enabled = False
            else:
                raise ValueError
        except ValueError:
            raise LoadError(f"bad config line {lineno}: {raw!r}") from None
    return cfg


@dataclass
class InstanceState:
    mod: object
    module_id: int
    instance: int
    data: dict

    @property
    def label(self):
        return f"{self.mod.name}{self.instance}" if self.mod.multi else self.mod.name


class Image:
    """A loaded program: schedule, pool, MMIO map and transcript sink."""

    def __init__(self, program, config):
        self.program = program
        self.config = config
        self.pool = BlockPool(config.pool_capacity)
        self.mmio = Mmio(config.mmio_script, config.strict_mmio)
        self.transcript = []
        self.faults = []
        self.cycle = 0
        self.step_stats = {}
        self.instances = []
        self._by_key = {}
        for mod in program.modules:
            for k in range(mod.instances):
                inst = InstanceState(mod, mod.base_id + k, k,
                                     {v.name: zero_value(v.type) for v in mod.vars.values()})
                self.instances.append(inst)
                self._by_key[(mod.name, k)] = inst

    def instance_of(self, module_name, instance):
        return self._by_key[(module_name, instance)]


def zero_value(t):
    if isinstance(t, ty.Numeric):
        return 0
    if isinstance(t, ty.Boolean):
        return False
    if isinstance(t, ty.PortType):
        return PortState()
    if isinstance(t, ty.Pointer):
        return ("mmio", 0)
    if isinstance(t, ty.Array):
        return [zero_value(t.element) for _ in range(t.length)]
    if isinstance(t, ty.Record):
        return {name: zero_value(ft) for name, ft in t.fields}
    raise TypeError(f"no zero value for {t}")


def copy_value(t, v):
    if isinstance(t, ty.Array):
        return [copy_value(t.element, x) for x in v]
    if isinstance(t, ty.Record):
        return {name: copy_value(ft, v[name]) for name, ft in t.fields}
    return v


def load_image(program, config=None):
    """Build a runnable image: schedule in module-id order, zeroed module
    data, a fresh pool (default 32 blocks) and the scripted MMIO map."""
    config = config or RunConfig()
    if config.pool_capacity < 1:
        raise LoadError("pool capacity must be at least 1")
    if program.errors():
        raise LoadError("program has errors; refusing to load")
    for mod in program.modules:
        if mod.bound is None:
            raise LoadError(f"module {mod.name} has no static step bound "
                            "(run check_bounded_execution first)")
        for imp in mod.imports.values():
            if imp.module not in program.module_by_name:
                raise LoadError(f"module {imp.module} has no body in this program")
    return Image(program, config)


class _Stop(Exception):
    """Fatal fault: the run ends."""


class Interp:
    def __init__(self, image):
        self.image = image
        self.program = image.program
        self.checks = image.config.checks_enabled
        self.auditing = image.config.audit
        self.inst = None
        self.steps = 0
        self.proc_stack = []

    # -- driving ------------------------------------------------------------

    def run_cycles(self, n):
        try:
            for _ in range(n):
                self.image.cycle += 1
                for inst in self.image.instances:
                    self.run_body(inst)
        except _Stop:
            pass
        return self.image.transcript

    def run_body(self, inst):
        self.inst = inst
        self.steps = 0
        fatal = None
        try:
            self.exec_seq(inst.mod.node.body, {})
        except _Return:
            pass
        except Fault as f:
            self.record_fault(f)
            if f.kind == arith.POOL_EXHAUSTED:
                fatal = f
        stats = self.image.step_stats
        stats[inst.mod.name] = max(stats.get(inst.mod.name, 0), self.steps)
        if self.auditing:
            self.audit()
        if fatal is not None:
            raise _Stop()

    def record_fault(self, f):
        self.image.faults.append(f)
        line = (f"FAULT {f.kind} {f.check_id} {self.inst.mod.name} "
                f"{self.inst.instance} {f.loc.file}:{f.loc.line}")
        self.image.transcript.append(line)

    def audit(self):
        # ownership: every allocated block is referenced by exactly one port
        seen = set()
        for inst in self.image.instances:
            for v in inst.data.values():
                if isinstance(v, PortState) and v.block is not None:
                    assert id(v.block) not in seen, "block aliased by two ports"
                    seen.add(id(v.block))
        pool = self.image.pool
        assert pool.conserved(), "pool conservation violated"
        assert len(seen) == pool.allocated, "allocated blocks not all port-owned"

    # -- faults ---------------------------------------------------------------

    def fault(self, kind, node):
        raise Fault(kind, getattr(node, "check_id", None), node.loc)

    # -- statement sequences ---------------------------------------------------

    def exec_seq(self, seq, frame):
        if self.checks:
            self.run_asserts(seq.checks, ("require", "invariant"), frame)
        try:
            for st in seq.stmts:
                self.exec_stmt(st, frame)
        except (_Return, _Next):
            if self.checks:
                self.run_asserts(seq.checks, ("provide", "invariant"), frame)
            raise
        if self.checks:
            self.run_asserts(seq.checks, ("provide", "invariant"), frame)

    def run_asserts(self, checks, kinds, frame):
        for chk in checks:
            if chk.kind not in kinds:
                continue
            for a in chk.asserts:
                args = a.args if isinstance(a, ast.Call) else []
                ok = self.call_proc(a.contract, args,
                                    getattr(a, "arg_narrows", [None] * len(args)), frame)
                if not ok:
                    raise Fault(arith.CONTRACT_FAIL, a.check_id, a.loc)

    def exec_stmt(self, st, frame):
        self.steps += 1
        if self.auditing:
            self.audit()
        if isinstance(st, ast.Assign):
            lv = self.lvalue(st.target, frame)
            v = self.eval(st.value, frame)
            v = self.narrow(v, st.target_ty, st.narrow_id, st)
            self.store(lv, v, st)
        elif isinstance(st, ast.CallStmt):
            self.eval(st.call, frame)
        elif isinstance(st, ast.Return):
            if st.value is None:
                raise _Return(None)
            v = self.eval(st.value, frame)
            proc = self.proc_stack[-1]
            if isinstance(proc.ret, ty.Numeric):
                v = self.narrow(v, proc.ret, st.narrow_id, st)
            raise _Return(v)
        elif isinstance(st, ast.If):
            if self.eval(st.cond, frame):
                self.exec_seq(st.then, frame)
                return
            for cond, body in st.elifs:
                if self.eval(cond, frame):
                    self.exec_seq(body, frame)
                    return
            if st.orelse is not None:
                self.exec_seq(st.orelse, frame)
        elif isinstance(st, ast.Loop):
            for _ in range(st.count_value):
                if st.guard is not None and not self.eval(st.guard, frame):
                    break
                self.exec_seq(st.body, frame)
        elif isinstance(st, ast.Case):
            v = self.eval(st.subject, frame)
            self.dispatch_clauses(v, st.clauses, st.orelse, frame)
        elif isinstance(st, ast.Select):
            lv = self.lvalue(st.subject, frame)
            snapshot = self.load(lv, st.subject)
            try:
                self.dispatch_clauses(snapshot, st.clauses, None, frame)
            except _Next as nx:
                self.store(lv, ty.wrap_to(nx.value, st.discrim_ty), st)
        elif isinstance(st, ast.Next):
            raise _Next(st.value_folded)
        elif isinstance(st, ast.Local):
            for d in st.decls:
                v = self.eval(d.init, frame)
                if isinstance(d.ty, ty.Numeric):
                    v = self.narrow(v, d.ty, d.narrow_id, d)
                frame[d.slot] = copy_value(d.ty, v)
        elif isinstance(st, ast.External):
            for d in st.decls:
                frame[d.slot] = ("mmio", d.addr_value)
        elif isinstance(st, (ast.StateDef, ast.Import)):
            pass
        elif isinstance(st, ast.Log):
            if st.value is None:
                self.log(st.text, None)
            else:
                self.log(st.text, self.eval(st.value, frame))
        else:
            raise TypeError(f"cannot execute {st!r}")

    def dispatch_clauses(self, v, clauses, orelse, frame):
        for cl in clauses:
            for r in cl.ranges:
                if r.lo_value <= v <= r.hi_value:
                    self.exec_seq(cl.body, frame)
                    return
        if orelse is not None:
            self.exec_seq(orelse, frame)

    def log(self, text, value):
        line = f'LOG {self.inst.mod.name} {self.inst.instance} "{text}"'
        if value is not None:
            line += f" {value}"
        self.image.transcript.append(line)

    # -- values ------------------------------------------------------------------

    def narrow(self, value, target, site_id, node):
        if not isinstance(target, ty.Numeric):
            return value
        if site_id is not None and self.checks and not ty.fits(value, target):
            raise Fault(arith.NARROWING, site_id, node.loc)
        return ty.wrap_to(value, target)

    def eval(self, e, frame):
        if isinstance(e, ast.IntLit):
            return e.value
        if isinstance(e, ast.BoolLit):
            return e.value
        if isinstance(e, ast.SizeOf):
            return e.size_value
        if isinstance(e, ast.BinOp):
            if e.op == "AND":
                return self.eval(e.lhs, frame) and self.eval(e.rhs, frame)
            if e.op == "OR":
                return self.eval(e.lhs, frame) or self.eval(e.rhs, frame)
            lv = self.eval(e.lhs, frame)
            rv = self.eval(e.rhs, frame)
            try:
                v, _ = arith.eval_binop(e.op, (lv, e.lhs.ty), (rv, e.rhs.ty))
            except arith.ArithFault as f:
                if self.checks:
                    self.fault(f.kind, e)
                return False if e.op in ("=", "#", "<", ">", "<=", ">=") else 0
            return bool(v) if e.op in ("=", "#", "<", ">", "<=", ">=") else v
        if isinstance(e, ast.UnOp):
            v = self.eval(e.operand, frame)
            if e.op == "NOT":
                return not v
            r, _ = arith.eval_unop(e.op, (v, e.operand.ty))
            return r
        if isinstance(e, ast.Name):
            b = e.binding
            if b.kind == "const":
                return b.value
            if b.kind == "dynconst":
                return self.inst.module_id if b.which == "module_id" else self.inst.instance
            return self.load(self.lvalue(e, frame), e)
        if isinstance(e, (ast.FieldSel, ast.IndexSel, ast.Deref)):
            return self.load(self.lvalue(e, frame), e)
        if isinstance(e, ast.Call):
            return self.eval_call(e, frame)
        raise TypeError(f"cannot evaluate {e!r}")

    # -- locations -----------------------------------------------------------------

    def lvalue(self, e, frame):
        """Resolve a designator to a location triple (container, key, type);
        container is a dict, list, bytearray or the MMIO marker."""
        if isinstance(e, ast.Name):
            b = e.binding
            if b.kind == "local":
                return (frame, b.slot, b.ty)
            if b.kind == "param":
                bound = frame[b.name]
                if isinstance(bound, tuple) and len(bound) == 2 and bound[0] == "ref":
                    return bound[1]
                return (frame, b.name, b.ty)
            if b.kind == "modvar":
                return (self.inst.data, b.var.name, b.var.type)
            if b.kind == "external":
                return (frame, b.slot, b.ty)
            raise TypeError(f"{e.ident} is not a location")
        if isinstance(e, ast.FieldSel):
            sel = e.sel
            if sel[0] == "import_var":
                imp, member, mty = sel[1], sel[2], sel[3]
                target = self.resolve_instance(imp)
                return (target.data, member, mty)
            base = self.load(self.lvalue(e.base, frame), e.base)
            return (base, sel[1], e.ty)
        if isinstance(e, ast.IndexSel):
            if isinstance(e.base, ast.Call):  # DATA(p)[i]
                block = self.data_block(e.base, frame)
                container, length = block.bytes, BLOCK_SIZE
            else:
                container = self.load(self.lvalue(e.base, frame), e.base)
                length = e.length
            i = self.eval(e.index, frame)
            if not 0 <= i < length:
                if self.checks and e.check_id is not None:
                    self.fault(arith.ARRAY_BOUNDS, e)
                i = 0
            return (container, i, e.ty)
        if isinstance(e, ast.Deref):
            p = self.eval(e.base, frame)
            if p[0] == "mmio":
                return ("mmio", p[1], e.ty, e)
            return p[1]
        raise TypeError(f"not a designator: {e!r}")

    def resolve_instance(self, imp):
        if imp.selector == "*":
            k = self.inst.instance
        elif imp.selector is None:
            k = 0
        else:
            k = imp.selector
        return self.image.instance_of(imp.module, k)

    def load(self, lv, node):
        if lv[0] == "mmio":
            try:
                raw = self.image.mmio.read(lv[1])
            except MachineFault:
                self.fault(arith.MMIO_TRAP, lv[3])
            t = lv[2]
            return ty.wrap_to(raw, t) if isinstance(t, ty.Numeric) else bool(raw)
        container, key, t = lv
        return container[key]

    def store(self, lv, value, node):
        if lv[0] == "mmio":
            try:
                self.image.mmio.write(lv[1], value, self.image.cycle)
            except MachineFault:
                self.fault(arith.MMIO_TRAP, lv[3])
            return
        container, key, t = lv
        container[key] = copy_value(t, value)

    # -- calls --------------------------------------------------------------------

    def eval_call(self, call, frame):
        kind, target = call.callee
        if kind == "proc":
            return self.call_proc(target, call.args,
                                  getattr(call, "arg_narrows", [None] * len(call.args)),
                                  frame)
        return self.eval_builtin(call, target, frame)

    def call_proc(self, info, arg_nodes, narrows, frame):
        new_frame = {}
        for (pname, pty, is_var), anode, nid in zip(info.params, arg_nodes, narrows):
            if is_var:
                new_frame[pname] = ("ref", self.lvalue(anode, frame))
            else:
                v = self.eval(anode, frame)
                if isinstance(pty, ty.Numeric):
                    v = self.narrow(v, pty, nid, anode)
                new_frame[pname] = copy_value(pty, v)
        self.proc_stack.append(info)
        try:
            self.exec_seq(info.node.body, new_frame)
        except _Return as r:
            return r.value
        finally:
            self.proc_stack.pop()
        if info.ret is None:
            return None
        return False if isinstance(info.ret, ty.Boolean) else 0

    def port_of(self, node, frame):
        return self.load(self.lvalue(node, frame), node)

    def data_block(self, call, frame):
        """DATA(p): the block of a non-empty port, or the empty-port fault."""
        port = self.port_of(call.args[0], frame)
        if port.block is None:
            if self.checks:
                self.fault(arith.EMPTY_PORT, call)
            return machine.Block(-1)  # nocheck fallback: reads 0, writes discarded
        return port.block

    def eval_builtin(self, call, name, frame):
        args = call.args
        if name == "NEW":
            port = self.port_of(args[0], frame)
            size = self.eval(args[1], frame)
            try:
                machine.port_new(self.image.pool, port, size)
            except MachineFault as f:
                self.fault(f.kind, call)
            return None
        if name == "DISPOSE":
            machine.port_dispose(self.image.pool, self.port_of(args[0], frame))
            return None
        if name == "SEND":
            src = self.port_of(args[0], frame)
            dst = self.port_of(args[1], frame)
            return machine.port_send(src, dst)
        if name == "CLONE":
            src = self.port_of(args[0], frame)
            dst = self.port_of(args[1], frame)
            try:
                machine.port_clone(self.image.pool, src, dst)
            except MachineFault as f:
                self.fault(f.kind, call)
            return None
        if name == "EXTEND":
            port = self.port_of(args[0], frame)
            delta = self.eval(args[1], frame)
            if port.block is None:
                if self.checks:
                    self.fault(arith.EMPTY_PORT, call)
                return None
            try:
                machine.port_extend(port, delta)
            except MachineFault as f:
                self.fault(f.kind, call)
            return None
        if name in ("INC", "DEC"):
            lv = self.lvalue(args[0], frame)
            v = self.load(lv, args[0])
            v = v + 1 if name == "INC" else v - 1
            self.store(lv, ty.wrap_to(v, lv[2]), args[0])
            return None
        if name == "COUNT":
            port = self.port_of(args[0], frame)
            if port.block is None:
                if self.checks:
                    self.fault(arith.EMPTY_PORT, call)
                return 0
            return port.block.used
        if name == "PENDING":
            return self.port_of(args[0], frame).pending
        if name == "ADR":
            return ("cell", self.lvalue(args[0], frame))
        if name in ("MIN", "MAX"):
            a = self.eval(args[0], frame)
            b = self.eval(args[1], frame)
            return min(a, b) if name == "MIN" else max(a, b)
        if name == "DATA":
            # bare DATA is rejected by sema; reached only via IndexSel
            raise TypeError("DATA must be indexed")
        raise TypeError(f"unknown builtin {name}")


def mmio_access(image, address, op, value=None):
    """Scripted external-memory access: `op` is "read" or "write".
    Reads replay the per-address script (repeating its last value,
    defaulting to 0); writes are appended to the write log with the
    current cycle.  Raises Fault on unmapped strict-mode access."""
    try:
        if op == "read":
            return image.mmio.read(address)
        if op == "write":
            image.mmio.write(address, value, image.cycle)
            return value
    except MachineFault:
        raise Fault(arith.MMIO_TRAP, 0, None) from None
    raise ValueError(f"op must be 'read' or 'write', got {op!r}")


def run_cycles(image, n):
    """Execute n complete cycles; returns the transcript line list."""
    return Interp(image).run_cycles(n)


def transcript_text(lines):
    return "".join(line + "\n" for line in lines)
