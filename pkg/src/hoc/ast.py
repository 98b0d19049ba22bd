"""AST node classes, one dataclass per grammar production.

Locations are excluded from equality so that structural identity of two
trees (the round-trip oracle) ignores where the text came from.  Semantic
analysis annotates nodes in place with extra attributes (`ty`, `binding`,
`check_id`, ...); those never participate in equality either.
"""

from dataclasses import dataclass, field
from .lexer import Loc


@dataclass
class Node:
    loc: Loc = field(compare=False, repr=False)


# --- expressions -----------------------------------------------------------

@dataclass
class IntLit(Node):
    value: int


@dataclass
class BoolLit(Node):
    value: bool


@dataclass
class Name(Node):
    ident: str


@dataclass
class BinOp(Node):
    op: str
    lhs: Node
    rhs: Node


@dataclass
class UnOp(Node):
    op: str
    operand: Node


@dataclass
class FieldSel(Node):
    base: Node
    field: str


@dataclass
class IndexSel(Node):
    base: Node
    index: Node


@dataclass
class Deref(Node):
    base: Node


@dataclass
class Call(Node):
    name: str
    args: list


@dataclass
class SizeOf(Node):
    type: "Node"


# --- type expressions ------------------------------------------------------

@dataclass
class NamedType(Node):
    name: str


@dataclass
class PtrType(Node):
    volatile: bool
    target: Node


@dataclass
class ArrayType(Node):
    count: Node
    element: Node


@dataclass
class RecordType(Node):
    fields: list  # of (name, type-node), declaration order, groups flattened


# --- statements ------------------------------------------------------------

@dataclass
class Check(Node):
    kind: str       # "require" | "provide" | "invariant"
    asserts: list   # of Call | Name


@dataclass
class Seq(Node):
    checks: list    # leading Check nodes
    stmts: list     # statements; lone ';' produces nothing


@dataclass
class Assign(Node):
    target: Node
    value: Node


@dataclass
class CallStmt(Node):
    call: Call


@dataclass
class Return(Node):
    value: Node | None


@dataclass
class If(Node):
    cond: Node
    then: Seq
    elifs: list     # of (cond, Seq)
    orelse: Seq | None


@dataclass
class Loop(Node):
    guard: Node | None
    count: Node
    body: Seq


@dataclass
class Range(Node):
    lo: Node
    hi: Node | None


@dataclass
class Clause(Node):
    ranges: list    # of Range
    body: Seq


@dataclass
class Case(Node):
    subject: Node
    clauses: list
    orelse: Seq | None


@dataclass
class Select(Node):
    subject: Node   # designator
    clauses: list


@dataclass
class Next(Node):
    value: Node     # constant expression


@dataclass
class LocalDecl(Node):
    name: str
    init: Node
    type: Node | None


@dataclass
class Local(Node):
    decls: list


@dataclass
class ExternalDecl(Node):
    name: str
    addr: Node
    type: Node


@dataclass
class External(Node):
    decls: list


@dataclass
class StateDef(Node):
    names: list


@dataclass
class ImportSpec(Node):
    alias: str
    module: str
    selector: Node | str | None  # None, "*" or a constant expression


@dataclass
class Import(Node):
    specs: list


@dataclass
class Log(Node):
    text: str       # string contents, without the quotes
    value: Node | None


# --- toplevel forms --------------------------------------------------------

@dataclass
class Param(Node):
    var: bool
    name: str
    type: Node


@dataclass
class Proc(Node):
    name: str
    params: list
    ret: Node | None
    body: Seq


@dataclass
class Contract(Node):
    name: str
    params: list
    body: Seq


@dataclass
class ModVar(Node):
    name: str
    exported: bool
    type: Node


@dataclass
class Module(Node):
    name: str
    multi: bool
    vars: list      # of ModVar
    procs: list     # of Proc
    body: Seq


@dataclass
class ConstDef(Node):
    defs: list      # of (name, expr)


@dataclass
class TypeDef(Node):
    defs: list      # of (name, type-node)


@dataclass
class Include(Node):
    path: str


@dataclass
class Unit(Node):
    toplevels: list
