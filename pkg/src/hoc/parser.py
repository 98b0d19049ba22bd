"""Recursive-descent parser producing the hO AST.

Follows the published grammar with these deliberate corrections:
ELSIF clauses carry a condition; check statements (REQUIRE/PROVIDE/
INVARIANT) are accepted only at the start of a statement block; the
SELECT discriminant is parsed as a designator; shift operators and
comparisons are non-associative (one per level, as printed).
"""

from . import ast
from .lexer import EOF, ID, INT, KW, OP, STR


class ParseError(Exception):
    def __init__(self, loc, expected, found):
        self.loc = loc
        self.expected = sorted(set(expected))
        self.found = found
        exp = ", ".join(self.expected)
        shown = found.text if found.text else "end of input"
        super().__init__(f"{loc}: expected {exp}, found {shown!r}")


# statement starters handled by dedicated parsers
_STMT_KEYWORDS = {
    "IF", "CASE", "SELECT", "WHILE", "REPEAT", "RETURN", "LOCAL",
    "EXTERNAL", "STATE", "IMPORT", "LOG", "NEXT",
}
_CHECK_KINDS = {"REQUIRE": "require", "PROVIDE": "provide", "INVARIANT": "invariant"}
_EXPR_STARTERS_KW = {"NOT", "SIZE", "TRUE", "FALSE"}
_ADD_OPS = {"+", "-", "\\/", "><"}
_MUL_OPS = {"*", "/", "/\\"}
_REL_OPS = {"=", "#", "<=", ">=", "<", ">"}


class Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.pos = 0

    # --- token plumbing ---------------------------------------------------

    def tok(self, ahead=0):
        i = min(self.pos + ahead, len(self.toks) - 1)
        return self.toks[i]

    def at_kw(self, *names):
        t = self.tok()
        return t.kind == KW and t.canon in names

    def at_op(self, *ops):
        t = self.tok()
        return t.kind == OP and t.text in ops

    def advance(self):
        t = self.toks[self.pos]
        if t.kind != EOF:
            self.pos += 1
        return t

    def accept_kw(self, name):
        if self.at_kw(name):
            return self.advance()
        return None

    def accept_op(self, op):
        if self.at_op(op):
            return self.advance()
        return None

    def expect_kw(self, name):
        if not self.at_kw(name):
            self.fail([name])
        return self.advance()

    def expect_op(self, op):
        if not self.at_op(op):
            self.fail([repr(op)])
        return self.advance()

    def expect_id(self):
        if self.tok().kind != ID:
            self.fail(["identifier"])
        return self.advance()

    def expect_str(self):
        if self.tok().kind != STR:
            self.fail(["string"])
        return self.advance()

    def fail(self, expected):
        raise ParseError(self.tok().loc, expected, self.tok())

    # --- toplevel ----------------------------------------------------------

    def parse_unit(self):
        start = self.tok().loc
        tops = []
        while True:
            while self.accept_op(";"):
                pass
            if self.tok().kind == EOF:
                break
            tops.append(self.parse_toplevel())
        return ast.Unit(start, tops)

    def parse_toplevel(self):
        t = self.tok()
        if self.at_kw("MODULE"):
            return self.parse_module()
        if self.at_kw("PROCEDURE"):
            return self.parse_proc()
        if self.at_kw("CONTRACT"):
            return self.parse_contract()
        if self.at_kw("CONST"):
            self.advance()
            defs = []
            while self.tok().kind == ID and self.tok(1).kind == OP and self.tok(1).text == "=":
                name = self.expect_id().text
                self.expect_op("=")
                defs.append((name, self.parse_expr()))
                self.expect_op(";")
            return ast.ConstDef(t.loc, defs)
        if self.at_kw("TYPE"):
            self.advance()
            defs = []
            while self.tok().kind == ID and self.tok(1).kind == OP and self.tok(1).text == "=":
                name = self.expect_id().text
                self.expect_op("=")
                defs.append((name, self.parse_type()))
                self.expect_op(";")
            return ast.TypeDef(t.loc, defs)
        if self.at_kw("INCLUDE"):
            self.advance()
            s = self.expect_str()
            return ast.Include(t.loc, s.text[1:-1])
        self.fail(["MODULE", "PROCEDURE", "CONTRACT", "CONST", "TYPE", "INCLUDE"])

    def parse_module(self):
        loc = self.expect_kw("MODULE").loc
        name = self.expect_id().text
        multi = bool(self.accept_op("*"))
        self.expect_op(";")
        mvars = []
        if self.accept_kw("VAR"):
            while True:
                mvars.extend(self.parse_vardef())
                sep = self.accept_op(";") or self.accept_op(",")
                if self.at_kw("BEGIN", "PROCEDURE"):
                    break
                if not sep:
                    self.fail(["';'", "','", "BEGIN", "PROCEDURE"])
        procs = []
        while self.at_kw("PROCEDURE"):
            procs.append(self.parse_proc())
            self.accept_op(";")
        self.expect_kw("BEGIN")
        body = self.parse_seq({"END"})
        self.expect_kw("END")
        trailer = self.expect_id()
        if trailer.text != name:
            raise ParseError(trailer.loc, [name], trailer)
        self.expect_op(".")
        return ast.Module(loc, name, multi, mvars, procs, body)

    def parse_vardef(self):
        # id [*] { , id [*] } : type  -- flattened to one ModVar per name
        names = []
        while True:
            t = self.expect_id()
            names.append((t.text, bool(self.accept_op("*")), t.loc))
            if self.at_op(":"):
                break
            self.expect_op(",")
        self.expect_op(":")
        ty = self.parse_type()
        return [ast.ModVar(loc, nm, exp, ty) for nm, exp, loc in names]

    def parse_params(self):
        params = []
        while True:
            var = bool(self.accept_kw("VAR"))
            names = [self.expect_id()]
            while self.accept_op(","):
                names.append(self.expect_id())
            self.expect_op(":")
            ty = self.parse_type()
            params.extend(ast.Param(t.loc, var, t.text, ty) for t in names)
            if not self.accept_op(","):
                break
        return params

    def parse_proc(self):
        loc = self.expect_kw("PROCEDURE").loc
        name = self.expect_id().text
        self.expect_op("(")
        params = self.parse_params()
        self.expect_op(")")
        ret = None
        if self.accept_op(":"):
            ret = self.parse_type()
        self.expect_kw("BEGIN")
        body = self.parse_seq({"END"})
        self.expect_kw("END")
        return ast.Proc(loc, name, params, ret, body)

    def parse_contract(self):
        loc = self.expect_kw("CONTRACT").loc
        name = self.expect_id().text
        params = []
        if self.accept_op("("):
            params = self.parse_params()
            self.expect_op(")")
        self.expect_kw("BEGIN")
        body = self.parse_seq({"END"})
        self.expect_kw("END")
        return ast.Contract(loc, name, params, body)

    # --- types ---------------------------------------------------------------

    def parse_type(self):
        t = self.tok()
        if self.at_kw("VOLATILE", "POINTER"):
            volatile = bool(self.accept_kw("VOLATILE"))
            self.expect_kw("POINTER")
            self.expect_kw("TO")
            return ast.PtrType(t.loc, volatile, self.parse_type())
        if self.at_kw("ARRAY"):
            self.advance()
            count = self.parse_expr()
            self.expect_kw("OF")
            return ast.ArrayType(t.loc, count, self.parse_type())
        if self.at_kw("RECORD"):
            self.advance()
            fields = []
            while True:
                names = [self.expect_id()]
                while self.accept_op(","):
                    names.append(self.expect_id())
                self.expect_op(":")
                fty = self.parse_type()
                fields.extend((n.text, fty) for n in names)
                if self.accept_op(";"):
                    if self.accept_kw("END"):
                        break
                    continue
                self.expect_kw("END")
                break
            return ast.RecordType(t.loc, fields)
        if t.kind == ID:
            self.advance()
            return ast.NamedType(t.loc, t.text)
        self.fail(["type"])

    # --- statement sequences ---------------------------------------------

    def parse_seq(self, followers):
        loc = self.tok().loc
        checks = []
        while self.tok().kind == KW and self.tok().canon in _CHECK_KINDS:
            kw = self.advance()
            asserts = [self.parse_assert()]
            while self.accept_op(","):
                asserts.append(self.parse_assert())
            checks.append(ast.Check(kw.loc, _CHECK_KINDS[kw.canon], asserts))
            self.expect_op(";")
        stmts = []
        saw_any = False
        while True:
            if self.tok().kind == KW and self.tok().canon in followers:
                break
            if self.at_op("|") and "|" in followers:
                break
            if self.accept_op(";"):
                saw_any = True
                continue
            if self.tok().kind == EOF:
                break
            stmts.append(self.parse_statement())
            saw_any = True
            if self.at_op(";"):
                continue
            break
        if not saw_any:
            self.fail(["statement"])
        return ast.Seq(loc, checks, stmts)

    def parse_assert(self):
        t = self.expect_id()
        if self.at_op("("):
            self.advance()
            args = [self.parse_expr()]
            while self.accept_op(","):
                args.append(self.parse_expr())
            self.expect_op(")")
            return ast.Call(t.loc, t.text, args)
        return ast.Name(t.loc, t.text)

    def parse_statement(self):
        t = self.tok()
        if t.kind == KW and t.canon in _STMT_KEYWORDS:
            return getattr(self, "_stmt_" + t.canon.lower())()
        if t.kind == ID:
            d = self.parse_designator()
            if self.accept_op(":="):
                return ast.Assign(t.loc, d, self.parse_expr())
            if isinstance(d, ast.Call):
                return ast.CallStmt(t.loc, d)
            self.fail(["':='"])
        self.fail(["statement"])

    def _stmt_if(self):
        loc = self.expect_kw("IF").loc
        cond = self.parse_expr()
        self.expect_kw("THEN")
        then = self.parse_seq({"ELSIF", "ELSE", "END"})
        elifs = []
        while self.accept_kw("ELSIF"):
            c = self.parse_expr()
            self.expect_kw("THEN")
            elifs.append((c, self.parse_seq({"ELSIF", "ELSE", "END"})))
        orelse = None
        if self.accept_kw("ELSE"):
            orelse = self.parse_seq({"END"})
        self.expect_kw("END")
        return ast.If(loc, cond, then, elifs, orelse)

    def _stmt_while(self):
        loc = self.expect_kw("WHILE").loc
        guard = self.parse_expr()
        self.expect_kw("REPEAT")
        count = self.parse_expr()
        self.expect_kw("TIMES")
        body = self.parse_seq({"END"})
        self.expect_kw("END")
        return ast.Loop(loc, guard, count, body)

    def _stmt_repeat(self):
        loc = self.expect_kw("REPEAT").loc
        count = self.parse_expr()
        self.expect_kw("TIMES")
        body = self.parse_seq({"END"})
        self.expect_kw("END")
        return ast.Loop(loc, None, count, body)

    def _stmt_case(self):
        loc = self.expect_kw("CASE").loc
        subject = self.parse_expr()
        self.expect_kw("OF")
        clauses = [self.parse_clause({"|", "ELSE", "END"})]
        while self.accept_op("|"):
            clauses.append(self.parse_clause({"|", "ELSE", "END"}))
        orelse = None
        if self.accept_kw("ELSE"):
            orelse = self.parse_seq({"END"})
        self.expect_kw("END")
        return ast.Case(loc, subject, clauses, orelse)

    def _stmt_select(self):
        loc = self.expect_kw("SELECT").loc
        subject = self.parse_designator()
        self.expect_kw("OF")
        clauses = [self.parse_clause({"|", "END"})]
        while self.accept_op("|"):
            clauses.append(self.parse_clause({"|", "END"}))
        self.expect_kw("END")
        return ast.Select(loc, subject, clauses)

    def parse_clause(self, followers):
        loc = self.tok().loc
        ranges = [self.parse_range()]
        while self.accept_op(","):
            ranges.append(self.parse_range())
        self.expect_op(":")
        body = self.parse_seq(followers)
        return ast.Clause(loc, ranges, body)

    def parse_range(self):
        lo = self.parse_expr()
        hi = None
        if self.accept_op(".."):
            hi = self.parse_expr()
        return ast.Range(lo.loc, lo, hi)

    def _stmt_next(self):
        loc = self.expect_kw("NEXT").loc
        return ast.Next(loc, self.parse_expr())

    def _stmt_return(self):
        loc = self.expect_kw("RETURN").loc
        t = self.tok()
        starts_expr = (t.kind in (ID, INT)
                       or (t.kind == KW and t.canon in _EXPR_STARTERS_KW)
                       or (t.kind == OP and t.text in ("(", "+", "-", "~")))
        return ast.Return(loc, self.parse_expr() if starts_expr else None)

    def _stmt_local(self):
        loc = self.expect_kw("LOCAL").loc
        decls = []
        while True:
            t = self.expect_id()
            self.expect_op(":=")
            init = self.parse_expr()
            ty = self.parse_type() if self.accept_op(":") else None
            decls.append(ast.LocalDecl(t.loc, t.text, init, ty))
            if not self.accept_op(","):
                break
        return ast.Local(loc, decls)

    def _stmt_external(self):
        loc = self.expect_kw("EXTERNAL").loc
        decls = []
        while True:
            t = self.expect_id()
            self.expect_op(":=")
            addr = self.parse_expr()
            self.expect_op(":")
            ty = self.parse_type()
            decls.append(ast.ExternalDecl(t.loc, t.text, addr, ty))
            if not self.accept_op(","):
                break
        return ast.External(loc, decls)

    def _stmt_state(self):
        loc = self.expect_kw("STATE").loc
        names = [self.expect_id().text]
        while self.accept_op(","):
            names.append(self.expect_id().text)
        return ast.StateDef(loc, names)

    def _stmt_import(self):
        loc = self.expect_kw("IMPORT").loc
        specs = []
        while True:
            t = self.expect_id()
            alias = t.text
            module = t.text
            selector = None
            if self.accept_op(":="):
                module = self.expect_id().text
                if self.accept_op("["):
                    if self.accept_op("*"):
                        selector = "*"
                    else:
                        selector = self.parse_expr()
                    self.expect_op("]")
            specs.append(ast.ImportSpec(t.loc, alias, module, selector))
            if not self.accept_op(","):
                break
        return ast.Import(loc, specs)

    def _stmt_log(self):
        loc = self.expect_kw("LOG").loc
        self.expect_op("(")
        s = self.expect_str()
        value = None
        if self.accept_op(","):
            value = self.parse_expr()
        self.expect_op(")")
        return ast.Log(loc, s.text[1:-1], value)

    # --- expressions -------------------------------------------------------

    def parse_expr(self):
        lhs = self.parse_sum()
        t = self.tok()
        if t.kind == OP and t.text in _REL_OPS:
            self.advance()
            return ast.BinOp(t.loc, t.text, lhs, self.parse_sum())
        return lhs

    def parse_sum(self):
        e = self.parse_term()
        while True:
            t = self.tok()
            if t.kind == OP and t.text in _ADD_OPS:
                self.advance()
                e = ast.BinOp(t.loc, t.text, e, self.parse_term())
            elif t.kind == KW and t.canon == "OR":
                self.advance()
                e = ast.BinOp(t.loc, "OR", e, self.parse_term())
            else:
                return e

    def parse_term(self):
        # shift level is non-associative: at most one shift per term
        lhs = self.parse_product()
        t = self.tok()
        if t.kind == OP and t.text in ("<<", ">>"):
            self.advance()
            return ast.BinOp(t.loc, t.text, lhs, self.parse_product())
        return lhs

    def parse_product(self):
        e = self.parse_unary()
        while True:
            t = self.tok()
            if t.kind == OP and t.text in _MUL_OPS:
                self.advance()
                e = ast.BinOp(t.loc, t.text, e, self.parse_unary())
            elif t.kind == KW and t.canon in ("DIV", "MOD", "AND"):
                self.advance()
                e = ast.BinOp(t.loc, t.canon, e, self.parse_unary())
            else:
                return e

    def parse_unary(self):
        t = self.tok()
        if t.kind == OP and t.text in ("+", "-", "~"):
            self.advance()
            return ast.UnOp(t.loc, t.text, self.parse_factor())
        if t.kind == KW and t.canon == "NOT":
            self.advance()
            return ast.UnOp(t.loc, "NOT", self.parse_factor())
        if t.kind == KW and t.canon == "SIZE":
            self.advance()
            self.expect_op("(")
            ty = self.parse_type()
            self.expect_op(")")
            return ast.SizeOf(t.loc, ty)
        return self.parse_factor()

    def parse_factor(self):
        t = self.tok()
        if t.kind == INT:
            self.advance()
            return ast.IntLit(t.loc, t.value)
        if t.kind == KW and t.canon in ("TRUE", "FALSE"):
            self.advance()
            return ast.BoolLit(t.loc, t.canon == "TRUE")
        if self.accept_op("("):
            e = self.parse_expr()
            self.expect_op(")")
            return e
        if t.kind == ID:
            return self.parse_designator()
        self.fail(["expression"])

    def parse_designator(self):
        t = self.expect_id()
        if self.at_op("("):
            self.advance()
            args = [self.parse_expr()]
            while self.accept_op(","):
                args.append(self.parse_expr())
            self.expect_op(")")
            e = ast.Call(t.loc, t.text, args)
        else:
            e = ast.Name(t.loc, t.text)
        while True:
            if self.accept_op("."):
                f = self.expect_id()
                e = ast.FieldSel(f.loc, e, f.text)
            elif self.accept_op("["):
                idx = self.parse_expr()
                self.expect_op("]")
                e = ast.IndexSel(idx.loc, e, idx)
            elif self.at_op("^"):
                c = self.advance()
                e = ast.Deref(c.loc, e)
            else:
                return e


def parse_unit(tokens):
    """Parse a token stream into a compilation unit AST."""
    return Parser(tokens).parse_unit()
