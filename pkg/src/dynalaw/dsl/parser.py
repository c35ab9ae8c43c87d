"""Lexer, recursive-descent parser, and scope resolver for law sources.

Grammar:

    law    := param* "elastic" block "plastic" block
    param  := "param" IDENT "init=" NUM "min=" NUM "max=" NUM ["log"]
    block  := "{" ("let" binder "=" expr ";")* "return" expr [";"] "}"
    binder := IDENT | "(" IDENT "," IDENT "," IDENT ")"
    expr   := add | "if" add CMP add "then" expr "else" expr
    add    := mul (("+" | "-") mul)*
    mul    := unary (("*" | "/") unary)*
    unary  := "-" unary | primary
    primary:= NUM | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

Comments run from "#" to end of line. `log` is a valid identifier (the
builtin), so the param flag is recognized positionally, not as a keyword.
"""

from __future__ import annotations

import re

from .errors import DuplicateParamError, LawSyntaxError, UnknownIdentifierError
from .nodes import Binary, Block, Call, Expr, IfExpr, LawAst, LetStmt, Name, Num, ParamSpec, Unary

KEYWORDS = {"param", "elastic", "plastic", "let", "return", "if", "then", "else"}

# Builtin callables and their arities; `svd` yields a (U, S, V) triple.
BUILTIN_FNS = {
    "svd": 1,
    "det": 1,
    "trace": 1,
    "transpose": 1,
    "inverse": 1,
    "diag": 1,
    "outer": 2,
    "log": 1,
    "exp": 1,
    "sqrt": 1,
    "abs": 1,
    "pow": 2,
    "min": 2,
    "max": 2,
    "clamp": 3,
    "vlog": 1,
    "vexp": 1,
    "vsum": 1,
    "vnorm": 1,
    "vmax": 2,
    "dev": 1,
    "norm_fro": 1,
}

BUILTIN_VARS = {"F", "I"}

CMP_OPS = ("<=", ">=", "==", "!=", "<", ">")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|==|!=|[-+*/<>=(){},;])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LawSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.next_nid = 0

    def _nid(self) -> int:
        self.next_nid += 1
        return self.next_nid - 1

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def _advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def _error(self, msg: str, expected: tuple[str, ...] = ()) -> LawSyntaxError:
        t = self.cur
        got = t.text if t.kind != "eof" else "end of input"
        return LawSyntaxError(f"{msg}, got {got!r}", t.line, t.col, expected)

    def _expect(self, text: str) -> Token:
        if self.cur.text != text or self.cur.kind == "eof":
            raise self._error(f"expected {text!r}", (text,))
        return self._advance()

    def _expect_ident(self, what: str = "identifier") -> Token:
        if self.cur.kind != "ident":
            raise self._error(f"expected {what}", ("IDENT",))
        return self._advance()

    def _expect_num(self) -> float:
        sign = 1.0
        if self.cur.text == "-":
            self._advance()
            sign = -1.0
        if self.cur.kind != "num":
            raise self._error("expected number", ("NUM",))
        return sign * float(self._advance().text)

    # --- grammar ---

    def parse_law(self) -> LawAst:
        params = []
        while self.cur.text == "param":
            params.append(self._param())
        self._expect("elastic")
        elastic = self._block()
        self._expect("plastic")
        plastic = self._block()
        if self.cur.kind != "eof":
            raise self._error("expected end of input after plastic block")
        return LawAst(params=params, elastic=elastic, plastic=plastic)

    def _param(self) -> ParamSpec:
        self._expect("param")
        name = self._expect_ident("parameter name").text
        if name in KEYWORDS or name in BUILTIN_FNS or name in BUILTIN_VARS:
            raise self._error(f"parameter name '{name}' shadows a builtin")
        fields = {}
        for key in ("init", "min", "max"):
            tok = self._expect_ident(f"'{key}'")
            if tok.text != key:
                raise LawSyntaxError(f"expected '{key}', got '{tok.text}'", tok.line, tok.col, (key,))
            self._expect("=")
            fields[key] = self._expect_num()
        log_scale = False
        if self.cur.kind == "ident" and self.cur.text == "log":
            self._advance()
            log_scale = True
        spec = ParamSpec(name=name, init=fields["init"], lo=fields["min"], hi=fields["max"], log_scale=log_scale)
        try:
            spec.validate()
        except ValueError as e:
            raise LawSyntaxError(str(e), self.cur.line, self.cur.col) from None
        return spec

    def _block(self) -> Block:
        self._expect("{")
        lets = []
        while self.cur.text == "let":
            tok = self._advance()
            if self.cur.text == "(":
                self._advance()
                names = [self._expect_ident().text]
                self._expect(",")
                names.append(self._expect_ident().text)
                self._expect(",")
                names.append(self._expect_ident().text)
                self._expect(")")
                binder = tuple(names)
            else:
                binder = (self._expect_ident("binding name").text,)
            self._expect("=")
            expr = self._expr()
            self._expect(";")
            lets.append(LetStmt(names=binder, expr=expr, line=tok.line, col=tok.col))
        self._expect("return")
        ret = self._expr()
        if self.cur.text == ";":
            self._advance()
        self._expect("}")
        return Block(lets=lets, ret=ret)

    def _expr(self) -> Expr:
        if self.cur.text == "if":
            tok = self._advance()
            lhs = self._add()
            if self.cur.text not in CMP_OPS:
                raise self._error("expected comparison operator", CMP_OPS)
            cmp_op = self._advance().text
            rhs = self._add()
            self._expect("then")
            then = self._expr()
            self._expect("else")
            orelse = self._expr()
            return IfExpr(
                cmp_op=cmp_op, lhs=lhs, rhs=rhs, then=then, orelse=orelse,
                nid=self._nid(), line=tok.line, col=tok.col,
            )
        return self._add()

    def _add(self) -> Expr:
        left = self._mul()
        while self.cur.text in ("+", "-"):
            tok = self._advance()
            right = self._mul()
            left = Binary(op=tok.text, left=left, right=right, nid=self._nid(), line=tok.line, col=tok.col)
        return left

    def _mul(self) -> Expr:
        left = self._unary()
        while self.cur.text in ("*", "/"):
            tok = self._advance()
            right = self._unary()
            left = Binary(op=tok.text, left=left, right=right, nid=self._nid(), line=tok.line, col=tok.col)
        return left

    def _unary(self) -> Expr:
        if self.cur.text == "-":
            tok = self._advance()
            operand = self._unary()
            return Unary(op="-", operand=operand, nid=self._nid(), line=tok.line, col=tok.col)
        return self._primary()

    def _primary(self) -> Expr:
        t = self.cur
        if t.kind == "num":
            self._advance()
            return Num(value=float(t.text), nid=self._nid(), line=t.line, col=t.col)
        if t.text == "(":
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner
        if t.text == "if":
            return self._expr()
        if t.kind == "ident":
            self._advance()
            if self.cur.text == "(":
                self._advance()
                args = [self._expr()]
                while self.cur.text == ",":
                    self._advance()
                    args.append(self._expr())
                self._expect(")")
                return Call(fn=t.text, args=args, nid=self._nid(), line=t.line, col=t.col)
            return Name(ident=t.text, nid=self._nid(), line=t.line, col=t.col)
        raise self._error("expected expression", ("NUM", "IDENT", "(", "if", "-"))


def _resolve_block(block: Block, bound: set[str], where: str) -> None:
    """Check that every identifier is a param, let binding, or builtin."""
    local = set(bound)

    def check(e: Expr) -> None:
        if isinstance(e, Name):
            if e.ident not in local and e.ident not in BUILTIN_VARS:
                raise UnknownIdentifierError(e.ident, e.line, e.col)
        elif isinstance(e, Unary):
            check(e.operand)
        elif isinstance(e, Binary):
            check(e.left)
            check(e.right)
        elif isinstance(e, Call):
            if e.fn not in BUILTIN_FNS:
                raise UnknownIdentifierError(e.fn, e.line, e.col)
            if len(e.args) != BUILTIN_FNS[e.fn]:
                raise LawSyntaxError(
                    f"'{e.fn}' takes {BUILTIN_FNS[e.fn]} argument(s), got {len(e.args)}",
                    e.line, e.col,
                )
            for a in e.args:
                check(a)
        elif isinstance(e, IfExpr):
            check(e.lhs)
            check(e.rhs)
            check(e.then)
            check(e.orelse)

    for let in block.lets:
        check(let.expr)
        if len(let.names) == 3 and not (isinstance(let.expr, Call) and let.expr.fn == "svd"):
            raise LawSyntaxError(
                "triple binding is only valid for svd(...)", let.line, let.col
            )
        if len(let.names) == 1 and isinstance(let.expr, Call) and let.expr.fn == "svd":
            raise LawSyntaxError(
                "svd(...) must be destructured: let (U, S, V) = svd(...)", let.line, let.col
            )
        for name in let.names:
            if name in local or name in BUILTIN_VARS or name in BUILTIN_FNS:
                raise LawSyntaxError(
                    f"'{name}' is already bound in the {where} block", let.line, let.col
                )
            local.add(name)
    check(block.ret)


def parse_law(source: str) -> LawAst:
    """Parse and scope-check a law source.

    Raises LawSyntaxError, UnknownIdentifierError, or DuplicateParamError;
    messages carry line/column and are safe to hand back to a repair loop.
    """
    tokens = tokenize(source)
    law = _Parser(tokens).parse_law()
    law.source_text = source

    seen = set()
    for p in law.params:
        if p.name in seen:
            raise DuplicateParamError(p.name)
        seen.add(p.name)

    _resolve_block(law.elastic, seen, "elastic")
    _resolve_block(law.plastic, seen, "plastic")
    return law
