"""AST node types for constitutive-law sources.

Node ids (`nid`) are assigned in parse order and identify subexpressions in
evaluation diagnostics; they are ignored by structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ParamSpec:
    """A declared continuous parameter with box bounds.

    Values handed to evaluation are always linear; log_scale only controls
    the optimizer's working coordinates.
    """

    name: str
    init: float
    lo: float
    hi: float
    log_scale: bool = False

    def validate(self) -> None:
        if not (self.lo < self.hi):
            raise ValueError(f"param '{self.name}': min must be < max")
        if not (self.lo <= self.init <= self.hi):
            raise ValueError(f"param '{self.name}': init outside [min, max]")
        if self.log_scale and self.lo <= 0.0:
            raise ValueError(f"param '{self.name}': log scale requires min > 0")


@dataclass
class Expr:
    nid: int = field(default=-1, kw_only=True)
    line: int = field(default=0, kw_only=True)
    col: int = field(default=0, kw_only=True)


@dataclass
class Num(Expr):
    value: float = 0.0


@dataclass
class Name(Expr):
    ident: str = ""


@dataclass
class Unary(Expr):
    op: str = "-"
    operand: Expr | None = None


@dataclass
class Binary(Expr):
    op: str = "+"
    left: Expr | None = None
    right: Expr | None = None


@dataclass
class Call(Expr):
    fn: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass
class IfExpr(Expr):
    cmp_op: str = "<"
    lhs: Expr | None = None
    rhs: Expr | None = None
    then: Expr | None = None
    orelse: Expr | None = None


@dataclass
class LetStmt:
    """`let x = expr;` or the svd destructuring `let (U, S, V) = svd(expr);`."""

    names: tuple[str, ...]
    expr: Expr
    line: int = 0
    col: int = 0


@dataclass
class Block:
    lets: list[LetStmt]
    ret: Expr


@dataclass
class LawAst:
    params: list[ParamSpec]
    elastic: Block
    plastic: Block
    source_text: str = ""


def iter_exprs(e: Expr):
    """Yield e and all subexpressions, pre-order."""
    yield e
    if isinstance(e, Unary):
        yield from iter_exprs(e.operand)
    elif isinstance(e, Binary):
        yield from iter_exprs(e.left)
        yield from iter_exprs(e.right)
    elif isinstance(e, Call):
        for a in e.args:
            yield from iter_exprs(a)
    elif isinstance(e, IfExpr):
        yield from iter_exprs(e.lhs)
        yield from iter_exprs(e.rhs)
        yield from iter_exprs(e.then)
        yield from iter_exprs(e.orelse)


def iter_block_exprs(b: Block):
    for let in b.lets:
        yield from iter_exprs(let.expr)
    yield from iter_exprs(b.ret)


def expr_equal(a: Expr, b: Expr) -> bool:
    """Structural equality, ignoring node ids and source positions."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Num):
        return a.value == b.value
    if isinstance(a, Name):
        return a.ident == b.ident
    if isinstance(a, Unary):
        return a.op == b.op and expr_equal(a.operand, b.operand)
    if isinstance(a, Binary):
        return a.op == b.op and expr_equal(a.left, b.left) and expr_equal(a.right, b.right)
    if isinstance(a, Call):
        return (
            a.fn == b.fn
            and len(a.args) == len(b.args)
            and all(expr_equal(x, y) for x, y in zip(a.args, b.args))
        )
    if isinstance(a, IfExpr):
        return (
            a.cmp_op == b.cmp_op
            and expr_equal(a.lhs, b.lhs)
            and expr_equal(a.rhs, b.rhs)
            and expr_equal(a.then, b.then)
            and expr_equal(a.orelse, b.orelse)
        )
    raise TypeError(f"unhandled node {type(a).__name__}")


def block_equal(a: Block, b: Block) -> bool:
    if len(a.lets) != len(b.lets):
        return False
    for la, lb in zip(a.lets, b.lets):
        if la.names != lb.names or not expr_equal(la.expr, lb.expr):
            return False
    return expr_equal(a.ret, b.ret)


def ast_equal(a: LawAst, b: LawAst) -> bool:
    """Structural equality of two laws (params compared by value, bodies by shape)."""
    if len(a.params) != len(b.params):
        return False
    for pa, pb in zip(a.params, b.params):
        if (pa.name, pa.init, pa.lo, pa.hi, pa.log_scale) != (
            pb.name,
            pb.init,
            pb.lo,
            pb.hi,
            pb.log_scale,
        ):
            return False
    return block_equal(a.elastic, b.elastic) and block_equal(a.plastic, b.plastic)


def count_nodes(law: LawAst) -> int:
    """Number of expression nodes in both bodies (golden-test helper)."""
    n = 0
    for body in (law.elastic, law.plastic):
        for _ in iter_block_exprs(body):
            n += 1
    return n
