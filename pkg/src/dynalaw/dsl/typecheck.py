"""Static typing pass: every subexpression gets one of Scalar | Vec3 | Mat3."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import LawTypeError, ReturnTypeError
from .nodes import Binary, Block, Call, Expr, IfExpr, LawAst, Name, Num, Unary


class Ty(enum.Enum):
    SCALAR = "Scalar"
    VEC3 = "Vec3"
    MAT3 = "Mat3"
    TRIPLE = "SvdTriple"  # internal: only legal as the rhs of a triple let


# (op, left, right) -> result. Scalars broadcast over vectors but not over
# matrices; Mat3 * Mat3 is the matrix product, Vec3 * Vec3 is elementwise.
_BINARY_RULES: dict[tuple[str, Ty, Ty], Ty] = {}


def _rule(ops: str, lt: Ty, rt: Ty, out: Ty) -> None:
    for op in ops.split():
        _BINARY_RULES[(op, lt, rt)] = out


_rule("+ - * /", Ty.SCALAR, Ty.SCALAR, Ty.SCALAR)
_rule("+ - * /", Ty.VEC3, Ty.VEC3, Ty.VEC3)
_rule("+ - *", Ty.SCALAR, Ty.VEC3, Ty.VEC3)
_rule("+ - * /", Ty.VEC3, Ty.SCALAR, Ty.VEC3)
_rule("+ -", Ty.MAT3, Ty.MAT3, Ty.MAT3)
_rule("*", Ty.MAT3, Ty.MAT3, Ty.MAT3)
_rule("*", Ty.SCALAR, Ty.MAT3, Ty.MAT3)
_rule("* /", Ty.MAT3, Ty.SCALAR, Ty.MAT3)
_rule("*", Ty.MAT3, Ty.VEC3, Ty.VEC3)

_FN_SIGS: dict[str, tuple[tuple[Ty, ...], Ty]] = {
    "svd": ((Ty.MAT3,), Ty.TRIPLE),
    "det": ((Ty.MAT3,), Ty.SCALAR),
    "trace": ((Ty.MAT3,), Ty.SCALAR),
    "transpose": ((Ty.MAT3,), Ty.MAT3),
    "inverse": ((Ty.MAT3,), Ty.MAT3),
    "diag": ((Ty.VEC3,), Ty.MAT3),
    "outer": ((Ty.VEC3, Ty.VEC3), Ty.MAT3),
    "log": ((Ty.SCALAR,), Ty.SCALAR),
    "exp": ((Ty.SCALAR,), Ty.SCALAR),
    "sqrt": ((Ty.SCALAR,), Ty.SCALAR),
    "abs": ((Ty.SCALAR,), Ty.SCALAR),
    "pow": ((Ty.SCALAR, Ty.SCALAR), Ty.SCALAR),
    "min": ((Ty.SCALAR, Ty.SCALAR), Ty.SCALAR),
    "max": ((Ty.SCALAR, Ty.SCALAR), Ty.SCALAR),
    "clamp": ((Ty.SCALAR, Ty.SCALAR, Ty.SCALAR), Ty.SCALAR),
    "vlog": ((Ty.VEC3,), Ty.VEC3),
    "vexp": ((Ty.VEC3,), Ty.VEC3),
    "vsum": ((Ty.VEC3,), Ty.SCALAR),
    "vnorm": ((Ty.VEC3,), Ty.SCALAR),
    "vmax": ((Ty.VEC3, Ty.SCALAR), Ty.VEC3),
    "dev": ((Ty.MAT3,), Ty.MAT3),
    "norm_fro": ((Ty.MAT3,), Ty.SCALAR),
}


@dataclass
class TypedLaw:
    """A law whose every subexpression carries a type annotation."""

    ast: LawAst
    elastic_type: Ty
    plastic_type: Ty
    param_count: int
    node_types: dict[int, Ty] = field(default_factory=dict)

    @property
    def param_names(self) -> list[str]:
        return [p.name for p in self.ast.params]


def _check_expr(e: Expr, env: dict[str, Ty], types: dict[int, Ty]) -> Ty:
    if isinstance(e, Num):
        ty = Ty.SCALAR
    elif isinstance(e, Name):
        if e.ident == "F" or e.ident == "I":
            ty = Ty.MAT3
        else:
            ty = env[e.ident]  # resolver guarantees presence
        if ty is Ty.TRIPLE:
            raise LawTypeError(
                f"line {e.line}: '{e.ident}' is an svd triple, not a value", e.nid
            )
    elif isinstance(e, Unary):
        ty = _check_expr(e.operand, env, types)
    elif isinstance(e, Binary):
        lt = _check_expr(e.left, env, types)
        rt = _check_expr(e.right, env, types)
        ty = _BINARY_RULES.get((e.op, lt, rt))
        if ty is None:
            raise LawTypeError(
                f"line {e.line}: operator '{e.op}' not defined for {lt.value} and {rt.value}",
                e.nid,
            )
    elif isinstance(e, Call):
        sig, out = _FN_SIGS[e.fn]
        for want, arg in zip(sig, e.args):
            got = _check_expr(arg, env, types)
            if got is not want:
                raise LawTypeError(
                    f"line {e.line}: '{e.fn}' expects {want.value}, got {got.value}", e.nid
                )
        ty = out
    elif isinstance(e, IfExpr):
        for side in (e.lhs, e.rhs):
            got = _check_expr(side, env, types)
            if got is not Ty.SCALAR:
                raise LawTypeError(
                    f"line {e.line}: comparison operands must be Scalar, got {got.value}",
                    e.nid,
                )
        tt = _check_expr(e.then, env, types)
        ot = _check_expr(e.orelse, env, types)
        if tt is not ot:
            raise LawTypeError(
                f"line {e.line}: branches have different types ({tt.value} vs {ot.value})",
                e.nid,
            )
        ty = tt
    else:
        raise TypeError(f"unhandled node {type(e).__name__}")
    types[e.nid] = ty
    return ty


def _check_block(b: Block, params: dict[str, Ty], types: dict[int, Ty], where: str) -> Ty:
    env = dict(params)
    for let in b.lets:
        ty = _check_expr(let.expr, env, types)
        if len(let.names) == 3:
            if ty is not Ty.TRIPLE:
                raise LawTypeError(f"triple let requires svd(...), got {ty.value}")
            env[let.names[0]] = Ty.MAT3
            env[let.names[1]] = Ty.VEC3
            env[let.names[2]] = Ty.MAT3
        else:
            if ty is Ty.TRIPLE:
                raise LawTypeError("svd(...) must be bound with let (U, S, V) = ...")
            env[let.names[0]] = ty
    ret = _check_expr(b.ret, env, types)
    if ret is not Ty.MAT3:
        raise ReturnTypeError(
            f"{where} body must return Mat3, got {ret.value}", b.ret.nid
        )
    return ret


def typecheck(law: LawAst) -> TypedLaw:
    """Annotate every subexpression; both bodies must return Mat3."""
    params = {p.name: Ty.SCALAR for p in law.params}
    types: dict[int, Ty] = {}
    et = _check_block(law.elastic, params, types, "elastic")
    pt = _check_block(law.plastic, params, types, "plastic")
    return TypedLaw(
        ast=law,
        elastic_type=et,
        plastic_type=pt,
        param_count=len(law.params),
        node_types=types,
    )
