"""Batched tree-walking evaluator for typed laws.

Evaluation is lane-parallel: a law is applied to a whole batch of deformation
gradients at once. Guard semantics of `if` are preserved per lane by masked
merging: both branches are computed with domain violations suppressed, then
each lane keeps the taken branch's value and error state only. Any error on a
selected lane aborts evaluation with the offending subexpression.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, EvalError
from .linalg import svd3_batch
from .nodes import Binary, Block, Call, Expr, IfExpr, Name, Num, Unary
from .printer import print_expr
from .typecheck import Ty, TypedLaw

_ERR_NONE = 0
_ERR_DOMAIN = 1
_ERR_NONFINITE = 2

_DET_EPS = 1e-12  # |det| below this counts as singular for inverse()


class _Lanes:
    """Per-lane error bookkeeping for one body evaluation."""

    def __init__(self, n: int):
        self.n = n
        self.kind = np.zeros(n, dtype=np.int8)
        self.node = np.full(n, -1, dtype=np.int64)

    def mark(self, bad: np.ndarray, kind: int, nid: int) -> None:
        fresh = bad & (self.kind == _ERR_NONE)
        self.kind[fresh] = kind
        self.node[fresh] = nid

    def snapshot(self) -> tuple[np.ndarray, np.ndarray]:
        return self.kind.copy(), self.node.copy()

    def restore(self, snap: tuple[np.ndarray, np.ndarray]) -> None:
        self.kind, self.node = snap[0].copy(), snap[1].copy()

    def merge(self, cond: np.ndarray, then_snap, else_snap) -> None:
        self.kind = np.where(cond, then_snap[0], else_snap[0])
        self.node = np.where(cond, then_snap[1], else_snap[1])


def _broadcast(ty: Ty, value: float | np.ndarray, n: int) -> np.ndarray:
    if ty is Ty.SCALAR:
        return np.full(n, value, dtype=float)
    raise AssertionError("only scalars are materialized from constants")


def _check_finite(val: np.ndarray, lanes: _Lanes, nid: int) -> None:
    flat = np.isfinite(val)
    while flat.ndim > 1:
        flat = flat.all(axis=-1)
    lanes.mark(~flat, _ERR_NONFINITE, nid)


def _safe_div(a: np.ndarray, b: np.ndarray, lanes: _Lanes, nid: int) -> np.ndarray:
    if b.ndim == 1:
        bad = b == 0.0
    else:
        bad = (b == 0.0).any(axis=tuple(range(1, b.ndim)))
    lanes.mark(bad, _ERR_DOMAIN, nid)
    safe = np.where(b == 0.0, 1.0, b)
    return a / safe


def _eval_expr(e: Expr, env: dict, lanes: _Lanes, types: dict[int, Ty]):
    n = lanes.n
    if isinstance(e, Num):
        return np.full(n, e.value, dtype=float)
    if isinstance(e, Name):
        return env[e.ident]
    if isinstance(e, Unary):
        return -_eval_expr(e.operand, env, lanes, types)
    if isinstance(e, Binary):
        lt = types[e.left.nid]
        rt = types[e.right.nid]
        a = _eval_expr(e.left, env, lanes, types)
        b = _eval_expr(e.right, env, lanes, types)
        out = _apply_binary(e.op, lt, rt, a, b, lanes, e.nid)
        _check_finite(out, lanes, e.nid)
        return out
    if isinstance(e, Call):
        args = [_eval_expr(a, env, lanes, types) for a in e.args]
        out = _apply_call(e.fn, args, lanes, e.nid)
        if not isinstance(out, tuple):
            _check_finite(out, lanes, e.nid)
        return out
    if isinstance(e, IfExpr):
        lhs = _eval_expr(e.lhs, env, lanes, types)
        rhs = _eval_expr(e.rhs, env, lanes, types)
        cond = _compare(e.cmp_op, lhs, rhs)
        base = lanes.snapshot()
        then_val = _eval_expr(e.then, env, lanes, types)
        then_snap = lanes.snapshot()
        lanes.restore(base)
        else_val = _eval_expr(e.orelse, env, lanes, types)
        else_snap = lanes.snapshot()
        lanes.merge(cond, then_snap, else_snap)
        shape_cond = cond.reshape((n,) + (1,) * (then_val.ndim - 1))
        return np.where(shape_cond, then_val, else_val)
    raise TypeError(f"unhandled node {type(e).__name__}")


def _compare(op: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    return a != b


def _apply_binary(op, lt, rt, a, b, lanes, nid):
    # Broadcast scalars against vectors; matrix products use matmul.
    if op == "+" or op == "-":
        if lt is Ty.SCALAR and rt is Ty.VEC3:
            a = a[:, None]
        elif lt is Ty.VEC3 and rt is Ty.SCALAR:
            b = b[:, None]
        return a + b if op == "+" else a - b
    if op == "*":
        if lt is Ty.MAT3 and rt is Ty.MAT3:
            return a @ b
        if lt is Ty.MAT3 and rt is Ty.VEC3:
            return np.einsum("nij,nj->ni", a, b)
        if lt is Ty.SCALAR and rt is not Ty.SCALAR:
            return a.reshape((-1,) + (1,) * (b.ndim - 1)) * b
        if rt is Ty.SCALAR and lt is not Ty.SCALAR:
            return a * b.reshape((-1,) + (1,) * (a.ndim - 1))
        return a * b
    if op == "/":
        if rt is Ty.SCALAR and lt is not Ty.SCALAR:
            b = b.reshape((-1,) + (1,) * (a.ndim - 1))
        return _safe_div(a, b, lanes, nid)
    raise AssertionError(op)


def _apply_call(fn, args, lanes: _Lanes, nid: int):
    n = lanes.n
    if fn == "svd":
        M = args[0]
        bad = ~np.isfinite(M).all(axis=(1, 2))
        lanes.mark(bad, _ERR_NONFINITE, nid)
        if bad.any():
            M = M.copy()
            M[bad] = np.eye(3)
        return svd3_batch(M)
    if fn == "det":
        return np.linalg.det(args[0])
    if fn == "trace":
        return np.trace(args[0], axis1=1, axis2=2)
    if fn == "transpose":
        return np.swapaxes(args[0], 1, 2)
    if fn == "inverse":
        M = args[0]
        d = np.linalg.det(M)
        bad = np.abs(d) <= _DET_EPS
        lanes.mark(bad, _ERR_DOMAIN, nid)
        if bad.any():
            M = M.copy()
            M[bad] = np.eye(3)
        return np.linalg.inv(M)
    if fn == "diag":
        out = np.zeros((n, 3, 3))
        idx = np.arange(3)
        out[:, idx, idx] = args[0]
        return out
    if fn == "outer":
        return np.einsum("ni,nj->nij", args[0], args[1])
    if fn == "log":
        x = args[0]
        lanes.mark(x <= 0.0, _ERR_DOMAIN, nid)
        return np.log(np.where(x <= 0.0, 1.0, x))
    if fn == "exp":
        return np.exp(args[0])
    if fn == "sqrt":
        x = args[0]
        lanes.mark(x < 0.0, _ERR_DOMAIN, nid)
        return np.sqrt(np.where(x < 0.0, 0.0, x))
    if fn == "abs":
        return np.abs(args[0])
    if fn == "pow":
        base, expo = args
        frac = expo != np.floor(expo)
        bad = (base < 0.0) & frac
        bad |= (base == 0.0) & (expo < 0.0)
        lanes.mark(bad, _ERR_DOMAIN, nid)
        safe_base = np.where(bad, 1.0, base)
        return np.power(safe_base, expo)
    if fn == "min":
        return np.minimum(args[0], args[1])
    if fn == "max":
        return np.maximum(args[0], args[1])
    if fn == "clamp":
        return np.clip(args[0], args[1], args[2])
    if fn == "vlog":
        x = args[0]
        bad = (x <= 0.0).any(axis=1)
        lanes.mark(bad, _ERR_DOMAIN, nid)
        return np.log(np.where(x <= 0.0, 1.0, x))
    if fn == "vexp":
        return np.exp(args[0])
    if fn == "vsum":
        return args[0].sum(axis=1)
    if fn == "vnorm":
        return np.sqrt((args[0] ** 2).sum(axis=1))
    if fn == "vmax":
        return np.maximum(args[0], args[1][:, None])
    if fn == "dev":
        M = args[0]
        tr = np.trace(M, axis1=1, axis2=2) / 3.0
        out = M.copy()
        idx = np.arange(3)
        out[:, idx, idx] -= tr[:, None]
        return out
    if fn == "norm_fro":
        return np.sqrt((args[0] ** 2).sum(axis=(1, 2)))
    raise AssertionError(fn)


def _node_by_id(law: TypedLaw, nid: int) -> Expr | None:
    from .nodes import iter_block_exprs

    for body in (law.ast.elastic, law.ast.plastic):
        for e in iter_block_exprs(body):
            if e.nid == nid:
                return e
    return None


def _raise_lane_error(law: TypedLaw, lanes: _Lanes) -> None:
    bad = lanes.kind != _ERR_NONE
    if not bad.any():
        return
    lane = int(np.argmax(bad))
    nid = int(lanes.node[lane])
    node = _node_by_id(law, nid)
    text = print_expr(node) if node is not None else "<unknown>"
    if lanes.kind[lane] == _ERR_DOMAIN:
        raise DomainError("domain violation", nid, text)
    raise EvalError("non-finite value", nid, text)


def _eval_block(law: TypedLaw, block: Block, env: dict, lanes: _Lanes) -> np.ndarray:
    types = law.node_types
    # Overflow/invalid are tracked per lane and raised as EvalError below.
    with np.errstate(all="ignore"):
        for let in block.lets:
            val = _eval_expr(let.expr, env, lanes, types)
            if len(let.names) == 3:
                env[let.names[0]], env[let.names[1]], env[let.names[2]] = val
            else:
                env[let.names[0]] = val
        out = _eval_expr(block.ret, env, lanes, types)
    _raise_lane_error(law, lanes)
    return out


def _base_env(law: TypedLaw, F: np.ndarray, theta: np.ndarray) -> dict:
    n = F.shape[0]
    env: dict = {"F": F, "I": np.broadcast_to(np.eye(3), (n, 3, 3))}
    for spec, val in zip(law.ast.params, theta):
        env[spec.name] = np.full(n, float(val))
    return env


def _check_theta(law: TypedLaw, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (law.param_count,):
        raise ValueError(
            f"theta has {theta.size} values, law declares {law.param_count} parameters"
        )
    return theta


def eval_elastic_batch(law: TypedLaw, F: np.ndarray, theta) -> np.ndarray:
    """Kirchhoff stress for a batch of deformation gradients, shape (n, 3, 3)."""
    theta = _check_theta(law, theta)
    lanes = _Lanes(F.shape[0])
    return _eval_block(law, law.ast.elastic, _base_env(law, F, theta), lanes)


def eval_plastic_batch(law: TypedLaw, F: np.ndarray, theta) -> np.ndarray:
    """Corrected deformation gradient for a batch, shape (n, 3, 3)."""
    theta = _check_theta(law, theta)
    lanes = _Lanes(F.shape[0])
    return _eval_block(law, law.ast.plastic, _base_env(law, F, theta), lanes)


def eval_elastic(law: TypedLaw, F: np.ndarray, theta) -> np.ndarray:
    """Single-matrix front end of eval_elastic_batch."""
    F = np.asarray(F, dtype=float)
    return eval_elastic_batch(law, F[None], theta)[0]


def eval_plastic(law: TypedLaw, F: np.ndarray, theta) -> np.ndarray:
    """Single-matrix front end of eval_plastic_batch."""
    F = np.asarray(F, dtype=float)
    return eval_plastic_batch(law, F[None], theta)[0]
