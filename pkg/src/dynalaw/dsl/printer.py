"""Canonical source printer; print -> parse round-trips to an equal AST."""

from __future__ import annotations

from .nodes import Binary, Block, Call, Expr, IfExpr, LawAst, Name, Num, Unary

# Precedence levels used to insert the minimal parentheses.
_PREC_ADD = 1
_PREC_MUL = 2
_PREC_UNARY = 3
_PREC_ATOM = 4

_OP_PREC = {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL}


def _fmt_num(v: float) -> str:
    return repr(float(v))


def print_expr(e: Expr) -> str:
    text, _ = _print(e)
    return text


def _print(e: Expr) -> tuple[str, int]:
    if isinstance(e, Num):
        return _fmt_num(e.value), _PREC_ATOM
    if isinstance(e, Name):
        return e.ident, _PREC_ATOM
    if isinstance(e, Call):
        args = ", ".join(_print(a)[0] for a in e.args)
        return f"{e.fn}({args})", _PREC_ATOM
    if isinstance(e, Unary):
        inner, prec = _print(e.operand)
        if prec < _PREC_UNARY:
            inner = f"({inner})"
        return f"-{inner}", _PREC_UNARY
    if isinstance(e, Binary):
        prec = _OP_PREC[e.op]
        ltext, lprec = _print(e.left)
        rtext, rprec = _print(e.right)
        if lprec < prec:
            ltext = f"({ltext})"
        # Right operand needs parens at equal precedence: ops are left-assoc.
        if rprec <= prec:
            rtext = f"({rtext})"
        return f"{ltext} {e.op} {rtext}", prec
    if isinstance(e, IfExpr):
        lhs, lp = _print(e.lhs)
        rhs, rp = _print(e.rhs)
        if lp < _PREC_ADD:
            lhs = f"({lhs})"
        if rp < _PREC_ADD:
            rhs = f"({rhs})"
        then, _ = _print(e.then)
        orelse, _ = _print(e.orelse)
        return f"if {lhs} {e.cmp_op} {rhs} then {then} else {orelse}", 0
    raise TypeError(f"unhandled node {type(e).__name__}")


def _print_block(b: Block) -> str:
    lines = ["{"]
    for let in b.lets:
        binder = let.names[0] if len(let.names) == 1 else "(" + ", ".join(let.names) + ")"
        lines.append(f"  let {binder} = {print_expr(let.expr)};")
    lines.append(f"  return {print_expr(b.ret)};")
    lines.append("}")
    return "\n".join(lines)


def print_law(law: LawAst) -> str:
    parts = []
    for p in law.params:
        flag = " log" if p.log_scale else ""
        parts.append(
            f"param {p.name} init={_fmt_num(p.init)} min={_fmt_num(p.lo)} max={_fmt_num(p.hi)}{flag}"
        )
    parts.append("elastic " + _print_block(law.elastic))
    parts.append("plastic " + _print_block(law.plastic))
    return "\n".join(parts) + "\n"
