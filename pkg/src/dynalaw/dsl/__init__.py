"""Sandboxed DSL for elastoplastic constitutive laws.

A law pairs an elastic map (deformation gradient -> Kirchhoff stress) with a
plastic map (trial deformation gradient -> corrected deformation gradient),
plus declared bounded continuous parameters.
"""

from .catalog import (
    CATALOG_PAIRS,
    ELASTIC_TEMPLATES,
    PLASTIC_TEMPLATES,
    builtin_catalog,
    catalog_source,
    compose_source,
)
from .errors import (
    DomainError,
    DuplicateParamError,
    EvalError,
    LawError,
    LawSyntaxError,
    LawTypeError,
    NonFiniteInputError,
    ReturnTypeError,
    UnknownIdentifierError,
)
from .interp import (
    eval_elastic,
    eval_elastic_batch,
    eval_plastic,
    eval_plastic_batch,
)
from .linalg import svd3, svd3_batch
from .nodes import (
    Binary,
    Block,
    Call,
    Expr,
    IfExpr,
    LawAst,
    LetStmt,
    Name,
    Num,
    ParamSpec,
    Unary,
    ast_equal,
    block_equal,
    count_nodes,
    expr_equal,
)
from .parser import BUILTIN_FNS, parse_law, tokenize
from .printer import print_expr, print_law
from .typecheck import Ty, TypedLaw, typecheck

__all__ = [
    "BUILTIN_FNS",
    "CATALOG_PAIRS",
    "ELASTIC_TEMPLATES",
    "PLASTIC_TEMPLATES",
    "Binary",
    "Block",
    "Call",
    "DomainError",
    "DuplicateParamError",
    "EvalError",
    "Expr",
    "IfExpr",
    "LawAst",
    "LawError",
    "LawSyntaxError",
    "LawTypeError",
    "LetStmt",
    "Name",
    "NonFiniteInputError",
    "Num",
    "ParamSpec",
    "ReturnTypeError",
    "Ty",
    "TypedLaw",
    "Unary",
    "UnknownIdentifierError",
    "ast_equal",
    "block_equal",
    "builtin_catalog",
    "catalog_source",
    "compose_source",
    "count_nodes",
    "eval_elastic",
    "eval_elastic_batch",
    "eval_plastic",
    "eval_plastic_batch",
    "expr_equal",
    "parse_law",
    "print_expr",
    "print_law",
    "svd3",
    "svd3_batch",
    "tokenize",
    "typecheck",
]
