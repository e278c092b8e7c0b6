"""
Operator expression language used by the CLI and the HTTP routes::

    W[0,1,3]          generalized Wronskian (one variable)
    d^2, D[1,0]       derivation powers / total derivatives
    id                identity
    box(n,k)          n-variable bracket of jet order k
    nambu2, nambu(3)  Jacobian bracket
    wedge(A,B)  act(A,B)  rn(A,B)  inner(A; p1, p2)
"""

import logging
import re

from services.jet_brackets import box_operator, nambu_operator
from services.skew_operators import (
    SkewOp,
    action,
    derivation_power,
    identity_operator,
    inner_product,
    rn_bracket,
    total_derivative,
    wedge,
)
from services.wronskian_service import generalized_wronskian_operator
from utils.errors import ConfigError
from utils.text_parser import parse_int_list, parse_poly_list, split_top_level

logger = logging.getLogger(__name__)

WRONSKIAN = re.compile(r"^W\[(?P<body>[^\]]*)\]$")
POWER = re.compile(r"^d\^(?P<order>\d+)$")
TOTAL = re.compile(r"^D\[(?P<body>[^\]]*)\]$")
BOX = re.compile(r"^box\(\s*(?P<n>\d+)\s*,\s*(?P<k>\d+)\s*\)$")
NAMBU = re.compile(r"^nambu\(?\s*(?P<n>\d+)\s*\)?$")
IDENTITY = re.compile(r"^id(?:\(\s*(?P<n>\d+)\s*\))?$")
COMBINATOR = re.compile(r"^(?P<name>wedge|act|rn|inner)\((?P<body>.*)\)$", re.DOTALL)

BINARY = {"wedge": wedge, "act": action, "rn": rn_bracket}


def parse_operator(text: str) -> SkewOp:
    expr = text.strip()
    if not expr:
        raise ConfigError("Empty operator expression")

    match = WRONSKIAN.match(expr)
    if match:
        return generalized_wronskian_operator(parse_int_list(match["body"]))
    match = POWER.match(expr)
    if match:
        return derivation_power(int(match["order"]))
    match = TOTAL.match(expr)
    if match:
        return total_derivative(parse_int_list(match["body"]))
    match = BOX.match(expr)
    if match:
        return box_operator(int(match["n"]), int(match["k"]))
    match = NAMBU.match(expr)
    if match:
        return nambu_operator(int(match["n"]))
    match = IDENTITY.match(expr)
    if match:
        return identity_operator(int(match["n"] or 1))

    match = COMBINATOR.match(expr)
    if match:
        name, body = match["name"], match["body"]
        if name == "inner":
            parts = split_top_level(body, ";")
            if len(parts) != 2:
                raise ConfigError(f"inner(...) expects 'A; p1, p2, ...', got {body!r}")
            op = parse_operator(parts[0])
            return inner_product(op, parse_poly_list(parts[1], op.n, separator=","))
        parts = split_top_level(body, ",")
        if len(parts) != 2:
            raise ConfigError(f"{name}(...) takes two operators, got {len(parts)}")
        return BINARY[name](parse_operator(parts[0]), parse_operator(parts[1]))

    raise ConfigError(f"Unrecognized operator expression {expr!r}")
