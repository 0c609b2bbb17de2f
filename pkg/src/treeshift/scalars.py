"""Scalar parsing, formatting and comparison helpers.

Two scalar modes coexist. Exact values are ``int`` or ``Fraction`` and are
never rounded. Float values are ``complex`` (or ``float``) and compare with
an absolute tolerance of ``FLOAT_TOL``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Number
from typing import Union

Scalar = Union[int, Fraction, float, complex]

FLOAT_TOL = 1e-12


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q"``, ``"-2"``, ``"0.5"``, ``"3i"`` or ``"1/2+3/4i"``.

    Purely real inputs come back as exact ``Fraction``; anything with an
    imaginary part becomes a ``complex``.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if not s.endswith("i"):
        return Fraction(s)
    body = s[:-1]
    # split at the last sign that is not a leading sign
    idx = max(body.rfind("+"), body.rfind("-"))
    if idx <= 0:
        im = body if body not in ("", "+", "-") else body + "1"
        return complex(0.0, float(Fraction(im)))
    re_part, im_part = body[:idx], body[idx:]
    if im_part in ("+", "-"):
        im_part += "1"
    return complex(float(Fraction(re_part)), float(Fraction(im_part)))


def scalar_from_json(obj) -> Scalar:
    """Decode the function-literal value forms: ``"p/q"``, ``int`` or ``[re, im]``."""
    if isinstance(obj, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, str):
        return parse_scalar(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        re_, im_ = obj
        if not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in obj):
            raise ValueError(f"bad complex literal {obj!r}")
        return complex(re_, im_)
    raise ValueError(f"bad scalar literal {obj!r}")


def scalar_to_json(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return x
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not a scalar: {x!r}")


def format_scalar(x) -> str:
    if isinstance(x, complex):
        return f"{x.real:.15g}{x.imag:+.15g}i"
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.15g}"
    return str(scalar_to_json(x))


def modulus(x: Number):
    """Exact ``|x|`` for rationals, float for complex."""
    if is_exact(x):
        return abs(x)
    return abs(complex(x))


def is_zero(x, tol: float = FLOAT_TOL) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol


def close(a, b, tol: float = FLOAT_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= tol


def compare_modulus(x, r) -> int:
    """Sign of ``|x| - r`` (exact when both are exact, tolerant otherwise)."""
    if is_exact(x) and is_exact(r):
        d = abs(x) - r
        return (d > 0) - (d < 0)
    d = abs(complex(x)) - float(r)
    if abs(d) <= FLOAT_TOL:
        return 0
    return 1 if d > 0 else -1
