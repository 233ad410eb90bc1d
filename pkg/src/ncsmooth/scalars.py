"""Exact scalars: rationals in real mode, Gaussian rationals in complex mode."""
from __future__ import annotations

import re
from fractions import Fraction

from sympy import QQ, QQ_I

from .errors import ParseError

REAL = "real"
COMPLEX = "complex"


def domain_for(mode: str):
    if mode == REAL:
        return QQ
    if mode == COMPLEX:
        return QQ_I
    raise ParseError(f"unknown scalar mode {mode!r}", mode=mode)


def mode_of(K) -> str:
    return COMPLEX if K == QQ_I else REAL


_RAT = r"[+-]?\d+(?:/\d+)?"
_COMPLEX_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RAT})(?=[+-]|\s*$))?\s*(?:(?P<im>[+-]?\s*(?:\d+(?:/\d+)?)?)\s*\*?\s*i)?\s*$"
)


def parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}", value=str(text)) from exc


def parse_scalar(text, K):
    """Parse ``"p/q"`` or, over QQ_I, ``"a+bi"`` style strings."""
    if isinstance(text, int):
        return K(text)
    s = str(text).replace(" ", "")
    if K == QQ or "i" not in s:
        q = parse_rational(s)
        return K.convert(QQ(q.numerator, q.denominator))
    m = _COMPLEX_RE.match(s)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ParseError(f"bad gaussian rational {text!r}", value=str(text))
    re_part = parse_rational(m.group("re")) if m.group("re") else Fraction(0)
    im_txt = m.group("im")
    if im_txt in ("", "+"):
        im_part = Fraction(1)
    elif im_txt == "-":
        im_part = Fraction(-1)
    else:
        im_part = parse_rational(im_txt)
    return QQ_I(QQ(re_part.numerator, re_part.denominator), QQ(im_part.numerator, im_part.denominator))


def _fmt_q(q) -> str:
    q = QQ.convert(q)
    n, d = int(q.numerator), int(q.denominator)
    return str(n) if d == 1 else f"{n}/{d}"


def format_scalar(c, K) -> str:
    if K == QQ_I:
        c = QQ_I.convert(c)
        re_s, im_s = _fmt_q(c.x), _fmt_q(c.y)
        if c.y == 0:
            return re_s
        if c.x == 0:
            return f"{im_s}i"
        sign = "" if im_s.startswith("-") else "+"
        return f"{re_s}{sign}{im_s}i"
    return _fmt_q(c)


def to_complex(c) -> complex:
    if hasattr(c, "x") and hasattr(c, "y"):
        return complex(float(QQ.to_sympy(c.x)), float(QQ.to_sympy(c.y)))
    return complex(float(c.numerator) / float(c.denominator)) if hasattr(c, "numerator") else complex(c)


def to_float(c) -> float:
    if hasattr(c, "x"):
        if c.y != 0:
            raise ValueError("non-real scalar")
        c = c.x
    return int(c.numerator) / int(c.denominator)


def factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out
