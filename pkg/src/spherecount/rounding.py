"""Emulated floating-point arithmetic with a configurable round-off unit.

The emulation rounds only the significand to ``t`` bits (round to nearest,
ties to even); the exponent range is the host's.  With ``u = 2**-t`` every
rounded result satisfies ``r(x) = x (1 + delta)`` with ``|delta| <= u``.

Two arithmetic providers share one interface so the whole counting pipeline
can run either at host precision or under emulated rounding.  All provider
methods accept scalars or numpy arrays and broadcast elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PrecisionContext:
    """A floating-point system with a t-bit significand, u = 2**-t."""

    t: int

    def __post_init__(self):
        if self.t < 2:
            raise ValueError(f"significand bit count must be >= 2, got {self.t}")

    @property
    def u(self) -> float:
        return 2.0 ** (-self.t)


def round_value(ctx: PrecisionContext, x):
    """Round the significand of x to ctx.t bits, nearest-even ties.

    Accepts scalars or arrays.  Zero, infinities and NaN pass through.
    """
    arr = np.asarray(x, dtype=np.float64)
    m, e = np.frexp(arr)
    out = np.ldexp(np.rint(np.ldexp(m, ctx.t)), e - ctx.t)
    if np.ndim(x) == 0:
        return float(out)
    return out


_BINARY = {"+", "-", "*", "/"}
_UNARY = {"sqrt", "arccos"}


def rounded_op(ctx: PrecisionContext, op: str, a, b=None):
    """Compute a single rounded operation: r(a op b).

    Operands are assumed representable in ctx.  Domain errors (division by
    zero, sqrt of a negative, arccos outside [-1, 1]) raise ValueError.
    """
    if op in _BINARY:
        if b is None:
            raise ValueError(f"operator {op!r} needs two operands")
        if op == "+":
            raw = np.add(a, b)
        elif op == "-":
            raw = np.subtract(a, b)
        elif op == "*":
            raw = np.multiply(a, b)
        else:
            if np.any(np.asarray(b) == 0):
                raise ZeroDivisionError("rounded division by zero")
            raw = np.divide(a, b)
    elif op in _UNARY:
        if b is not None:
            raise ValueError(f"operator {op!r} takes one operand")
        if op == "sqrt":
            if np.any(np.asarray(a) < 0):
                raise ValueError("rounded sqrt of a negative value")
            raw = np.sqrt(a)
        else:
            if np.any(np.abs(np.asarray(a)) > 1):
                raise ValueError("arccos argument outside [-1, 1]")
            raw = np.arccos(a)
    else:
        raise ValueError(f"unknown operator {op!r}")
    return round_value(ctx, raw)


class ExactArithmetic:
    """Host double-precision arithmetic (the exact-mode provider)."""

    ctx = None

    def const(self, x):
        return x

    def add(self, a, b):
        return np.add(a, b)

    def sub(self, a, b):
        return np.subtract(a, b)

    def mul(self, a, b):
        return np.multiply(a, b)

    def div(self, a, b):
        return np.divide(a, b)

    def sqrt(self, a):
        return np.sqrt(a)

    def arccos(self, a):
        return np.arccos(a)

    def __repr__(self):
        return "ExactArithmetic()"


class RoundedArithmetic:
    """Arithmetic provider routing every operation through a PrecisionContext.

    arccos and sqrt are computed at host precision and rounded once, which
    satisfies the op~(x) = op(x)(1 + delta) contract.
    """

    def __init__(self, ctx: PrecisionContext):
        self.ctx = ctx

    def const(self, x):
        return round_value(self.ctx, x)

    def add(self, a, b):
        return round_value(self.ctx, np.add(a, b))

    def sub(self, a, b):
        return round_value(self.ctx, np.subtract(a, b))

    def mul(self, a, b):
        return round_value(self.ctx, np.multiply(a, b))

    def div(self, a, b):
        return round_value(self.ctx, np.divide(a, b))

    def sqrt(self, a):
        return round_value(self.ctx, np.sqrt(a))

    def arccos(self, a):
        return round_value(self.ctx, np.arccos(a))

    def __repr__(self):
        return f"RoundedArithmetic(t={self.ctx.t})"


EXACT = ExactArithmetic()


def make_arithmetic(mode: str, bits: int | None = None):
    """Build the provider for a mode name: 'exact' or 'rounded'."""
    if mode == "exact":
        return EXACT
    if mode == "rounded":
        if bits is None:
            raise ValueError("rounded mode needs a significand bit count")
        return RoundedArithmetic(PrecisionContext(bits))
    raise ValueError(f"unknown mode {mode!r}")


def required_precision(n: int, D: int, S: int, kappa: float, C: float = 1.0) -> float:
    """Advisory bound u_max on the round-off unit for a correct count.

    u_max = 1 / (C * D^2 * n^(5/2) * kappa^3 * (log2 S + n^(3/2) D^2 kappa^2)).
    The multiplicative constant C is not fixed by the theory; C = 1 is a
    convention and the precision-sweep measures the empirical breakdown.
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if C <= 0:
        raise ValueError("C must be positive")
    inner = math.log2(max(S, 1)) + n ** 1.5 * D**2 * kappa**2
    return 1.0 / (C * D**2 * n**2.5 * kappa**3 * inner)
