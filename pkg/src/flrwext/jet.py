"""Second-order forward-mode jets.

A :class:`Jet2` carries ``(f, f', f'')`` for a function of one variable and
propagates all three through arithmetic and the elementary functions of the
scale-factor grammar using the product and chain rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError

Number = Union[int, float]


@dataclass(frozen=True)
class Jet2:
    value: float
    d1: float = 0.0
    d2: float = 0.0

    @classmethod
    def variable(cls, x: float) -> "Jet2":
        return cls(float(x), 1.0, 0.0)

    @classmethod
    def constant(cls, c: float) -> "Jet2":
        return cls(float(c), 0.0, 0.0)

    def __iter__(self):
        yield self.value
        yield self.d1
        yield self.d2

    def _compose(self, g0: float, g1: float, g2: float) -> "Jet2":
        # (g o u)'' = g''(u) u'^2 + g'(u) u''
        return Jet2(g0, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)

    def __add__(self, other: "Jet2 | Number") -> "Jet2":
        o = _lift(other)
        return Jet2(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __sub__(self, other: "Jet2 | Number") -> "Jet2":
        o = _lift(other)
        return Jet2(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, other: Number) -> "Jet2":
        return _lift(other) - self

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.d1, -self.d2)

    def __mul__(self, other: "Jet2 | Number") -> "Jet2":
        o = _lift(other)
        return Jet2(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        if v == 0.0:
            raise DomainError("division by zero")
        return self._compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def __truediv__(self, other: "Jet2 | Number") -> "Jet2":
        return self * _lift(other).reciprocal()

    def __rtruediv__(self, other: Number) -> "Jet2":
        return _lift(other) * self.reciprocal()

    def __pow__(self, p: Number) -> "Jet2":
        return jpow(self, float(p))


def _lift(x: "Jet2 | Number") -> Jet2:
    return x if isinstance(x, Jet2) else Jet2.constant(x)


def jpow(u: Jet2, p: float) -> Jet2:
    """``u ** p`` for a constant exponent ``p``."""
    v = u.value
    if p == 0.0:
        return Jet2.constant(1.0)
    if p == 1.0:
        return u
    integral = float(p).is_integer()
    if v < 0.0 and not integral:
        raise DomainError(f"negative base {v!r} raised to non-integer power {p!r}")
    if v == 0.0:
        if p < 0.0:
            raise DomainError("zero raised to a negative power")
        if u.d1 == 0.0 and u.d2 == 0.0:
            return Jet2.constant(0.0)
        g1 = 0.0 if p > 1.0 else math.inf
        g2 = 0.0 if p > 2.0 else (2.0 if p == 2.0 else math.inf)
        if math.isinf(g1) or (math.isinf(g2) and u.d1 != 0.0):
            raise DomainError(f"derivative of u^{p!r} is unbounded at u = 0")
        if math.isinf(g2):
            g2 = 0.0  # multiplied by u'^2 == 0
        return u._compose(0.0, g1, g2)
    g0 = v**p
    return u._compose(g0, p * v ** (p - 1.0), p * (p - 1.0) * v ** (p - 2.0))


def jsqrt(u: Jet2) -> Jet2:
    v = u.value
    if v < 0.0:
        raise DomainError(f"sqrt of negative value {v!r}")
    if v == 0.0:
        raise DomainError("derivative of sqrt is unbounded at 0")
    s = math.sqrt(v)
    return u._compose(s, 0.5 / s, -0.25 / (s * v))


def jexp(u: Jet2) -> Jet2:
    try:
        e = math.exp(u.value)
    except OverflowError as exc:
        raise DomainError(f"exp overflow at {u.value!r}") from exc
    return u._compose(e, e, e)


def jlog(u: Jet2) -> Jet2:
    v = u.value
    if v <= 0.0:
        raise DomainError(f"log of non-positive value {v!r}")
    return u._compose(math.log(v), 1.0 / v, -1.0 / (v * v))


def jsinh(u: Jet2) -> Jet2:
    try:
        s, c = math.sinh(u.value), math.cosh(u.value)
    except OverflowError as exc:
        raise DomainError(f"sinh overflow at {u.value!r}") from exc
    return u._compose(s, c, s)


def jcosh(u: Jet2) -> Jet2:
    try:
        s, c = math.sinh(u.value), math.cosh(u.value)
    except OverflowError as exc:
        raise DomainError(f"cosh overflow at {u.value!r}") from exc
    return u._compose(c, s, c)


def jtanh(u: Jet2) -> Jet2:
    x = u.value
    th = math.tanh(x)
    # 1 - tanh^2 cancels to 0 long before sech^2 underflows
    if abs(x) < 0.5:
        sech2 = 1.0 - th * th
    else:
        sech = 0.0 if abs(x) > 710.0 else 1.0 / math.cosh(x)
        sech2 = sech * sech
    return u._compose(th, sech2, -2.0 * th * sech2)


def jsin(u: Jet2) -> Jet2:
    s, c = math.sin(u.value), math.cos(u.value)
    return u._compose(s, c, -s)


def jcos(u: Jet2) -> Jet2:
    s, c = math.sin(u.value), math.cos(u.value)
    return u._compose(c, -s, -c)


JET_FUNCTIONS = {
    "sqrt": jsqrt,
    "exp": jexp,
    "log": jlog,
    "sinh": jsinh,
    "cosh": jcosh,
    "tanh": jtanh,
    "sin": jsin,
    "cos": jcos,
}
