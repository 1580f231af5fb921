"""Scale factors a(t): parsed expressions with exact jets and a past extension."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import dsl
from .errors import DomainError
from .jet import Jet2

EVEN_REFLECTION = "even_reflection"
CUSTOM = "custom"


@dataclass(frozen=True)
class ScaleFactor:
    """A scale factor on (0, inf) together with its continuation to t < 0.

    The continuation is either the even reflection ``a(-t) = a(t)`` or a
    second expression ``past_ast`` evaluated as-is for t < 0.
    """

    ast: dsl.Node
    source: str = ""
    domain_min: float = 0.0
    past_extension_rule: str = EVEN_REFLECTION
    past_ast: Optional[dsl.Node] = None
    _value: Callable[[float], float] = field(init=False, repr=False, compare=False)
    _past_value: Optional[Callable[[float], float]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.past_extension_rule not in (EVEN_REFLECTION, CUSTOM):
            raise ValueError(f"unknown past extension rule {self.past_extension_rule!r}")
        if (self.past_extension_rule == CUSTOM) != (self.past_ast is not None):
            raise ValueError("a custom past extension needs past_ast (and only then)")
        object.__setattr__(self, "_value", dsl.compile_value(self.ast, "t"))
        past = dsl.compile_value(self.past_ast, "t") if self.past_ast is not None else None
        object.__setattr__(self, "_past_value", past)

    def __str__(self) -> str:
        return self.source or dsl.to_source(self.ast)

    def value(self, t: float) -> float:
        """a(t); for t < 0 the past extension rule applies."""
        if t < 0.0:
            if self._past_value is None:
                return self._value(-t)
            return self._past_value(t)
        return self._value(t)

    def __call__(self, t: float) -> float:
        return self.value(t)

    def jet(self, t: float) -> Jet2:
        return evaluate_jet(self, t)

    def d1(self, t: float) -> float:
        return evaluate_jet(self, t).d1

    def d2(self, t: float) -> float:
        return evaluate_jet(self, t).d2

    def with_past(self, past_source: str) -> "ScaleFactor":
        return ScaleFactor(
            self.ast,
            self.source,
            self.domain_min,
            CUSTOM,
            dsl.parse(past_source, "t"),
        )


def parse_scale_factor(source: str, past_source: str | None = None) -> ScaleFactor:
    """Parse ``source`` (variable ``t``) into a :class:`ScaleFactor`.

    >>> parse_scale_factor("t + t^2").value(2.0)
    6.0
    """
    ast = dsl.parse(source, "t")
    if past_source is None:
        return ScaleFactor(ast, source.strip())
    return ScaleFactor(ast, source.strip(), 0.0, CUSTOM, dsl.parse(past_source, "t"))


def evaluate_jet(sf: ScaleFactor, t: float) -> Jet2:
    """(a, a', a'') at ``t`` by forward-mode differentiation through the AST."""
    if not math.isfinite(t):
        raise DomainError(f"non-finite time {t!r}")
    if t < 0.0:
        if sf.past_ast is None:
            j = dsl.eval_jet(sf.ast, Jet2.variable(-t))
            return Jet2(j.value, -j.d1, j.d2)
        return dsl.eval_jet(sf.past_ast, Jet2.variable(t))
    return dsl.eval_jet(sf.ast, Jet2.variable(t))


@dataclass(frozen=True)
class GaugeFunction:
    """Gauge f(s) fixing the time coordinate of an SSS chart; identity by default."""

    ast: dsl.Node
    source: str = "s"
    _value: Callable[[float], float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_value", dsl.compile_value(self.ast, "s"))

    def __call__(self, s: float) -> float:
        return self._value(s)

    def jet(self, s: Jet2) -> Jet2:
        return dsl.eval_jet(self.ast, s)

    def derivative(self, s: float) -> float:
        return dsl.eval_jet(self.ast, Jet2.variable(s)).d1


def parse_gauge(source: str = "s") -> GaugeFunction:
    return GaugeFunction(dsl.parse(source, "s"), source.strip())


IDENTITY_GAUGE = parse_gauge("s")
