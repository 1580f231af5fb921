"""Numerical primitives: dyadic antiderivatives, their inverses, one-sided limits."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, OutOfRangeError, QuadratureError

FINITE = "finite"
INFINITE = "infinite"
ZERO = "zero"
INCONCLUSIVE = "inconclusive"

_K_MIN = -1000
_K_MAX = 1000


def quad(g: Callable[[float], float], lo: float, hi: float) -> float:
    """Adaptive Gauss-Kronrod quadrature with a hard failure on non-finite output."""
    if lo == hi:
        return 0.0
    try:
        # full_output silences IntegrationWarning; the tolerances sit at round-off level
        val, _err, *_ = integrate.quad(
            g, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200, full_output=1
        )
    except (DomainError, ZeroDivisionError, OverflowError) as exc:
        raise QuadratureError(f"integrand failed on [{lo!r}, {hi!r}]: {exc}") from exc
    if not math.isfinite(val):
        raise QuadratureError(f"non-finite integral on [{lo!r}, {hi!r}]")
    return val


class Antiderivative:
    """F(t) = integral of a positive integrand g from ``anchor`` to t, for t > 0.

    Values are accumulated over dyadic cells [2^k, 2^(k+1)] so that integrands
    singular at 0 (like 1/a) are only ever integrated on cells where they are
    smooth.  With ``anchor == 0`` every node is integrated from 0 directly,
    which keeps the relative accuracy of tiny values.
    """

    def __init__(self, g: Callable[[float], float], anchor: float):
        if anchor < 0.0:
            raise ValueError("anchor must be >= 0")
        self.g = g
        self.anchor = float(anchor)
        self._nodes: dict[int, float] = {}
        self._lock = threading.Lock()
        if self.anchor > 0.0:
            k = math.floor(math.log2(self.anchor))
            self._nodes[k] = -quad(g, 2.0**k, self.anchor)

    def node(self, k: int) -> float:
        """F(2^k)."""
        with self._lock:
            return self._node(k)

    def _node(self, k: int) -> float:
        if k in self._nodes:
            return self._nodes[k]
        if not _K_MIN <= k <= _K_MAX:
            raise OutOfRangeError(f"dyadic node 2^{k} outside supported range")
        if self.anchor == 0.0 and k <= 0:
            val = quad(self.g, 0.0, 2.0**k)
        else:
            known = sorted(self._nodes)
            if not known:
                # anchor 0: start from the first node above 1
                self._nodes[0] = quad(self.g, 0.0, 1.0)
                known = [0]
            if k > known[-1]:
                j, val = known[-1], self._nodes[known[-1]]
                while j < k:
                    val += quad(self.g, 2.0**j, 2.0 ** (j + 1))
                    j += 1
                    self._nodes[j] = val
            else:
                j, val = known[0], self._nodes[known[0]]
                while j > k:
                    val -= quad(self.g, 2.0 ** (j - 1), 2.0**j)
                    j -= 1
                    self._nodes[j] = val
        self._nodes[k] = val
        return val

    def __call__(self, t: float) -> float:
        if not t > 0.0:
            if t == 0.0 and self.anchor == 0.0:
                return 0.0
            raise DomainError(f"antiderivative evaluated at non-positive t={t!r}")
        if self.anchor > 0.0 and 0.5 * self.anchor <= t <= 2.0 * self.anchor:
            return quad(self.g, self.anchor, t)
        k = math.floor(math.log2(t))
        return self.node(k) + quad(self.g, 2.0**k, t)

    def inverse(self, y: float) -> float:
        """t > 0 with F(t) = y, by bracketing on dyadic nodes then Brent's method."""
        if not math.isfinite(y):
            raise OutOfRangeError(f"cannot invert non-finite value {y!r}")
        k = 0
        try:
            if self.node(k) > y:
                while self.node(k) > y:
                    k -= 1
                    if self.anchor == 0.0 and k < -1074 // 2:
                        raise OutOfRangeError(f"{y!r} below range")
            else:
                while self.node(k + 1) <= y:
                    k += 1
        except (OutOfRangeError, QuadratureError) as exc:
            raise OutOfRangeError(f"value {y!r} outside the range of the antiderivative") from exc
        lo, hi = 2.0**k, 2.0 ** (k + 1)
        base = self.node(k)
        if base == y:
            return lo

        def resid(t: float) -> float:
            return base + quad(self.g, lo, t) - y

        return optimize.brentq(resid, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    error_estimate: float
    verdict: str
    samples_used: int

    @property
    def conclusive(self) -> bool:
        return self.verdict != INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "value": json_float(self.value),
            "error_estimate": json_float(self.error_estimate),
            "verdict": self.verdict,
            "samples_used": self.samples_used,
        }


def json_float(x: float):
    """JSON-safe float: infinities and NaN become strings."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return float(x)


def _richardson_columns(values: Sequence[float]) -> list[tuple[float, float]]:
    """(estimate, error) per column of a Richardson table in integer powers of t."""
    table = [list(values)]
    out = []
    for j in range(1, len(values) - 1):
        prev = table[-1]
        fac = 2.0**j - 1.0
        col = [prev[i + 1] + (prev[i + 1] - prev[i]) / fac for i in range(len(prev) - 1)]
        table.append(col)
        if len(col) >= 3:
            err = max(abs(col[-1] - col[-2]), abs(col[-2] - col[-3]))
            out.append((col[-1], err))
    return out


def _aitken_columns(values: Sequence[float]) -> list[tuple[float, float]]:
    """(estimate, error) per round of iterated Aitken delta-squared."""
    seq = list(values)
    out = []
    while len(seq) >= 5:
        nxt = []
        for i in range(len(seq) - 2):
            d2 = seq[i + 2] - 2.0 * seq[i + 1] + seq[i]
            nxt.append(seq[i + 2] if d2 == 0.0 else seq[i + 2] - (seq[i + 2] - seq[i + 1]) ** 2 / d2)
        seq = nxt
        if len(seq) >= 3 and all(math.isfinite(v) for v in seq[-3:]):
            out.append((seq[-1], max(abs(seq[-1] - seq[-2]), abs(seq[-2] - seq[-3]))))
    return out


def is_diverging(values: Sequence[float], growth: float = 1.5, window: int = 6) -> bool:
    """True when the last ``window`` magnitudes grow geometrically or without shrinking steps.

    Geometric growth by ``growth`` per level catches power-law blow-up faster
    than t^-0.58; the second test (strictly increasing magnitudes whose
    increments do not shrink) catches slower powers and logarithms.  A window
    of six keeps bounded oscillations from passing by coincidence.
    """
    if len(values) < window:
        return False
    tail = [abs(v) for v in values[-window:]]
    if any(x == 0.0 for x in tail[:-1]):
        return False
    n = window - 1
    if all(tail[i + 1] >= growth * tail[i] for i in range(n)):
        return True
    steps = [tail[i + 1] - tail[i] for i in range(n)]
    if not all(s > 0.0 for s in steps):
        return False
    return all(steps[i + 1] >= 0.98 * steps[i] for i in range(n - 1))


def limit_at_zero(
    f: Callable[[float], float],
    t0: float = 0.5,
    levels: int = 12,
    tol: float = 1e-6,
    growth: float = 1.5,
) -> LimitEstimate:
    """Estimate lim_{t->0+} f(t) from samples at t_k = t0 * 2^-k.

    The estimate is the best of a Richardson table (integer powers of t) and
    iterated Aitken extrapolation (arbitrary geometric rates, e.g. sqrt(t)).
    A sample that cannot be evaluated truncates the usable tail.
    """
    if levels < 4:
        raise ValueError("a limit verdict needs at least 4 extrapolation levels")
    ts = [t0 * 2.0**-k for k in range(levels)]
    values: list[float] = []
    for t in ts:
        try:
            v = float(f(t))
        except (DomainError, ZeroDivisionError, OverflowError):
            v = math.nan
        values.append(v)

    # usable tail: after the last non-finite sample (unless it is a terminal blow-up)
    tail_start = 0
    for i, v in enumerate(values):
        if not math.isfinite(v):
            tail_start = i + 1
    tail = values[tail_start:]
    n = len(tail)
    if n == 0 and math.isinf(values[-1]):
        return LimitEstimate(values[-1], 0.0, INFINITE, levels)
    if n < 4:
        return LimitEstimate(math.nan, math.inf, INCONCLUSIVE, n)

    if is_diverging(tail, growth):
        return LimitEstimate(math.copysign(math.inf, tail[-1]), 0.0, INFINITE, n)

    candidates = [(tail[-1], max(abs(tail[-1] - tail[-2]), abs(tail[-2] - tail[-3])))]
    candidates += _richardson_columns(tail)
    candidates += _aitken_columns(tail)
    candidates = [c for c in candidates if math.isfinite(c[0]) and math.isfinite(c[1])]
    if not candidates:
        return LimitEstimate(math.nan, math.inf, INCONCLUSIVE, n)
    value, err = min(candidates, key=lambda c: c[1])
    if abs(value) < tol and err < tol:
        return LimitEstimate(value, err, ZERO, n)
    if err < tol:
        return LimitEstimate(value, err, FINITE, n)
    return LimitEstimate(value, err, INCONCLUSIVE, n)


def log_samples(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)
