"""Click-probability (quality) models.

A quality model maps a displayed price ``p`` and the minimum displayed
price ``p_min`` to a click probability in [0, 1].  Every model must be
non-increasing in ``p`` (for fixed ``p_min``) and non-decreasing in
``p_min`` (for fixed ``p``), and is only defined for ``p >= p_min``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from .errors import InferenceError, QualityDomainError

# Incremented on every quality evaluation.  Profiling aid only; reset it
# with reset_evaluation_count() before measuring.
_EVALUATIONS = 0


def evaluation_count() -> int:
    return _EVALUATIONS


def reset_evaluation_count() -> None:
    global _EVALUATIONS
    _EVALUATIONS = 0


class QualityModel:
    """Base class; subclasses implement ``_evaluate`` on the valid domain."""

    kind = "abstract"

    def q(self, p: float, p_min: float) -> float:
        """Click probability for displayed price ``p`` given ``p_min``."""
        global _EVALUATIONS
        _EVALUATIONS += 1
        if p < p_min:
            raise QualityDomainError(
                f"quality evaluated at p={p} < p_min={p_min}"
            )
        return self._evaluate(p, p_min)

    def _evaluate(self, p: float, p_min: float) -> float:
        raise NotImplementedError

    def diagonal(self, p: float) -> float:
        """The one-variable map p -> q(p, p)."""
        return self.q(p, p)

    def diagonal_derivative(self, p: float) -> float | None:
        """Analytic derivative of the diagonal map, or None if unavailable."""
        return None

    def standalone_price(self, alpha: float, cost: float) -> float:
        """Price maximizing alpha * q(p, p) * (p - cost) over p >= 0.

        Subclasses with a closed form override this; the generic version
        runs a bounded scalar search on the diagonal.
        """
        from scipy.optimize import minimize_scalar

        lo = max(cost, 0.0)
        hi = max(cost + 1.0, 10.0)
        objective = lambda p: -alpha * self.q(p, p) * (p - cost)
        # Diagonals are often flat or discontinuous, so a local search
        # alone can stall; presample coarsely and refine near the best.
        samples = 400
        step = (hi - lo) / samples
        best = min((lo + k * step for k in range(samples + 1)), key=objective)
        res = minimize_scalar(
            objective,
            bounds=(max(lo, best - step), min(hi, best + step)),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if objective(float(res.x)) <= objective(best):
            return float(res.x)
        return best


@dataclass(frozen=True)
class OnlyMinQuality(QualityModel):
    """Positive only when the agent's price is the minimum displayed one.

    q = level if p <= cap and p == p_min, else 0.  A cap of +inf drops
    the price ceiling.
    """

    cap: float = math.inf
    level: float = 1.0
    kind = "only-min"

    def __post_init__(self):
        if not 0.0 < self.level <= 1.0:
            raise ValueError(f"level must be in (0, 1], got {self.level}")

    def _evaluate(self, p, p_min):
        return self.level if p <= self.cap and p == p_min else 0.0

    def diagonal_derivative(self, p):
        # Piecewise constant away from the cap.
        if p == self.cap:
            return None
        return 0.0


@dataclass(frozen=True)
class PriceThresholdQuality(QualityModel):
    """Depends on the agent's own price only: q = level if p <= threshold."""

    threshold: float
    level: float = 1.0
    kind = "price-threshold"

    def __post_init__(self):
        if not 0.0 < self.level <= 1.0:
            raise ValueError(f"level must be in (0, 1], got {self.level}")

    def _evaluate(self, p, p_min):
        return self.level if p <= self.threshold else 0.0

    def diagonal_derivative(self, p):
        if p == self.threshold:
            return None
        return 0.0


@dataclass(frozen=True)
class HyperbolaQuality(QualityModel):
    """Hyperbolic decay between a floor price and a ceiling price.

    q = 1 for p < low (when p == p_min); psi(p) on [low, high] (when
    p == p_min); 0 otherwise, where psi is the hyperbola with
    psi(low) = 1 and psi(high) = delta.  Requires 1 <= low < high / 2 and
    0 < delta < low / high.
    """

    low: float
    high: float
    delta: float
    kind = "psi-hyperbola"

    def __post_init__(self):
        if not 1.0 <= self.low:
            raise ValueError(f"low must be >= 1, got {self.low}")
        if not self.low < self.high / 2.0:
            raise ValueError(f"need low < high/2, got {self.low}, {self.high}")
        if not 0.0 < self.delta < self.low / self.high:
            raise ValueError(
                f"delta must be in (0, low/high), got {self.delta}"
            )

    def psi(self, p: float) -> float:
        if p == self.low:
            return 1.0
        if p == self.high:
            return self.delta
        a = 1.0 - (1.0 + self.delta) / 2.0
        b = (1.0 + self.delta) / 2.0 * self.high - self.low
        return (1.0 + self.delta) * (self.high - self.low) / (a * p + b) - 1.0

    def psi_derivative(self, p: float) -> float:
        a = 1.0 - (1.0 + self.delta) / 2.0
        b = (1.0 + self.delta) / 2.0 * self.high - self.low
        return -(1.0 + self.delta) * (self.high - self.low) * a / (a * p + b) ** 2

    def _evaluate(self, p, p_min):
        if p != p_min:
            return 0.0
        if p < self.low:
            return 1.0
        if p <= self.high:
            return self.psi(p)
        return 0.0

    def diagonal_derivative(self, p):
        if self.low < p < self.high:
            return self.psi_derivative(p)
        if p < self.low:
            return 0.0
        return None


@dataclass(frozen=True)
class SmoothDecayQuality(QualityModel):
    """Linear decay in the price and in the gap to the minimum price.

    q = clip(intercept - price_slope * p - gap_slope * (p - p_min), 0, 1).
    The diagonal is intercept - price_slope * p, so the diagonal
    derivative is -price_slope wherever the clip is inactive.
    """

    price_slope: float
    gap_slope: float = 0.0
    intercept: float = 1.0
    kind = "smooth-decay"

    def __post_init__(self):
        if self.price_slope < 0 or self.gap_slope < 0:
            raise ValueError("slopes must be non-negative")
        if not 0.0 < self.intercept <= 1.0:
            raise ValueError(f"intercept must be in (0, 1], got {self.intercept}")

    def _evaluate(self, p, p_min):
        raw = self.intercept - self.price_slope * p - self.gap_slope * (p - p_min)
        return min(1.0, max(0.0, raw))

    def diagonal_derivative(self, p):
        raw = self.intercept - self.price_slope * p
        if 0.0 < raw < 1.0:
            return -self.price_slope
        if raw == self.intercept < 1.0:
            return -self.price_slope
        return None

    def standalone_price(self, alpha, cost):
        if self.price_slope == 0.0:
            return super().standalone_price(alpha, cost)
        # Interior maximum of (intercept - price_slope * p) * (p - cost).
        p_star = (self.intercept + self.price_slope * cost) / (2.0 * self.price_slope)
        if 0.0 < self.intercept - self.price_slope * p_star < 1.0:
            return p_star
        return super().standalone_price(alpha, cost)


@dataclass(frozen=True)
class TabulatedQuality(QualityModel):
    """Piecewise-constant lookup on a (p, p_min) sample grid.

    ``values[i][j]`` is the quality for prices in [prices[i], prices[i+1])
    and minimum prices in [min_prices[j], min_prices[j+1]).  Queries below
    the first grid point clamp to it.
    """

    prices: tuple[float, ...]
    min_prices: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]
    kind = "tabulated"

    def __post_init__(self):
        if list(self.prices) != sorted(set(self.prices)):
            raise ValueError("prices must be strictly ascending")
        if list(self.min_prices) != sorted(set(self.min_prices)):
            raise ValueError("min_prices must be strictly ascending")
        if len(self.values) != len(self.prices):
            raise ValueError("values must have one row per price")
        for row in self.values:
            if len(row) != len(self.min_prices):
                raise ValueError("values rows must match min_prices length")

    def _cell(self, p, p_min):
        i = max(bisect_right(self.prices, p) - 1, 0)
        j = max(bisect_right(self.min_prices, p_min) - 1, 0)
        return i, j

    def _evaluate(self, p, p_min):
        i, j = self._cell(p, p_min)
        return self.values[i][j]


@dataclass(frozen=True)
class AuditViolation:
    constraint: str  # "range" | "price-monotone" | "min-price-monotone"
    detail: str


@dataclass(frozen=True)
class AuditReport:
    violations: tuple[AuditViolation, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_quality(model: QualityModel, probes) -> AuditReport:
    """Check range and both monotonicity assumptions on a probe grid.

    ``probes`` is an iterable of (p, p_min) pairs with p >= p_min.
    Violations are collected, not raised.  For tabulated models the
    offending table cells are named directly.
    """
    probes = sorted(set((float(p), float(pm)) for p, pm in probes))
    out: list[AuditViolation] = []
    values = {}
    for p, pm in probes:
        v = model.q(p, pm)
        values[(p, pm)] = v
        if not 0.0 <= v <= 1.0:
            out.append(AuditViolation("range", f"q({p}, {pm}) = {v} outside [0, 1]"))

    by_pmin: dict[float, list[float]] = {}
    by_p: dict[float, list[float]] = {}
    for p, pm in probes:
        by_pmin.setdefault(pm, []).append(p)
        by_p.setdefault(p, []).append(pm)
    for pm, ps in by_pmin.items():
        for a, b in zip(ps, ps[1:]):
            if values[(b, pm)] > values[(a, pm)] + 1e-12:
                out.append(AuditViolation(
                    "price-monotone",
                    f"q({b}, {pm}) = {values[(b, pm)]} > q({a}, {pm}) = {values[(a, pm)]}",
                ))
    for p, pms in by_p.items():
        for a, b in zip(pms, pms[1:]):
            if values[(p, b)] < values[(p, a)] - 1e-12:
                out.append(AuditViolation(
                    "min-price-monotone",
                    f"q({p}, {b}) = {values[(p, b)]} < q({p}, {a}) = {values[(p, a)]}",
                ))

    if isinstance(model, TabulatedQuality):
        out.extend(_audit_table_cells(model))
    return AuditReport(tuple(out))


def _audit_table_cells(model: TabulatedQuality):
    out = []
    for i, p in enumerate(model.prices):
        for j, pm in enumerate(model.min_prices):
            v = model.values[i][j]
            if not 0.0 <= v <= 1.0:
                out.append(AuditViolation(
                    "range", f"cell [{i}][{j}] (p={p}, p_min={pm}) = {v}"))
            if i + 1 < len(model.prices) and model.values[i + 1][j] > v + 1e-12:
                out.append(AuditViolation(
                    "price-monotone",
                    f"cell [{i + 1}][{j}] > cell [{i}][{j}] "
                    f"({model.values[i + 1][j]} > {v})",
                ))
            if j + 1 < len(model.min_prices) and model.values[i][j + 1] < v - 1e-12:
                out.append(AuditViolation(
                    "min-price-monotone",
                    f"cell [{i}][{j + 1}] < cell [{i}][{j}] "
                    f"({model.values[i][j + 1]} < {v})",
                ))
    return out


def probe_grid(points) -> list[tuple[float, float]]:
    """All (p, p_min) pairs with p >= p_min drawn from ``points``."""
    pts = sorted(set(float(x) for x in points))
    return [(p, pm) for pm in pts for p in pts if p >= pm]


def diagonal_derivative(model: QualityModel, p: float, h: float = 1e-6) -> float:
    """Derivative of p -> q(p, p); analytic when available, else central
    finite difference with step ``h``."""
    exact = model.diagonal_derivative(p)
    if exact is not None:
        return exact
    if p - h < 0:
        raise InferenceError(f"cannot differentiate diagonal at p={p}")
    return (model.q(p + h, p + h) - model.q(p - h, p - h)) / (2.0 * h)
