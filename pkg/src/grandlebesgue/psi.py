"""Generating functions psi on (a, b), the grand Lebesgue norm sup_p |f|_p / psi(p),
its modulus of continuity, and the bounded-ratio / vanishing-ratio orderings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    DEFAULT_QUADRATURE,
    PeriodicFunction,
    QuadratureConfig,
    lp_norm,
    lp_norms,
    modulus_table,
)
from .errors import DomainError

__all__ = [
    "PGrid",
    "PsiFunction",
    "make_grid",
    "make_power_psi",
    "solve_continuity_h",
    "natural_psi",
    "dirac_psi",
    "constant_psi",
    "custom_psi",
    "bgls_norm",
    "bgls_modulus",
    "bgls_modulus_table",
    "ordering_lt",
    "ordering_ll",
    "parse_psi_record",
]


@dataclass(frozen=True, eq=False)
class PGrid:
    """Exponents strictly inside (a, b), kept ``inset`` away from finite endpoints."""

    points: np.ndarray
    a: float
    b: float
    inset: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0 or np.any(np.diff(pts) <= 0):
            raise DomainError("grid points must be strictly increasing")
        if pts[0] < self.a + self.inset * (1 - 1e-9) or (
                math.isfinite(self.b) and pts[-1] > self.b - self.inset * (1 - 1e-9)):
            raise DomainError("grid points must stay inside (a + inset, b - inset)")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    def refined(self, factor: float = 10.0) -> "PGrid":
        """Same layout with the endpoint inset divided by ``factor``."""
        return make_grid(self.a, self.b, len(self), self.inset / factor,
                         p_max=None if math.isfinite(self.b) else self.points[-1] * factor)


def make_grid(a: float, b: float, n: int = 16, inset: Optional[float] = None,
              p_max: Optional[float] = None) -> PGrid:
    """Grid on (a, b); distances to a finite b are log-spaced so points crowd toward b."""
    if not (a >= 1 and b > a):
        raise DomainError("need 1 <= a < b")
    if n < 2:
        raise DomainError("grid needs at least two points")
    if math.isfinite(b):
        inset = 1e-4 * (b - a) if inset is None else inset
        dist = np.geomspace(b - a - inset, inset, n)
        pts = b - dist
        pts[0] = a + inset
        return PGrid(np.unique(pts), a, b, inset)
    inset = 1e-4 if inset is None else inset
    p_max = max(64.0, 4 * a) if p_max is None else p_max
    return PGrid(np.geomspace(a + inset, p_max, n), a, b, inset)


@dataclass(frozen=True, eq=False)
class PsiFunction:
    """A member of Psi(a, b): positive, finite inside (a, b)."""

    a: float
    b: float
    family: str
    params: dict
    rule: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def __call__(self, p):
        p_arr = np.asarray(p, dtype=float)
        out = np.asarray(self.rule(p_arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    @property
    def is_dirac(self) -> bool:
        return self.family == "dirac"

    def to_record(self) -> str:
        """``key=value`` pairs joined by ``;``, parseable by :func:`parse_psi_record`."""
        if self.family == "custom":
            raise ValueError("custom psi rules cannot be serialized")
        items = [("family", self.family), ("a", self.a), ("b", self.b)]
        for k, v in self.params.items():
            if isinstance(v, (list, tuple, np.ndarray)):
                v = ",".join(repr(float(x)) for x in v)
            items.append((k, v))
        return ";".join(f"{k}={_fmt(v)}" for k, v in items)

    def check(self, grid: PGrid) -> None:
        vals = np.atleast_1d(self(grid.points))
        if not (np.all(np.isfinite(vals)) and np.all(vals > 0)):
            raise DomainError(f"psi ({self.family}) must be positive and finite on the grid")


def _fmt(v) -> str:
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def solve_continuity_h(a: float, beta: float, gamma: float) -> float:
    """Root h > a of ``(h - a)**-beta = h**-gamma`` (gamma < 0), by bisection on the log difference."""
    if gamma >= 0:
        raise DomainError("continuity equation needs gamma < 0")
    if beta < 0:
        raise DomainError("beta must be non-negative")
    g = -gamma

    def diff(h):
        return -beta * math.log(h - a) - g * math.log(h)

    if beta == 0:
        # left side is identically 1 and h**g > a**g >= 1 on (a, inf)
        raise DomainError("no solution: beta = 0 makes the left side constant 1")
    lo = a + max(1e-12, 1e-12 * a)
    while diff(lo) <= 0:
        lo = a + (lo - a) * 1e-3
        if lo - a < 1e-300:
            raise DomainError("continuity equation has no root in (a, inf)")
    hi = a + 1.0
    while diff(hi) > 0:
        hi = a + 2 * (hi - a)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if diff(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def make_power_psi(a: float, b: float, beta: float, gamma: float) -> PsiFunction:
    """``(p - a)**-beta * (b - p)**-gamma``; for b = inf the piecewise rule
    ``(p - a)**-beta`` below h and ``p**-gamma`` (gamma < 0) from h on."""
    if not (a >= 1 and b > a):
        raise DomainError("need 1 <= a < b")
    if beta < 0:
        raise DomainError("beta must be non-negative")
    if math.isfinite(b):
        def rule(p):
            return (p - a) ** -beta * (b - p) ** -gamma
        return PsiFunction(a, b, "power", {"beta": beta, "gamma": gamma}, rule)
    if gamma >= 0:
        raise DomainError("an infinite right end needs gamma < 0")
    h = solve_continuity_h(a, beta, gamma)

    def rule_inf(p):
        with np.errstate(divide="ignore"):
            return np.where(p < h, np.abs(p - a) ** -beta, p ** -gamma)
    return PsiFunction(a, b, "power_inf", {"beta": beta, "gamma": gamma, "h": h}, rule_inf)


def constant_psi(a: float = 1.0, b: float = 2.0, value: float = 1.0) -> PsiFunction:
    if value <= 0:
        raise DomainError("psi must be positive")
    return PsiFunction(a, b, "constant", {"value": value},
                       lambda p: np.full(np.shape(p), value, dtype=float))


def dirac_psi(r: float, a: float = 1.0, b: float = math.inf) -> PsiFunction:
    """psi_r: 1 at p = r and +inf elsewhere. Carried as a tag; sups collapse to p = r."""
    if not a <= r < b:
        raise DomainError("r must lie in [a, b)")
    return PsiFunction(a, b, "dirac", {"r": r},
                       lambda p: np.where(np.asarray(p) == r, 1.0, np.inf))


def custom_psi(rule: Callable, a: float, b: float) -> PsiFunction:
    return PsiFunction(a, b, "custom", {}, rule)


def _table_psi(a: float, b: float, points: np.ndarray, values: np.ndarray,
               source: Optional[PeriodicFunction], cfg: QuadratureConfig) -> PsiFunction:
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    logv = np.log(values)

    def rule(p):
        p = np.asarray(p, dtype=float)
        flat = np.atleast_1d(p).ravel()
        out = np.exp(np.interp(flat, points, logv))
        outside = (flat < points[0]) | (flat > points[-1])
        if source is not None and np.any(outside):
            out[outside] = lp_norms(source, flat[outside], cfg)
        return out.reshape(p.shape) if p.ndim else out[0]

    return PsiFunction(a, b, "natural", {"points": points.tolist(), "values": values.tolist()}, rule)


def natural_psi(f: PeriodicFunction, grid: PGrid,
                cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> PsiFunction:
    """``psi(p) = |f|_p`` cached on the grid.

    Between grid points log psi is interpolated linearly (monotone because
    p -> |f|_p is non-decreasing); outside the grid range the norm is computed.
    """
    norms = lp_norms(f, grid.points, cfg)
    bad = ~np.isfinite(norms)
    if np.any(bad):
        raise DomainError(f"|f|_p diverges at p = {grid.points[bad][0]:.6g}")
    if np.any(norms <= 0):
        raise DomainError("natural psi of the zero function is not positive")
    return _table_psi(grid.a, grid.b, grid.points, norms, f, cfg)


def parse_psi_record(record: str) -> PsiFunction:
    """Inverse of :meth:`PsiFunction.to_record`."""
    try:
        kv = dict(item.split("=", 1) for item in record.split(";") if item.strip())
        family = kv.pop("family")
        a, b = float(kv.pop("a")), float(kv.pop("b"))
        if family == "power" or family == "power_inf":
            return make_power_psi(a, b, float(kv["beta"]), float(kv["gamma"]))
        if family == "constant":
            return constant_psi(a, b, float(kv["value"]))
        if family == "dirac":
            return dirac_psi(float(kv["r"]), a, b)
        if family == "natural":
            pts = np.array([float(x) for x in kv["points"].split(",")])
            vals = np.array([float(x) for x in kv["values"].split(",")])
            return _table_psi(a, b, pts, vals, None, DEFAULT_QUADRATURE)
    except (KeyError, ValueError) as exc:
        raise DomainError(f"malformed psi record {record!r}: {exc}") from None
    raise DomainError(f"unknown psi family {family!r}")


# ---------------------------------------------------------------------------
# norm and modulus

def _active_points(psi: PsiFunction, grid: PGrid) -> np.ndarray:
    if psi.is_dirac:
        return np.array([psi.params["r"]])
    return grid.points


def bgls_norm(f: PeriodicFunction, psi: PsiFunction, grid: PGrid,
              cfg: QuadratureConfig = DEFAULT_QUADRATURE, return_witness: bool = False):
    """``max_p |f|_p / psi(p)`` over the grid; with ``return_witness`` also the argmax p."""
    ps = _active_points(psi, grid)
    ratios = lp_norms(f, ps, cfg) / (1.0 if psi.is_dirac else psi(ps))
    i = int(np.argmax(ratios))
    value = float(ratios[i])
    return (value, float(ps[i])) if return_witness else value


def bgls_modulus_table(f: PeriodicFunction, deltas, psi: PsiFunction, grid: PGrid,
                       h_grid_size: int = 64, cfg: QuadratureConfig = DEFAULT_QUADRATURE
                       ) -> np.ndarray:
    """Grand-Lebesgue modulus for each delta (joint max over shifts and exponents)."""
    ps = _active_points(psi, grid)
    table = modulus_table(f, deltas, ps, h_grid_size, cfg)
    weights = 1.0 if psi.is_dirac else psi(ps)
    return np.max(table / weights, axis=1)


def bgls_modulus(f: PeriodicFunction, delta: float, psi: PsiFunction, grid: PGrid,
                 h_grid_size: int = 64, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    return float(bgls_modulus_table(f, [delta], psi, grid, h_grid_size, cfg)[0])


# ---------------------------------------------------------------------------
# orderings

@dataclass(frozen=True)
class OrderingResult:
    value: float
    holds: Optional[bool]
    evidence: list


def _grids(grid: PGrid, refinements: int) -> list[PGrid]:
    out = [grid]
    for _ in range(refinements):
        out.append(out[-1].refined())
    return out


def ordering_lt(psi1: PsiFunction, psi2: PsiFunction, grid: PGrid,
                refinements: int = 2) -> OrderingResult:
    """Bounded ratio sup psi1/psi2, judged stable when endpoint refinement moves it
    by less than a factor 1.1 per step."""
    sups = []
    for g in _grids(grid, refinements):
        sups.append(float(np.max(np.asarray(psi1(g.points)) / np.asarray(psi2(g.points)))))
    growth = [b / a for a, b in zip(sups, sups[1:])]
    holds = all(math.isfinite(s) for s in sups) and all(r < 1.1 for r in growth)
    return OrderingResult(sups[-1], holds, sups)


def ordering_ll(psi1: PsiFunction, psi2: PsiFunction, grid: PGrid,
                refinements: int = 3) -> OrderingResult:
    """Vanishing ratio psi1/psi2 where psi2 blows up.

    Ratios are ordered by increasing psi2 and cut into deciles; the relation
    holds when the last decile is non-increasing and its largest ratio is below
    half the largest ratio of the decile before.  ``holds`` is None when psi2
    does not grow under endpoint refinement (nothing to test).
    """
    grids = _grids(grid, refinements)
    tops = [float(np.max(psi2(g.points))) for g in grids]
    if not all(b > 1.1 * a for a, b in zip(tops, tops[1:])):
        return OrderingResult(math.nan, None, tops)
    pts = np.unique(np.concatenate([g.points for g in grids]))
    v2 = np.asarray(psi2(pts))
    order = np.argsort(v2, kind="stable")
    ratios = (np.asarray(psi1(pts)) / v2)[order]
    deciles = np.array_split(ratios, 10)
    last, prev = deciles[-1], deciles[-2]
    monotone = bool(np.all(np.diff(last) <= 1e-12 * np.abs(last[:-1])))
    holds = monotone and float(np.max(last)) < 0.5 * float(np.max(prev))
    return OrderingResult(float(ratios[-1]), holds, [float(np.max(d)) for d in deciles])
