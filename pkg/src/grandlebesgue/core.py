"""Periodic functions on a circle with normalized measure: Lp norms, shifts, moduli.

Three representations are supported:

* ``rule`` -- a closed-form callable, integrated by Gauss-Legendre panels.
  Declared singular points get a logarithmic change of variables
  ``x = s + r * exp(-u)`` so that integrable blow-ups such as
  ``x**-a * |log x|**g`` are resolved down to ``1e-300`` from the singularity.
* ``samples`` -- values on a uniform grid of power-of-two size; norms are
  discrete means.
* ``fourier`` -- a :class:`TrigPolynomial`; norms are discrete means on a grid
  fine enough to make ``|U|**p`` exact for small even ``p``.

Closed-form rules are evaluated as ``rule(anchor, offset)`` meaning the point
``anchor + offset`` (mod circumference).  Keeping the two apart preserves tiny
offsets next to a singularity that sits at a nonzero anchor, which is what
makes ``shift(f, h) - f`` integrable to full precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DataError, DomainError
from .polynomial import TWO_PI, TrigPolynomial, next_pow2

__all__ = [
    "CircleDomain",
    "CIRCLE",
    "UNIT_INTERVAL",
    "QuadratureConfig",
    "PeriodicFunction",
    "lp_norm",
    "lp_norms",
    "shift",
    "modulus_lp",
    "modulus_table",
    "f0_exact_lp_norm",
]

_SNAP = 2e-15
_MERGE = 2e-15
# offsets below exp(-_U_FLOOR) would underflow against the anchor
_U_FLOOR = 690.0
# with a log-space rule the substitution variable can run much further
_U_LOG_MAX = 1e8


@dataclass(frozen=True)
class CircleDomain:
    circumference: float = TWO_PI

    def __post_init__(self):
        if not (self.circumference > 0 and math.isfinite(self.circumference)):
            raise DomainError("circumference must be a positive real")

    @property
    def measure_normalizer(self) -> float:
        return 1.0 / self.circumference

    def reduce(self, x):
        return np.mod(x, self.circumference)

    def grid(self, n_points: int, offset: float = 0.0) -> np.ndarray:
        return (np.arange(n_points) + offset) * (self.circumference / n_points)


CIRCLE = CircleDomain(TWO_PI)
UNIT_INTERVAL = CircleDomain(1.0)


@dataclass(frozen=True)
class QuadratureConfig:
    """Panel layout and accuracy target for closed-form integrals.

    ``endpoint_refinement_levels`` is the number of distance halvings next to a
    singular point that each get their own panel; past the last halving the
    panels grow geometrically in ``u = -log(distance)`` until ``exp(-690)``.
    """

    base_panels: int = 32
    endpoint_refinement_levels: int = 40
    relative_tolerance: float = 1e-9
    gauss_order: int = 12
    max_bisections: int = 6
    divergence_growth: float = 1.5

    def __post_init__(self):
        if self.base_panels < 1:
            raise DomainError("base_panels must be positive")
        if self.endpoint_refinement_levels < 0:
            raise DomainError("endpoint_refinement_levels must be non-negative")
        if not (0 < self.relative_tolerance <= 1e-2):
            raise DomainError("relative_tolerance must lie in (0, 1e-2]")


DEFAULT_QUADRATURE = QuadratureConfig()


def _circ_dist(x: float, y: float, period: float) -> float:
    d = abs(x - y) % period
    return min(d, period - d)


def _normalize_points(points, period: float) -> tuple[float, ...]:
    out: list[float] = []
    for s in sorted(float(np.mod(p, period)) for p in points):
        if s >= period:
            s = 0.0
        if not any(_circ_dist(s, t, period) <= _MERGE * period for t in out):
            out.append(s)
    return tuple(sorted(out))


def _snap(x: float, points: Sequence[float], period: float) -> float:
    x = float(np.mod(x, period))
    for s in points:
        if _circ_dist(x, s, period) <= _SNAP * period:
            return s
    if period - x <= _SNAP * period:
        return 0.0
    return x


Rule = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """A real function on a circle of the given circumference.

    Build instances through :meth:`from_callable`, :meth:`from_samples`,
    :meth:`from_trig` or :meth:`constant`.
    """

    domain: CircleDomain
    kind: str
    rule: Optional[Rule] = None
    sample_values: Optional[np.ndarray] = None
    poly: Optional[TrigPolynomial] = None
    singularities: tuple[float, ...] = ()
    label: str = ""
    exact_norm: Optional[Callable[[float], float]] = field(default=None, repr=False)
    # log|f| at anchor + direction * exp(log_dist); lets the singular quadrature
    # run past the point where exp(-u) underflows
    log_rule: Optional[Callable[[float, float, np.ndarray], np.ndarray]] = field(default=None, repr=False)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_callable(cls, fn, domain: CircleDomain = CIRCLE, singularities=(), label="",
                      exact_norm=None, log_rule=None) -> "PeriodicFunction":
        period = domain.circumference

        def rule(anchor, offset):
            return np.asarray(fn(np.mod(anchor + offset, period)), dtype=float)

        return cls(domain, "rule", rule=rule,
                   singularities=_normalize_points(singularities, period),
                   label=label, exact_norm=exact_norm, log_rule=log_rule)

    @classmethod
    def constant(cls, c: float, domain: CircleDomain = CIRCLE) -> "PeriodicFunction":
        return cls.from_trig(TrigPolynomial(2.0 * c, [], [], domain.circumference), label=f"const:{c:g}")

    @classmethod
    def from_samples(cls, values, domain: CircleDomain = CIRCLE, source: Optional[Rule] = None,
                     label="") -> "PeriodicFunction":
        v = np.asarray(values, dtype=float).ravel()
        n = v.size
        if n < 2 or n & (n - 1):
            raise DomainError(f"sample grid size must be a power of two, got {n}")
        if not np.all(np.isfinite(v)):
            raise DataError("non-finite sample values")
        return cls(domain, "samples", rule=source, sample_values=v, label=label)

    @classmethod
    def from_trig(cls, poly: TrigPolynomial, label="") -> "PeriodicFunction":
        return cls(CircleDomain(poly.circumference), "fourier", poly=poly, label=label)

    # -- evaluation -------------------------------------------------------
    @property
    def circumference(self) -> float:
        return self.domain.circumference

    def interpolant(self) -> TrigPolynomial:
        """Trigonometric interpolant of the samples (Nyquist mode dropped)."""
        if self.kind == "fourier":
            return self.poly
        if self.kind != "samples":
            raise TypeError("only sampled or Fourier functions have an exact interpolant")
        v = self.sample_values
        c = np.fft.rfft(v) / v.size
        return TrigPolynomial.from_complex(c[: v.size // 2], self.circumference)

    def evaluate(self, anchor: float, offset) -> np.ndarray:
        offset = np.asarray(offset, dtype=float)
        if self.kind == "rule":
            return self.rule(anchor, offset)
        if self.kind == "samples" and self.rule is not None:
            return self.rule(anchor, offset)
        return self.interpolant()(np.mod(anchor + offset, self.circumference))

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(0.0, x)

    def grid_values(self, n_points: int, offset: float = 0.0) -> np.ndarray:
        """Values at x_j = (j + offset) L / N; a half-step offset avoids x = 0."""
        if self.kind == "fourier":
            vals = self.poly.samples(n_points, offset)
        elif self.kind == "samples" and offset == 0.0 and self.sample_values.size == n_points:
            vals = self.sample_values
        else:
            vals = self(self.domain.grid(n_points, offset))
        if not np.all(np.isfinite(vals)):
            raise DataError("non-finite values on the sampling grid")
        return vals

    def _as_rule(self) -> Rule:
        if self.kind == "rule" or (self.kind == "samples" and self.rule is not None):
            return self.rule
        poly = self.interpolant()
        period = self.circumference
        return lambda a, d: poly(np.mod(a + d, period))

    # -- arithmetic -------------------------------------------------------
    def _combine(self, other: "PeriodicFunction", op) -> "PeriodicFunction":
        if not math.isclose(self.circumference, other.circumference):
            raise DomainError("functions live on different circles")
        if self.kind == "fourier" and other.kind == "fourier":
            return PeriodicFunction.from_trig(op(self.poly, other.poly))
        if (self.kind == "samples" and other.kind == "samples"
                and self.sample_values.size == other.sample_values.size):
            src = None
            if self.rule is not None and other.rule is not None:
                r1, r2 = self.rule, other.rule
                src = lambda a, d: op(r1(a, d), r2(a, d))  # noqa: E731
            return PeriodicFunction(self.domain, "samples", rule=src,
                                    sample_values=op(self.sample_values, other.sample_values))
        r1, r2 = self._as_rule(), other._as_rule()
        sing = _normalize_points(self.singularities + other.singularities, self.circumference)
        return PeriodicFunction(self.domain, "rule", rule=lambda a, d: op(r1(a, d), r2(a, d)),
                                singularities=sing)

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __mul__(self, c: float) -> "PeriodicFunction":
        c = float(c)
        if self.kind == "fourier":
            return PeriodicFunction.from_trig(self.poly * c)
        src = None if self.rule is None else (lambda a, d, r=self.rule: c * r(a, d))
        vals = None if self.sample_values is None else c * self.sample_values
        return PeriodicFunction(self.domain, self.kind, rule=src, sample_values=vals,
                                singularities=self.singularities)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# quadrature

@lru_cache(maxsize=None)
def _gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _panel_nodes(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes, log-weights and panel index for Gauss panels between ``edges``."""
    t, w = _gauss(order)
    width = np.diff(edges)
    nodes = (edges[:-1, None] + width[:, None] * t[None, :]).ravel()
    logw = np.log((width[:, None] * w[None, :]).ravel())
    panel = np.repeat(np.arange(width.size), order)
    return nodes, logw, panel


def _bisect(edges: np.ndarray) -> np.ndarray:
    mid = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(2 * edges.size - 1)
    out[0::2], out[1::2] = edges, mid
    return out


def _logsumexp(a: np.ndarray, axis: int = -1) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    finite_m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s = np.sum(np.exp(a - finite_m), axis=axis, keepdims=True)
        out = np.log(s) + finite_m
    out = np.where(np.isposinf(m), np.inf, out)
    return np.squeeze(out, axis=axis)


def _log_abs(v: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(v))


def _singular_edges(r: float, cfg: QuadratureConfig, log_space: bool = False
                    ) -> tuple[np.ndarray, int]:
    """Panel edges in u = -log(distance / r); returns edges and the index where
    the divergence check window starts (three panels before the end)."""
    levels = cfg.endpoint_refinement_levels
    if log_space:
        u_max = _U_LOG_MAX
    else:
        u_max = _U_FLOOR + math.log(r) if r < 1 else _U_FLOOR
    halvings = [k * math.log(2.0) for k in range(levels + 1) if k * math.log(2.0) < u_max]
    edges = list(halvings)
    u = edges[-1]
    while u < u_max:
        u = min(max(1.5 * u, u + 1.0), u_max)
        edges.append(u)
    edges = np.array(edges)
    return edges, max(0, edges.size - 4)


def _half_log_terms(f: PeriodicFunction, anchor: float, direction: float, r: float,
                    edges: np.ndarray, ps: np.ndarray, order: int):
    u, logw, panel = _panel_nodes(edges, order)
    base = math.log(r) - u + logw
    if f.log_rule is not None:
        log_vals = np.asarray(f.log_rule(anchor, direction, math.log(r) - u), dtype=float)
        if np.any(np.isnan(log_vals)):
            raise DataError("function returned NaN")
        return ps[:, None] * log_vals[None, :] + base[None, :], panel
    offsets = direction * r * np.exp(-u)
    vals = f.evaluate(anchor, offsets)
    if np.any(np.isnan(vals)):
        raise DataError("function returned NaN")
    bad = ~np.isfinite(vals)
    if np.any(bad & (u < 20.0)):
        raise DataError("non-finite values away from declared singularities")
    return ps[:, None] * _log_abs(vals)[None, :] + base[None, :], panel


def _singular_log_integral(f: PeriodicFunction, ps: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    period = f.circumference
    sing = list(f.singularities)
    halves = []
    for i, s in enumerate(sing):
        nxt = sing[i + 1] if i + 1 < len(sing) else sing[0] + period
        r = 0.5 * (nxt - s)
        halves.append((s, 1.0, r))
        halves.append((sing[i + 1] if i + 1 < len(sing) else sing[0], -1.0, r))

    total = np.full(ps.size, -np.inf)
    diverged = np.zeros(ps.size, dtype=bool)
    for anchor, direction, r in halves:
        edges, check_from = _singular_edges(r, cfg, f.log_rule is not None)
        u_check = edges[check_from]
        prev = None
        for level in range(cfg.max_bisections + 1):
            if level:
                edges = _bisect(edges)
            terms, panel = _half_log_terms(f, anchor, direction, r, edges, ps, cfg.gauss_order)
            est = _logsumexp(terms, axis=1)
            if prev is not None and np.all(_settled(est, prev, cfg.relative_tolerance)):
                break
            prev = est
        # cumulative estimate before the last three panels
        node_u = _panel_nodes(edges, cfg.gauss_order)[0]
        head = np.where(node_u[None, :] < u_check, terms, -np.inf)
        early = _logsumexp(head, axis=1)
        with np.errstate(invalid="ignore"):
            grew = (est - early) > math.log(cfg.divergence_growth)
        diverged |= grew & np.isfinite(est)
        total = np.logaddexp(total, est)
    total = np.where(diverged, np.inf, total)
    return total


def _regular_log_integral(f: PeriodicFunction, ps: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    period = f.circumference
    edges = np.linspace(0.0, period, cfg.base_panels + 1)
    prev = None
    for level in range(cfg.max_bisections + 1):
        if level:
            edges = _bisect(edges)
        x, logw, _ = _panel_nodes(edges, cfg.gauss_order)
        vals = f.evaluate(0.0, x)
        if not np.all(np.isfinite(vals)):
            raise DataError("non-finite values away from declared singularities")
        est = _logsumexp(ps[:, None] * _log_abs(vals)[None, :] + logw[None, :], axis=1)
        if prev is not None and np.all(_settled(est, prev, cfg.relative_tolerance)):
            break
        prev = est
    return est


def _settled(est: np.ndarray, prev: np.ndarray, tol: float) -> np.ndarray:
    both_inf = np.isinf(est) & (est == prev)
    with np.errstate(invalid="ignore"):
        close = np.abs(est - prev) <= tol
    return both_inf | close | np.isneginf(est)


def _horner(poly: TrigPolynomial, x: np.ndarray) -> np.ndarray:
    """Evaluate U at many points by Horner's rule in z = exp(i w x)."""
    c = poly.complex_coeffs()
    z = np.exp(1j * (TWO_PI / poly.circumference) * x)
    acc = np.full(x.shape, c[-1], dtype=complex)
    for ck in c[-2::-1]:
        acc = acc * z + ck
    return 2.0 * acc.real - c[0].real


def _derivative(poly: TrigPolynomial) -> TrigPolynomial:
    k = np.arange(1, poly.degree + 1) * (TWO_PI / poly.circumference)
    return TrigPolynomial(0.0, k * poly.b, -k * poly.a, poly.circumference)


def _sign_change_roots(poly: TrigPolynomial, n_points: int, iterations: int = 6) -> np.ndarray:
    """Roots of ``poly`` bracketed by sign changes on a uniform grid.

    Each bracket spans a small fraction of a wavelength, so Newton steps
    started at the linear interpolant and clipped to the bracket converge in
    a handful of iterations.
    """
    L = poly.circumference
    step = L / n_points
    v = poly.samples(n_points)
    nxt = np.roll(v, -1)
    idx = np.nonzero((v == 0.0) | (v * nxt < 0.0))[0]
    if idx.size == 0:
        return np.empty(0)
    lo = idx * step
    hi = lo + step
    v0, v1 = v[idx], nxt[idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        x = np.where(v0 == v1, lo, lo - v0 * step / (v1 - v0))
    dpoly = _derivative(poly)
    for _ in range(iterations):
        fx = _horner(poly, x)
        dfx = _horner(dpoly, x)
        with np.errstate(invalid="ignore", divide="ignore"):
            nx = x - fx / dfx
        x = np.where(np.isfinite(nx), np.clip(nx, lo, hi), x)
    return np.mod(x, L)


def _poly_sup(poly: TrigPolynomial) -> float:
    """``max |U|``: grid maximum polished at the critical points of U."""
    n = next_pow2(max(256, 16 * (poly.degree + 1)))
    best = float(np.max(np.abs(poly.samples(n))))
    if poly.degree:
        crit = _sign_change_roots(_derivative(poly), n)
        if crit.size:
            best = max(best, float(np.max(np.abs(_horner(poly, crit)))))
    return best


_ZERO_GRADING = 14
# above this degree node-wise evaluation costs more than it buys; the
# kink error of an oversampled trapezoid rule is then ~(1/32)^(p+1)
_QUAD_MAX_DEGREE = 256


def _poly_norms(poly: TrigPolynomial, ps: np.ndarray) -> np.ndarray:
    """``|U|_p`` for a trigonometric polynomial.

    Even integer exponents use the trapezoid rule on a grid that integrates
    ``U^p`` exactly.  Other exponents use Gauss panels split at the sign
    changes of U, graded geometrically toward each root where ``|U|^p`` has
    its kink.
    """
    deg = poly.degree
    L = poly.circumference
    out = np.empty(ps.size)
    other = []
    for i, p in enumerate(ps):
        if math.isinf(p):
            out[i] = _poly_sup(poly)
        elif p == int(p) and int(p) % 2 == 0 and p * deg < (1 << 17):
            n = next_pow2(max(64, int(p * deg) + 2))
            out[i] = float(np.mean(poly.samples(n) ** int(p))) ** (1.0 / p)
        else:
            other.append(i)
    if not other:
        return out
    if deg == 0:
        out[other] = abs(0.5 * poly.a0)
        return out
    if deg > _QUAD_MAX_DEGREE:
        vals = poly.samples(min(next_pow2(32 * (deg + 1)), 1 << 20))
        out[other] = _discrete_norms(vals, ps[other])
        return out
    scale = float(np.max(np.abs(poly.samples(next_pow2(4 * (deg + 1))))))
    if scale == 0.0:
        out[other] = 0.0
        return out
    roots = _sign_change_roots(poly, next_pow2(max(256, 16 * (deg + 1))))
    base = np.linspace(0.0, L, 4 * (deg + 1) + 1)
    width = L / (4 * (deg + 1))
    grade = width * 0.5 ** np.arange(1, _ZERO_GRADING + 1)
    pieces = [base, roots]
    if roots.size:
        pieces.append(np.mod((roots[:, None] + grade[None, :]).ravel(), L))
        pieces.append(np.mod((roots[:, None] - grade[None, :]).ravel(), L))
    edges = np.unique(np.concatenate(pieces))
    if edges[-1] < L:
        edges = np.append(edges, L)
    if edges[0] > 0.0:
        edges = np.insert(edges, 0, 0.0)
    x, logw, _ = _panel_nodes(edges, 12)
    a = np.abs(_horner(poly, x)) / scale
    w = np.exp(logw) / L
    for i in other:
        out[i] = scale * float(np.sum(w * a ** ps[i])) ** (1.0 / ps[i])
    return out


def _discrete_norms(values: np.ndarray, ps: np.ndarray) -> np.ndarray:
    a = np.abs(values)
    m = float(np.max(a)) if a.size else 0.0
    out = np.empty(ps.size)
    for i, p in enumerate(ps):
        if m == 0.0:
            out[i] = 0.0
        elif math.isinf(p):
            out[i] = m
        else:
            out[i] = m * float(np.mean((a / m) ** p)) ** (1.0 / p)
    return out


def lp_norms(f: PeriodicFunction, ps, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """``|f|_p`` for several exponents at once (one set of function evaluations).

    Returns ``inf`` where the integral diverges.
    """
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    if np.any(ps < 1) or np.any(np.isnan(ps)):
        raise DomainError(f"Lp norms need p >= 1, got {ps.min()}")
    if f.kind == "samples":
        return _discrete_norms(f.sample_values, ps)
    if f.kind == "fourier":
        return _poly_norms(f.poly, ps)

    out = np.empty(ps.size)
    inf_mask = np.isinf(ps)
    if np.any(inf_mask):
        if f.singularities:
            out[inf_mask] = np.inf
        else:
            x = f.domain.grid(1 << 14)
            vals = f.evaluate(0.0, x)
            if not np.all(np.isfinite(vals)):
                raise DataError("non-finite values away from declared singularities")
            out[inf_mask] = float(np.max(np.abs(vals)))
    fin = ~inf_mask
    if np.any(fin):
        pf = ps[fin]
        if f.singularities:
            logi = _singular_log_integral(f, pf, cfg)
        else:
            logi = _regular_log_integral(f, pf, cfg)
        logi = logi - math.log(f.circumference)
        with np.errstate(over="ignore"):
            out[fin] = np.exp(logi / pf)
    return out


def lp_norm(f: PeriodicFunction, p: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``(integral of |f|^p d mu)^(1/p)`` with the normalized measure; ``inf`` if divergent."""
    if not p >= 1:
        raise DomainError(f"Lp norm needs p >= 1, got {p}")
    return float(lp_norms(f, [p], cfg)[0])


def shift(f: PeriodicFunction, h: float) -> PeriodicFunction:
    """``x -> f(x + h)`` with arithmetic modulo the circumference."""
    period = f.circumference
    if not abs(h) < period:
        raise DomainError(f"shift {h} exceeds the circumference {period}")
    if h == 0:
        return f
    if f.kind == "fourier":
        return PeriodicFunction.from_trig(f.poly.shift(h), label=f.label)
    if f.kind == "samples":
        n = f.sample_values.size
        steps = h * n / period
        if abs(steps - round(steps)) < 1e-9:
            return PeriodicFunction(f.domain, "samples", rule=_shifted_rule(f.rule, h, (), period)
                                    if f.rule is not None else None,
                                    sample_values=np.roll(f.sample_values, -int(round(steps))),
                                    label=f.label)
        if f.rule is not None:
            x = f.domain.grid(n) + h
            return PeriodicFunction(f.domain, "samples", rule=_shifted_rule(f.rule, h, (), period),
                                    sample_values=f.rule(0.0, x), label=f.label)
        return PeriodicFunction.from_samples(f.interpolant().shift(h).samples(n), f.domain, label=f.label)
    snap_points = tuple(f.singularities) + (0.0,)
    return PeriodicFunction(
        f.domain, "rule", rule=_shifted_rule(f.rule, h, snap_points, period),
        singularities=_normalize_points([s - h for s in f.singularities], period),
        label=f.label,
    )


def _shifted_rule(rule: Rule, h: float, snap_points, period: float) -> Rule:
    def shifted(anchor, offset):
        return rule(_snap(anchor + h, snap_points, period), offset)
    return shifted


def _h_grid(delta: float, h_grid_size: int) -> np.ndarray:
    # ||T(-h)f - f||_p = ||T(h)f - f||_p by translation invariance, so only h >= 0 is visited
    m = max(1, h_grid_size // 2)
    return delta * np.arange(1, m + 1) / m


def _difference_norms(f: PeriodicFunction, hs: np.ndarray, ps: np.ndarray,
                      cfg: QuadratureConfig) -> np.ndarray:
    """Matrix of ||T(h)f - f||_p, rows indexed by h, columns by p."""
    out = np.zeros((hs.size, ps.size))
    if f.kind == "fourier":
        for i, h in enumerate(hs):
            if h != 0:
                out[i] = _poly_norms(f.poly.shift(h) - f.poly, ps)
        return out
    for i, h in enumerate(hs):
        if h == 0:
            continue
        out[i] = lp_norms(shift(f, h) - f, ps, cfg)
    return out


def modulus_table(f: PeriodicFunction, deltas, ps, h_grid_size: int = 64,
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """``omega(f, delta)_p`` for every (delta, p) pair, shape (len(deltas), len(ps)).

    The shift grid for a given delta is the union of the uniform grids of all
    requested deltas not exceeding it, so the table is non-decreasing in delta.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    if np.any(deltas < 0):
        raise DomainError("delta must be non-negative")
    if np.any(deltas > f.circumference):
        raise DomainError("delta exceeds the circumference")
    if np.any(ps < 1):
        raise DomainError("modulus needs p >= 1")
    pos = np.unique(deltas[deltas > 0])
    if pos.size == 0:
        return np.zeros((deltas.size, ps.size))
    hs = np.unique(np.concatenate([_h_grid(d, h_grid_size) for d in pos]))
    hs = hs[hs < f.circumference]
    diffs = _difference_norms(f, hs, ps, cfg)
    running = np.maximum.accumulate(diffs, axis=0)
    out = np.zeros((deltas.size, ps.size))
    for i, d in enumerate(deltas):
        if d > 0:
            j = np.searchsorted(hs, d * (1 + 1e-12), side="right") - 1
            out[i] = running[j] if j >= 0 else 0.0
    return out


def modulus_lp(f: PeriodicFunction, delta: float, p: float, h_grid_size: int = 64,
               cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Grid approximation of ``sup_{|h| <= delta} |T(h)f - f|_p``."""
    return float(modulus_table(f, [delta], [p], h_grid_size, cfg)[0, 0])


def f0_exact_lp_norm(delta_exp: float, gamma_exp: float, p: float) -> float:
    """``|f0|_p`` for ``f0(x) = x**-delta * |log x|**gamma`` on (0, 1), from the Gamma integral.

    Evaluated in log space; ``inf`` once ``p * delta >= 1``.
    """
    if not 0 < delta_exp < 1:
        raise DomainError("delta_exp must lie in (0, 1)")
    if gamma_exp < 0:
        raise DomainError("gamma_exp must be non-negative")
    if p < 1:
        raise DomainError("p must be at least 1")
    if math.isinf(p) or p * delta_exp >= 1:
        return math.inf
    gp = gamma_exp * p
    log_int = math.lgamma(gp + 1.0) - (gp + 1.0) * math.log1p(-p * delta_exp)
    return math.exp(log_int / p)
