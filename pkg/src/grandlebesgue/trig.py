"""Fourier analysis on the circle: coefficients, de la Vallee-Poussin means,
best-approximation brackets and the Nikol'skii / Jackson inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

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
from .polynomial import TrigPolynomial

__all__ = [
    "TrigPolynomial",
    "TheoremConstants",
    "VPMultiplier",
    "fourier_coefficients",
    "vallee_poussin",
    "best_approx_estimate",
    "nikolskii_check",
    "jackson_check",
    "dyadic_decomposition",
    "random_polynomials",
    "run_inequality_suite",
]

FunctionLike = Union[PeriodicFunction, TrigPolynomial]


@dataclass(frozen=True)
class TheoremConstants:
    """Absolute constants used by the embedding bound and the V-P estimates."""

    c0: float = 3.0
    c_jackson: float = 12.0
    series_factor: float = 32.0
    theorem_factor: float = 6.0

    def __post_init__(self):
        for name in ("c0", "c_jackson", "series_factor", "theorem_factor"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class VPMultiplier:
    """Delayed-mean taper: 1 up to n, linear down to 0 at 2n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("Vallee-Poussin index must be a positive integer")

    def __call__(self, j) -> np.ndarray:
        j = np.abs(np.asarray(j, dtype=float))
        return np.clip((2 * self.n - j) / self.n, 0.0, 1.0)


def _as_function(f: FunctionLike) -> PeriodicFunction:
    return PeriodicFunction.from_trig(f) if isinstance(f, TrigPolynomial) else f


def fourier_coefficients(f: FunctionLike, n_points: int) -> TrigPolynomial:
    """Degree ``N/2 - 1`` polynomial from the DFT of ``N`` samples of ``f``.

    Functions with declared singularities are sampled at cell midpoints; the
    half-step phase is removed from the coefficients.
    """
    if n_points < 2 or n_points & (n_points - 1):
        raise DomainError("sample count must be a power of two")
    if isinstance(f, TrigPolynomial):
        f = PeriodicFunction.from_trig(f)
    offset = 0.5 if f.singularities else 0.0
    vals = f.grid_values(n_points, offset)
    c = np.fft.rfft(vals)[: n_points // 2] / n_points
    if offset:
        c = c * np.exp(-2j * math.pi * np.arange(c.size) * offset / n_points)
    return TrigPolynomial.from_complex(c, f.circumference)


def _coefficients(f: FunctionLike, n_points: int | None) -> TrigPolynomial:
    if isinstance(f, TrigPolynomial):
        return f
    if f.kind == "fourier":
        return f.poly
    if n_points is None:
        raise DomainError("a sample count is needed for functions without a Fourier representation")
    return fourier_coefficients(f, n_points)


def vallee_poussin(f: FunctionLike, n: int, n_points: int | None = None) -> TrigPolynomial:
    """Delayed mean ``V_n[f]``: Fourier coefficients times the taper, degree < 2n."""
    if n < 1:
        raise DomainError("n must be a positive integer")
    if n_points is not None and n_points < 8 * n:
        raise DomainError(f"{n_points} samples are too few for V_{n}; need at least {8 * n}")
    coeffs = _coefficients(f, n_points)
    deg = min(coeffs.degree, 2 * n - 1)
    lam = VPMultiplier(n)(np.arange(1, deg + 1))
    return TrigPolynomial(coeffs.a0, coeffs.a[:deg] * lam, coeffs.b[:deg] * lam, coeffs.circumference)


def partial_sum(f: FunctionLike, n: int, n_points: int | None = None) -> TrigPolynomial:
    return _coefficients(f, n_points).padded(n)


@dataclass(frozen=True)
class ApproxBracket:
    lower: float
    upper: float


def best_approx_estimate(f: FunctionLike, n: int, p: float,
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                         n_points: int = 4096) -> ApproxBracket:
    """Bracket for ``E_n(f)_p``, the Lp distance from ``f`` to Q(n).

    For p = 2 both ends equal the Parseval tail. Otherwise the upper end is the
    better of the partial sum ``S_n`` and ``V_ceil(n/2)`` (both lie in Q(n)), and
    the lower end uses ``|f - V_n f|_p <= (1 + C0) E_n(f)_p``.
    """
    if p < 1:
        raise DomainError("p must be at least 1")
    if n < 0:
        raise DomainError("n must be non-negative")
    coeffs = _coefficients(f, n_points)
    if p == 2:
        tail = math.sqrt(0.5 * math.fsum((coeffs.a[n:] ** 2 + coeffs.b[n:] ** 2).tolist()))
        return ApproxBracket(tail, tail)
    g = _as_function(f)
    s_n = PeriodicFunction.from_trig(coeffs.padded(n))
    upper = lp_norm(g - s_n, p, cfg)
    if n >= 1:
        m = max(1, math.ceil(n / 2))
        v_half = PeriodicFunction.from_trig(vallee_poussin(coeffs, m))
        upper = min(upper, lp_norm(g - v_half, p, cfg))
        v_n = PeriodicFunction.from_trig(vallee_poussin(coeffs, n))
        lower = lp_norm(g - v_n, p, cfg) / (1.0 + TheoremConstants().c0)
    else:
        lower = 0.0
    return ApproxBracket(min(lower, upper), upper)


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    ratio: float


def nikolskii_check(u: FunctionLike, p: float, q: float,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                    constant: float = 2.0) -> InequalityCheck:
    """``|U|_q`` against ``constant * n**(1/p - 1/q) * |U|_p`` with n the degree of U."""
    poly = u if isinstance(u, TrigPolynomial) else u.poly
    if poly is None:
        raise DomainError("Nikol'skii check needs a trigonometric polynomial")
    if q < p:
        raise DomainError("Nikol'skii check needs q >= p")
    n = max(poly.effective_degree(), 1)
    if poly.effective_degree() == 0 and poly.a0 == 0:
        raise DomainError("zero polynomial")
    g = PeriodicFunction.from_trig(poly)
    norm_p, norm_q = lp_norms(g, [p, q], cfg)
    exponent = 1.0 / p - (0.0 if math.isinf(q) else 1.0 / q)
    rhs = constant * n ** exponent * norm_p
    return InequalityCheck(float(norm_q), float(rhs), float(norm_q / rhs))


@dataclass(frozen=True)
class JacksonCheck:
    e_n: float
    modulus: float
    ratio: float
    anomaly: bool = False


def jackson_check(f: FunctionLike, n: int, p: float,
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                  h_grid_size: int = 64, n_points: int = 4096) -> JacksonCheck:
    """``E_n(f)_p`` (upper bracket) over ``omega(f, 1/n)_p``."""
    if n < 1:
        raise DomainError("n must be at least 1")
    g = _as_function(f)
    e_n = best_approx_estimate(f, n, p, cfg, n_points).upper
    mod = float(modulus_table(g, [1.0 / n], [p], h_grid_size, cfg)[0, 0])
    tiny = 1e-13 * max(1.0, lp_norm(g, p, cfg))
    if e_n <= tiny:
        return JacksonCheck(e_n, mod, 0.0)
    if mod <= tiny:
        return JacksonCheck(e_n, mod, math.inf, anomaly=True)
    return JacksonCheck(e_n, mod, e_n / mod)


@dataclass
class DyadicDecomposition:
    sequence: list[int]
    P: TrigPolynomial
    Q: list[TrigPolynomial]
    remainder_norms: dict[float, float] = field(default_factory=dict)

    def partial_sum(self) -> TrigPolynomial:
        total = self.P
        for q in self.Q:
            total = total + q
        return total


def check_sequence(seq: Sequence[int]) -> list[int]:
    seq = [int(n) for n in seq]
    if not seq or seq[0] != 1:
        raise DomainError("admissible sequences start with n(1) = 1")
    if any(b < a + 1 for a, b in zip(seq, seq[1:])):
        raise DomainError("admissible sequences increase by at least one per step")
    return seq


def dyadic_decomposition(f: FunctionLike, sequence: Sequence[int], n_points: int | None = None,
                         ps: Sequence[float] = (2.0,),
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> DyadicDecomposition:
    """``P = V_{n(1)} f`` and ``Q_k = V_{n(k+1)} f - V_{n(k)} f`` for the given sequence."""
    seq = check_sequence(sequence)
    if n_points is not None and n_points < 8 * seq[-1]:
        raise DomainError(f"need at least {8 * seq[-1]} samples for this sequence")
    coeffs = _coefficients(f, n_points)
    means = [vallee_poussin(coeffs, n) for n in seq]
    top = 2 * seq[-1]
    means = [m.padded(top) for m in means]
    q_list = [(means[k + 1] - means[k]) for k in range(len(means) - 1)]
    q_list = [q.padded(2 * seq[k + 1] - 1) for k, q in enumerate(q_list)]
    g = _as_function(f)
    rem = lp_norms(g - PeriodicFunction.from_trig(means[-1]), list(ps), cfg)
    return DyadicDecomposition(seq, means[0].padded(2 * seq[0] - 1), q_list,
                               {float(p): float(r) for p, r in zip(ps, rem)})


# ---------------------------------------------------------------------------
# seeded polynomial suite

SUITE_DEGREES = (1, 2, 4, 8, 16, 32, 64)
SUITE_PS = (1.0, 1.5, 2.0, 4.0, 64.0)


def random_polynomials(seed: int, size: int = 200, degrees: Sequence[int] = SUITE_DEGREES
                       ) -> list[TrigPolynomial]:
    """``size`` polynomials with coefficients uniform on [-1, 1], degrees cycling through ``degrees``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(size):
        n = int(degrees[i % len(degrees)])
        a0 = rng.uniform(-1, 1)
        a = rng.uniform(-1, 1, n)
        b = rng.uniform(-1, 1, n)
        out.append(TrigPolynomial(a0, a, b))
    return out


def run_inequality_suite(seed: int = 0, size: int = 200, ps: Sequence[float] = SUITE_PS,
                         constants: TheoremConstants = TheoremConstants(),
                         nikolskii_constant: float = 2.0, slack: float = 1e-6,
                         h_grid_size: int = 64,
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> dict:
    """Nikol'skii and V-P bounds on a seeded random suite.

    For each polynomial U of degree d and each p in ``ps``:

    * Nikol'skii for every pair p <= q, and Lyapunov ``|U|_q <= |U|_p`` for q < p;
    * ``|V_n U|_p <= C0 |U|_p`` and ``|U - V_n U|_p <= C omega(U, 1/n)_p`` with
      n = max(1, d // 2).

    Returns a report with per-check maxima and every violation found.
    """
    if size < 1:
        raise DomainError("suite size must be positive")
    ps = [float(p) for p in ps]
    polys = random_polynomials(seed, size)
    violations = []
    worst = {"nikolskii": 0.0, "lyapunov": 0.0, "vp_bounded": 0.0, "vp_near_best": 0.0}
    for idx, u in enumerate(polys):
        g = PeriodicFunction.from_trig(u)
        norms = lp_norms(g, ps, cfg)
        n_deg = max(u.effective_degree(), 1)
        for i, p in enumerate(ps):
            for j, q in enumerate(ps):
                if q >= p:
                    rhs = nikolskii_constant * n_deg ** (1.0 / p - 1.0 / q) * norms[i]
                    ratio = norms[j] / rhs
                    kind = "nikolskii"
                else:
                    ratio = norms[j] / norms[i]
                    kind = "lyapunov"
                worst[kind] = max(worst[kind], ratio)
                if ratio > 1.0 + slack:
                    violations.append({"check": kind, "index": idx, "degree": u.degree,
                                       "p": p, "q": q, "ratio": ratio})
        n = max(1, u.degree // 2)
        v = vallee_poussin(u, n)
        vn = lp_norms(PeriodicFunction.from_trig(v), ps, cfg)
        resid = lp_norms(PeriodicFunction.from_trig(u - v), ps, cfg)
        omega = modulus_table(g, [1.0 / n], ps, h_grid_size, cfg)[0]
        for i, p in enumerate(ps):
            r_b = vn[i] / (constants.c0 * norms[i])
            worst["vp_bounded"] = max(worst["vp_bounded"], r_b)
            if r_b > 1.0 + slack:
                violations.append({"check": "vp_bounded", "index": idx, "degree": u.degree,
                                   "n": n, "p": p, "ratio": r_b})
            if resid[i] <= 1e-12 * norms[i]:
                r_j = 0.0
            else:
                r_j = resid[i] / (constants.c_jackson * omega[i]) if omega[i] > 0 else math.inf
            worst["vp_near_best"] = max(worst["vp_near_best"], r_j)
            if r_j > 1.0 + slack:
                violations.append({"check": "vp_near_best", "index": idx, "degree": u.degree,
                                   "n": n, "p": p, "ratio": r_j})
    return {
        "seed": seed,
        "size": size,
        "ps": ps,
        "constants": {"nikolskii": nikolskii_constant, "c0": constants.c0,
                      "c_jackson": constants.c_jackson},
        "max_ratio": worst,
        "violations": violations,
        "passed": not violations,
    }
