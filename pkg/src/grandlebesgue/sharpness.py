"""The exemplar f0(x) = x^(-Delta) |log x|^gamma on (0, 1): its exact norms,
the largest finite exponent, and how fast the norm blows up there, measured
both from the exact norms and through the embedding bound theta(q)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    DEFAULT_QUADRATURE,
    UNIT_INTERVAL,
    PeriodicFunction,
    QuadratureConfig,
    f0_exact_lp_norm,
    lp_norms,
)
from .embedding import (
    DEFAULT_FAMILIES,
    EmbeddingSetup,
    HolderModel,
    ModulusProfile,
    dyadic_deltas,
    fit_holder,
    records_to_csv,
    theta,
    theta_is_finite,
    to_jsonable,
)
from .errors import DomainError
from .psi import PGrid, bgls_modulus_table, bgls_norm, make_grid, natural_psi
from .trig import TheoremConstants

__all__ = [
    "make_f0",
    "SharpnessConfig",
    "SharpnessReport",
    "f0_norm_asymptotics_check",
    "f0_modulus_asymptotics_check",
    "estimate_power",
    "finiteness_boundary",
    "theorem_setup",
    "sharpness_report",
]


def make_f0(delta_exp: float, gamma_exp: float) -> PeriodicFunction:
    """f0 on the circle of circumference 1, singular at 0, with the exact norm attached."""
    if not 0 < delta_exp < 1:
        raise DomainError("delta_exp must lie in (0, 1)")
    if gamma_exp < 0:
        raise DomainError("gamma_exp must be non-negative")
    d, g = float(delta_exp), float(gamma_exp)

    def fn(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x ** -d * np.abs(np.log(x)) ** g
        return np.where(x > 0, out, np.inf)

    def log_fn(anchor, direction, log_dist):
        # only the unshifted function uses this, anchored at its singular point 0
        ld = np.asarray(log_dist, dtype=float)
        if direction > 0:
            log_x = ld
            log_abs_log = np.log(-ld)
        else:
            t = np.exp(ld)
            log_x = np.log1p(-t)
            with np.errstate(divide="ignore"):
                log_abs_log = np.where(ld < -600.0, ld, np.log(-np.log1p(-t)))
        return -d * log_x + g * log_abs_log

    return PeriodicFunction.from_callable(
        fn, UNIT_INTERVAL, singularities=[0.0], label=f"f0:{d:g},{g:g}",
        exact_norm=lambda p: f0_exact_lp_norm(d, g, p), log_rule=log_fn)


@dataclass(frozen=True)
class SharpnessConfig:
    delta_exp: float
    gamma_exp: float
    b: Optional[float] = None
    window: tuple = (0.2, 0.01)
    window_points: int = 32
    grid_points: int = 16
    h_grid_size: int = 64
    delta_levels: int = 40

    def __post_init__(self):
        if not 0 < self.delta_exp < 1:
            raise DomainError("delta must lie in (0, 1)")
        if not self.gamma_exp > 1:
            raise DomainError("gamma must exceed 1")
        q0 = 1.0 / self.delta_exp
        b = (1.0 + q0) / 2.0 if self.b is None else float(self.b)
        if not 1 < b < q0:
            raise DomainError("b must lie strictly between 1 and 1/delta")
        object.__setattr__(self, "b", b)
        far, near = self.window
        if not 0 < near < far < 1:
            raise DomainError("window offsets must satisfy 0 < near < far < 1")

    @property
    def q0(self) -> float:
        return 1.0 / self.delta_exp

    @property
    def q_grid(self) -> np.ndarray:
        """Window points q0 - c (q0 - 1), c log-spaced from ``far`` to ``near``."""
        far, near = self.window
        return self.q0 - (self.q0 - 1.0) * np.geomspace(far, near, self.window_points)


def f0_norm_asymptotics_check(delta_exp: float, gamma_exp: float, p_grid=None,
                              spread: float = 10.0) -> dict:
    """|f0|_p against (q0 - p)^(-gamma - 1/p); also the log-slope near q0."""
    q0 = 1.0 / delta_exp
    ps = (q0 - (q0 - 1.0) * np.geomspace(0.5, 0.05, 16)) if p_grid is None else np.asarray(p_grid, float)
    if np.any(ps <= 1) or np.any(ps >= q0):
        raise DomainError("p grid must lie inside (1, 1/delta)")
    exact = np.array([f0_exact_lp_norm(delta_exp, gamma_exp, p) for p in ps])
    model = (q0 - ps) ** (-gamma_exp - 1.0 / ps)
    ratio = exact / model
    x = -np.log(q0 - ps)
    slope = float(np.polyfit(x, np.log(exact), 1)[0]) if ps.size > 1 else math.nan
    return {"p": ps.tolist(), "exact": exact.tolist(), "ratio": ratio.tolist(),
            "ratio_min": float(ratio.min()), "ratio_max": float(ratio.max()),
            "log_slope": slope, "holds": bool(ratio.max() / ratio.min() <= spread)}


def _f0_grid(cfg: SharpnessConfig) -> PGrid:
    return make_grid(1.0, cfg.b, cfg.grid_points)


def f0_modulus_asymptotics_check(delta_exp: float, gamma_exp: float, b: float,
                                 delta_grid=None, grid: Optional[PGrid] = None,
                                 cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                                 h_grid_size: int = 64, spread: float = 100.0,
                                 fit_window: int = 10) -> dict:
    """Grand-Lebesgue modulus of f0 (natural psi on (1, b)) over
    delta^(1/b - 1/q0) |log delta|^gamma, plus a free log-log fit of both exponents."""
    q0 = 1.0 / delta_exp
    if not 1 < b < q0:
        raise DomainError("b must lie strictly between 1 and 1/delta")
    f = make_f0(delta_exp, gamma_exp)
    grid = make_grid(1.0, b) if grid is None else grid
    psi = natural_psi(f, grid, cfg)
    d = dyadic_deltas()[dyadic_deltas() < math.exp(-1)] if delta_grid is None else np.sort(
        np.asarray(delta_grid, dtype=float))
    if np.any(d <= 0) or np.any(d > math.exp(-1) * (1 + 1e-12)):
        raise DomainError("delta grid must lie in (0, 1/e]")
    omega = bgls_modulus_table(f, d, psi, grid, h_grid_size, cfg)
    alpha = 1.0 / b - 1.0 / q0
    model = d ** alpha * np.abs(np.log(d)) ** gamma_exp
    ratio = omega / model
    finite = np.isfinite(ratio)
    if np.count_nonzero(omega[finite] > 0) >= 3:
        fit, rms, _ = fit_holder(d[finite], omega[finite], fit_window)
    else:
        fit, rms = HolderModel(math.nan, math.nan, math.nan), math.nan
    return {
        "delta": d.tolist(), "omega": omega.tolist(), "ratio": ratio.tolist(),
        "model_alpha": alpha, "model_alpha2": gamma_exp,
        "fitted_alpha": fit.alpha, "fitted_alpha2": fit.alpha2, "fitted_C": fit.C, "fit_rms": rms,
        "ratio_min": float(ratio[finite].min()), "ratio_max": float(ratio[finite].max()),
        "divergent": int((~finite).sum()),
        "holds": bool(finite.all() and ratio.max() / ratio.min() <= spread),
    }


def estimate_power(norm_rule: Callable[[float], float], q0: float, window) -> float:
    """Least-squares slope of log value against -log(q0 - q) over the window."""
    qs = np.asarray(window, dtype=float)
    if qs.size < 2 or np.any(qs >= q0):
        raise DomainError("window needs at least two points strictly below q0")
    vals = np.array([norm_rule(float(q)) for q in qs], dtype=float)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise DomainError("non-finite or non-positive values in the regression window")
    x = -np.log(q0 - qs)
    return float(np.polyfit(x, np.log(vals), 1)[0])


def finiteness_boundary(is_finite: Callable[[float], bool], lo: float, hi: float,
                        tol: float = 1e-6) -> float:
    """Bisection for sup{q : is_finite(q)} given is_finite(lo) and not is_finite(hi)."""
    if not is_finite(lo):
        raise DomainError("lower end is already infinite")
    while is_finite(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            return math.inf
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if is_finite(mid):
            lo = mid
        else:
            hi = mid
    return lo


def theorem_setup(cfg: SharpnessConfig, quad: QuadratureConfig = DEFAULT_QUADRATURE,
                  constants: TheoremConstants = TheoremConstants()) -> tuple[EmbeddingSetup, dict]:
    """Embedding setup for f0 with the modulus model exponents alpha = 1/b - 1/q0,
    alpha2 = gamma and C the smallest constant that envelopes the measured modulus."""
    f = make_f0(cfg.delta_exp, cfg.gamma_exp)
    grid = _f0_grid(cfg)
    psi = natural_psi(f, grid, quad)
    norm = bgls_norm(f, psi, grid, quad)
    d = dyadic_deltas(cfg.delta_levels)
    omega = bgls_modulus_table(f, d, psi, grid, cfg.h_grid_size, quad)
    if not np.all(np.isfinite(omega)):
        raise DomainError("modulus of f0 diverges on the delta grid")
    alpha = 1.0 / cfg.b - 1.0 / cfg.q0
    shape = HolderModel(1.0, alpha, cfg.gamma_exp)
    small = d <= math.exp(-1)
    C = float(np.max(omega[small] / shape(d[small])))
    model = HolderModel(C, alpha, cfg.gamma_exp)
    envelope = np.where(small, np.maximum(omega, model(d)), omega)
    profile = ModulusProfile(d, envelope, model)
    free_fit, rms, _ = fit_holder(d, omega)
    info = {"C": C, "alpha": alpha, "alpha2": cfg.gamma_exp, "bgls_norm": norm,
            "fitted_alpha": free_fit.alpha, "fitted_alpha2": free_fit.alpha2, "fit_rms": rms}
    return EmbeddingSetup(psi, grid, norm, profile, constants, False, f), info


@dataclass
class SharpnessReport:
    delta_exp: float
    gamma_exp: float
    b: float
    q0: float
    q_max_exact: float
    q_max_estimate: float
    theorem_power: float
    empirical_power: float
    measured_power_ratio: float
    power_ratio: float
    table: list
    profile: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "summary": {
                "delta": self.delta_exp, "gamma": self.gamma_exp, "b": self.b, "q0": self.q0,
                "q_max_exact": self.q_max_exact, "q_max_estimate": self.q_max_estimate,
                "theorem_power": self.theorem_power, "empirical_power": self.empirical_power,
                "measured_power_ratio": self.measured_power_ratio, "power_ratio": self.power_ratio,
                "profile": self.profile,
            },
            "records": self.table,
        }

    def to_json(self) -> str:
        import json
        return json.dumps(to_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        return records_to_csv(self.table, ("q", "nu0", "theta", "bound", "log_nu0", "log_bound",
                                           "witness_p"))


def sharpness_report(cfg: SharpnessConfig, quad: QuadratureConfig = DEFAULT_QUADRATURE,
                     constants: TheoremConstants = TheoremConstants(),
                     setup: Optional[EmbeddingSetup] = None) -> SharpnessReport:
    """Extremal exponent and blow-up power of q -> |f0|_q, exact and via theta(q)."""
    q0 = cfg.q0
    if setup is None:
        setup, info = theorem_setup(cfg, quad, constants)
    else:
        info = {}
    exact = lambda q: f0_exact_lp_norm(cfg.delta_exp, cfg.gamma_exp, q)  # noqa: E731
    theta_cache: dict[float, object] = {}

    def th(q):
        if q not in theta_cache:
            theta_cache[q] = theta(setup, q, families=DEFAULT_FAMILIES)
        return theta_cache[q]

    q_max_exact = finiteness_boundary(lambda q: math.isfinite(exact(q)), 1.0, 2 * q0)
    q_max_est = finiteness_boundary(lambda q: theta_is_finite(setup, q), 1.0 + 1e-6, 2 * q0)
    qs = cfg.q_grid
    empirical = estimate_power(exact, q0, qs)
    theorem = estimate_power(lambda q: th(q).value, q0, qs)
    table = []
    for q in qs:
        t = th(float(q))
        nu0 = exact(float(q))
        bound = constants.theorem_factor * t.value
        table.append({"q": float(q), "nu0": nu0, "theta": t.value, "bound": bound,
                      "log_nu0": math.log(nu0), "log_bound": math.log(bound),
                      "witness_p": t.witness_p})
    return SharpnessReport(
        cfg.delta_exp, cfg.gamma_exp, cfg.b, q0, q_max_exact, q_max_est, theorem, empirical,
        empirical / theorem, (cfg.gamma_exp + cfg.delta_exp) / (cfg.gamma_exp + 1.0), table, info)
