"""Embedding functionals nu(q, p) and theta(q), the bound |f|_q <= 6 theta(q),
the series W_{alpha2}(eta) and the closed-form zeta(q) bounds for power-type psi.

The series behind nu is summed in log space.  Terms beyond the truncation
index K are continued with the modulus model ``C delta^alpha |log delta|^alpha2``;
a profile whose model exponent does not beat ``1/p - 1/q`` makes nu infinite.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .core import DEFAULT_QUADRATURE, PeriodicFunction, QuadratureConfig, lp_norms
from .errors import DomainError
from .psi import PGrid, PsiFunction, bgls_modulus_table, bgls_norm, make_grid, make_power_psi
from .trig import TheoremConstants, check_sequence, dyadic_decomposition

__all__ = [
    "SequenceFamily",
    "HolderModel",
    "ModulusProfile",
    "EmbeddingSetup",
    "NuResult",
    "ThetaResult",
    "EmbeddingReport",
    "DEFAULT_FAMILIES",
    "dyadic_deltas",
    "prepare",
    "nu",
    "theta",
    "predicted_range",
    "theta_is_finite",
    "default_q_grid",
    "verify_theorem1",
    "zeta_dyadic_sum",
    "lemma1_series",
    "lemma1_asymptotics_check",
    "zeta_closed_form",
    "zeta_numeric_vs_closed",
]

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# admissible sequences

@dataclass(frozen=True)
class SequenceFamily:
    """Strictly increasing n(k) with n(1) = 1.

    ``dyadic``: 2^k - 1.  ``geometric``: max(n(k-1) + 1, ceil(rho^(k-1))).
    ``explicit``: the given prefix, continued by n -> 2n + 1 once exhausted.
    """

    kind: str = "dyadic"
    rho: float = 2.0
    values: tuple = ()
    K: int = 40
    tail_bound_mode: bool = True

    def __post_init__(self):
        if self.kind not in ("dyadic", "geometric", "explicit"):
            raise DomainError(f"unknown sequence family {self.kind!r}")
        if self.kind == "geometric" and not self.rho > 1:
            raise DomainError("geometric families need rho > 1")
        if self.kind == "explicit":
            object.__setattr__(self, "values", tuple(check_sequence(self.values)))
        if self.K < 1:
            raise DomainError("truncation K must be positive")

    @property
    def name(self) -> str:
        if self.kind == "geometric":
            return f"geometric({self.rho:g})"
        return self.kind

    def integers(self, count: int) -> list[int]:
        """First ``count`` members as exact integers."""
        if self.kind == "dyadic":
            return [(1 << k) - 1 for k in range(1, count + 1)]
        if self.kind == "explicit":
            out = list(self.values[:count])
            while len(out) < count:
                out.append(2 * out[-1] + 1)
            return out
        out = [1]
        while len(out) < count:
            out.append(max(out[-1] + 1, math.ceil(self.rho ** len(out))))
        return out

    def log_n(self, k: np.ndarray) -> np.ndarray:
        """log n(k) for 1-based indices ``k`` (any size; no overflow)."""
        k = np.asarray(k, dtype=np.int64)
        if self.kind == "dyadic":
            kf = k.astype(float)
            return kf * LN2 + np.log1p(-np.exp2(-kf))
        if self.kind == "explicit":
            m = len(self.values)
            head = np.log(np.asarray(self.values, dtype=float))
            out = np.empty(k.shape)
            inside = k <= m
            out[inside] = head[k[inside] - 1]
            extra = (k[~inside] - m).astype(float)
            out[~inside] = (math.log(self.values[-1] + 1) + extra * LN2
                            + np.log1p(-np.exp(-(math.log(self.values[-1] + 1) + extra * LN2))))
            return out
        # geometric: exact integers while they fit, then (k - 1) log rho
        exact_len = int(math.log(2.0 ** 50) / math.log(self.rho)) + 2
        table = np.log(np.asarray(self.integers(exact_len), dtype=float))
        out = (k - 1).astype(float) * math.log(self.rho)
        small = k <= exact_len
        out[small] = table[k[small] - 1]
        return out


DEFAULT_FAMILIES = (
    SequenceFamily("dyadic"),
    SequenceFamily("geometric", 1.5),
    SequenceFamily("geometric", 2.0),
    SequenceFamily("geometric", 3.0),
)


# ---------------------------------------------------------------------------
# modulus profiles

@dataclass(frozen=True)
class HolderModel:
    """``C * delta**alpha * max(|log delta|, 1)**alpha2``."""

    C: float
    alpha: float
    alpha2: float = 0.0

    def log_value(self, log_delta: np.ndarray) -> np.ndarray:
        log_delta = np.asarray(log_delta, dtype=float)
        if self.C == 0:
            return np.full(log_delta.shape, -np.inf)
        lg = np.maximum(np.abs(log_delta), 1.0)
        return math.log(self.C) + self.alpha * log_delta + self.alpha2 * np.log(lg)

    def __call__(self, delta):
        return np.exp(self.log_value(np.log(delta)))


def dyadic_deltas(levels: int = 40) -> np.ndarray:
    """1/(2^k - 1) for k = levels..1, increasing; the scales visited by the dyadic family."""
    k = np.arange(levels, 0, -1)
    return 1.0 / (np.exp2(k) - 1.0)


@dataclass(frozen=True, eq=False)
class ModulusProfile:
    """Grand-Lebesgue modulus on an increasing delta grid, plus a model for smaller delta.

    Between grid points the profile is log-log linear.  Below the smallest
    measured delta the model shape is continued from the last measured value,
    so the profile stays continuous.  Above the largest delta it is constant.
    """

    deltas: np.ndarray
    values: np.ndarray
    model: Optional[HolderModel] = None
    fit_rms: float = 0.0
    fit_window: tuple = ()

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if d.shape != v.shape or d.size == 0 or np.any(np.diff(d) <= 0):
            raise DomainError("profile needs an increasing delta grid with one value per delta")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("modulus values must be finite and non-negative")
        v = np.maximum.accumulate(v)
        object.__setattr__(self, "deltas", d)
        object.__setattr__(self, "values", v)

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0))

    @classmethod
    def analytic(cls, C: float, alpha: float, alpha2: float = 0.0,
                 deltas: Optional[np.ndarray] = None) -> "ModulusProfile":
        model = HolderModel(C, alpha, alpha2)
        d = dyadic_deltas() if deltas is None else np.asarray(deltas, dtype=float)
        return cls(d, model(d), model)

    @classmethod
    def from_values(cls, deltas, values, fit: bool = True, window: int = 10) -> "ModulusProfile":
        d = np.asarray(deltas, dtype=float)
        v = np.asarray(values, dtype=float)
        order = np.argsort(d)
        d, v = d[order], np.maximum.accumulate(v[order])
        if np.all(v == 0):
            return cls(d, v, HolderModel(0.0, 1.0, 0.0))
        if not fit:
            return cls(d, v)
        model, rms, win = fit_holder(d, v, window)
        return cls(d, v, model, rms, win)

    @classmethod
    def measure(cls, f: PeriodicFunction, psi: PsiFunction, grid: PGrid,
                deltas: Optional[np.ndarray] = None, h_grid_size: int = 64,
                cfg: QuadratureConfig = DEFAULT_QUADRATURE, window: int = 10
                ) -> "ModulusProfile":
        d = dyadic_deltas() if deltas is None else np.sort(np.asarray(deltas, dtype=float))
        vals = bgls_modulus_table(f, d, psi, grid, h_grid_size, cfg)
        if not np.all(np.isfinite(vals)):
            raise DomainError("the grand-Lebesgue modulus diverges on the delta grid")
        return cls.from_values(d, vals, fit=True, window=window)

    def log_value(self, log_delta) -> np.ndarray:
        ld = np.asarray(log_delta, dtype=float)
        flat = np.atleast_1d(ld).ravel()
        out = np.full(flat.shape, -np.inf)
        if self.is_zero:
            return out.reshape(ld.shape)
        with np.errstate(divide="ignore"):
            lx = np.log(self.deltas)
            lv = np.log(self.values)
        lo = flat < lx[0]
        out[~lo] = np.interp(flat[~lo], lx, lv)
        if np.any(lo):
            if self.model is None:
                out[lo] = lv[0] + (flat[lo] - lx[0])  # linear decay, a conservative guess
            else:
                out[lo] = lv[0] + self.model.log_value(flat[lo]) - self.model.log_value(lx[0])
        return out.reshape(ld.shape)

    def __call__(self, delta):
        with np.errstate(divide="ignore"):
            out = np.exp(self.log_value(np.log(delta)))
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        m = self.model
        return {
            "deltas": self.deltas.tolist(),
            "values": self.values.tolist(),
            "model": None if m is None else {"C": m.C, "alpha": m.alpha, "alpha2": m.alpha2},
            "fit_rms": self.fit_rms,
        }


def fit_holder(deltas: np.ndarray, values: np.ndarray, window: int = 10
               ) -> tuple[HolderModel, float, tuple]:
    """Least squares of log omega on (1, log delta, log|log delta|) over the
    ``window`` smallest positive deltas below 1/e."""
    ok = (values > 0) & (deltas < math.exp(-1))
    idx = np.nonzero(ok)[0][:window]
    if idx.size < 3:
        idx = np.nonzero(values > 0)[0][:max(window, 2)]
        if idx.size < 2:
            raise DomainError("not enough positive modulus values to fit")
        A = np.c_[np.ones(idx.size), np.log(deltas[idx])]
        sol, *_ = np.linalg.lstsq(A, np.log(values[idx]), rcond=None)
        resid = np.log(values[idx]) - A @ sol
        return (HolderModel(math.exp(sol[0]), float(sol[1]), 0.0),
                float(np.sqrt(np.mean(resid ** 2))), (float(deltas[idx[0]]), float(deltas[idx[-1]])))
    ld = np.log(deltas[idx])
    A = np.c_[np.ones(idx.size), ld, np.log(np.abs(ld))]
    y = np.log(values[idx])
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ sol
    return (HolderModel(math.exp(sol[0]), float(sol[1]), float(sol[2])),
            float(np.sqrt(np.mean(resid ** 2))), (float(deltas[idx[0]]), float(deltas[idx[-1]])))


# ---------------------------------------------------------------------------
# nu and theta

@dataclass(frozen=True, eq=False)
class EmbeddingSetup:
    """Everything nu needs that does not depend on (q, p, family)."""

    psi: PsiFunction
    grid: PGrid
    norm: float
    profile: ModulusProfile
    constants: TheoremConstants = TheoremConstants()
    literal: bool = False
    f: Optional[PeriodicFunction] = None


def prepare(f: PeriodicFunction, psi: PsiFunction, grid: Optional[PGrid] = None,
            profile: Optional[ModulusProfile] = None, constants: TheoremConstants = TheoremConstants(),
            literal: bool = False, h_grid_size: int = 64,
            cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> EmbeddingSetup:
    if grid is None:
        grid = make_grid(psi.a, psi.b)
    if not psi.is_dirac:
        psi.check(grid)
    norm = bgls_norm(f, psi, grid, cfg)
    if not math.isfinite(norm):
        raise DomainError("f does not belong to G(psi) on this grid")
    if profile is None:
        profile = ModulusProfile.measure(f, psi, grid, h_grid_size=h_grid_size, cfg=cfg)
    return EmbeddingSetup(psi, grid, norm, profile, constants, literal, f)


@dataclass(frozen=True)
class NuResult:
    value: float
    head: float
    tail: float
    terms: int
    divergent: bool


_TAIL_CHUNK = 4096
_TAIL_CAP = 1 << 20


def _series(profile: ModulusProfile, family: SequenceFamily, s: float) -> tuple[float, float, int, bool]:
    """sum_k n(k+1)^s omega(1/n(k)): (head over k <= K, tail, terms used, divergent)."""
    if profile.is_zero:
        return 0.0, 0.0, 0, False
    K = family.K
    k = np.arange(1, K + 1)
    log_terms = s * family.log_n(k + 1) + profile.log_value(-family.log_n(k))
    terms = np.exp(log_terms)
    head = math.fsum(terms)
    if not family.tail_bound_mode:
        return head, 0.0, K, False
    model = profile.model
    if model is None:
        last = terms[-5:]
        if np.all(np.diff(last) >= 0):
            return head, math.inf, K, True
        r = math.sqrt(terms[-1] / terms[-3]) if terms[-3] > 0 else 0.0
        return head, (terms[-1] * r / (1 - r) if r < 1 else math.inf), K, r >= 1
    if model.alpha <= s:
        return head, math.inf, K, True
    pieces = []
    start, size = K + 1, _TAIL_CHUNK
    running = head
    prev_last = terms[-1]
    while True:
        k = np.arange(start, start + size)
        t = np.exp(s * family.log_n(k + 1) + profile.log_value(-family.log_n(k)))
        part = float(np.sum(t))  # pairwise summation; fsum is too slow on long tails
        pieces.append(part)
        running += part
        start += size
        last = t[-1]
        if last <= 1e-17 * running and last <= prev_last:
            break
        if start > _TAIL_CAP:
            r = math.sqrt(t[-1] / t[-3]) if t[-3] > 0 else 0.0
            if r >= 1:
                return head, math.inf, start - 1, True
            pieces.append(t[-1] * r / (1 - r))
            break
        prev_last = last
        size *= 2
    return head, math.fsum(pieces), start - 1, False


def nu(setup: EmbeddingSetup, q: float, p: float, family: SequenceFamily = DEFAULT_FAMILIES[0]
       ) -> NuResult:
    """nu(q, p) for one admissible sequence family.

    For q <= p the Lyapunov bound ``psi(q) * ||f||`` is returned directly.
    """
    psi = setup.psi
    if not 1 < p < psi.b:
        raise DomainError(f"p = {p} is outside (1, {psi.b})")
    if q <= p:
        val = float(psi(q)) * setup.norm if not psi.is_dirac else setup.norm
        return NuResult(val, val, 0.0, 0, False)
    s = 1.0 / p - 1.0 / q
    head, tail, used, divergent = _series(setup.profile, family, s)
    if divergent:
        return NuResult(math.inf, head, tail, used, True)
    psi_p = 1.0 if (setup.literal or psi.is_dirac) else float(psi(p))
    total = setup.norm + setup.constants.series_factor * (head + tail)
    return NuResult(psi_p * total, head, tail, used, False)


@dataclass(frozen=True)
class ThetaResult:
    value: float
    witness_p: float
    witness_family: str
    refined: bool = False

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def _candidate_ps(setup: EmbeddingSetup, p_grid) -> np.ndarray:
    if setup.psi.is_dirac:
        return np.array([setup.psi.params["r"]])
    pts = setup.grid.points if p_grid is None else np.asarray(p_grid, dtype=float)
    return pts[(pts > 1) & (pts < setup.psi.b)]


def theta(setup: EmbeddingSetup, q: float, p_grid=None,
          families: Sequence[SequenceFamily] = DEFAULT_FAMILIES, refine: bool = True
          ) -> ThetaResult:
    """min over the p grid and families of nu, then an improvement-only local
    search in p around the discrete minimizer."""
    ps = _candidate_ps(setup, p_grid)
    if ps.size == 0:
        raise DomainError("empty p grid")
    table = np.array([[nu(setup, q, p, fam).value for fam in families] for p in ps])
    i, j = np.unravel_index(int(np.argmin(table)), table.shape)
    best = float(table[i, j])
    if not math.isfinite(best):
        return ThetaResult(math.inf, math.nan, "")
    result = ThetaResult(best, float(ps[i]), families[j].name)
    if not refine or ps.size < 2 or q <= ps[i]:
        return result
    lo = float(ps[max(i - 1, 0)])
    hi = float(ps[min(i + 1, ps.size - 1)])
    fam = families[j]

    def objective(p):
        v = nu(setup, q, p, fam).value
        return v if math.isfinite(v) else 1e300

    opt = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10 * hi, "maxiter": 60})
    if opt.fun < best:
        return ThetaResult(float(opt.fun), float(opt.x), fam.name, True)
    return result


def theta_is_finite(setup: EmbeddingSetup, q: float, p_grid=None) -> bool:
    """Whether theta(q) is finite, decided without summing any series."""
    ps = _candidate_ps(setup, p_grid)
    if np.any(ps >= q) or setup.profile.is_zero:
        return True
    model = setup.profile.model
    if model is None:
        return any(math.isfinite(nu(setup, q, float(p)).value) for p in ps)
    return bool(np.any(model.alpha > 1.0 / ps - 1.0 / q))


def predicted_range(setup: EmbeddingSetup) -> float:
    """Upper end b1 of the q range where nu is finite: 1/(1/p_max - alpha)."""
    if setup.profile.is_zero:
        return math.inf
    model = setup.profile.model
    if model is None:
        return math.inf
    p_max = float(_candidate_ps(setup, None)[-1])
    gap = 1.0 / p_max - model.alpha
    return math.inf if gap <= 0 else 1.0 / gap


def default_q_grid(b1: float, n: int = 16, q_cap: float = 64.0) -> np.ndarray:
    """``n`` points in (1, b1) crowding toward b1; capped at ``q_cap`` for an infinite range."""
    top = min(b1, q_cap)
    if math.isinf(b1):
        return np.geomspace(1.05, top, n)
    return top - (top - 1.0) * np.geomspace(0.95, 0.01, n)


# ---------------------------------------------------------------------------
# Theorem-1 report

@dataclass
class EmbeddingReport:
    records: list
    max_ratio: float
    constants: TheoremConstants
    summary: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.max_ratio <= 1.0

    def to_dict(self) -> dict:
        c = self.constants
        summary = dict(self.summary)
        summary.update({
            "max_ratio": self.max_ratio,
            "verified": self.verified,
            "constants": {"c0": c.c0, "c_jackson": c.c_jackson,
                          "series_factor": c.series_factor, "theorem_factor": c.theorem_factor},
        })
        return {"records": [dict(r) for r in self.records], "summary": summary}

    def to_json(self) -> str:
        return json.dumps(to_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        return records_to_csv(self.records, CSV_FIELDS)


CSV_FIELDS = ("q", "f_norm_q", "theta_q", "ratio", "witness_p", "witness_sequence_kind",
              "divergent", "block_c2", "block_c3")


def to_jsonable(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def records_to_csv(records, fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        w.writerow([_csv_cell(r.get(k)) for k in fields])
    return buf.getvalue()


def _block_diagnostic(setup: EmbeddingSetup, q: float, p: float, n_points: int,
                     cfg: QuadratureConfig) -> tuple[float, float]:
    """Empirical C2 and max_k C3 for the dyadic decomposition at (q, p)."""
    f = setup.f
    if f is None or setup.psi.is_dirac:
        return math.nan, math.nan
    levels = int(math.log2(n_points // 8 + 1))
    seq = [(1 << k) - 1 for k in range(1, levels + 1)]
    if len(seq) < 2:
        return math.nan, math.nan
    dec = dyadic_decomposition(f, seq, n_points, ps=(), cfg=cfg)
    psi_p = float(setup.psi(p))
    s = max(1.0 / p - 1.0 / q, 0.0)
    p_norm = float(lp_norms(PeriodicFunction.from_trig(dec.P), [q], cfg)[0])
    c2 = p_norm / (psi_p * setup.norm) if setup.norm > 0 else 0.0
    c3 = 0.0
    for k, qk in enumerate(dec.Q, start=1):
        denom = seq[k] ** s * psi_p * setup.profile(1.0 / seq[k - 1])
        qn = float(lp_norms(PeriodicFunction.from_trig(qk), [q], cfg)[0])
        if denom > 0:
            c3 = max(c3, qn / denom)
        elif qn > 1e-12:
            c3 = math.inf
    return c2, c3


def verify_theorem1(f: PeriodicFunction, psi: PsiFunction, q_grid=None, p_grid=None,
                    families: Sequence[SequenceFamily] = DEFAULT_FAMILIES,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                    constants: TheoremConstants = TheoremConstants(),
                    setup: Optional[EmbeddingSetup] = None, literal: bool = False,
                    h_grid_size: int = 64, diagnostic_points: int = 1 << 13
                    ) -> EmbeddingReport:
    """Compare |f|_q with 6 theta(q) on a q grid; ratio <= 1 everywhere means verified."""
    if setup is None:
        grid = None if p_grid is None else PGrid(np.asarray(p_grid, dtype=float), psi.a, psi.b,
                                                 1e-4 * (psi.b - psi.a) if math.isfinite(psi.b) else 1e-4)
        setup = prepare(f, psi, grid, constants=constants, literal=literal,
                        h_grid_size=h_grid_size, cfg=cfg)
    b1 = predicted_range(setup)
    qs = default_q_grid(b1) if q_grid is None else np.asarray(q_grid, dtype=float)
    if np.any(qs <= 1):
        raise DomainError("q grid must lie above 1")
    if f.exact_norm is not None:
        f_norms = np.array([f.exact_norm(q) for q in qs])
    else:
        f_norms = lp_norms(f, qs, cfg)
    records = []
    ratios = []
    for q, fq in zip(qs, f_norms):
        th = theta(setup, float(q), families=families)
        rec = {"q": float(q), "f_norm_q": float(fq), "theta_q": th.value,
               "witness_p": th.witness_p if th.finite else None,
               "witness_sequence_kind": th.witness_family or None,
               "divergent": not th.finite}
        if th.finite:
            rec["ratio"] = float(fq) / (constants.theorem_factor * th.value)
            ratios.append(rec["ratio"])
            c2, c3 = _block_diagnostic(setup, float(q), th.witness_p, diagnostic_points, cfg)
            rec["block_c2"], rec["block_c3"] = c2, c3
        else:
            rec["ratio"] = None
            rec["block_c2"] = rec["block_c3"] = None
        records.append(rec)
    max_ratio = max(ratios) if ratios else math.nan
    model = setup.profile.model
    c2s = [r["block_c2"] for r in records if r.get("block_c2") is not None]
    c3s = [r["block_c3"] for r in records if r.get("block_c3") is not None]
    summary = {
        "function": f.label,
        "psi": _psi_label(setup.psi),
        "bgls_norm": setup.norm,
        "predicted_b1": b1,
        "p_grid": setup.grid.points.tolist(),
        "families": [fam.name for fam in families],
        "literal_series": setup.literal,
        "profile_model": None if model is None else
        {"C": model.C, "alpha": model.alpha, "alpha2": model.alpha2, "fit_rms": setup.profile.fit_rms},
        "divergent_count": sum(r["divergent"] for r in records),
        "sufficient_theorem_factor": constants.theorem_factor * max_ratio if ratios else None,
        "block_c2_max": max(c2s) if c2s else None,
        "block_c3_max": max(c3s) if c3s else None,
    }
    return EmbeddingReport(records, max_ratio, constants, summary)


def _psi_label(psi: PsiFunction) -> str:
    if psi.family == "natural":
        return f"family=natural;a={psi.a!r};b={psi.b!r}"
    try:
        return psi.to_record()
    except ValueError:
        return psi.family


# ---------------------------------------------------------------------------
# direct dyadic sum, used to cross-check nu

def zeta_dyadic_sum(profile: ModulusProfile, psi_p: float, norm: float, p: float, q: float,
                    series_factor: float = 32.0, rel_tol: float = 1e-18,
                    max_terms: int = 1_000_000) -> float:
    """psi(p) [norm + factor * sum_k (2^(k+1) - 1)^s omega(1/(2^k - 1))], term by term."""
    s = 1.0 / p - 1.0 / q
    terms = []
    running = 0.0
    prev = math.inf
    for k in range(1, max_terms + 1):
        n_k = 2 ** k - 1
        n_next = 2 ** (k + 1) - 1
        log_om = float(profile.log_value(-math.log(n_k)))
        t = math.exp(s * math.log(n_next) + log_om) if log_om > -math.inf else 0.0
        terms.append(t)
        running += t
        if t == 0.0 and k >= 40:
            break
        if k >= 40 and t <= rel_tol * running and t <= prev:
            break
        prev = t
    else:
        return math.inf
    return psi_p * (norm + series_factor * math.fsum(terms))


# ---------------------------------------------------------------------------
# series W_{alpha2}(eta)

def lemma1_series(eta: float, alpha2: float, tol: float = 1e-17, closed_form: bool = True) -> float:
    """W(eta) = sum_{k>=1} 2^(-k eta) k^alpha2.

    Partial sums are accumulated with ``math.fsum`` chunk by chunk; summation
    stops once a term drops below ``tol`` times the running sum and k > 10/eta.
    """
    if not 0 < eta <= 1:
        raise DomainError("eta must lie in (0, 1]")
    if alpha2 == 0 and closed_form:
        x = 2.0 ** -eta
        return x / (1.0 - x)
    parts = []
    running = 0.0
    start, size = 1, 1024
    k_min = 10.0 / eta
    while True:
        k = np.arange(start, start + size, dtype=float)
        t = np.exp(-k * eta * LN2 + alpha2 * np.log(k))
        parts.append(math.fsum(t))
        running += parts[-1]
        start += size
        if start > k_min and t[-1] < tol * running:
            break
        size = min(size * 2, 1 << 22)
    return math.fsum(parts)


def _lemma1_model(eta: np.ndarray, alpha2: float) -> np.ndarray:
    if alpha2 > -1:
        return eta ** (-1.0 - alpha2)
    if alpha2 == -1:
        return np.abs(np.log(eta)) + 1.0
    return np.ones_like(eta)


def lemma1_asymptotics_check(alpha2: float, eta_grid=None, spread: float = 10.0) -> dict:
    """W(eta)/model(eta) over the grid; ``holds`` when max/min stays within ``spread``."""
    eta = np.geomspace(1e-4, 0.5, 25) if eta_grid is None else np.asarray(eta_grid, dtype=float)
    w = np.array([lemma1_series(float(e), alpha2) for e in eta])
    ratio = w / _lemma1_model(eta, alpha2)
    regime = "A" if alpha2 > -1 else ("B" if alpha2 == -1 else "C")
    return {
        "alpha2": alpha2,
        "regime": regime,
        "eta": eta.tolist(),
        "W": w.tolist(),
        "ratio": ratio.tolist(),
        "ratio_min": float(ratio.min()),
        "ratio_max": float(ratio.max()),
        "holds": bool(ratio.max() / ratio.min() <= spread),
    }


# ---------------------------------------------------------------------------
# closed-form zeta bounds for psi(p) = (b - p)^(-beta)

def _same(x: float, y: float) -> bool:
    return abs(x - y) <= 1e-12 * max(abs(x), abs(y), 1.0)


def zeta_closed_form(b: float, beta: float, alpha: float, alpha2: float, q: float) -> float:
    """Closed form (up to a constant) of inf_p psi(p)/[alpha - (1/p - 1/q)]^(alpha2+1)."""
    if beta < 0:
        raise DomainError("beta must be non-negative")
    if not 1 < b < math.inf:
        raise DomainError("b must be finite and above 1")
    if alpha <= 0 or (alpha > 1.0 / b and not _same(alpha, 1.0 / b)):
        raise DomainError("alpha must lie in (0, 1/b]")
    if q <= 1:
        raise DomainError("q must exceed 1")
    if _same(alpha, 1.0 / b):
        if alpha2 > -1:
            return q ** (beta + alpha2 + 1.0)
        if alpha2 == -1:
            return q ** beta * (math.log(q) + 1.0)
        return q ** beta
    b1 = b / (1.0 - alpha * b)
    if q >= b1:
        return math.inf
    gap = b1 - q
    if alpha2 > -1:
        return gap ** (-beta - alpha2 - 1.0)
    if alpha2 == -1:
        return gap ** -beta * (abs(math.log(gap)) + 1.0)
    return gap ** -beta


def _zeta_numeric(psi_vals: np.ndarray, ps: np.ndarray, alpha: float, alpha2: float, q: float) -> float:
    den = alpha - (1.0 / ps - 1.0 / q)
    ok = den > 0
    if not np.any(ok):
        return math.inf
    d, v = den[ok], psi_vals[ok]
    if alpha2 > -1:
        vals = v / d ** (alpha2 + 1.0)
    elif alpha2 == -1:
        vals = v * (np.abs(np.log(d)) + 1.0)
    else:
        vals = v
    return float(np.min(vals))


def zeta_numeric_vs_closed(b: float, beta: float, alpha: float, alpha2: float,
                           q_grid=None, p_grid=None, band: tuple = (0.05, 20.0)) -> dict:
    """Direct inf over a p grid divided by the closed form, with a boundedness verdict."""
    zeta_closed_form(b, beta, alpha, alpha2, 1.5)  # validates the parameters
    if p_grid is None:
        p_grid = make_grid(1.0, b, 400, inset=1e-7 * (b - 1)).points
    ps = np.asarray(p_grid, dtype=float)
    psi = make_power_psi(1.0, b, 0.0, beta) if beta else None
    psi_vals = psi(ps) if psi is not None else np.ones_like(ps)
    if q_grid is None:
        if _same(alpha, 1.0 / b):
            q_grid = np.geomspace(1.05, 200.0, 24)
        else:
            b1 = b / (1.0 - alpha * b)
            q_grid = b1 - (b1 - 1.0) * np.geomspace(0.95, 1e-3, 24)
    qs = np.asarray(q_grid, dtype=float)
    numeric, closed, ratio = [], [], []
    for q in qs:
        z_num = _zeta_numeric(psi_vals, ps, alpha, alpha2, float(q))
        z_cl = zeta_closed_form(b, beta, alpha, alpha2, float(q))
        numeric.append(z_num)
        closed.append(z_cl)
        ratio.append(z_num / z_cl if math.isfinite(z_num) and math.isfinite(z_cl) else math.nan)
    r = np.array(ratio)
    finite = r[np.isfinite(r)]
    holds = bool(finite.size and finite.min() >= band[0] and finite.max() <= band[1])
    # the closed forms carry an unspecified constant; the spread is free of it
    spread = float(finite.max() / finite.min()) if finite.size else math.nan
    return {"q": qs.tolist(), "numeric": numeric, "closed": closed, "ratio": ratio,
            "ratio_min": float(finite.min()) if finite.size else math.nan,
            "ratio_max": float(finite.max()) if finite.size else math.nan,
            "spread": spread, "holds": holds,
            "holds_up_to_constant": bool(spread <= band[1] / band[0])}
