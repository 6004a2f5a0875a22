import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grandlebesgue import (
    DomainError,
    HolderModel,
    ModulusProfile,
    PeriodicFunction,
    SequenceFamily,
    TrigPolynomial,
    constant_psi,
    lemma1_series,
    make_grid,
    make_power_psi,
    natural_psi,
    nu,
    prepare,
    theta,
    verify_theorem1,
    zeta_dyadic_sum,
)
from grandlebesgue.embedding import (
    DEFAULT_FAMILIES,
    default_q_grid,
    dyadic_deltas,
    fit_holder,
    lemma1_asymptotics_check,
    predicted_range,
    records_to_csv,
    theta_is_finite,
    to_jsonable,
    zeta_closed_form,
    zeta_numeric_vs_closed,
)

DYADIC = SequenceFamily("dyadic")


def unit_setup(profile=None, psi=None, literal=False):
    psi = psi or constant_psi(1.0, 2.0, 1.0)
    return prepare(PeriodicFunction.constant(1.0), psi, make_grid(psi.a, psi.b, 16),
                   profile=profile, literal=literal)


def holder_setup(alpha, alpha2=0.0, C=1.0, b=2.0, beta=0.0):
    psi = make_power_psi(1.0, b, 0.0, beta)
    return prepare(PeriodicFunction.constant(1.0), psi, make_grid(1.0, b, 16),
                   profile=ModulusProfile.analytic(C, alpha, alpha2))


def cos_k(k):
    a = np.zeros(k)
    a[-1] = 1.0
    return PeriodicFunction.from_trig(TrigPolynomial(0.0, a, np.zeros(k)))


# -- sequence families --------------------------------------------------------------

def test_family_members():
    assert DYADIC.integers(5) == [1, 3, 7, 15, 31]
    assert SequenceFamily("geometric", 1.5).integers(6) == [1, 2, 3, 4, 6, 8]
    assert SequenceFamily("geometric", 3.0).integers(4) == [1, 3, 9, 27]
    assert SequenceFamily("explicit", values=(1, 2, 5)).integers(5) == [1, 2, 5, 11, 23]


@pytest.mark.parametrize("fam", list(DEFAULT_FAMILIES) + [SequenceFamily("explicit", values=(1, 4, 6))])
def test_family_admissible_and_logs_exact(fam):
    ints = fam.integers(30)
    assert ints[0] == 1
    assert all(b >= a + 1 for a, b in zip(ints, ints[1:]))
    k = np.arange(1, 31)
    np.testing.assert_allclose(fam.log_n(k), np.log(np.array(ints, dtype=float)), rtol=1e-12, atol=1e-15)


def test_family_validation():
    with pytest.raises(DomainError):
        SequenceFamily("geometric", 1.0)
    with pytest.raises(DomainError):
        SequenceFamily("explicit", values=(2, 3))
    with pytest.raises(DomainError):
        SequenceFamily("fibonacci")


def test_dyadic_log_n_far_out_does_not_overflow():
    v = DYADIC.log_n(np.array([2000]))
    assert v[0] == pytest.approx(2000 * math.log(2))


# -- profiles ------------------------------------------------------------------

def test_holder_model_and_profile_interpolation():
    m = HolderModel(2.0, 0.5, 1.0)
    assert m(math.exp(-4)) == pytest.approx(2.0 * math.exp(-2) * 4.0)
    assert m(0.5) == pytest.approx(2.0 * math.sqrt(0.5))  # log factor floored at 1
    prof = ModulusProfile.analytic(2.0, 0.5, 1.0)
    for d in list(dyadic_deltas()[::7]) + [1e-15, 1e-30]:
        assert prof(d) == pytest.approx(m(d), rel=1e-10)
    # log-log linear between grid points
    assert prof(1e-3) == pytest.approx(m(1e-3), rel=1e-3)


def test_profile_is_monotone_after_construction():
    prof = ModulusProfile(np.array([0.1, 0.2, 0.3]), np.array([1.0, 0.5, 2.0]))
    np.testing.assert_array_equal(prof.values, [1.0, 1.0, 2.0])
    with pytest.raises(DomainError):
        ModulusProfile(np.array([0.2, 0.1]), np.array([1.0, 1.0]))


def test_fit_recovers_model_exactly():
    d = dyadic_deltas()
    model, rms, _ = fit_holder(d, HolderModel(3.0, 0.3, 1.5)(d))
    assert model.alpha == pytest.approx(0.3, rel=1e-8)
    assert model.alpha2 == pytest.approx(1.5, rel=1e-8)
    assert model.C == pytest.approx(3.0, rel=1e-8)
    assert rms < 1e-10


def test_zero_profile():
    prof = ModulusProfile.from_values(dyadic_deltas(), np.zeros(40))
    assert prof.is_zero and prof(1e-3) == 0.0


# -- nu --------------------------------------------------------------------------

@pytest.mark.parametrize("q,p", [(1.5, 1.2), (1.9, 1.01), (1.2, 1.5)])
def test_nu_constant_function(q, p):
    setup = unit_setup()
    for fam in DEFAULT_FAMILIES:
        assert nu(setup, q, p, fam).value == pytest.approx(1.0)


def test_nu_q_below_p_is_lyapunov_path():
    psi = make_power_psi(1.0, 3.0, 0.0, 1.0)
    setup = holder_setup(0.4, b=3.0, beta=1.0)
    r = nu(setup, 1.5, 2.0)
    assert r.value == pytest.approx(psi(1.5) * setup.norm)
    assert r.terms == 0


def test_nu_p_outside_interval():
    with pytest.raises(DomainError):
        nu(unit_setup(), 1.5, 2.5)


def test_nu_geometric_criterion():
    # omega = delta^alpha, dyadic: finite iff alpha > 1/p - 1/q
    p, q = 1.25, 4.0
    s = 1 / p - 1 / q
    assert math.isfinite(nu(holder_setup(s + 0.01), q, p).value)
    assert math.isinf(nu(holder_setup(s - 0.01), q, p).value)
    assert nu(holder_setup(s), q, p).divergent


def test_nu_matches_closed_geometric_sum():
    # omega(delta) = delta^alpha on dyadic scales: the series is sum (2^(k+1)-1)^s (2^k-1)^(-alpha)
    alpha, p, q = 0.5, 1.5, 3.0
    s = 1 / p - 1 / q
    setup = holder_setup(alpha)
    direct = math.fsum((2.0 ** (k + 1) - 1) ** s * (2.0 ** k - 1) ** -alpha for k in range(1, 400))
    r = nu(setup, q, p, DYADIC)
    assert r.value == pytest.approx(1.0 + 32 * direct, rel=1e-12)


def test_literal_flag_drops_psi_prefactor():
    psi = make_power_psi(1.0, 2.0, 0.0, 1.0)
    prof = ModulusProfile.analytic(1.0, 0.6)
    full = prepare(PeriodicFunction.constant(1.0), psi, make_grid(1, 2), profile=prof)
    lit = prepare(PeriodicFunction.constant(1.0), psi, make_grid(1, 2), profile=prof, literal=True)
    a, b = nu(full, 3.0, 1.5).value, nu(lit, 3.0, 1.5).value
    assert a == pytest.approx(psi(1.5) * b)


def test_divergence_flag_matches_model_criterion():
    setup = holder_setup(0.3, alpha2=0.5)
    for p in np.linspace(1.05, 1.95, 10):
        for q in (1.5, 2.0, 3.0, 10.0):
            if q <= p:
                continue
            predicted = 0.3 <= 1 / p - 1 / q
            assert math.isinf(nu(setup, q, p).value) == predicted


def test_unmodelled_profile_divergence_signal():
    d = dyadic_deltas()
    prof = ModulusProfile(d, np.minimum(1.0, 0.5 + 0 * d))  # constant, no decay
    setup = unit_setup(profile=prof)
    assert math.isinf(nu(setup, 1.9, 1.1).value)


# -- theta -------------------------------------------------------------------------

def test_theta_constant():
    setup = unit_setup()
    for q in (1.1, 1.5, 3.0, 40.0):
        assert theta(setup, q).value == pytest.approx(1.0)


def test_theta_infinite_beyond_range():
    setup = holder_setup(0.2)
    b1 = predicted_range(setup)
    assert b1 == pytest.approx(1 / (1 / setup.grid.points[-1] - 0.2))
    assert math.isfinite(theta(setup, 0.9 * b1).value)
    assert math.isinf(theta(setup, 1.1 * b1).value)
    assert theta_is_finite(setup, 0.9 * b1) and not theta_is_finite(setup, 1.1 * b1)


def test_theta_boundary_grid_point_excluded():
    setup = holder_setup(0.2)
    p0 = float(setup.grid.points[8])
    q = 1 / (1 / p0 - 0.2)
    assert math.isinf(nu(setup, q, p0).value)
    t = theta(setup, q, refine=False)
    assert math.isfinite(t.value) and t.witness_p > p0


def test_theta_refinement_only_improves():
    setup = holder_setup(0.35, alpha2=1.0, beta=1.0)
    for q in (1.5, 2.5, 4.0):
        coarse = theta(setup, q, refine=False).value
        assert theta(setup, q).value <= coarse


@given(st.floats(1.05, 5.0), st.floats(1.05, 5.0))
def test_theta_monotone_in_q(q1, q2):
    setup = holder_setup(0.35, alpha2=0.5, beta=1.0)
    q1, q2 = min(q1, q2), max(q1, q2)
    t1, t2 = theta(setup, q1, refine=False).value, theta(setup, q2, refine=False).value
    assert t1 <= t2 * (1 + 1e-12)


# -- dyadic cross-check -----------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_dyadic_family_matches_term_by_term_sum(seed):
    rng = np.random.default_rng(seed)
    alpha, alpha2 = rng.uniform(0.3, 0.9), rng.uniform(-1.5, 2.0)
    setup = holder_setup(alpha, alpha2, C=rng.uniform(0.1, 5.0), beta=rng.uniform(0, 2))
    p = rng.uniform(1.3, 1.9)
    q = 1 / max(1 / p - 0.9 * alpha, 1e-3)
    a = nu(setup, q, p, DYADIC).value
    b = zeta_dyadic_sum(setup.profile, setup.psi(p), setup.norm, p, q)
    assert a == pytest.approx(b, rel=1e-8)


# -- verify_theorem1 -----------------------------------------------------------

def test_verify_constant_one():
    psi = constant_psi()
    rep = verify_theorem1(PeriodicFunction.constant(1.0), psi, q_grid=[1.2, 1.8, 5.0])
    assert rep.max_ratio == pytest.approx(1 / 6)
    assert rep.verified
    for r in rep.records:
        assert r["ratio"] == pytest.approx(r["f_norm_q"] / (6 * r["theta_q"]))


def test_verify_cos_natural():
    f = cos_k(1)
    grid = make_grid(1.0, 2.0, 16)
    rep = verify_theorem1(f, natural_psi(f, grid), p_grid=grid.points)
    assert rep.verified and rep.max_ratio <= 1
    assert len(rep.records) == 16


def test_report_serialisation():
    rep = verify_theorem1(PeriodicFunction.constant(1.0), constant_psi(), q_grid=[1.5, 3.0])
    d = json.loads(rep.to_json())
    assert set(d) == {"records", "summary"}
    assert d["summary"]["max_ratio"] == pytest.approx(1 / 6)
    lines = rep.to_csv().strip().splitlines()
    assert lines[0].startswith("q,f_norm_q,theta_q,ratio")
    assert len(lines) == 3


def test_jsonable_and_csv_helpers():
    obj = to_jsonable({"a": math.inf, "b": [np.float64(1.5), math.nan], "c": np.int64(3)})
    assert obj == {"a": None, "b": [1.5, None], "c": 3}
    text = records_to_csv([{"x": 0.1, "y": math.inf}], ("x", "y"))
    assert text.splitlines() == ["x,y", "0.1,inf"]


def test_default_q_grid():
    g = default_q_grid(4.0)
    assert g.size == 16 and np.all((g > 1) & (g < 4)) and np.all(np.diff(g) > 0)
    assert default_q_grid(math.inf)[-1] == pytest.approx(64.0)


# -- the series W(eta) ------------------------------------------------------------

@pytest.mark.parametrize("eta", [0.1, 0.5, 0.9])
def test_lemma1_closed_form(eta):
    closed = lemma1_series(eta, 0.0)
    summed = lemma1_series(eta, 0.0, closed_form=False)
    assert summed == pytest.approx(closed, rel=1e-12)


def test_lemma1_examples():
    assert lemma1_series(1.0, 0.0) == pytest.approx(1.0)
    assert lemma1_series(0.5, 0.0) == pytest.approx(2 ** -0.5 / (1 - 2 ** -0.5))
    bound = sum(k ** -2.0 for k in range(1, 200000))
    for eta in (1e-4, 0.01, 0.5):
        assert lemma1_series(eta, -2.0) <= bound


def test_lemma1_against_direct_sum():
    for eta, a2 in [(0.3, 1.0), (0.05, -0.5), (0.7, -1.0)]:
        direct = math.fsum(2.0 ** (-k * eta) * k ** a2 for k in range(1, 5000))
        assert lemma1_series(eta, a2) == pytest.approx(direct, rel=1e-12)


def test_lemma1_domain():
    with pytest.raises(DomainError):
        lemma1_series(0.0, 0.0)


def test_lemma1_eta_times_w_limit():
    assert lemma1_series(1e-6, 0.0) * 1e-6 == pytest.approx(1 / math.log(2), rel=1e-5)


@pytest.mark.parametrize("alpha2,regime", [(-1.0, "B"), (-0.5, "A"), (0.0, "A"), (1.0, "A"), (-2.0, "C")])
def test_lemma1_asymptotic_ratio(alpha2, regime):
    r = lemma1_asymptotics_check(alpha2)
    assert r["regime"] == regime
    assert r["holds"]
    assert 0.1 <= r["ratio_min"] and r["ratio_max"] <= 10


# -- zeta closed forms -------------------------------------------------------------

def test_zeta_closed_form_examples():
    assert zeta_closed_form(2, 0, 0.25, 0, 3.0) == pytest.approx(1.0)  # (4 - 3)^-1
    assert zeta_closed_form(2, 0, 0.25, 0, 2.0) == pytest.approx(0.5)
    assert math.isinf(zeta_closed_form(2, 0, 0.25, 0, 4.0))
    assert zeta_closed_form(2, 1, 0.5, 0, 3.0) == pytest.approx(9.0)
    assert zeta_closed_form(2, 1, 0.5, -1, 3.0) == pytest.approx(3 * (math.log(3) + 1))
    with pytest.raises(DomainError):
        zeta_closed_form(2, 0, 0.6, 0, 3.0)


@pytest.mark.parametrize("spec", [(2, 0, 0.25, 0), (2, 1, 0.5, 0), (2, 1, 0.5, -1), (2, 0, 0.25, -1)])
def test_zeta_numeric_within_band(spec):
    r = zeta_numeric_vs_closed(*spec)
    assert r["holds"], (r["ratio_min"], r["ratio_max"])


@pytest.mark.parametrize("spec", [(2, 1, 0.25, 0), (3, 2, 0.2, 1)])
def test_zeta_numeric_bounded_up_to_constant(spec):
    # absolute band misses here, the shape still matches within the band width
    r = zeta_numeric_vs_closed(*spec)
    assert r["holds_up_to_constant"]


def test_zeta_numeric_feasible_set():
    # beta = 0, alpha2 = 0: inf over p > 1/(alpha + 1/q) of 1/(alpha - 1/p + 1/q)
    alpha, q = 0.25, 3.0
    ps = np.linspace(1.001, 1.999, 999)
    r = zeta_numeric_vs_closed(2, 0, alpha, 0, q_grid=[q], p_grid=ps)
    den = alpha - (1 / ps - 1 / q)
    assert r["numeric"][0] == pytest.approx(np.min(1 / den[den > 0]))
