import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grandlebesgue import (
    DomainError,
    PeriodicFunction,
    TrigPolynomial,
    bgls_modulus,
    bgls_norm,
    constant_psi,
    dirac_psi,
    lp_norm,
    make_f0,
    make_grid,
    make_power_psi,
    modulus_lp,
    natural_psi,
    ordering_ll,
    ordering_lt,
)
from grandlebesgue.psi import PGrid, custom_psi, parse_psi_record, solve_continuity_h

import oracles

GOLDEN = (1 + math.sqrt(5)) / 2


def cos1():
    return PeriodicFunction.from_trig(TrigPolynomial(0.0, np.array([1.0]), np.zeros(1)))


def sample_functions():
    rng = np.random.default_rng(11)
    out = [PeriodicFunction.constant(2.0), cos1(),
           PeriodicFunction.from_callable(lambda x: np.exp(np.sin(x)) - 1.0)]
    for deg in (2, 5):
        out.append(PeriodicFunction.from_trig(TrigPolynomial(rng.uniform(-1, 1), rng.uniform(-1, 1, deg),
                                                             rng.uniform(-1, 1, deg))))
    return out


# -- grids -----------------------------------------------------------------------

def test_grid_layout_finite_b():
    g = make_grid(1.0, 2.0, 16)
    assert g.inset == pytest.approx(1e-4)
    assert g.points[0] == pytest.approx(1.0 + 1e-4)
    assert g.points[-1] == pytest.approx(2.0 - 1e-4)
    gaps = np.diff(g.points)
    assert np.all(gaps > 0)
    assert gaps[-1] < gaps[0]


def test_grid_infinite_b_and_refinement():
    g = make_grid(1.0, math.inf, 10)
    assert g.points[-1] == pytest.approx(64.0)
    r = make_grid(1.0, 2.0).refined()
    assert r.inset == pytest.approx(1e-5)


def test_grid_validation():
    with pytest.raises(DomainError):
        make_grid(0.5, 2.0)
    with pytest.raises(DomainError):
        PGrid(np.array([1.5, 1.2]), 1.0, 2.0, 1e-4)
    with pytest.raises(DomainError):
        PGrid(np.array([1.0, 1.5]), 1.0, 2.0, 1e-4)


# -- continuity equation ----------------------------------------------------------

@pytest.mark.parametrize("a,beta,gamma,h", [(1.0, 1.0, -1.0, GOLDEN), (1.0, 2.0, -2.0, GOLDEN),
                                            (2.0, 1.0, -1.0, 1 + math.sqrt(2))])
def test_continuity_examples(a, beta, gamma, h):
    got = solve_continuity_h(a, beta, gamma)
    assert got == pytest.approx(h, rel=1e-12)
    assert (got - a) ** -beta == pytest.approx(got ** abs(gamma), rel=1e-12)


@given(st.floats(1.0, 3.0), st.floats(0.5, 4.0), st.floats(-2.0, -0.1))
def test_continuity_residual(a, beta, gamma):
    h = solve_continuity_h(a, beta, gamma)
    assert h > a
    assert math.log((h - a) ** -beta) == pytest.approx(abs(gamma) * math.log(h), rel=1e-12, abs=1e-12)


def test_continuity_without_root():
    with pytest.raises(DomainError):
        solve_continuity_h(1.0, 0.0, -1.0)


# -- families ---------------------------------------------------------------------

def test_power_examples():
    assert make_power_psi(1, 2, 0, 0)(np.array([1.1, 1.5, 1.9])) == pytest.approx([1, 1, 1])
    assert make_power_psi(1, 3, 0, 1)(2.0) == pytest.approx(1.0)
    psi = make_power_psi(1, 3, 0.5, 2.0)
    assert psi(2.5) == pytest.approx(1.5 ** -0.5 * 0.5 ** -2.0)


def test_power_infinite_branches_meet():
    psi = make_power_psi(1.0, math.inf, 1.0, -1.0)
    h = psi.params["h"]
    assert h == pytest.approx(GOLDEN, rel=1e-12)
    assert psi(h - 1e-9) == pytest.approx(psi(h + 1e-9), rel=1e-7)
    assert psi(1.2) == pytest.approx(1 / 0.2)
    assert psi(5.0) == pytest.approx(5.0)


def test_power_infinite_needs_negative_gamma():
    with pytest.raises(DomainError):
        make_power_psi(1.0, math.inf, 1.0, 0.5)


def test_psi_positivity_check():
    grid = make_grid(1.0, 2.0)
    bad = custom_psi(lambda p: np.asarray(p) - 1.5, 1.0, 2.0)
    with pytest.raises(DomainError):
        bad.check(grid)
    make_power_psi(1, 2, 1, 1).check(grid)


@pytest.mark.parametrize("psi", [make_power_psi(1, 2, 0.5, 1.0), make_power_psi(1, math.inf, 2, -1),
                                 constant_psi(1, 3, 2.5), dirac_psi(1.7)])
def test_record_round_trip(psi):
    back = parse_psi_record(psi.to_record())
    assert back.family == psi.family
    ps = np.array([1.3, 1.7])
    if not psi.is_dirac:
        np.testing.assert_allclose(back(ps), psi(ps), rtol=1e-14)
    else:
        assert back.params["r"] == psi.params["r"]


def test_record_errors():
    with pytest.raises(DomainError):
        parse_psi_record("family=power;a=1")
    with pytest.raises(DomainError):
        parse_psi_record("family=weird;a=1;b=2")


def test_natural_psi_examples():
    grid = make_grid(1.0, 2.0, 8)
    psi = natural_psi(PeriodicFunction.constant(2.0), grid)
    np.testing.assert_allclose(psi(grid.points), 2.0, rtol=1e-14)
    f0 = make_f0(0.5, 1.0)
    psi = natural_psi(f0, make_grid(1.0, 1.5, 8))
    assert psi(1.0) == pytest.approx(4.0, rel=1e-8)


def test_natural_psi_round_trip_and_monotone():
    f0 = make_f0(0.5, 2.0)
    grid = make_grid(1.0, 1.5, 8)
    psi = natural_psi(f0, grid)
    dense = np.linspace(1.01, 1.49, 60)
    assert np.all(np.diff(psi(dense)) >= 0)
    back = parse_psi_record(psi.to_record())
    np.testing.assert_allclose(back(grid.points), psi(grid.points), rtol=1e-14)


def test_natural_psi_divergence_names_p():
    with pytest.raises(DomainError, match="p = "):
        natural_psi(make_f0(0.5, 2.0), make_grid(1.5, 2.5, 6))


# -- BGLS norm -------------------------------------------------------------------

def test_bgls_constant_over_constant():
    assert bgls_norm(PeriodicFunction.constant(3.0), constant_psi(), make_grid(1, 2)) == pytest.approx(3.0)


def test_bgls_natural_is_one():
    f0 = make_f0(0.5, 2.0)
    grid = make_grid(1.0, 1.5, 12)
    value, witness = bgls_norm(f0, natural_psi(f0, grid), grid, return_witness=True)
    assert value == pytest.approx(1.0, rel=1e-12)
    assert 1.0 < witness < 1.5


@pytest.mark.parametrize("f", sample_functions())
def test_dirac_reduction(f):
    grid = make_grid(1.0, math.inf, 8)
    for r in (1.0, 1.5, 3.0):
        assert bgls_norm(f, dirac_psi(r), grid) == lp_norm(f, r)


@given(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-6))
def test_bgls_scale_equivariance(c):
    f = sample_functions()[2]
    grid = make_grid(1.0, 3.0, 8)
    psi = make_power_psi(1.0, 3.0, 0.3, 0.7)
    assert bgls_norm(f * c, psi, grid) == pytest.approx(abs(c) * bgls_norm(f, psi, grid), rel=1e-10)


def test_bgls_against_direct_oracle():
    # independent max of oracle norms over the same grid
    a0, a, b = 0.2, np.array([1.0, -0.5]), np.array([0.3, 0.0])
    f = PeriodicFunction.from_trig(TrigPolynomial(a0, a, b))
    grid = make_grid(1.0, 3.0, 6)
    psi = make_power_psi(1.0, 3.0, 0.2, 0.4)
    ref = max(oracles.trig_norm(a0, a, b, p) / psi(p) for p in grid.points)
    assert bgls_norm(f, psi, grid) == pytest.approx(ref, rel=1e-9)


# -- BGLS modulus -------------------------------------------------------------------

def test_bgls_modulus_examples():
    grid = make_grid(1.0, 2.0, 8)
    psi = make_power_psi(1, 2, 0.5, 0.5)
    assert bgls_modulus(PeriodicFunction.constant(2.0), 0.5, psi, grid) == 0.0
    assert bgls_modulus(cos1(), 0.0, psi, grid) == 0.0
    for r in (1.0, 2.0):
        assert bgls_modulus(cos1(), 0.7, dirac_psi(r), grid) == pytest.approx(modulus_lp(cos1(), 0.7, r), rel=1e-14)


def test_bgls_modulus_monotone():
    grid = make_grid(1.0, 2.0, 6)
    psi = make_power_psi(1, 2, 0.0, 1.0)
    vals = [bgls_modulus(sample_functions()[2], d, psi, grid) for d in (0.01, 0.1, 0.5, 1.0)]
    assert vals == sorted(vals)


# -- orderings ------------------------------------------------------------------

def test_ordering_lt_examples():
    grid = make_grid(1.0, 2.0, 16)
    p1, p2 = make_power_psi(1, 2, 0, 1), make_power_psi(1, 2, 0, 2)
    same = ordering_lt(p1, p1, grid)
    assert same.holds and same.value == pytest.approx(1.0)
    r = ordering_lt(p1, p2, grid)
    assert r.holds and r.value == pytest.approx(1.0, rel=1e-3)
    assert not ordering_lt(p2, p1, grid).holds


def test_ordering_ll_examples():
    grid = make_grid(1.0, 2.0, 16)
    p1, p2 = make_power_psi(1, 2, 0, 1), make_power_psi(1, 2, 0, 2)
    assert ordering_ll(p1, p2, grid).holds
    assert ordering_ll(p2, p2, grid).holds is False
    assert ordering_ll(constant_psi(1, 2, 1.0), p1, grid).holds
    assert ordering_ll(p1, constant_psi(1, 2, 1.0), grid).holds is None


@pytest.mark.parametrize("f", sample_functions())
def test_monotone_embedding(f):
    grid = make_grid(1.0, 2.0, 12)
    p1, p2 = make_power_psi(1, 2, 0, 1), make_power_psi(1, 2, 0, 2)
    res = ordering_lt(p1, p2, grid)
    assert res.holds
    assert bgls_norm(f, p2, grid) <= res.value * bgls_norm(f, p1, grid) + 1e-12


@pytest.mark.parametrize("f", sample_functions())
def test_coincidence_of_equivalent_psis(f):
    grid = make_grid(1.0, 2.0, 12)
    p1 = make_power_psi(1, 2, 0.5, 1.0)
    p2 = custom_psi(lambda p: 2.0 * np.asarray(p1(p)) * (1 + 0.1 * np.sin(np.asarray(p))), 1.0, 2.0)
    r12, r21 = ordering_lt(p1, p2, grid), ordering_lt(p2, p1, grid)
    assert r12.holds and r21.holds
    n1, n2 = bgls_norm(f, p1, grid), bgls_norm(f, p2, grid)
    # sup ratios on the grid the norms are taken over
    k = max(r12.evidence[0], r21.evidence[0])
    assert n1 <= k * n2 * (1 + 1e-12) and n2 <= k * n1 * (1 + 1e-12)
