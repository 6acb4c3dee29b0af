import numpy as np
import pytest
from scipy import integrate

from airyphase.analysis import (
    SQUEEZING_MONOMIALS,
    ExtentPolicy,
    Grid,
    cut,
    grid_eval,
    line_integrals,
    marginal,
    momentum_distribution_airy,
    negativity,
    nonlinear_squeezing,
    normalization,
    phase_space_integrals,
    squeezing_coefficients,
    squeezing_from_moments,
)
from airyphase.engine import PhaseGate, apply_phase_gate, ideal_momentum_gate_wigner, tdw_phase_gate
from airyphase.errors import InvalidParameterError, PoisonedCellError, PurityError, UnboundedSupportError
from airyphase.evaluator import WignerEvaluator
from airyphase.gaussian import displace, gaussian_moment, position_log_density, squeeze, thermal, vacuum, wigner_gaussian
from airyphase.oracle import momentum_distribution_quadrature
from airyphase.special import airy_ai

CUBIC = PhaseGate.cubic(2.0)
QBC = PhaseGate((0.0, 0.0, 2.0, 0.2))


def test_vacuum_grid_bounds():
    g = grid_eval(wigner_gaussian(vacuum()), (-4, 4), (-4, 4), 101, 101)
    assert g.values.shape == (101, 101)
    assert np.all(g.values > 0) and g.values.max() <= 1 / np.pi
    assert g.values[50, 50] == pytest.approx(1 / np.pi)


def test_cubic_grid_negative():
    g = grid_eval(apply_phase_gate(vacuum(), CUBIC), (-4, 4), (-4, 4), 101, 101)
    assert g.values.min() < 0


def test_degenerate_grid_rejected():
    with pytest.raises(InvalidParameterError):
        grid_eval(wigner_gaussian(vacuum()), (-1, 1), (-1, 1), 1, 2)
    with pytest.raises(InvalidParameterError):
        grid_eval(wigner_gaussian(vacuum()), (1, 1), (-1, 1), 3, 3)
    with pytest.raises(InvalidParameterError):
        Grid((0, 1), (0, 1), 1, 2, np.zeros(2))


def test_worker_count_independent():
    ev = apply_phase_gate(thermal(0.5), QBC)
    a = grid_eval(ev, (-3, 3), (-6, 3), 41, 57, workers=1)
    b = grid_eval(ev, (-3, 3), (-6, 3), 41, 57, workers=4)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.ln_mags.tobytes() == b.ln_mags.tobytes()


def test_poisoned_cell_reported():
    def log_fn(q, p):
        ln = np.where((q > 0.4) & (p > 0.4), np.nan, -1.0)
        return np.ones(q.shape, dtype=int), ln

    ev = WignerEvaluator(1, "broken", log_fn)
    with pytest.raises(PoisonedCellError) as info:
        grid_eval(ev, (0, 1), (0, 1), 3, 3)
    assert info.value.q == 0.5 and info.value.p == 0.5


def test_cuts():
    ev = apply_phase_gate(vacuum(), PhaseGate.quartic(1.0))
    c = cut(ev, "q", 0.0, (-1.0, 1.0), 201)
    assert c.values[100] == pytest.approx(1 / np.pi, abs=1e-12)
    assert np.all(np.abs(np.diff(c.values)) < 1e-2)
    c = cut(apply_phase_gate(vacuum(), CUBIC), "p", 0.0, (-8.0, 0.0), 400)
    assert np.count_nonzero(np.diff(c.signs) != 0) >= 4
    ident = cut(apply_phase_gate(vacuum(), PhaseGate()), "p", 0.3, (-3, 3), 31)
    np.testing.assert_allclose(ident.values, np.exp(-(0.09 + ident.coords**2)) / np.pi, rtol=1e-12)
    with pytest.raises(InvalidParameterError):
        cut(ev, "x", 0.0, (0, 1), 3)


def test_line_integrals():
    tot, ab, mom = line_integrals(lambda x: np.sin(x), 0.0, np.pi, powers=(1,))
    assert tot == pytest.approx(2.0, abs=1e-13)
    assert ab == pytest.approx(2.0, abs=1e-13)
    assert mom[0] == pytest.approx(np.pi, abs=1e-12)
    tot, ab, _ = line_integrals(lambda x: np.cos(x), 0.0, 2 * np.pi)
    assert abs(tot) < 1e-13 and ab == pytest.approx(4.0, abs=1e-12)


def test_normalization_and_moments():
    cases = [
        (vacuum(), CUBIC),
        (thermal(1.0), QBC),
        (displace(squeeze(vacuum(), 0, 2.0), 0, 1.0, -1.0), PhaseGate((0, 0, 2.0, -0.2))),
    ]
    for st, gate in cases:
        ints = phase_space_integrals(apply_phase_gate(st, gate), monomials=SQUEEZING_MONOMIALS)
        assert ints.total == pytest.approx(1.0, abs=1e-4)
        var_g, cov, var_h = squeezing_coefficients(st, gate)
        t = np.array([-2.0, 0.0, 1.0])
        wick = var_g - 2 * t * cov + t * t * var_h
        np.testing.assert_allclose(squeezing_from_moments(ints.moments, t), wick, atol=1e-4)


def test_normalization_tdw_thermal():
    assert normalization(apply_phase_gate(thermal(0.5), tdw_phase_gate())) == pytest.approx(1.0, abs=1e-4)


def test_ideal_state_is_unbounded():
    ev = ideal_momentum_gate_wigner(CUBIC)
    ev = WignerEvaluator(1, ev.description, ev.log_fn, extent=(-2, 2, -2, 2))
    with pytest.raises(UnboundedSupportError):
        phase_space_integrals(ev, ExtentPolicy(max_doublings=2))


def test_negativity_reports():
    vac = negativity(wigner_gaussian(vacuum()))
    assert vac.negative_volume <= 1e-8 and vac.min_value >= 0 and vac.negative_fraction == 0
    cub = negativity(apply_phase_gate(vacuum(), CUBIC))
    assert cub.negative_volume > 0 and cub.min_value < 0 and cub.negative_fraction > 0
    th = negativity(apply_phase_gate(thermal(1.0), CUBIC))
    assert th.min_value < 0
    assert abs(th.min_value) < abs(cub.min_value)
    assert th.negative_volume < cub.negative_volume


def test_negativity_from_grid():
    g = grid_eval(apply_phase_gate(vacuum(), CUBIC), (-6, 6), (-12, 4), 241, 321)
    rep = negativity(g)
    assert rep.min_value < 0 and rep.negative_volume > 0 and rep.negative_fraction > 0
    ref = negativity(apply_phase_gate(vacuum(), CUBIC))
    assert rep.min_value >= ref.min_value - 1e-12


def test_position_marginal_invariant():
    st = displace(squeeze(thermal(0.5), 0, 1.3, 0.4), 0, 0.4, -0.2)
    for gate in (CUBIC, QBC, PhaseGate((0, 0, 2.0, -0.2)), tdw_phase_gate(), PhaseGate.quartic(0.2)):
        m = marginal(apply_phase_gate(st, gate), "q", (-4, 4), 41)
        np.testing.assert_allclose(m.density, np.exp(position_log_density(st, 0, m.coords)), atol=1e-6)


def test_momentum_marginal_identity_gate_is_gaussian():
    m = marginal(apply_phase_gate(vacuum(), PhaseGate()), "p", (-3, 3), 13)
    np.testing.assert_allclose(m.density, np.exp(-m.coords**2) / np.sqrt(np.pi), atol=1e-10)


def test_momentum_distribution_airy_path():
    st = vacuum()
    ps = np.linspace(-6, 3, 10)
    airy = momentum_distribution_airy(st, 1.0, ps)
    quad = np.array([momentum_distribution_quadrature(st, 1.0, p) for p in ps])
    np.testing.assert_allclose(airy, quad, atol=1e-10)
    np.testing.assert_allclose(momentum_distribution_airy(st, 0.0, ps), np.exp(-ps**2) / np.sqrt(np.pi), rtol=1e-14)
    # off-centre states fall back to the convolution quadrature
    disp = displace(vacuum(), 0, 0.5, 0.2)
    got = momentum_distribution_airy(disp, 0.7, [0.1])
    assert got[0] == pytest.approx(momentum_distribution_quadrature(disp, 0.7, 0.1), rel=1e-12)
    with pytest.raises(PurityError):
        momentum_distribution_airy(thermal(0.2), 1.0, ps)


def test_momentum_distribution_wide_state_trend():
    # broad position wavefunctions approach the ideal momentum eigenstate:
    # the density profile tends to Ai(gamma^{-1/3} p)^2 up to normalisation
    g = 1.0
    ps = np.linspace(-4, 1, 11)
    shape = airy_ai(ps / np.cbrt(g)) ** 2
    errs = []
    for stretch in (5.0, 10.0, 20.0):
        d = momentum_distribution_airy(squeeze(vacuum(), 0, stretch), g, ps)
        errs.append(np.max(np.abs(d / d.max() - shape / shape.max())))
    assert errs[0] > errs[1] > errs[2]


def test_squeezing_identity_and_ordering():
    ident = nonlinear_squeezing(vacuum(), PhaseGate())
    assert ident.min_gamma_tilde == pytest.approx(0.0, abs=1e-12)
    assert ident.min_variance == pytest.approx(0.5) and ident.ratio == pytest.approx(1.0)
    cub = nonlinear_squeezing(vacuum(), CUBIC)
    # post-gate momentum is p - 2 q^2, so the aligned direction is gamma_tilde = -2
    v = dict(zip(np.round(cub.gamma_tilde, 12), cub.variance))
    assert v[-2.0] < v[0.0]
    assert cub.exact_min_gamma_tilde == pytest.approx(-2.0)
    qbc = nonlinear_squeezing(vacuum(), QBC)
    tdw = nonlinear_squeezing(vacuum(), tdw_phase_gate())
    assert cub.ratio < qbc.ratio < 10 * cub.ratio < tdw.ratio
    assert nonlinear_squeezing(vacuum(), CUBIC, threshold=0.7).threshold == 0.7


def test_squeezing_moments_match_gaussian_moment():
    st = displace(thermal(0.2), 0, 0.3, 0.1)
    var_g, cov, var_h = squeezing_coefficients(st, PhaseGate())
    assert var_g == pytest.approx(gaussian_moment(st, (0, 2)) - 0.01)
    assert var_h == pytest.approx(gaussian_moment(st, (4, 0)) - gaussian_moment(st, (2, 0)) ** 2)
