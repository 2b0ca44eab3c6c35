"""Equilibrium solver: closed forms, uniqueness, elasticity, statics."""

import math

import numpy as np
import pytest

from netpricing import (BracketError, CapacitySharing, CustomCongestion,
                        CustomGain, DomainError, ExponentialGain, MM1Queue,
                        ReciprocalGain, baseline_model, comparative_statics,
                        finite_difference, solve_equilibrium,
                        throughput_elasticity)
from netpricing.equilibrium import (PREDICTED_STATIC_SIGNS, solve_for_demands,
                                    solve_many)


def random_model(rng):
    gain = ReciprocalGain() if rng.random() < 0.5 else ExponentialGain()
    congestion = CapacitySharing() if rng.random() < 0.5 else MM1Queue()
    return baseline_model(
        gain=gain, congestion=congestion,
        alpha=float(rng.uniform(0.5, 2.0)), beta=float(rng.uniform(0.5, 2.0)),
        capacity=float(rng.uniform(0.5, 5.0)),
        sensitivity=float(rng.uniform(0.5, 3.0)))


def random_prices(rng):
    return float(rng.uniform(0.05, 0.6)), float(rng.uniform(0.05, 0.6))


# ---------------------------------------------------------------------------
# closed forms and degenerate inputs
# ---------------------------------------------------------------------------

def test_sharing_reciprocal_closed_form():
    # m = n = 1, mu = 0.5 gives mn/mu = 2, so phi^2 + phi - 2 = 0 and phi = 1
    model = baseline_model(capacity=0.5)
    eq = solve_equilibrium(model, 0.0, 0.0)
    assert abs(eq.congestion - 1.0) <= 1e-10
    assert abs(eq.throughput - 0.5) <= 1e-10


def test_mm1_reciprocal_closed_form():
    # mu - 1/phi = 1/(phi+1) at m = n = 1, mu = 2 gives phi = 1/sqrt(2)
    model = baseline_model(congestion=MM1Queue(), capacity=2.0)
    eq = solve_equilibrium(model, 0.0, 0.0)
    assert abs(eq.congestion - 1.0 / math.sqrt(2.0)) <= 1e-10
    assert abs(eq.throughput - (2.0 - math.sqrt(2.0))) <= 1e-10


def test_zero_demand_returns_degenerate_floor():
    model = baseline_model()
    eq = solve_equilibrium(model, 1.0, 0.3)
    assert eq.degenerate and eq.throughput == 0.0 and eq.congestion == 0.0
    mm1 = baseline_model(congestion=MM1Queue(), capacity=2.0)
    eq = solve_equilibrium(mm1, 0.3, 1.0)
    assert eq.degenerate and eq.congestion == pytest.approx(0.5)
    assert eq.elasticity == 1.0


def test_negative_price_rejected():
    with pytest.raises(DomainError):
        solve_equilibrium(baseline_model(), -0.1, 0.2)


def test_bracket_failure_on_bounded_custom_supply():
    # supply saturates below the demand floor, so the gap never turns positive
    bounded = CustomCongestion(lambda lam, mu: -math.log(max(1e-300, 1.0 - lam / mu)),
                               inverse_fn=lambda phi, mu: mu * (1.0 - math.exp(-phi)))
    floored_gain = CustomGain(lambda phi, s: 0.6 + 0.4 * math.exp(-s * phi))
    model = baseline_model(gain=floored_gain, congestion=bounded, capacity=0.3)
    with pytest.raises(BracketError):
        solve_equilibrium(model, 0.0, 0.0)


# ---------------------------------------------------------------------------
# solver integrity
# ---------------------------------------------------------------------------

def test_residual_and_demand_consistency_random_models():
    rng = np.random.default_rng(21)
    for _ in range(300):
        model = random_model(rng)
        p, q = random_prices(rng)
        eq = solve_equilibrium(model, p, q)
        assert eq.gap_residual <= 1e-10 * max(1.0, eq.throughput)
        m, n = model.demands(p, q)
        rho = model.gain.value(eq.congestion, model.sensitivity)
        assert eq.throughput == pytest.approx(m * n * rho, rel=1e-12)
        assert 0.0 < eq.elasticity <= 1.0


def test_gap_function_increasing_over_bracket():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        model = random_model(rng)
        p, q = random_prices(rng)
        m, n = model.demands(p, q)
        mn = m * n
        floor = model.congestion.congestion_floor(model.capacity)
        lo = floor + 1e-14
        hi = max(2 * lo, 1.0)
        gap = lambda f: (model.congestion.implied_throughput(f, model.capacity)
                         - mn * model.gain.value(f, model.sensitivity))
        for _ in range(200):
            if gap(hi) > 0:
                break
            hi *= 2
        grid = np.linspace(lo, hi, 100)
        vals = [gap(float(f)) for f in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_solver_idempotent_and_deterministic():
    model = baseline_model(capacity=1.7, sensitivity=2.3)
    eq1 = solve_equilibrium(model, 0.2, 0.4)
    eq2 = solve_equilibrium(model, 0.2, 0.4)
    assert eq1.congestion == eq2.congestion
    assert abs(eq1.congestion - eq2.congestion) <= 1e-12


def test_solve_many_matches_scalar():
    rng = np.random.default_rng(29)
    for congestion in (CapacitySharing(), MM1Queue()):
        model = baseline_model(congestion=congestion, capacity=1.4)
        mn = rng.uniform(0.0, 1.0, size=64)
        mn[0] = 0.0
        phis, lams = solve_many(model.gain, model.congestion, mn,
                                model.capacity, model.sensitivity)
        for v, phi, lam in zip(mn, phis, lams):
            f, l, _, _ = solve_for_demands(model.gain, model.congestion,
                                           float(v), 1.0, model.capacity,
                                           model.sensitivity)
            assert abs(phi - f) <= 1e-13 * max(1.0, f)
            assert abs(lam - l) <= 1e-13 * max(1.0, l)


# ---------------------------------------------------------------------------
# throughput elasticity
# ---------------------------------------------------------------------------

def test_sharing_reciprocal_elasticity_closed_form():
    # eps = (s phi + 1) / (2 s phi + 1); at the phi = 1 equilibrium -> 2/3
    model = baseline_model(capacity=0.5)
    eq = solve_equilibrium(model, 0.0, 0.0)
    assert eq.elasticity == pytest.approx(2.0 / 3.0, abs=1e-12)
    rng = np.random.default_rng(31)
    for _ in range(100):
        m = baseline_model(capacity=float(rng.uniform(0.4, 3.0)),
                           sensitivity=float(rng.uniform(0.5, 3.0)))
        p, q = random_prices(rng)
        eq = solve_equilibrium(m, p, q)
        z = m.sensitivity * eq.congestion
        assert eq.elasticity == pytest.approx((z + 1.0) / (2.0 * z + 1.0), rel=1e-12)


def test_mm1_elasticity_matches_quadratic_weight_form():
    # eps = 1/(1 + m n G(phi)) with G = -phi^2 rho'(phi); exact for the
    # M/M/1 supply slope 1/phi^2
    rng = np.random.default_rng(37)
    for _ in range(200):
        model = baseline_model(congestion=MM1Queue(),
                               gain=ReciprocalGain() if rng.random() < 0.5 else ExponentialGain(),
                               capacity=float(rng.uniform(0.5, 5.0)),
                               sensitivity=float(rng.uniform(0.5, 3.0)))
        p, q = random_prices(rng)
        eq = solve_equilibrium(model, p, q)
        m, n = model.demands(p, q)
        g_weight = -eq.congestion ** 2 * model.gain.slope(eq.congestion, model.sensitivity)
        assert abs(eq.elasticity - 1.0 / (1.0 + m * n * g_weight)) <= 1e-10


def test_sharing_elasticity_matches_gain_elasticity_form():
    # eps = 1/(1 + eps_rho) under capacity sharing, at the equilibrium point
    rng = np.random.default_rng(41)
    for _ in range(200):
        model = baseline_model(gain=ReciprocalGain() if rng.random() < 0.5 else ExponentialGain(),
                               capacity=float(rng.uniform(0.4, 4.0)),
                               sensitivity=float(rng.uniform(0.5, 3.0)))
        p, q = random_prices(rng)
        eq = solve_equilibrium(model, p, q)
        eps_rho = model.gain.elasticity(eq.congestion, model.sensitivity)
        assert abs(eq.elasticity - 1.0 / (1.0 + eps_rho)) <= 1e-10


def test_no_congestion_limit():
    model = baseline_model(capacity=1e9)
    eq = solve_equilibrium(model, 0.1, 0.1)
    assert abs(eq.elasticity - 1.0) <= 1e-3


def test_throughput_elasticity_recompute_matches():
    model = baseline_model(capacity=1.3)
    eq = solve_equilibrium(model, 0.25, 0.35)
    assert throughput_elasticity(model, eq) == pytest.approx(eq.elasticity, rel=1e-14)


# ---------------------------------------------------------------------------
# comparative statics
# ---------------------------------------------------------------------------

def _lam_phi_of_scaled(model, p, q, m_scale=1.0, n_scale=1.0, capacity=None):
    m, n = model.demands(p, q)
    cap = capacity if capacity is not None else model.capacity
    phi, lam, _, _ = solve_for_demands(model.gain, model.congestion,
                                       m * m_scale, n * n_scale, cap,
                                       model.sensitivity)
    return phi, lam


def test_statics_signs_at_baseline():
    stat = comparative_statics(baseline_model(), 0.3, 0.3)
    for name, sign in PREDICTED_STATIC_SIGNS.items():
        assert math.copysign(1.0, getattr(stat, name)) == sign, name


def test_statics_match_finite_differences():
    rng = np.random.default_rng(43)
    for _ in range(150):
        model = random_model(rng)
        p, q = random_prices(rng)
        stat = comparative_statics(model, p, q)

        # demand-level scalings
        for attr_phi, attr_lam, which in (("dphi_dm", "dlam_dm", "m"),
                                          ("dphi_dn", "dlam_dn", "n")):
            m, n = model.demands(p, q)
            base = m if which == "m" else n
            def phi_of(scale):
                kw = {"m_scale": scale} if which == "m" else {"n_scale": scale}
                return _lam_phi_of_scaled(model, p, q, **kw)
            h = 1e-5
            phi_hi, lam_hi = phi_of(1 + h)
            phi_lo, lam_lo = phi_of(1 - h)
            fd_phi = (phi_hi - phi_lo) / (2 * h * base)
            fd_lam = (lam_hi - lam_lo) / (2 * h * base)
            assert getattr(stat, attr_phi) == pytest.approx(fd_phi, rel=1e-4)
            assert getattr(stat, attr_lam) == pytest.approx(fd_lam, rel=1e-4)

        fd_phi_mu = finite_difference(
            lambda mu: _lam_phi_of_scaled(model, p, q, capacity=mu)[0], model.capacity)
        fd_lam_mu = finite_difference(
            lambda mu: _lam_phi_of_scaled(model, p, q, capacity=mu)[1], model.capacity)
        assert stat.dphi_dmu == pytest.approx(fd_phi_mu, rel=1e-4)
        assert stat.dlam_dmu == pytest.approx(fd_lam_mu, rel=1e-4, abs=1e-9)

        fd_phi_p = finite_difference(
            lambda x: solve_equilibrium(model, x, q).congestion, p, rel_step=1e-6)
        fd_lam_q = finite_difference(
            lambda x: solve_equilibrium(model, p, x).throughput, q, rel_step=1e-6)
        assert stat.dphi_dp == pytest.approx(fd_phi_p, rel=1e-4)
        assert stat.dlam_dq == pytest.approx(fd_lam_q, rel=1e-4)


def test_demand_side_elasticities_equal():
    # the two demand-level elasticities of throughput coincide
    rng = np.random.default_rng(47)
    h = 1e-5
    for _ in range(200):
        model = random_model(rng)
        p, q = random_prices(rng)
        lam0 = solve_equilibrium(model, p, q).throughput
        _, lam_m_hi = _lam_phi_of_scaled(model, p, q, m_scale=1 + h)
        _, lam_m_lo = _lam_phi_of_scaled(model, p, q, m_scale=1 - h)
        _, lam_n_hi = _lam_phi_of_scaled(model, p, q, n_scale=1 + h)
        _, lam_n_lo = _lam_phi_of_scaled(model, p, q, n_scale=1 - h)
        eps_m = (lam_m_hi - lam_m_lo) / (2 * h * lam0)
        eps_n = (lam_n_hi - lam_n_lo) / (2 * h * lam0)
        assert abs(eps_m - eps_n) <= 1e-8
        assert eps_m == pytest.approx(solve_equilibrium(model, p, q).elasticity, rel=1e-6)


def test_price_elasticity_ratio_identity():
    # eps_p(lam) * eps_q(n) == eps_q(lam) * eps_p(m)
    rng = np.random.default_rng(53)
    for _ in range(200):
        model = random_model(rng)
        p, q = random_prices(rng)
        stat = comparative_statics(model, p, q)
        eq = stat.equilibrium
        lam = eq.throughput
        eps_lam_p = abs(p / lam * stat.dlam_dp)
        eps_lam_q = abs(q / lam * stat.dlam_dq)
        eps_m_p = p * model.user_demand.hazard(p)
        eps_n_q = q * model.cp_demand.hazard(q)
        left, right = eps_lam_p * eps_n_q, eps_lam_q * eps_m_p
        assert left == pytest.approx(right, rel=1e-6)


def test_statics_reject_degenerate_point():
    with pytest.raises(DomainError):
        comparative_statics(baseline_model(), 1.0, 0.2)
