"""Brute-force reference routes: grid argmax, damped fixed point, differences."""

import math

import numpy as np
import pytest

from netpricing import (CapacitySharing, ExponentialGain, GridSpec, MM1Queue,
                        ReciprocalGain, UserPowerDemand, baseline_model,
                        finite_difference, fixed_point_equilibrium,
                        grid_optimize, solve_equilibrium)
from netpricing.errors import DomainError


def test_fixed_point_closed_forms():
    model = baseline_model(capacity=0.5)
    assert abs(fixed_point_equilibrium(model, 0.0, 0.0) - 1.0) <= 1e-10
    mm1 = baseline_model(congestion=MM1Queue(), capacity=2.0)
    assert abs(fixed_point_equilibrium(mm1, 0.0, 0.0) - 1.0 / math.sqrt(2)) <= 1e-10


def test_fixed_point_agrees_with_bisection():
    rng = np.random.default_rng(79)
    for _ in range(400):
        model = baseline_model(
            gain=ReciprocalGain() if rng.random() < 0.5 else ExponentialGain(),
            congestion=CapacitySharing() if rng.random() < 0.5 else MM1Queue(),
            alpha=float(rng.uniform(0.5, 2.0)), beta=float(rng.uniform(0.5, 2.0)),
            capacity=float(rng.uniform(0.4, 5.0)),
            sensitivity=float(rng.uniform(0.5, 3.0)))
        p, q = float(rng.uniform(0.0, 0.8)), float(rng.uniform(0.0, 0.8))
        phi_fp = fixed_point_equilibrium(model, p, q)
        phi_bi = solve_equilibrium(model, p, q).congestion
        assert abs(phi_fp - phi_bi) <= 1e-10 * max(1.0, phi_bi)


def test_fixed_point_restarts_from_solution():
    model = baseline_model(capacity=1.3, sensitivity=2.0)
    phi = solve_equilibrium(model, 0.2, 0.3).congestion
    assert abs(fixed_point_equilibrium(model, 0.2, 0.3, start=phi) - phi) <= 1e-12


def test_fixed_point_zero_demand_floor():
    model = baseline_model(congestion=MM1Queue(), capacity=2.0)
    assert fixed_point_equilibrium(model, 1.0, 0.0) == 0.5


def test_finite_difference_known_values():
    assert finite_difference(lambda x: x * x, 3.0) == pytest.approx(6.0, abs=1e-8)
    gain = ReciprocalGain()
    assert finite_difference(lambda f: gain.value(f, 1.0), 1.0) == pytest.approx(
        -0.25, abs=1e-6)
    demand = UserPowerDemand(alpha=2.0)
    # d/dp (1 - sqrt(p)) at 0.25 = -(1/2) * 0.25^(-1/2) = -1
    assert finite_difference(demand.value, 0.25, rel_step=1e-6) == pytest.approx(
        -1.0, abs=1e-6)
    assert finite_difference(lambda x: x ** 3, 2.0, five_point=True) == pytest.approx(
        12.0, rel=1e-9)


def test_grid_profit_symmetric_baseline():
    best = grid_optimize(baseline_model(), "profit", GridSpec(321, 321))
    assert best.price_user == best.price_cp


def test_grid_welfare_symmetric_baseline():
    best = grid_optimize(baseline_model(), "welfare", GridSpec(2001, 2001))
    assert abs(best.price_user - 0.35) <= best.cell_user
    assert best.price_cp == pytest.approx(0.7 - best.price_user, abs=1e-15)


def test_grid_respects_explicit_ranges_and_validates():
    best = grid_optimize(baseline_model(), "profit",
                         GridSpec(51, 51, range_user=(0.5, 0.7), range_cp=(0.5, 0.7)))
    assert 0.5 <= best.price_user <= 0.7
    with pytest.raises(DomainError):
        GridSpec(2, 10)
    with pytest.raises(DomainError):
        grid_optimize(baseline_model(), "nonsense")


def test_grid_chunking_invariance():
    import netpricing.oracle as oracle_mod
    model = baseline_model(beta=2.0, capacity=0.8)
    spec = GridSpec(201, 201)
    full = grid_optimize(model, "profit", spec)
    original = oracle_mod._CHUNK
    try:
        oracle_mod._CHUNK = 1000   # force many chunks
        chunked = grid_optimize(model, "profit", spec)
    finally:
        oracle_mod._CHUNK = original
    assert (full.price_user, full.price_cp, full.value) == (
        chunked.price_user, chunked.price_cp, chunked.value)
