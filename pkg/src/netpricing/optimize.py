"""Profit-optimal and zero-profit welfare-optimal two-sided prices.

Both optimizations are derivative-free and deterministic:

* profit: a 101 x 101 coarse grid over the clamped price box (argmax ties
  broken toward the smallest user price, then the smallest content price)
  followed by alternating per-coordinate golden-section refinement until a
  full sweep moves prices by less than 1e-9;
* welfare: the zero-profit constraint pins q = cost - p, so a 2001-point
  scan of the feasible p segment plus golden-section refinement suffices.

The one-sided benchmarks fix the content price at zero: the profit variant
searches the user price alone, while the zero-profit welfare variant has no
freedom left and is evaluated at (cost, 0).

First-order-condition residuals are reported for interior optima: hazard
equalization and the Lerner form for profit, the cross-product hazard ratio
for welfare.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import MarketModel
from .equilibrium import Equilibrium, solve_equilibrium, solve_for_demands, solve_many
from .errors import DegenerateBaselineError, DomainError
from .objectives import evaluate_objectives

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_ABS_TOL = 1e-11
SWEEP_MOVE_TOL = 1e-9
MAX_SWEEPS = 200
BOUNDARY_EPS = 1e-6
_CLAMP = 1.0 - 1e-9
_COARSE_POINTS = 101
_SCAN_POINTS = 2001


def golden_max(f, lo: float, hi: float, tol: float = GOLDEN_ABS_TOL) -> tuple[float, float]:
    """Golden-section maximizer on [lo, hi]; ties resolve toward lo."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _coordinate_max(f, x: float, lo: float, hi: float, width: float) -> float:
    """Golden section on a local bracket around x, growing it when the
    maximizer sticks to an interior bracket edge."""
    w = width
    while True:
        a, b = max(lo, x - w), min(hi, x + w)
        xs, _ = golden_max(f, a, b)
        at_left_edge = (xs - a) < 10 * GOLDEN_ABS_TOL and a > lo
        at_right_edge = (b - xs) < 10 * GOLDEN_ABS_TOL and b < hi
        if not (at_left_edge or at_right_edge):
            return xs
        w *= 2.0
        if w >= (hi - lo):
            return golden_max(f, lo, hi)[0]


@dataclass(frozen=True)
class PricePair:
    user: float     # p
    cp: float       # q

    def __post_init__(self):
        if self.user < 0 or self.cp < 0:
            raise DomainError("prices must be nonnegative")

    @property
    def total(self) -> float:
        return self.user + self.cp


@dataclass(frozen=True)
class OptimumDiagnostics:
    user_hazard: float
    cp_hazard: float
    elasticity: float
    kkt_residual: float | None = None
    lerner_residual: float | None = None
    ramsey_residual: float | None = None
    user_surplus_per_unit: float | None = None
    cp_surplus_per_unit: float | None = None


@dataclass(frozen=True)
class OptimumReport:
    kind: str                   # profit_two_sided | welfare_two_sided | profit_one_sided | welfare_one_sided
    prices: PricePair
    objective: float
    equilibrium: Equilibrium
    diagnostics: OptimumDiagnostics
    boundary: bool              # optimum pinned at the search box edge; FOC residuals not guaranteed


def _profit_value_factory(model: MarketModel):
    c = model.cost

    def value(p: float, q: float) -> float:
        m, n = model.demands(p, q)
        if m <= 0.0 or n <= 0.0:
            return 0.0
        _, lam, _, _ = solve_for_demands(model.gain, model.congestion, m, n,
                                         model.capacity, model.sensitivity)
        return (p + q - c) * lam

    return value


def _coarse_profit_grid(model: MarketModel, p_hi: float, q_hi: float) -> tuple[float, float]:
    p_axis = np.linspace(0.0, p_hi, _COARSE_POINTS)
    q_axis = np.linspace(0.0, q_hi, _COARSE_POINTS)
    m_vals = model.user_demand.value(p_axis)
    n_vals = model.cp_demand.value(q_axis)
    mn = np.outer(m_vals, n_vals).reshape(-1)
    _, lam = solve_many(model.gain, model.congestion, mn,
                        model.capacity, model.sensitivity)
    margin = (p_axis[:, None] + q_axis[None, :] - model.cost).reshape(-1)
    values = margin * lam
    k = int(np.argmax(values))     # first occurrence: smallest p, then smallest q
    return float(p_axis[k // _COARSE_POINTS]), float(q_axis[k % _COARSE_POINTS])


def _profit_diagnostics(model: MarketModel, p: float, q: float,
                        eq: Equilibrium, one_sided: bool) -> OptimumDiagnostics:
    margin = p + q - model.cost
    mh = model.user_demand.hazard(p)
    eps = eq.elasticity
    kkt_user = abs(mh * margin * eps - 1.0)
    if one_sided:
        return OptimumDiagnostics(
            user_hazard=mh,
            cp_hazard=model.cp_demand.hazard(q),
            elasticity=eps,
            kkt_residual=kkt_user,
        )
    nh = model.cp_demand.hazard(q)
    kkt = max(kkt_user, abs(nh * margin * eps - 1.0))
    total_price_elasticity = eps * (p * mh + q * nh)
    lerner = abs(margin / (p + q) - 1.0 / total_price_elasticity)
    return OptimumDiagnostics(
        user_hazard=mh, cp_hazard=nh, elasticity=eps,
        kkt_residual=kkt, lerner_residual=lerner,
    )


def optimize_profit(model: MarketModel) -> OptimumReport:
    """Two-sided profit maximizer over the clamped price box."""
    p_hi = model.user_demand.support * _CLAMP
    q_hi = model.cp_demand.support * _CLAMP
    value = _profit_value_factory(model)

    p, q = _coarse_profit_grid(model, p_hi, q_hi)
    cell = max(p_hi, q_hi) / (_COARSE_POINTS - 1)
    width = 2.0 * cell
    prev_move = math.inf
    stalled = 0
    for _ in range(MAX_SWEEPS):
        p_new = _coordinate_max(lambda x: value(x, q), p, 0.0, p_hi, width)
        q_new = _coordinate_max(lambda x: value(p_new, x), q, 0.0, q_hi, width)
        moved = abs(p_new - p) + abs(q_new - q)
        p, q = p_new, q_new
        if moved < SWEEP_MOVE_TOL:
            break
        # movements contract sweep over sweep until the objective's float
        # granularity is reached; two non-improving sweeps mean that floor
        if moved >= prev_move:
            stalled += 1
            if stalled >= 2:
                break
        else:
            stalled = 0
        prev_move = moved

    eq = solve_equilibrium(model, p, q)
    boundary = (min(p, p_hi - p) < BOUNDARY_EPS) or (min(q, q_hi - q) < BOUNDARY_EPS)
    return OptimumReport(
        kind="profit_two_sided",
        prices=PricePair(p, q),
        objective=value(p, q),
        equilibrium=eq,
        diagnostics=_profit_diagnostics(model, p, q, eq, one_sided=False),
        boundary=boundary,
    )


def _welfare_segment(model: MarketModel) -> tuple[float, float]:
    c = model.cost
    p_hi_cap = model.user_demand.support * _CLAMP
    q_hi_cap = model.cp_demand.support * _CLAMP
    if not 0.0 < c < p_hi_cap + q_hi_cap:
        raise DomainError("zero-profit pricing needs 0 < cost < combined support")
    lo, hi = max(0.0, c - q_hi_cap), min(c, p_hi_cap)
    if not lo < hi:
        raise DomainError("empty zero-profit segment")
    return lo, hi


def _welfare_value_factory(model: MarketModel):
    c = model.cost

    def value(p: float) -> float:
        q = c - p
        m, n = model.demands(p, q)
        if m <= 0.0 or n <= 0.0:
            return 0.0
        _, lam, _, _ = solve_for_demands(model.gain, model.congestion, m, n,
                                         model.capacity, model.sensitivity)
        s_m = model.user_demand.per_unit_surplus(p)
        s_n = model.cp_demand.per_unit_surplus(q)
        return (s_m + s_n) * lam

    return value


def _welfare_diagnostics(model: MarketModel, p: float, q: float,
                         eq: Equilibrium) -> OptimumDiagnostics:
    mh = model.user_demand.hazard(p)
    nh = model.cp_demand.hazard(q)
    s_m = model.user_demand.per_unit_surplus(p)
    s_n = model.cp_demand.per_unit_surplus(q)
    eps = eq.elasticity
    share_m = s_m / (s_m + s_n)
    share_n = s_n / (s_m + s_n)
    residual = abs(mh * (eps - 1.0 + share_n) - nh * (eps - 1.0 + share_m))
    return OptimumDiagnostics(
        user_hazard=mh, cp_hazard=nh, elasticity=eps,
        ramsey_residual=residual / max(mh, nh),
        user_surplus_per_unit=s_m, cp_surplus_per_unit=s_n,
    )


def optimize_welfare(model: MarketModel) -> OptimumReport:
    """Welfare maximizer on the zero-profit segment p + q = cost."""
    lo, hi = _welfare_segment(model)
    value = _welfare_value_factory(model)

    p_axis = np.linspace(lo, hi, _SCAN_POINTS)
    m_vals = model.user_demand.value(p_axis)
    n_vals = model.cp_demand.value(model.cost - p_axis)
    _, lam = solve_many(model.gain, model.congestion, m_vals * n_vals,
                        model.capacity, model.sensitivity)
    with np.errstate(invalid="ignore", divide="ignore"):
        s_m = model.user_demand.per_unit_surplus(p_axis)
        s_n = model.cp_demand.per_unit_surplus(model.cost - p_axis)
        scan = np.where((m_vals > 0) & (n_vals > 0), (s_m + s_n) * lam, 0.0)
    k = int(np.argmax(scan))
    cell = (hi - lo) / (_SCAN_POINTS - 1)
    a, b = max(lo, float(p_axis[k]) - cell), min(hi, float(p_axis[k]) + cell)
    p, _ = golden_max(value, a, b)
    p = float(p)
    q = model.cost - p

    eq = solve_equilibrium(model, p, q)
    boundary = min(p - lo, hi - p) < BOUNDARY_EPS
    return OptimumReport(
        kind="welfare_two_sided",
        prices=PricePair(p, q),
        objective=value(p),
        equilibrium=eq,
        diagnostics=_welfare_diagnostics(model, p, q, eq),
        boundary=boundary,
    )


def optimize_one_sided(model: MarketModel, kind: str) -> OptimumReport:
    """Benchmarks with the content side priced at zero.

    ``kind="profit"`` searches the user price; ``kind="welfare"`` is fully
    pinned by the zero-profit constraint at (cost, 0).
    """
    if kind == "profit":
        p_hi = model.user_demand.support * _CLAMP
        value = _profit_value_factory(model)

        p_axis = np.linspace(0.0, p_hi, _SCAN_POINTS)
        m_vals = model.user_demand.value(p_axis)
        n0 = model.cp_demand.value(0.0)
        _, lam = solve_many(model.gain, model.congestion, m_vals * n0,
                            model.capacity, model.sensitivity)
        scan = (p_axis - model.cost) * lam
        k = int(np.argmax(scan))
        cell = p_hi / (_SCAN_POINTS - 1)
        a, b = max(0.0, float(p_axis[k]) - cell), min(p_hi, float(p_axis[k]) + cell)
        p = float(golden_max(lambda x: value(x, 0.0), a, b)[0])

        eq = solve_equilibrium(model, p, 0.0)
        return OptimumReport(
            kind="profit_one_sided",
            prices=PricePair(p, 0.0),
            objective=value(p, 0.0),
            equilibrium=eq,
            diagnostics=_profit_diagnostics(model, p, 0.0, eq, one_sided=True),
            boundary=min(p, p_hi - p) < BOUNDARY_EPS,
        )
    if kind == "welfare":
        p = model.cost
        report = evaluate_objectives(model, p, 0.0)
        eq = report.equilibrium
        mh = (model.user_demand.hazard(p)
              if p < model.user_demand.support else math.inf)
        return OptimumReport(
            kind="welfare_one_sided",
            prices=PricePair(p, 0.0),
            objective=report.surplus_welfare,
            equilibrium=eq,
            diagnostics=OptimumDiagnostics(
                user_hazard=mh,
                cp_hazard=model.cp_demand.hazard(0.0),
                elasticity=eq.elasticity,
            ),
            boundary=True,      # the constraint leaves no interior freedom
        )
    raise DomainError(f"unknown one-sided kind {kind!r}")


@dataclass(frozen=True)
class GrowthRates:
    """Relative gains of two-sided over one-sided pricing."""

    profit_growth: float        # r* = (U_two - U_one) / U_one
    welfare_growth: float       # (W_two - W_one) / W_one
    profit_two_sided: OptimumReport
    profit_one_sided: OptimumReport
    welfare_two_sided: OptimumReport
    welfare_one_sided: OptimumReport


def growth_rates(model: MarketModel) -> GrowthRates:
    """All four optima plus both growth rates; errors on a degenerate baseline."""
    profit_two = optimize_profit(model)
    profit_one = optimize_one_sided(model, "profit")
    welfare_two = optimize_welfare(model)
    welfare_one = optimize_one_sided(model, "welfare")
    if profit_one.objective <= 0.0:
        raise DegenerateBaselineError(
            f"one-sided profit optimum is {profit_one.objective}; growth rate undefined")
    if welfare_one.objective <= 0.0:
        raise DegenerateBaselineError(
            f"one-sided welfare benchmark is {welfare_one.objective}; growth rate undefined")
    return GrowthRates(
        profit_growth=(profit_two.objective - profit_one.objective) / profit_one.objective,
        welfare_growth=(welfare_two.objective - welfare_one.objective) / welfare_one.objective,
        profit_two_sided=profit_two,
        profit_one_sided=profit_one,
        welfare_two_sided=welfare_two,
        welfare_one_sided=welfare_one,
    )
