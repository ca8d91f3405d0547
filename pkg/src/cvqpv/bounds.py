"""Energy-constrained entropy-continuity bound and the separation condition.

The security gap requires, for attacker states of energy at most E,

    eps < (1/2) log2(4t / (e (1+2u)))
          - ((1+a)/(2(1-a)) + a) * B(E, a, et)

with the continuity bracket

    B(E, a, et) = 2 et (log2(E+1) + log2(e / (a (1-et)))) + 6 htilde((1+a)/(1-a) et).

All logs are base 2 (checked empirically against the reference parameter
tables; a natural-log reading does not reproduce them). The right-hand side
is increasing in et, so for fixed a the largest admissible et is found by
bisection; the outer maximization over a uses a log-spaced grid plus
golden-section refinement. Everything is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams
from .gaussian import h_tilde

ALPHA_MIN = 1e-4  # bracket diverges as a -> 0, safe lower cutoff
ALPHA_MAX = 0.5


@dataclass(frozen=True)
class BoundInputs:
    eps: float
    E: float
    t: float
    u: float
    alpha: float
    eps_tilde: float

    def __post_init__(self):
        if self.eps < 0.0:
            raise ValueError("eps must be nonnegative")
        if self.E <= 0.0:
            raise ValueError("E must be positive")
        if not (0.0 < self.alpha <= 0.5):
            raise ValueError("alpha must lie in (0, 1/2]")
        if not (0.0 < self.eps_tilde < 1.0):
            raise ValueError("eps_tilde must lie in (0,1)")


@dataclass(frozen=True)
class BoundResult:
    eps_tilde_max: float
    alpha_star: float
    feasible: bool
    rhs_at_opt: float


def _bracket(E: float, alpha: float, eps_tilde: float) -> float:
    if not (0.0 < alpha <= 0.5):
        raise ValueError("alpha must lie in (0, 1/2]")
    if not (0.0 <= eps_tilde < 1.0):
        raise ValueError("eps_tilde must lie in [0,1)")
    if eps_tilde == 0.0:
        return 0.0
    log_term = math.log2(E + 1.0) + math.log2(math.e / (alpha * (1.0 - eps_tilde)))
    return 2.0 * eps_tilde * log_term + 6.0 * h_tilde((1.0 + alpha) / (1.0 - alpha) * eps_tilde)


def winter_rhs(E: float, alpha: float, eps_tilde: float) -> float:
    """Entropy-continuity bound with prefactor (1+a)/(1-a) + 2a, in bits."""
    if E <= 0.0:
        raise ValueError("E must be positive")
    return ((1.0 + alpha) / (1.0 - alpha) + 2.0 * alpha) * _bracket(E, alpha, eps_tilde)


def separation_rhs(E: float, alpha: float, eps_tilde: float) -> float:
    """Halved-prefactor form (1+a)/(2(1-a)) + a used in the eps condition."""
    if E <= 0.0:
        raise ValueError("E must be positive")
    return ((1.0 + alpha) / (2.0 * (1.0 - alpha)) + alpha) * _bracket(E, alpha, eps_tilde)


def eps_cap(t: float, u: float) -> float:
    """Upper cap (1/2) log2(4t / (e (1+2u))); negative means infeasible channel."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    if u < 0.0:
        raise ValueError("u must be nonnegative")
    return 0.5 * math.log2(4.0 * t / (math.e * (1.0 + 2.0 * u)))


def condition_margin(b: BoundInputs) -> float:
    """eps_cap - separation term - eps; the condition holds iff this is > 0."""
    return eps_cap(b.t, b.u) - separation_rhs(b.E, b.alpha, b.eps_tilde) - b.eps


def condition_holds(b: BoundInputs) -> bool:
    if not ChannelParams(b.t, b.u).feasible():
        return False
    return condition_margin(b) > 0.0


def _eps_tilde_at_alpha(eps, E, t, u, alpha, tol):
    """Largest eps_tilde satisfying the condition at fixed alpha (0 if none)."""
    cap_margin = eps_cap(t, u) - eps

    def margin(et):
        return cap_margin - separation_rhs(E, alpha, et)

    if margin(0.0) <= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0 - 1e-12
    if margin(hi) > 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def max_eps_tilde(
    eps: float,
    E: float,
    t: float,
    u: float,
    n_alpha: int = 240,
    tol: float = 1e-6,
) -> BoundResult:
    """Maximize eps_tilde over alpha in [ALPHA_MIN, 1/2].

    Log-spaced grid scan, per-alpha bisection on the monotone boundary,
    then golden-section refinement of alpha around the best grid point.
    """
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if E <= 0.0:
        raise ValueError("E must be positive")
    if not ChannelParams(t, u).feasible() or eps >= eps_cap(t, u):
        return BoundResult(0.0, math.nan, False, math.nan)

    inner_tol = tol * 1e-2
    alphas = np.logspace(math.log10(ALPHA_MIN), math.log10(ALPHA_MAX), n_alpha)
    values = [_eps_tilde_at_alpha(eps, E, t, u, a, inner_tol) for a in alphas]
    i_best = int(np.argmax(values))
    if values[i_best] <= 0.0:
        return BoundResult(0.0, math.nan, False, math.nan)

    # golden-section refinement between the grid neighbours of the best point
    lo = alphas[max(i_best - 1, 0)]
    hi = alphas[min(i_best + 1, n_alpha - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _eps_tilde_at_alpha(eps, E, t, u, c, inner_tol)
    fd = _eps_tilde_at_alpha(eps, E, t, u, d, inner_tol)
    for _ in range(60):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _eps_tilde_at_alpha(eps, E, t, u, c, inner_tol)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _eps_tilde_at_alpha(eps, E, t, u, d, inner_tol)
        if b - a < 1e-7:
            break
    alpha_star, et_star = (c, fc) if fc > fd else (d, fd)
    if values[i_best] > et_star:
        alpha_star, et_star = alphas[i_best], values[i_best]
    return BoundResult(
        eps_tilde_max=float(et_star),
        alpha_star=float(alpha_star),
        feasible=True,
        rhs_at_opt=float(separation_rhs(E, alpha_star, et_star)),
    )


def energy_sensitivity(eps: float, t: float, u: float, E_list) -> dict:
    """max_eps_tilde across an energy list plus dispersion measures.

    'relative_spread' is the relative standard deviation (std/mean) of the
    eps_tilde values, the artifact's operationalization of energy
    stability; 'range_fraction' reports (max-min)/max alongside.
    """
    rows = []
    for E in E_list:
        res = max_eps_tilde(eps, E, t, u)
        rows.append({"E": float(E), "eps_tilde": res.eps_tilde_max, "alpha": res.alpha_star})
    values = np.asarray([row["eps_tilde"] for row in rows])
    vmax = values.max()
    return {
        "rows": rows,
        "relative_spread": float(values.std() / values.mean()) if values.mean() > 0 else math.nan,
        "range_fraction": float((vmax - values.min()) / vmax) if vmax > 0 else math.nan,
    }


def condition_surface(eps: float, E: float, t: float, u: float, alphas, eps_tildes):
    """RHS grid (separation form) over (alpha, eps_tilde) for surface plots."""
    grid = np.empty((len(alphas), len(eps_tildes)))
    for i, a in enumerate(alphas):
        for j, et in enumerate(eps_tildes):
            grid[i, j] = eps_cap(t, u) - separation_rhs(E, a, et)
    return grid
