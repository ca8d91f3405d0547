"""Acceptance gate: ten end-to-end criteria, one test (one pass/fail line
under ``pytest -v``) per criterion. Each test prints its measured numbers so
a failing criterion is diagnosable from the log alone.
"""

import math
import time

import numpy as np
import pytest

from cvqpv.attack import make_pessimistic_attacker, rounds_required
from cvqpv.bounds import energy_sensitivity, eps_cap, max_eps_tilde
from cvqpv.channel import ChannelParams
from cvqpv.cli import main
from cvqpv.gaussian import (
    CutoffParams,
    cutoff_energy,
    h_U_given_P_limit,
    lambda_of_sigma,
)
from cvqpv.protocol import HonestProver, ProtocolParams, acceptance_rate
from cvqpv.resources import corollary_q, count_bound_log2, rounding_size_logfactor

EPS_TILDE_REL_TOL = 0.10
EPS_TILDE_ABS_TOL = 5e-5
ALPHA_TOL = 0.01


def _check_point(eps, t, u, expected_alpha, expected_et):
    start = time.perf_counter()
    res = max_eps_tilde(eps, 1e3, t, u)
    elapsed = time.perf_counter() - start
    et_err = abs(res.eps_tilde_max - expected_et)
    et_ok = et_err <= max(EPS_TILDE_REL_TOL * expected_et, EPS_TILDE_ABS_TOL)
    alpha_ok = abs(res.alpha_star - expected_alpha) <= ALPHA_TOL
    print(f"  (eps={eps}, t={t}, u={u}): eps_tilde={res.eps_tilde_max:.6g} "
          f"(expected {expected_et}, ok={et_ok}), alpha={res.alpha_star:.4g} "
          f"(expected {expected_alpha}, ok={alpha_ok}), {elapsed:.2f}s")
    return et_ok, alpha_ok, elapsed


def test_criterion_01_table_reproduction():
    rows = [
        (0.03, 0.8, 0.05, 0.013, 0.00031),
        (0.03, 0.9, 0.12, 0.013, 0.00029),
        (0.07, 0.95, 0.075, 0.025, 0.00131),
    ]
    print("criterion 1: channel table reproduction")
    results = [_check_point(e, t, u, a, et) for (e, t, u, a, et) in rows]
    assert all(elapsed < 10.0 for _, _, elapsed in results)
    assert all(et_ok for et_ok, _, _ in results)
    assert all(alpha_ok for _, alpha_ok, _ in results)


def test_criterion_02_perfect_channel_point():
    print("criterion 2: perfect-channel optimum")
    et_ok, alpha_ok, elapsed = _check_point(0.1, 1.0, 0.0, 0.036, 0.0037)
    assert elapsed < 10.0
    assert et_ok
    assert alpha_ok


def test_criterion_03_constants():
    cap = eps_cap(1.0, 0.0)
    honest = h_U_given_P_limit(1.0, 0.0).bits
    floor = honest + 0.1 / 4.0
    print(f"criterion 3: eps_cap={cap:.6f}, honest={honest:.4f}, attacker floor={floor:.4f}")
    assert cap == pytest.approx(0.278652, abs=1e-5)
    assert honest == pytest.approx(1.0471, abs=1e-4)
    assert floor == pytest.approx(1.0721, abs=1e-4)


def test_criterion_04_rounding_factor():
    factor = rounding_size_logfactor(0.004)
    print(f"criterion 4: rounding factor = {factor:.4f}, ceiling = {math.ceil(factor)}")
    assert 11.0 < factor <= 12.0
    assert math.ceil(factor) == 12


def test_criterion_05_corollary_scan():
    start = time.perf_counter()
    checked = 0
    for m0 in range(1, 11):
        for n in range(2 * (m0 + 5) + 1, 41):
            q = corollary_q(n, m0)
            assert q == n // 2 - m0 - 5
            if q < 0:
                continue
            assert count_bound_log2(n, m0, q, 0.004) < -(2**n)
            checked += 1
    elapsed = time.perf_counter() - start
    print(f"criterion 5: {checked} (n, m0) points verified in {elapsed:.2f}s")
    assert checked > 0
    assert elapsed < 5.0


def test_criterion_06_energy_stability():
    table = energy_sensitivity(0.1, 1.0, 0.0, [10.0, 1e2, 1e3, 1e4])
    values = [row["eps_tilde"] for row in table["rows"]]
    print(f"criterion 6: eps_tilde over E grid = {values}, "
          f"relative spread = {table['relative_spread']:.3f}")
    assert table["relative_spread"] < 0.15
    assert all(a > b for a, b in zip(values, values[1:]))


def test_criterion_07_cutoff_energy_oracle():
    worst = 0.0
    for sigma in [1.0, 2.0, 5.0, 10.0]:
        lam = lambda_of_sigma(sigma)
        for m0 in range(1, 13):
            m = np.arange(2**m0, dtype=np.float64)
            w = np.exp(2.0 * m * math.log(lam))
            oracle = float(np.sum(m * w) / np.sum(w))
            closed = cutoff_energy(CutoffParams(m0, lam), sigma)
            worst = max(worst, abs(closed / oracle - 1.0))
    print(f"criterion 7: worst relative deviation from Fock-sum oracle = {worst:.3g}")
    assert worst < 1e-10


def test_criterion_08_monte_carlo_separation():
    start = time.perf_counter()
    plan = rounds_required(0.1, 0.0, 0.01)
    ch = ChannelParams(1.0, 0.0)
    params = ProtocolParams(sigma=10.0, n=8, N=plan.N, eps_hon=0.01)
    sessions = 2000
    honest = acceptance_rate(params, ch, HonestProver(ch), sessions, 1234)
    attacker = acceptance_rate(params, ch, make_pessimistic_attacker(0.1, ch), sessions, 5678)
    elapsed = time.perf_counter() - start
    binom_sigma = math.sqrt(0.99 * 0.01 / sessions)
    print(f"criterion 8: N={plan.N}, honest={honest:.4f} "
          f"(floor {0.99 - 2 * binom_sigma:.4f}), attacker={attacker:.4f}, {elapsed:.1f}s")
    assert honest >= 0.99 - 2.0 * binom_sigma
    assert attacker <= 0.05
    assert elapsed < 60.0


def test_criterion_09_fano_saturation():
    ch = ChannelParams(1.0, 0.0)
    rng = np.random.default_rng(7)
    r = rng.normal(0.0, 10.0, size=10**6)
    r_prime = HonestProver(ch).respond(r, None, rng)
    mse = float(np.mean((r_prime - r) ** 2))
    print(f"criterion 9: honest ideal MSE over 1e6 rounds = {mse:.5f}")
    assert mse == pytest.approx(0.5, rel=0.01)


def test_criterion_10_determinism(tmp_path):
    cases = [
        ["bounds", "--seed", "3"],
        ["resources", "--seed", "3"],
        ["rounds", "--seed", "3"],
        ["simulate", "--rounds", "5000", "--sessions", "40", "--seed", "3", "--trace"],
        ["sweep", "--n-lo", "28", "--n-hi", "30", "--seed", "3"],
        ["feasibility", "--seed", "3"],
    ]
    for args in cases:
        d1 = tmp_path / (args[0] + "_a")
        d2 = tmp_path / (args[0] + "_b")
        assert main(args + ["--out", str(d1)]) == main(args + ["--out", str(d2)])
        names1 = sorted(p.name for p in d1.iterdir())
        names2 = sorted(p.name for p in d2.iterdir())
        assert names1 == names2 and names1
        for name in names1:
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    print(f"criterion 10: {len(cases)} commands byte-identical across repeated seeded runs")
