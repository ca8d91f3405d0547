"""Round engine for the coherent-state position-verification protocol.

Runs N i.i.d. rounds against a pluggable responder, accumulates the
normalized score (r' - sqrt(t) r)^2 / (1/2 + u) and compares its mean to
the threshold gamma.

Determinism contract: every session derives its randomness from an integer
seed (or a spawned numpy SeedSequence), so identical seeds give identical
results no matter how sessions are scheduled.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import ChannelParams

_SPLITMIX_GAMMA = np.uint64(0x9E3779B97F4A7C15)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = (z + _SPLITMIX_GAMMA).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _parity64(z: np.ndarray) -> np.ndarray:
    for shift in (32, 16, 8, 4, 2, 1):
        z = z ^ (z >> np.uint64(shift))
    return (z & np.uint64(1)).astype(np.uint8)


class ProtocolFunction:
    """Boolean function f: {0,1}^n x {0,1}^n -> {0,1} selecting the basis.

    kind 'random' uses a seeded uniform truth table for n <= 12 and a keyed
    pseudorandom mix for larger n (a modeling stand-in for a uniformly
    random f). kind 'inner-product' is the inner product mod 2. An explicit
    truth table (flat array of 2^(2n) bits, index (x << n) | y) can be
    supplied via kind 'table'.
    """

    RANDOM_TABLE_MAX_N = 12

    def __init__(self, n: int, kind: str = "random", seed: int = 0, table=None):
        if n < 1:
            raise ValueError("n must be a positive integer")
        self.n = n
        self.kind = kind
        self.seed = seed
        self._table = None
        if kind == "table":
            table = np.asarray(table, dtype=np.uint8)
            if table.shape != (1 << (2 * n),):
                raise ValueError("truth table must have 2^(2n) entries")
            self._table = table
        elif kind == "random":
            if n <= self.RANDOM_TABLE_MAX_N:
                rng = np.random.default_rng(seed)
                self._table = rng.integers(0, 2, size=1 << (2 * n), dtype=np.uint8)
        elif kind != "inner-product":
            raise ValueError(f"unknown protocol function kind {kind!r}")

    def __call__(self, x: int, y: int) -> int:
        return int(
            self.evaluate(np.asarray([x], dtype=np.uint64), np.asarray([y], dtype=np.uint64))[0]
        )

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.uint64)
        y = np.asarray(y, dtype=np.uint64)
        if self._table is not None:
            idx = (x << np.uint64(self.n)) | y
            return self._table[idx.astype(np.int64)]
        if self.kind == "inner-product":
            return _parity64(x & y)
        # keyed pseudorandom bit for large-n 'random' functions
        mixed = _splitmix64(_splitmix64(x ^ np.uint64(self.seed)) ^ y)
        return _parity64(mixed)


@dataclass(frozen=True)
class ProtocolParams:
    sigma: float
    n: int
    N: int
    eps_hon: float
    f_kind: str = "random"
    f_seed: int = 0

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise ValueError("sigma must be positive")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not (0.0 < self.eps_hon < 1.0):
            raise ValueError("eps_hon must lie in (0,1)")

    def make_function(self) -> ProtocolFunction:
        return ProtocolFunction(self.n, self.f_kind, self.f_seed)

    @property
    def gamma(self) -> float:
        return gamma_threshold(self.N, self.eps_hon)


def gamma_threshold(N: int, eps_hon: float) -> float:
    """Acceptance threshold gamma = 1 + 2 sqrt(ln(1/eps)/N) + 2 ln(1/eps)/N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not (0.0 < eps_hon < 1.0):
        raise ValueError("eps_hon must lie in (0,1)")
    log_term = math.log(1.0 / eps_hon)
    return 1.0 + 2.0 / math.sqrt(N) * math.sqrt(log_term) + 2.0 / N * log_term


class Responder:
    """Round responder interface: produce r' for challenge displacements r.

    ``theta_dependent`` responders additionally receive the basis angles;
    the built-in Gaussian models ignore them (their response statistics are
    theta-invariant), which lets the engine skip string sampling on large
    Monte Carlo batches.
    """

    name = "responder"
    theta_dependent = False
    timing_ok = True

    def respond(self, r: np.ndarray, theta: np.ndarray | None, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class GaussianResponder(Responder):
    """Responds r' = mean_scale * r + N(0, noise_var)."""

    def __init__(self, name: str, mean_scale: float, noise_var: float):
        if noise_var < 0.0:
            raise ValueError("noise variance must be nonnegative")
        self.name = name
        self.mean_scale = mean_scale
        self.noise_var = noise_var

    def respond(self, r, theta, rng):
        mean = self.mean_scale * r
        if self.noise_var == 0.0:
            return mean
        return mean + rng.normal(0.0, math.sqrt(self.noise_var), size=np.shape(r))


class HonestProver(GaussianResponder):
    """Honest homodyne response N(sqrt(t) r, 1/2 + u)."""

    def __init__(self, ch: ChannelParams, variance_override: float | None = None):
        var = (0.5 + ch.u) if variance_override is None else variance_override
        super().__init__("honest", math.sqrt(ch.t), var)


@dataclass
class RoundRecord:
    index: int
    theta: float
    r: float
    r_prime: float
    score_term: float
    timing_ok: bool = True


@dataclass
class SessionResult:
    mean_score: float
    gamma: float
    accepted: bool
    regime_flags: set
    n_rounds: int
    responder: str
    records: Optional[list] = None
    score_terms: Optional[np.ndarray] = field(default=None, repr=False)


def run_session(
    p: ProtocolParams,
    ch: ChannelParams,
    responder: Responder,
    rng,
    trace: bool = False,
    keep_terms: bool = False,
) -> SessionResult:
    """Simulate one session of N i.i.d. rounds and apply the score test.

    ``rng`` may be an integer seed, a SeedSequence or a Generator.
    """
    rng = np.random.default_rng(rng)
    N = p.N
    r = rng.normal(0.0, p.sigma, size=N)
    thetas = None
    if trace or responder.theta_dependent:
        f = p.make_function()
        x = rng.integers(0, 1 << p.n, size=N, dtype=np.uint64)
        y = rng.integers(0, 1 << p.n, size=N, dtype=np.uint64)
        thetas = f.evaluate(x, y) * (math.pi / 2.0)
    try:
        r_prime = np.asarray(responder.respond(r, thetas, rng), dtype=float)
    except Exception as exc:
        raise RuntimeError(f"responder {responder.name!r} failed: {exc}") from exc
    if r_prime.shape != r.shape:
        raise RuntimeError(f"responder {responder.name!r} returned wrong shape {r_prime.shape}")

    terms = (r_prime - math.sqrt(ch.t) * r) ** 2 / (0.5 + ch.u)
    mean_score = float(terms.mean())
    gamma = p.gamma
    accepted = bool(mean_score < gamma and responder.timing_ok)

    records = None
    if trace:
        records = [
            RoundRecord(i, float(thetas[i]), float(r[i]), float(r_prime[i]), float(terms[i]),
                        responder.timing_ok)
            for i in range(N)
        ]
    return SessionResult(
        mean_score=mean_score,
        gamma=gamma,
        accepted=accepted,
        regime_flags=ch.regime_flags(),
        n_rounds=N,
        responder=responder.name,
        records=records,
        score_terms=terms if keep_terms else None,
    )


def session_seeds(master_seed: int, sessions: int) -> list:
    """Per-session SeedSequences, deterministic in (master_seed, index)."""
    return np.random.SeedSequence(master_seed).spawn(sessions)


def acceptance_rate(
    p: ProtocolParams,
    ch: ChannelParams,
    responder: Responder,
    sessions: int,
    master_seed: int,
) -> float:
    """Fraction of accepted sessions over independently seeded repetitions."""
    if sessions < 1:
        raise ValueError("sessions must be >= 1")
    seeds = session_seeds(master_seed, sessions)
    accepted = sum(run_session(p, ch, responder, s).accepted for s in seeds)
    return accepted / sessions


def honest_failure_rate(
    p: ProtocolParams,
    ch: ChannelParams,
    repetitions: int,
    master_seed: int,
) -> float:
    """Empirical fraction of rejected honest sessions."""
    return 1.0 - acceptance_rate(p, ch, HonestProver(ch), repetitions, master_seed)


def write_rounds_csv(result: SessionResult, path) -> None:
    """Per-round trace as RFC-4180 CSV (requires a traced session)."""
    if result.records is None:
        raise ValueError("session was not run with trace=True")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["index", "theta", "r", "r_prime", "score_term"])
        for rec in result.records:
            writer.writerow([rec.index, repr(rec.theta), repr(rec.r), repr(rec.r_prime),
                             repr(rec.score_term)])


def write_session_json(result: SessionResult, path) -> None:
    payload = {
        "schema": "cvqpv.session/1",
        "responder": result.responder,
        "n_rounds": result.n_rounds,
        "mean_score": result.mean_score,
        "gamma": result.gamma,
        "accepted": result.accepted,
        "regime_flags": sorted(result.regime_flags),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
