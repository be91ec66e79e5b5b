"""Outcome-level Monte Carlo of echoes, spoofs and multi-pulse campaigns.

The spoofer is simulated literally: it heterodynes the pulse after the first
leg (plus its own quantization noise), prepares a coherent state at the
measured amplitude, and sends it down the second leg to the receiver. Every
draw comes from the Gaussian primitives in :mod:`qspoof.gaussian`; since the
channels act affinely on the displacement, batches share one zero-mean noise
state and add the scaled centroids.

Per-trial random streams are derived from ``(seed, trial_index)`` through
numpy's SeedSequence hashing, so results do not depend on worker count or
scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import gaussian as g
from .bayes import LikelihoodDeltas, accumulate_log_odds, likelihood_deltas, RULES
from .detection import Hypothesis, classify, optimal_heterodyne_threshold
from .scenario import (HypothesisPair, RadarScenario, amplitude_prior_lambda,
                       hypothesis_noise_numbers)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def sample_transmit_amplitude(lam: float, rng: np.random.Generator, size=None):
    """Draw from ``(lam/pi) exp(-lam |a|^2)``: circular complex Gaussian, ``E|a|^2 = 1/lam``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    sigma = math.sqrt(0.5 / lam)
    z = rng.normal(0.0, sigma, size=(2,) if size is None else (2, *np.atleast_1d(size)))
    a = z[0] + 1j * z[1]
    return complex(a) if size is None else a


def _full_channel(pair: HypothesisPair) -> g.LossyChannelParams:
    return g.LossyChannelParams(pair.tau, pair.n_t_prime)


def _receive(alpha, ch: g.LossyChannelParams, xi: float, rng, size):
    """Heterodyne outcome(s) after lossy channel ``ch`` and noise ``xi``."""
    noise = g.apply_classical_noise(
        g.apply_lossy_channel(g.coherent_state(0), ch), g.ClassicalNoiseParams(xi))
    return math.sqrt(ch.tau) * alpha + g.sample_heterodyne(noise, rng, size)


def _batch_size(alpha):
    return None if np.ndim(alpha) == 0 else np.shape(alpha)


def simulate_echo_outcome(alpha, pair: HypothesisPair, rng: np.random.Generator):
    """Receiver heterodyne outcome(s) for a true echo of ``alpha`` (scalar or array)."""
    return _receive(alpha, _full_channel(pair), pair.xi, rng, _batch_size(alpha))


def simulate_spoof_outcome(alpha, pair: HypothesisPair, rng: np.random.Generator):
    """Receiver outcome(s) when a measure-and-prepare spoofer answers ``alpha``."""
    leg = _full_channel(pair).split()
    size = _batch_size(alpha)
    beta_adv = _receive(alpha, leg, pair.xi_prime, rng, size)
    return _receive(beta_adv, leg, pair.xi, rng, size)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr}


def _resolve_pair(source) -> tuple[HypothesisPair, float]:
    if isinstance(source, RadarScenario):
        return hypothesis_noise_numbers(source), amplitude_prior_lambda(source)
    if isinstance(source, HypothesisPair):
        return source, 1.0
    raise TypeError(f"expected RadarScenario or HypothesisPair, got {type(source).__name__}")


def estimate_success_probability(source, trials: int, seed: int,
                                 mu: float | None = None) -> Estimate:
    """Single-pulse heterodyne success rate over balanced H0/H1 trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pair, lam = _resolve_pair(source)
    if mu is None:
        mu = optimal_heterodyne_threshold(pair.n0, pair.n1)
    rng = np.random.default_rng(seed)
    n_h0 = trials // 2
    correct = 0
    for truth, n in ((Hypothesis.H0, n_h0), (Hypothesis.H1, trials - n_h0)):
        if n == 0:
            continue
        alpha = sample_transmit_amplitude(lam, rng, n)
        sim = simulate_spoof_outcome if truth == Hypothesis.H1 else simulate_echo_outcome
        calls = classify(sim(alpha, pair, rng), pair.sqrt_tau_alpha_scale * alpha, mu)
        correct += int(np.count_nonzero(calls == truth))
    p = correct / trials
    return Estimate(p, math.sqrt(p * (1 - p) / trials))


@dataclass(frozen=True)
class CampaignConfig:
    """One Monte Carlo campaign.

    Exactly one of ``scenario``, ``pair`` or ``deltas`` drives the pulses.
    ``deltas`` bypasses the physics and draws the binary calls directly.
    ``truth`` may be ``"random"`` to draw the hypothesis per trial from the prior.
    """

    truth: Hypothesis | str
    pulses: int
    trials: int
    seed: int = 0
    scenario: RadarScenario | None = None
    pair: HypothesisPair | None = None
    deltas: LikelihoodDeltas | None = None
    threshold_mu: float | None = None
    update: str = "exact"
    prior_h1: float = 0.5
    checkpoints: tuple[int, ...] = ()
    record_trajectory: bool = False

    def __post_init__(self):
        if self.pulses < 1 or self.trials < 1:
            raise ValueError("pulses and trials must be >= 1")
        if sum(x is not None for x in (self.scenario, self.pair, self.deltas)) != 1:
            raise ValueError("give exactly one of scenario, pair, deltas")
        if self.update not in RULES:
            raise ValueError(f"unknown update rule {self.update!r}")
        if not (self.truth == "random" or isinstance(self.truth, Hypothesis)):
            raise ValueError(f"truth must be a Hypothesis or 'random', got {self.truth!r}")
        if any(not 1 <= c <= self.pulses for c in self.checkpoints):
            raise ValueError("checkpoints must lie in [1, pulses]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class _Plan:
    cfg: CampaignConfig
    pair: HypothesisPair | None
    lam: float
    mu: float | None
    deltas: LikelihoodDeltas


def _plan(cfg: CampaignConfig) -> _Plan:
    if cfg.deltas is not None:
        return _Plan(cfg, None, 1.0, None, cfg.deltas)
    pair, lam = _resolve_pair(cfg.scenario if cfg.scenario is not None else cfg.pair)
    mu = cfg.threshold_mu
    if mu is None:
        mu = optimal_heterodyne_threshold(pair.n0, pair.n1)
    return _Plan(cfg, pair, lam, mu, likelihood_deltas(pair.n0, pair.n1, mu))


def _run_trial(plan: _Plan, trial: int):
    cfg = plan.cfg
    rng = trial_rng(cfg.seed, trial)
    if cfg.truth == "random":
        truth = Hypothesis.H1 if rng.random() < cfg.prior_h1 else Hypothesis.H0
    else:
        truth = cfg.truth
    if plan.pair is None:
        calls = rng.random(cfg.pulses) < plan.deltas.p_plus(truth)
    else:
        alpha = sample_transmit_amplitude(plan.lam, rng, cfg.pulses)
        sim = simulate_spoof_outcome if truth == Hypothesis.H1 else simulate_echo_outcome
        beta = sim(alpha, plan.pair, rng)
        calls = classify(beta, plan.pair.sqrt_tau_alpha_scale * alpha, plan.mu).astype(bool)
    keep_path = cfg.record_trajectory and trial == 0
    if keep_path or cfg.checkpoints:
        n_plus = np.cumsum(calls)
        n_minus = np.arange(1, cfg.pulses + 1) - n_plus
        log_odds = accumulate_log_odds(n_plus, n_minus, plan.deltas, cfg.update, cfg.prior_h1)
        final = float(log_odds[-1])
    else:
        n_plus = int(np.count_nonzero(calls))
        final = float(accumulate_log_odds(n_plus, cfg.pulses - n_plus, plan.deltas,
                                          cfg.update, cfg.prior_h1))
    certainty = abs(math.tanh(final / 2))
    decision = Hypothesis.H1 if final > 0 else Hypothesis.H0
    at_checkpoints = ([abs(math.tanh(log_odds[c - 1] / 2)) for c in cfg.checkpoints]
                      if cfg.checkpoints else [])
    path = np.abs(np.tanh(log_odds / 2)) if keep_path else None
    return (int(truth), int(decision), certainty, int(np.count_nonzero(calls)),
            at_checkpoints, path)


def _run_chunk(args):
    plan, trials = args
    return [_run_trial(plan, t) for t in trials]


@dataclass(frozen=True)
class CampaignResult:
    config: CampaignConfig
    deltas: LikelihoodDeltas
    threshold_mu: float | None
    truths: np.ndarray
    decisions: np.ndarray
    certainty: np.ndarray
    plus_counts: np.ndarray
    checkpoint_certainty: np.ndarray
    trajectory: np.ndarray | None = field(default=None)

    @property
    def mean_certainty(self) -> Estimate:
        return _mean(self.certainty)

    @property
    def accuracy(self) -> Estimate:
        return _mean((self.decisions == self.truths).astype(float))

    def checkpoint_means(self) -> list[Estimate]:
        return [_mean(col) for col in self.checkpoint_certainty.T]

    def to_dict(self, include_trials: bool = True) -> dict:
        cfg = self.config
        out = {
            "config": {
                "truth": cfg.truth if isinstance(cfg.truth, str) else cfg.truth.name,
                "pulses": cfg.pulses,
                "trials": cfg.trials,
                "seed": cfg.seed,
                "update": cfg.update,
                "prior_h1": cfg.prior_h1,
                "scenario": cfg.scenario.to_dict() if cfg.scenario is not None else None,
                "pair": vars(cfg.pair) if cfg.pair is not None else None,
            },
            "threshold_mu": self.threshold_mu,
            "deltas": {"delta0": self.deltas.delta0, "delta1": self.deltas.delta1},
            "mean_certainty": self.mean_certainty.to_dict(),
            "accuracy": self.accuracy.to_dict(),
            "outcome_counts": {
                "plus": int(self.plus_counts.sum()),
                "minus": int(cfg.pulses * cfg.trials - self.plus_counts.sum()),
            },
            "decision_counts": {h.name: int(np.count_nonzero(self.decisions == h))
                                for h in Hypothesis},
        }
        if include_trials:
            out["trials"] = {
                "truth": [Hypothesis(t).name for t in self.truths],
                "decision": [Hypothesis(d).name for d in self.decisions],
                "certainty": self.certainty.tolist(),
            }
        if self.trajectory is not None:
            out["trajectory"] = self.trajectory.tolist()
        return out


def _mean(x: np.ndarray) -> Estimate:
    n = x.size
    stderr = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(float(x.mean()), stderr)


def run_campaign(cfg: CampaignConfig, workers: int = 1) -> CampaignResult:
    """Run ``cfg.trials`` independent multi-pulse campaigns and aggregate them.

    For each pulse a fresh transmit amplitude is drawn, the receiver outcome
    is simulated under the trial's hypothesis and classified against the disk
    threshold, and the posterior is updated with ``cfg.update``.
    """
    plan = _plan(cfg)
    if workers <= 1:
        rows = [_run_trial(plan, t) for t in range(cfg.trials)]
    else:
        step = math.ceil(cfg.trials / (4 * workers))
        chunks = [(plan, range(i, min(i + step, cfg.trials)))
                  for i in range(0, cfg.trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [row for part in pool.map(_run_chunk, chunks) for row in part]
    truths, decisions, certainty, plus, at_cp, paths = zip(*rows)
    return CampaignResult(
        config=cfg,
        deltas=plan.deltas,
        threshold_mu=plan.mu,
        truths=np.array(truths, dtype=np.int8),
        decisions=np.array(decisions, dtype=np.int8),
        certainty=np.array(certainty),
        plus_counts=np.array(plus, dtype=np.int64),
        checkpoint_certainty=np.array(at_cp, dtype=float).reshape(cfg.trials, len(cfg.checkpoints)),
        trajectory=paths[0],
    )
