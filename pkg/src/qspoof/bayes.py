"""Aggregating binary spoof/echo calls over many pulses.

Each pulse yields one call, ``+`` (looks like a spoof) or ``-`` (looks like a
true echo), with ``P(+|H_i) = (1 + delta_i) / 2``. For the thresholded
heterodyne receiver ``delta_i = 2 exp(-mu^2/(n_i+1)) - 1``.

Two update rules are supported:

``"exact"``
    Bernoulli likelihood products, ``log w_i += log((1 +/- delta_i) / 2)``.
``"exponential"``
    The small-delta surrogate ``(1 +/- delta)/2 ~ exp(+/- delta)/2``. The
    closed-form mean certainty and required pulse count below describe
    posteriors built with this rule. It is markedly overconfident compared
    with exact Bayes when ``delta_0 - delta_1`` is small relative to ``delta_0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detection import Hypothesis

RULES = ("exact", "exponential")
RENORMALIZE_EVERY = 1024


@dataclass(frozen=True)
class LikelihoodDeltas:
    delta0: float
    delta1: float

    def __post_init__(self):
        for d in (self.delta0, self.delta1):
            if not (-1.0 <= d <= 1.0):
                raise ValueError(f"likelihood delta must lie in [-1, 1], got {d}")

    @property
    def drift(self) -> float:
        """``delta0 (delta0 - delta1)``; positive when the threshold separates the hypotheses."""
        return self.delta0 * (self.delta0 - self.delta1)

    def p_plus(self, h: Hypothesis) -> float:
        return 0.5 * (1.0 + (self.delta1 if h == Hypothesis.H1 else self.delta0))

    def log_likelihoods(self, rule: str = "exact") -> tuple[float, float, float, float]:
        """``(log P(+|H0), log P(-|H0), log P(+|H1), log P(-|H1))`` up to a shared constant."""
        if rule == "exact":
            f = _log_half_one_plus
        elif rule == "exponential":
            def f(x):
                return x
        else:
            raise ValueError(f"unknown update rule {rule!r}; expected one of {RULES}")
        return f(self.delta0), f(-self.delta0), f(self.delta1), f(-self.delta1)


def _log_half_one_plus(x: float) -> float:
    return -math.inf if x == -1.0 else math.log1p(x) - math.log(2.0)


def likelihood_deltas(n0: float, n1: float, mu: float) -> LikelihoodDeltas:
    if mu < 0:
        raise ValueError(f"threshold must be >= 0, got {mu}")
    mu2 = mu * mu
    return LikelihoodDeltas(2 * math.exp(-mu2 / (n0 + 1)) - 1,
                            2 * math.exp(-mu2 / (n1 + 1)) - 1)


@dataclass(frozen=True)
class PosteriorState:
    """Unnormalized log posterior weights after ``pulse_count`` calls."""

    log_weight_h0: float
    log_weight_h1: float
    pulse_count: int = 0

    def __post_init__(self):
        if math.isnan(self.log_weight_h0) or math.isnan(self.log_weight_h1):
            raise ValueError("log weights must not be NaN")
        if self.log_weight_h0 == -math.inf and self.log_weight_h1 == -math.inf:
            raise ValueError("both hypotheses eliminated: contradictory evidence")

    @classmethod
    def from_prior(cls, prior_h1: float = 0.5) -> PosteriorState:
        if not (0.0 <= prior_h1 <= 1.0):
            raise ValueError(f"prior must lie in [0, 1], got {prior_h1}")
        lw = [math.log(p) if p > 0 else -math.inf for p in (1.0 - prior_h1, prior_h1)]
        return cls(lw[0], lw[1], 0)

    @property
    def log_odds(self) -> float:
        """``log P(H1) - log P(H0)``."""
        if self.log_weight_h1 == -math.inf:
            return -math.inf
        if self.log_weight_h0 == -math.inf:
            return math.inf
        return self.log_weight_h1 - self.log_weight_h0

    def probabilities(self) -> tuple[float, float]:
        """Normalized ``(P(H0), P(H1))``."""
        p1 = _sigmoid(self.log_odds)
        return 1.0 - p1, p1

    def certainty(self) -> float:
        """``|P(H1) - P(H0)|``."""
        return abs(math.tanh(self.log_odds / 2))

    def decision(self) -> Hypothesis:
        return Hypothesis.H1 if self.log_odds > 0 else Hypothesis.H0

    def normalized(self) -> PosteriorState:
        top = max(self.log_weight_h0, self.log_weight_h1)
        return PosteriorState(self.log_weight_h0 - top, self.log_weight_h1 - top,
                              self.pulse_count)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def update_posterior(state: PosteriorState, outcome: bool, d: LikelihoodDeltas,
                     rule: str = "exact") -> PosteriorState:
    """Fold in one call; ``outcome`` True means ``+`` (spoof call).

    A likelihood of zero sends that hypothesis' log weight to ``-inf``.
    Weights are shifted so the larger is 0 every RENORMALIZE_EVERY pulses.
    """
    lp0, lm0, lp1, lm1 = d.log_likelihoods(rule)
    new = PosteriorState(state.log_weight_h0 + (lp0 if outcome else lm0),
                         state.log_weight_h1 + (lp1 if outcome else lm1),
                         state.pulse_count + 1)
    if new.pulse_count % RENORMALIZE_EVERY == 0:
        new = new.normalized()
    return new


def _scaled(count, log_p):
    # count * log_p with 0 * (-inf) == 0
    count = np.asarray(count)
    if log_p == -math.inf:
        return np.where(count > 0, -np.inf, 0.0)
    return count * log_p


def accumulate_log_odds(n_plus, n_minus, d: LikelihoodDeltas, rule: str = "exact",
                        prior_h1: float = 0.5):
    """Log odds ``log P(H1)/P(H0)`` after ``n_plus``/``n_minus`` calls (array friendly).

    Products commute, so the counts carry all the information an
    ordered sequence would.
    """
    lp0, lm0, lp1, lm1 = d.log_likelihoods(rule)
    prior = PosteriorState.from_prior(prior_h1)
    with np.errstate(invalid="ignore"):
        lw0 = prior.log_weight_h0 + _scaled(n_plus, lp0) + _scaled(n_minus, lm0)
        lw1 = prior.log_weight_h1 + _scaled(n_plus, lp1) + _scaled(n_minus, lm1)
        out = np.where(lw1 == -np.inf, -np.inf, np.where(lw0 == -np.inf, np.inf, lw1 - lw0))
    if np.any((lw0 == -np.inf) & (lw1 == -np.inf)):
        raise ValueError("both hypotheses eliminated: contradictory evidence")
    return out


def update_many(state: PosteriorState, outcomes, d: LikelihoodDeltas,
                rule: str = "exact") -> PosteriorState:
    """Fold in a batch of calls at once; equals repeated update_posterior."""
    outcomes = np.asarray(outcomes, dtype=bool)
    n_plus = int(outcomes.sum())
    n_minus = outcomes.size - n_plus
    lp0, lm0, lp1, lm1 = d.log_likelihoods(rule)
    new = PosteriorState(
        state.log_weight_h0 + float(_scaled(n_plus, lp0) + _scaled(n_minus, lm0)),
        state.log_weight_h1 + float(_scaled(n_plus, lp1) + _scaled(n_minus, lm1)),
        state.pulse_count + outcomes.size,
    )
    return new.normalized()


def mean_prior_difference(M: float, d: LikelihoodDeltas) -> float:
    """Closed-form average ``|P1 - P0|`` after ``M`` pulses, ``tanh(|M drift| / 2)``."""
    if M < 0:
        raise ValueError(f"pulse count must be >= 0, got {M}")
    return math.tanh(abs(M * d.drift) / 2)


def required_pulses(target: float, d: LikelihoodDeltas) -> int:
    """Smallest pulse count whose closed-form mean certainty reaches ``target``."""
    if not (0.0 <= target < 1.0):
        raise ValueError(f"target certainty must lie in [0, 1), got {target}")
    if not d.drift > 0:
        raise ValueError("threshold does not separate the hypotheses (delta0 (delta0 - delta1) <= 0)")
    # ln((1+t)/(1-t)) == 2 atanh(t)
    return math.ceil(2 * math.atanh(target) / d.drift)


def dwell_time(M: float, prf_hz: float) -> float:
    if not prf_hz > 0:
        raise ValueError(f"PRF must be positive, got {prf_hz}")
    return M / prf_hz
