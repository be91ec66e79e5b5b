"""Single-pulse discrimination between a true echo (H0) and a spoof (H1).

Both hypotheses leave the receiver with a displaced thermal state about the
same centroid, differing only in thermal number (``n0`` vs ``n1``). Removing
the common displacement reduces the quantum-optimal problem to two
Fock-diagonal thermal states, so none of the probabilities below depend on
the transmitted amplitude.

Success probabilities are exposed both as ``P`` and as the excess ``P - 1/2``;
the excess functions avoid the cancellation that swamps ``P - 0.5`` at long
range, where the excess is around 1e-8 or smaller.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

TAIL_TOLERANCE = 1e-12


class Hypothesis(enum.IntEnum):
    H0 = 0  # true echo
    H1 = 1  # spoof


class DegenerateHypothesesError(ValueError):
    """The two hypotheses have identical statistics."""


class DegenerateHypothesesWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DecisionConfig:
    threshold_mu: float
    prior_h1: float = 0.5

    def __post_init__(self):
        if not (self.threshold_mu >= 0):
            raise ValueError(f"threshold must be >= 0, got {self.threshold_mu}")
        if not (0.0 <= self.prior_h1 <= 1.0):
            raise ValueError(f"prior must lie in [0, 1], got {self.prior_h1}")


def _check_order(n0: float, n1: float) -> None:
    if not (n0 >= 0 and n1 >= 0):
        raise ValueError(f"thermal numbers must be >= 0, got {n0}, {n1}")
    if n1 < n0:
        raise ValueError(f"expected n1 >= n0, got n0={n0}, n1={n1}")


# ---------------------------------------------------------------------------
# Quantum-optimal (Helstrom) receiver


def helstrom_threshold(n0: float, n1: float) -> int:
    """Largest photon count ``m`` for which the optimal receiver still picks H0.

    Photon counts ``n <= m`` are more likely under the colder state; the
    crossover is ``ln((n1+1)/(n0+1)) / ln(n1 (n0+1) / (n0 (n1+1)))``.
    """
    _check_order(n0, n1)
    if n1 == n0:
        raise DegenerateHypothesesError("n1 == n0: the hypotheses are indistinguishable")
    if n0 == 0:
        raise ValueError("n0 = 0 makes the photon-count threshold singular")
    delta = n1 - n0
    # n1 (n0+1) - n0 (n1+1) == n1 - n0
    ratio = math.log1p(delta / (n0 + 1)) / math.log1p(delta / (n0 * (n1 + 1)))
    return math.floor(ratio)


def p_opt_excess(n0: float, n1: float) -> float:
    """``P_opt - 1/2`` for equal priors.

    With threshold ``m`` the optimal success probability is
    ``1/2 sum_{n<=m} p0(n) + 1/2 sum_{n>m} p1(n)`` for thermal photon-number
    distributions ``p_i(n) = q_i^n / (n_i + 1)``, ``q_i = n_i / (n_i + 1)``.
    Summing the geometric series gives ``(q1^(m+1) - q0^(m+1)) / 2``.
    """
    _check_order(n0, n1)
    if n1 == n0:
        warnings.warn("n1 == n0; no information, returning P = 0.5",
                      DegenerateHypothesesWarning, stacklevel=2)
        return 0.0
    m = helstrom_threshold(n0, n1)
    log_q0 = -math.log1p(1.0 / n0)
    log_ratio = math.log1p((n1 - n0) / (n0 * (n1 + 1)))  # ln q1 - ln q0
    return 0.5 * math.exp((m + 1) * log_q0) * math.expm1((m + 1) * log_ratio)


def p_opt(n0: float, n1: float) -> float:
    return 0.5 + p_opt_excess(n0, n1)


@dataclass(frozen=True)
class FockCutoff:
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @classmethod
    def for_pair(cls, n0: float, n1: float, tol: float = TAIL_TOLERANCE) -> FockCutoff:
        """Smallest ``n_max`` leaving both thermal tails ``q^(n_max+1)`` below ``tol``."""
        n_hot = max(n0, n1)
        if n_hot == 0:
            return cls(1)
        n_max = max(1, math.ceil(math.log(tol) / -math.log1p(1.0 / n_hot)) - 1)
        while thermal_tail_mass(n_hot, n_max) >= tol:
            n_max += 1
        return cls(n_max)


def thermal_tail_mass(n: float, n_max: int) -> float:
    """Probability that a thermal state with mean ``n`` holds more than ``n_max`` photons."""
    if n == 0:
        return 0.0
    return math.exp(-(n_max + 1) * math.log1p(1.0 / n))


def p_opt_oracle(n0: float, n1: float, cutoff: FockCutoff | None = None,
                 max_terms: int = 50_000_000) -> float:
    """Helstrom success probability by brute-force trace norm in the Fock basis.

    ``P = 1/2 (1 + 1/2 sum_n |p1(n) - p0(n)|)``, truncated at ``cutoff.n_max``.
    Refuses a cutoff whose neglected tail mass exceeds the tolerance.
    """
    _check_order(n0, n1)
    if cutoff is None:
        cutoff = FockCutoff.for_pair(n0, n1)
    tail = max(thermal_tail_mass(n0, cutoff.n_max), thermal_tail_mass(n1, cutoff.n_max))
    if tail >= TAIL_TOLERANCE:
        raise ValueError(f"Fock cutoff {cutoff.n_max} too small: tail mass {tail:.3g}")
    if cutoff.n_max + 1 > max_terms:
        raise ValueError(f"Fock cutoff {cutoff.n_max} exceeds {max_terms} terms")
    n = np.arange(cutoff.n_max + 1, dtype=float)
    dist = []
    for nbar in (n0, n1):
        if nbar == 0:
            dist.append((n == 0).astype(float))
        else:
            dist.append(np.exp(n * np.log(nbar / (nbar + 1)) - np.log1p(nbar)))
    trace_norm = np.abs(dist[1] - dist[0]).sum()
    return 0.5 * (1.0 + 0.5 * trace_norm)


# ---------------------------------------------------------------------------
# Heterodyne receiver with a disk threshold


def optimal_heterodyne_threshold(n0: float, n1: float) -> float:
    """Radius where the two heterodyne densities cross.

    ``mu^2 = (n0+1) / (1 - (n0+1)/(n1+1)) * ln((n1+1)/(n0+1))``; tends to
    ``n0 + 1`` as ``n1 -> n0``.
    """
    _check_order(n0, n1)
    eps = (n1 - n0) / (n0 + 1)
    if eps == 0:
        return math.sqrt(n0 + 1)
    return math.sqrt((n0 + 1) * (1 + eps) * math.log1p(eps) / eps)


def p_het_excess(n0: float, n1: float, mu: float) -> float:
    """``P_het - 1/2`` for a disk of radius ``mu`` about the expected return."""
    if mu < 0:
        raise ValueError(f"threshold must be >= 0, got {mu}")
    _check_order(n0, n1)
    mu2 = mu * mu
    a1 = mu2 / (n1 + 1)
    gap = mu2 * (n1 - n0) / ((n0 + 1) * (n1 + 1))  # a0 - a1
    # (exp(-a1) - exp(-a0)) / 2
    return -0.5 * math.exp(-a1) * math.expm1(-gap)


def p_het(n0: float, n1: float, mu: float) -> float:
    return 0.5 + p_het_excess(n0, n1, mu)


def classify(beta, centroid, mu: float):
    """H0 inside the closed disk ``|beta - centroid| <= mu``, H1 outside.

    Scalars give a Hypothesis; arrays give an int array of labels.
    """
    if mu < 0:
        raise ValueError(f"threshold must be >= 0, got {mu}")
    outside = np.abs(np.asarray(beta) - centroid) > mu
    if outside.ndim == 0:
        return Hypothesis.H1 if outside else Hypothesis.H0
    return outside.astype(np.int8)
