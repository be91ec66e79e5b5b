"""Quantum-noise limits on detecting measure-and-prepare radar spoofing."""

from .bayes import (LikelihoodDeltas, PosteriorState, dwell_time, likelihood_deltas,
                    mean_prior_difference, required_pulses, update_posterior)
from .detection import (DecisionConfig, Hypothesis, classify, helstrom_threshold,
                        optimal_heterodyne_threshold, p_het, p_het_excess, p_opt,
                        p_opt_excess, p_opt_oracle)
from .scenario import (DEFAULT_SCENARIO, HypothesisPair, OutOfModelError, RadarScenario,
                       hypothesis_noise_numbers, transmissivity)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SCENARIO", "DecisionConfig", "Hypothesis", "HypothesisPair", "LikelihoodDeltas",
    "OutOfModelError", "PosteriorState", "RadarScenario", "classify", "dwell_time",
    "helstrom_threshold", "hypothesis_noise_numbers", "likelihood_deltas",
    "mean_prior_difference", "optimal_heterodyne_threshold", "p_het", "p_het_excess", "p_opt",
    "p_opt_excess", "p_opt_oracle", "required_pulses", "transmissivity", "update_posterior",
]
