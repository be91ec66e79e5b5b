"""Single-mode Gaussian states, the two noise channels, and heterodyne statistics.

Covariance convention: vacuum and coherent states have ``V = I``. A thermal
state with mean photon number ``N`` has ``V = (2N + 1) I``. The displacement of
a coherent state ``|alpha>`` is ``[alpha + alpha*, i(alpha* - alpha)]``, i.e.
``[2 Re alpha, 2 Im alpha]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_ISOTROPY_RTOL = 1e-12


@dataclass(frozen=True)
class GaussianState:
    """Displacement 2-vector and 2x2 covariance of one bosonic mode."""

    displacement: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        x = np.array(self.displacement, dtype=float)
        v = np.array(self.covariance, dtype=float)
        if x.shape != (2,) or v.shape != (2, 2):
            raise ValueError("expected a 2-vector displacement and 2x2 covariance")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("state components must be finite")
        if np.abs(v - v.T).max() > 1e-12 * np.abs(v).max():
            raise ValueError("covariance must be symmetric")
        v = (v + v.T) / 2
        if np.linalg.eigvalsh(v)[0] < 1.0 - 1e-12:
            raise ValueError("covariance violates the uncertainty bound (eigenvalue < 1)")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "displacement", x)
        object.__setattr__(self, "covariance", v)

    @property
    def centroid(self) -> complex:
        """Complex phase-space centre, ``x1/2 + i x2/2``."""
        return complex(self.displacement[0] / 2, self.displacement[1] / 2)

    def thermal_number(self) -> float:
        """Return ``N`` for an isotropic covariance ``(2N + 1) I``.

        Raises ValueError if the covariance is not a multiple of the identity.
        """
        v = self.covariance
        scale = abs(v[0, 0])
        if (abs(v[0, 0] - v[1, 1]) > _ISOTROPY_RTOL * scale
                or abs(v[0, 1]) > _ISOTROPY_RTOL * scale):
            raise ValueError("heterodyne statistics are only modelled for isotropic covariance")
        return (v[0, 0] - 1.0) / 2.0


@dataclass(frozen=True)
class LossyChannelParams:
    """Lossy thermal channel with transmissivity ``tau``.

    The channel's thermal occupation is ``N_T = n_t_prime / (1 - tau)``, so the
    added covariance ``(1 - tau)(2 N_T + 1)`` stays finite as ``tau -> 1``.
    """

    tau: float
    n_t_prime: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"transmissivity must lie in (0, 1], got {self.tau}")
        if not (self.n_t_prime >= 0.0):
            raise ValueError(f"n_t_prime must be >= 0, got {self.n_t_prime}")
        if self.tau == 1.0 and self.n_t_prime != 0.0:
            raise ValueError("tau = 1 requires n_t_prime = 0")

    def split(self) -> LossyChannelParams:
        """One of two identical legs whose composition equals this channel.

        Each leg has transmissivity ``sqrt(tau)`` and shares this channel's
        ``N_T``, which means a per-leg ``n_t_prime / (1 + sqrt(tau))``.
        """
        root = math.sqrt(self.tau)
        return LossyChannelParams(root, self.n_t_prime / (1.0 + root))


@dataclass(frozen=True)
class ClassicalNoiseParams:
    xi: float

    def __post_init__(self):
        if not (self.xi >= 0.0):
            raise ValueError(f"noise variance must be >= 0, got {self.xi}")


def coherent_state(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise ValueError(f"amplitude must be finite, got {alpha}")
    return GaussianState(np.array([2 * alpha.real, 2 * alpha.imag]), np.eye(2))


def thermal_state(n: float, centroid: complex = 0j) -> GaussianState:
    """Displaced thermal state with mean photon number ``n`` about ``centroid``."""
    centroid = complex(centroid)
    return GaussianState(
        np.array([2 * centroid.real, 2 * centroid.imag]), (2 * n + 1) * np.eye(2)
    )


def apply_lossy_channel(state: GaussianState, ch: LossyChannelParams) -> GaussianState:
    # (1 - tau)(2 N_T + 1) with N_T = N'_T / (1 - tau)
    added = 2 * ch.n_t_prime + (1.0 - ch.tau)
    return GaussianState(
        math.sqrt(ch.tau) * state.displacement,
        ch.tau * state.covariance + added * np.eye(2),
    )


def apply_classical_noise(state: GaussianState, ch: ClassicalNoiseParams) -> GaussianState:
    return GaussianState(state.displacement, state.covariance + ch.xi * np.eye(2))


def heterodyne_pdf(state: GaussianState, beta):
    """Density of the heterodyne outcome ``beta`` (scalar or array).

    For covariance ``(2N + 1) I`` the outcome is complex Gaussian about the
    centroid with ``E|beta - centroid|^2 = N + 1``.
    """
    n = state.thermal_number()
    d2 = np.abs(np.asarray(beta) - state.centroid) ** 2
    return np.exp(-d2 / (n + 1)) / (np.pi * (n + 1))


def sample_heterodyne(state: GaussianState, rng: np.random.Generator, size=None):
    """Draw heterodyne outcomes; returns a complex scalar when ``size`` is None."""
    n = state.thermal_number()
    sigma = math.sqrt((n + 1) / 2)
    z = rng.normal(0.0, sigma, size=(2,) if size is None else (2, *np.atleast_1d(size)))
    out = state.centroid + z[0] + 1j * z[1]
    return complex(out) if size is None else out
