"""Domain types, the Gaussian dephasing kernel and 2x2 density-matrix utilities.

Unit convention: times are measured in units of the inverse spectral width
(sigma = 1), frequencies in units of sigma.  This keeps every exponent in the
decoherence factors at a numerically safe scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# tolerances for double-precision checks on 2x2 matrices
HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-12
TRACE_TOL = 1e-12
UNIT_TRACE_TOL = 1e-9
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyDistribution:
    """Gaussian spectrum of the frequency environment.

    mu is the mean angular frequency and sigma the standard deviation, both in
    units of 1/time.  The canonical configuration uses mu/sigma = 400.
    """

    mu: float
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not math.isfinite(self.mu / self.sigma):
            raise ValueError("mu/sigma must be finite")


@dataclass(frozen=True)
class PolarizationState:
    """Qubit amplitudes for H and V plus their constant relative phase theta."""

    c_h: complex
    c_v: complex
    theta: float = 0.0

    def __post_init__(self):
        norm = abs(self.c_h) ** 2 + abs(self.c_v) ** 2
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"|c_h|^2 + |c_v|^2 = {norm!r}, expected 1")

    @classmethod
    def plus(cls) -> "PolarizationState":
        s = 1.0 / math.sqrt(2.0)
        return cls(s, s)

    @classmethod
    def minus(cls) -> "PolarizationState":
        s = 1.0 / math.sqrt(2.0)
        return cls(s, -s)

    @classmethod
    def horizontal(cls) -> "PolarizationState":
        return cls(1.0, 0.0)

    @classmethod
    def vertical(cls) -> "PolarizationState":
        return cls(0.0, 1.0)


@dataclass(frozen=True)
class InteractionWindow:
    """One birefringent medium: refractive indices and the interval in which
    the polarization-frequency coupling is switched on.

    t_stop may be math.inf for a coupling that runs freely once started.
    """

    n_h: float
    n_v: float
    t_start: float
    t_stop: float

    def __post_init__(self):
        if not math.isfinite(self.t_start):
            raise ValueError("t_start must be finite")
        if self.t_start > self.t_stop:
            raise ValueError(
                f"t_start {self.t_start} must not exceed t_stop {self.t_stop}"
            )

    @property
    def delta_n(self) -> float:
        """Birefringence n_h - n_v."""
        return self.n_h - self.n_v

    @property
    def duration(self) -> float:
        return self.t_stop - self.t_start


@dataclass(frozen=True)
class InterferometerConfig:
    """Full experiment description: spectrum, the two inside couplings, the
    shared outside coupling, and the input polarization.

    Both beam splitters are ideal 50/50 with zero relative path phase, and the
    outside coupling starts only after both inside couplings have ended.
    """

    dist: FrequencyDistribution
    window0: InteractionWindow
    window1: InteractionWindow
    window_out: InteractionWindow
    pol: PolarizationState

    def __post_init__(self):
        latest = max(self.window0.t_stop, self.window1.t_stop)
        if self.window_out.t_start < latest:
            raise ValueError(
                "output coupling starts at "
                f"{self.window_out.t_start}, before the inside couplings end at {latest}"
            )


class DensityMatrix:
    """A 2x2 polarization density matrix in the {H, V} basis.

    Hermiticity, positive semidefiniteness and trace bounds are enforced at
    construction.  Trace below one is only admitted for explicitly
    unnormalized conditional states (``require_unit_trace=False``).
    """

    __slots__ = ("_m",)

    def __init__(self, matrix, *, require_unit_trace: bool = True):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian")
        eigs = np.linalg.eigvalsh(m)
        if eigs[0] < -PSD_TOL:
            raise ValueError(f"matrix is not positive semidefinite: min eig {eigs[0]}")
        tr = float(np.real(np.trace(m)))
        if tr < -TRACE_TOL or tr > 1.0 + TRACE_TOL:
            raise ValueError(f"trace {tr} outside [0, 1]")
        if require_unit_trace and abs(tr - 1.0) > UNIT_TRACE_TOL:
            raise ValueError(f"trace {tr} differs from 1")
        m = m.copy()
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        """The underlying (read-only) 2x2 array."""
        return self._m

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self._m)))

    @property
    def population_h(self) -> float:
        return float(np.real(self._m[0, 0]))

    @property
    def population_v(self) -> float:
        return float(np.real(self._m[1, 1]))

    @property
    def coherence(self) -> complex:
        """The off-diagonal <H|rho|V> element."""
        return complex(self._m[0, 1])

    @property
    def unit_trace(self) -> bool:
        return abs(self.trace - 1.0) <= UNIT_TRACE_TOL

    def __repr__(self):
        return f"DensityMatrix({self._m.tolist()!r})"


def effective_time(window: InteractionWindow, t):
    """Accumulated coupling time of a window at laboratory time t.

    Piecewise linear and non-decreasing: zero before the window opens, grows
    at unit rate inside, and saturates at the window duration.  Accepts scalar
    or array t.
    """
    return np.clip(t, window.t_start, window.t_stop) - window.t_start


def kappa_of_delay(dist: FrequencyDistribution, theta: float, x):
    """Decoherence factor for an accumulated birefringent delay x.

    Averaging e^(i*omega*x) over the Gaussian spectrum gives
    exp[i(theta + mu*x) - (sigma*x)^2 / 2]: the modulus decays like a Gaussian
    in the delay while the phase rotates at the mean frequency.  Accepts
    scalar or array x.
    """
    x = np.asarray(x, dtype=float)
    out = np.exp(1j * (theta + dist.mu * x) - 0.5 * (dist.sigma * x) ** 2)
    return out if out.ndim else complex(out)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Trace distance (1/2)||a - b||_1 between two unit-trace states."""
    if not a.unit_trace or not b.unit_trace:
        raise ValueError("trace distance requires unit-trace inputs")
    eigs = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.sum(np.abs(eigs)))


def pure_density(pol: PolarizationState) -> DensityMatrix:
    """Rank-1 projector of a polarization state, relative phase included."""
    ch = complex(pol.c_h) * np.exp(1j * pol.theta)
    cv = complex(pol.c_v)
    vec = np.array([ch, cv])
    return DensityMatrix(np.outer(vec, vec.conj()))
