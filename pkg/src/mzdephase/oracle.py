"""Brute-force validation of every closed form by direct state-vector
evolution of the full polarization x frequency x path state.

The frequency integral is discretized on a uniform grid with trapezoid
weights.  The evolution applies the beam-splitter Hadamards and the diagonal
coupling phases explicitly, then traces out (or conditions on) frequency and
path.  Nothing here uses the closed-form interferometer expressions; only the
comparison harness does, to quantify their agreement.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import DensityMatrix, FrequencyDistribution, InterferometerConfig, effective_time
from .errors import ImpossibleOutcome

DEFAULT_N_FREQ = 2001
DEFAULT_HALF_WIDTH = 8.0  # in units of sigma

_CONDITION_TOL = 1e-14


@dataclass(frozen=True)
class FrequencyGrid:
    """Quadrature discretization of the Gaussian spectrum.

    ``omegas`` are the sample frequencies and ``weights`` the corresponding
    probability weights, normalized to unit total mass.  The canonical grid
    uses at least 201 points over mu +- 8 sigma.
    """

    omegas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if omegas.ndim != 1 or omegas.shape != weights.shape or len(omegas) < 3:
            raise ValueError("omegas and weights must be equal-length 1d arrays")
        if np.any(np.diff(omegas) <= 0):
            raise ValueError("omegas must be strictly increasing")
        if np.any(weights < 0):
            raise ValueError("weights must be non-negative")
        if abs(weights.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {weights.sum()!r}, expected 1")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def build(
        cls,
        dist: FrequencyDistribution,
        n: int = DEFAULT_N_FREQ,
        half_width: float = DEFAULT_HALF_WIDTH,
    ) -> "FrequencyGrid":
        """Uniform trapezoid grid over mu +- half_width * sigma.

        Weights are the Gaussian density times the trapezoid rule, rescaled to
        sum exactly to one so truncation never leaks probability.
        """
        omegas = np.linspace(
            dist.mu - half_width * dist.sigma, dist.mu + half_width * dist.sigma, n
        )
        pdf = np.exp(-0.5 * ((omegas - dist.mu) / dist.sigma) ** 2)
        step = np.full(n, omegas[1] - omegas[0])
        step[0] *= 0.5
        step[-1] *= 0.5
        weights = pdf * step
        weights /= weights.sum()
        return cls(omegas, weights)


def _amplitudes_inside(
    cfg: InterferometerConfig, grid: FrequencyGrid, t: float
) -> np.ndarray:
    """Amplitude array psi[polarization, frequency, inside path] at time t."""
    om = grid.omegas
    amp = np.sqrt(grid.weights)
    c = (cfg.pol.c_h * np.exp(1j * cfg.pol.theta), cfg.pol.c_v)
    psi = np.zeros((2, len(om), 2), dtype=complex)
    for j, window in enumerate((cfg.window0, cfg.window1)):
        coupling = effective_time(window, t)
        for lam, n_lam in enumerate((window.n_h, window.n_v)):
            psi[lam, :, j] = (
                c[lam] * amp * np.exp(1j * n_lam * om * coupling) / np.sqrt(2.0)
            )
    return psi


def _amplitudes_outside(
    cfg: InterferometerConfig, grid: FrequencyGrid, t: float
) -> np.ndarray:
    """Amplitude array psi[polarization, frequency, output port] at time t."""
    psi = _amplitudes_inside(cfg, grid, t)
    mixed = np.stack(
        [
            (psi[:, :, 0] + psi[:, :, 1]) / np.sqrt(2.0),
            (psi[:, :, 0] - psi[:, :, 1]) / np.sqrt(2.0),
        ],
        axis=2,
    )
    coupling = effective_time(cfg.window_out, t)
    for lam, n_lam in enumerate((cfg.window_out.n_h, cfg.window_out.n_v)):
        mixed[lam] *= np.exp(1j * n_lam * grid.omegas * coupling)[:, None]
    return mixed


def _reduce(psi: np.ndarray, conditioning) -> DensityMatrix:
    """Trace out frequency and path (or project on one path and normalize)."""
    if conditioning is None:
        rho = np.einsum("akj,bkj->ab", psi, psi.conj())
    else:
        block = psi[:, :, conditioning]
        rho = block @ block.conj().T
    norm = float(np.real(np.trace(rho)))
    if norm < _CONDITION_TOL:
        raise ImpossibleOutcome(
            f"conditioning weight {norm!r} is zero within tolerance"
        )
    return DensityMatrix(rho / norm)


def oracle_state(
    cfg: InterferometerConfig,
    grid: FrequencyGrid,
    t: float,
    stage: str,
    conditioning=None,
) -> DensityMatrix:
    """Polarization state at time t from direct evolution of the joint state.

    Parameters
    ----------
    stage : "inside" or "outside"
        Whether the state is taken before or after the output beam splitter.
    conditioning : None, 0 or 1
        None averages over the path degree of freedom; an integer projects on
        that (inside path or output port) and normalizes.
    """
    if stage == "inside":
        psi = _amplitudes_inside(cfg, grid, t)
    elif stage == "outside":
        psi = _amplitudes_outside(cfg, grid, t)
    else:
        raise ValueError(f"unknown stage {stage!r}")
    return _reduce(psi, conditioning)


def oracle_port_probabilities(
    cfg: InterferometerConfig, grid: FrequencyGrid, t: float
) -> tuple[float, float]:
    """Output-port weights from the evolved amplitudes."""
    psi = _amplitudes_outside(cfg, grid, t)
    p0 = float(np.sum(np.abs(psi[:, :, 0]) ** 2))
    p1 = float(np.sum(np.abs(psi[:, :, 1]) ** 2))
    return p0, p1


class OracleDeviation(NamedTuple):
    max_deviation: float
    probability_deviation: float


_LOCATION_TABLE = {
    "path0": ("inside", 0),
    "path1": ("inside", 1),
    "joint_inside": ("inside", None),
    "path0_out": ("outside", 0),
    "path1_out": ("outside", 1),
    "joint_out": ("outside", None),
}


def oracle_compare(
    cfg: InterferometerConfig,
    grid: FrequencyGrid,
    times: Sequence[float],
    locations: Sequence[str] = tuple(_LOCATION_TABLE),
) -> OracleDeviation:
    """Maximum disagreement between the closed forms and the brute force.

    Sweeps the requested (time, location) matrix, comparing states by trace
    distance, and also compares the analytic port probabilities against the
    oracle port weights.  Inside locations only use times up to the start of
    the output coupling, outside locations only times from it on.  Conditional
    cells on an analytically dark port are skipped (both sides are undefined
    there).
    """
    from . import interferometer as itf
    from .core import trace_distance

    p_analytic = itf.path_probabilities(cfg)
    worst_state = 0.0
    worst_prob = 0.0
    out_start = cfg.window_out.t_start
    for location in locations:
        stage, conditioning = _LOCATION_TABLE[location]
        for t in times:
            if stage == "inside" and not 0 <= t <= out_start:
                continue
            if stage == "outside" and t < out_start:
                continue
            dark = (
                stage == "outside"
                and conditioning is not None
                and p_analytic[conditioning] < itf.DARK_PORT_TOL
            )
            if dark:
                continue
            if stage == "inside":
                if conditioning is None:
                    reference = itf.joint_state_inside(cfg, t)
                else:
                    reference = itf.path_state_inside(cfg, conditioning, t)
            else:
                if conditioning is None:
                    reference = itf.averaged_state_outside(cfg, t)
                else:
                    reference = itf.conditional_state_outside(cfg, conditioning, t)
            simulated = oracle_state(cfg, grid, t, stage, conditioning)
            worst_state = max(worst_state, trace_distance(reference, simulated))
            if stage == "outside":
                p_oracle = oracle_port_probabilities(cfg, grid, t)
                worst_prob = max(
                    worst_prob,
                    abs(p_oracle[0] - p_analytic[0]),
                    abs(p_oracle[1] - p_analytic[1]),
                )
    return OracleDeviation(worst_state, worst_prob)
