"""Mach-Zehnder composition: joint and conditional polarization states inside
and outside the interferometer.

Inside, the photon takes a balanced superposition of two paths, each with its
own birefringent coupling.  The second beam splitter mixes the paths; the
shared outside coupling then acts identically on both output ports.  All
states are evaluated from closed forms built on the Gaussian decoherence
factor; the brute-force cross-check lives in the oracle module.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channels import single_path_state
from .core import (
    DensityMatrix,
    InterferometerConfig,
    effective_time,
    kappa_of_delay,
)
from .errors import ImpossibleOutcome

# below this conditioning probability a port is considered analytically dark
DARK_PORT_TOL = 1e-14


def _inside_durations(cfg: InterferometerConfig) -> tuple[float, float]:
    return cfg.window0.duration, cfg.window1.duration


def interference_kappas(cfg: InterferometerConfig) -> tuple[float, float]:
    """Real interference weights (kappa_H, kappa_V) at the output beam splitter.

    They originate from the cross-terms between the two inside paths evaluated
    at the full coupling durations: a Gaussian envelope in the optical path
    difference of each polarization component times a cosine at the mean
    frequency, with prefactor 2.  Time-independent.
    """
    t0, t1 = _inside_durations(cfg)
    mu, sigma = cfg.dist.mu, cfg.dist.sigma
    out = []
    for n0, n1 in (
        (cfg.window0.n_h, cfg.window1.n_h),
        (cfg.window0.n_v, cfg.window1.n_v),
    ):
        d = n0 * t0 - n1 * t1
        out.append(2.0 * np.exp(-0.5 * (sigma * d) ** 2) * np.cos(mu * d))
    return out[0], out[1]


def lambda_function(cfg: InterferometerConfig, t):
    """Cross-term coherence transfer for the conditional output states.

    Sum of two decoherence factors whose delays pair the H component of one
    inside path with the V component of the other, both shifted by the
    accumulated outside delay.  Accepts scalar or array t.
    """
    t0, t1 = _inside_durations(cfg)
    shift = cfg.window_out.delta_n * effective_time(cfg.window_out, t)
    x1 = cfg.window0.n_h * t0 - cfg.window1.n_v * t1 + shift
    x2 = cfg.window1.n_h * t1 - cfg.window0.n_v * t0 + shift
    theta = cfg.pol.theta
    return kappa_of_delay(cfg.dist, theta, x1) + kappa_of_delay(cfg.dist, theta, x2)


def _shifted_kappa(cfg: InterferometerConfig, j: int, t):
    """Path-j decoherence factor with the outside delay added on top of the
    full inside delay."""
    window = cfg.window0 if j == 0 else cfg.window1
    t_j = window.duration
    shift = cfg.window_out.delta_n * effective_time(cfg.window_out, t)
    return kappa_of_delay(cfg.dist, cfg.pol.theta, window.delta_n * t_j + shift)


@dataclass(frozen=True)
class OutputFunctions:
    """Closed-form ingredients of the output-side dynamics for one config.

    kappa_h / kappa_v are the time-independent interference weights; lambda_at
    evaluates the cross-term transfer; f0 / f1 give the conditional coherence
    transfer factor of each output port.  All callables accept scalar or
    array laboratory times.
    """

    kappa_h: float
    kappa_v: float
    lambda_at: Callable
    f0: Callable
    f1: Callable
    kappa0_at: Callable
    kappa1_at: Callable

    @classmethod
    def from_config(cls, cfg: InterferometerConfig) -> "OutputFunctions":
        kh, kv = interference_kappas(cfg)

        def lam(t, _cfg=cfg):
            return lambda_function(_cfg, t)

        def k0(t, _cfg=cfg):
            return _shifted_kappa(_cfg, 0, t)

        def k1(t, _cfg=cfg):
            return _shifted_kappa(_cfg, 1, t)

        def f0(t):
            return (k0(t) + k1(t) + lam(t)) / 4.0

        def f1(t):
            return (k0(t) + k1(t) - lam(t)) / 4.0

        return cls(kh, kv, lam, f0, f1, k0, k1)

    def f(self, jp: int, t):
        """Coherence transfer factor of output port jp."""
        return self.f0(t) if jp == 0 else self.f1(t)

    def h(self, jp: int) -> float:
        """H-population weight of the unnormalized port-jp state."""
        return (2.0 + (-1) ** jp * self.kappa_h) / 4.0

    def v(self, jp: int) -> float:
        """V-population weight of the unnormalized port-jp state."""
        return (2.0 + (-1) ** jp * self.kappa_v) / 4.0


def _check_inside_time(cfg: InterferometerConfig, t: float):
    if t < 0 or t > cfg.window_out.t_start:
        raise ValueError(
            f"t={t} outside the inside region [0, {cfg.window_out.t_start}]"
        )


def joint_state_inside(cfg: InterferometerConfig, t: float) -> DensityMatrix:
    """Path-averaged state inside the interferometer (quantum erasure).

    Equal-weight mixture of the two single-path dephasing channels: the
    populations stay put and the coherence carries the mean of the two
    decoherence factors.
    """
    _check_inside_time(cfg, t)
    theta = cfg.pol.theta
    k0 = kappa_of_delay(
        cfg.dist, theta, cfg.window0.delta_n * effective_time(cfg.window0, t)
    )
    k1 = kappa_of_delay(
        cfg.dist, theta, cfg.window1.delta_n * effective_time(cfg.window1, t)
    )
    coh = cfg.pol.c_h * np.conj(cfg.pol.c_v) * (k0 + k1) / 2.0
    m = np.array(
        [
            [abs(cfg.pol.c_h) ** 2, coh],
            [np.conj(coh), abs(cfg.pol.c_v) ** 2],
        ]
    )
    return DensityMatrix(m)


def path_state_inside(cfg: InterferometerConfig, j: int, t: float) -> DensityMatrix:
    """State conditioned on finding the photon on inside path j.

    Each path is taken with probability exactly 1/2, and conditioning gives
    back the plain single-path dephasing channel of that arm.
    """
    _check_inside_time(cfg, t)
    window = cfg.window0 if j == 0 else cfg.window1
    return single_path_state(cfg.pol, window, cfg.dist, t)


def path_probabilities(cfg: InterferometerConfig) -> tuple[float, float]:
    """Detection probabilities of the two output ports.

    Interference weights, weighted by the input populations, on top of the
    balanced 1/2 background; the two always sum to one.
    """
    kh, kv = interference_kappas(cfg)
    ph = abs(cfg.pol.c_h) ** 2
    pv = abs(cfg.pol.c_v) ** 2
    p0 = (2.0 + ph * kh + pv * kv) / 4.0
    return p0, 1.0 - p0


def conditional_state_outside(
    cfg: InterferometerConfig,
    jp: int,
    t: float,
    normalized: bool = True,
) -> DensityMatrix:
    """State on output port jp at laboratory time t.

    Before the outside coupling opens the accumulated outside delay is zero,
    so the same expression also gives the state right at the exit.  The
    unnormalized variant omits the division by the port probability and is
    trace-non-increasing; its populations (and the normalized ones) are
    time-independent because only dephasing acts after the output beam
    splitter.
    """
    of = OutputFunctions.from_config(cfg)
    ph = abs(cfg.pol.c_h) ** 2
    pv = abs(cfg.pol.c_v) ** 2
    f = of.f(jp, t)
    coh = cfg.pol.c_h * np.conj(cfg.pol.c_v) * f
    m = np.array(
        [
            [of.h(jp) * ph, coh],
            [np.conj(coh), of.v(jp) * pv],
        ]
    )
    if not normalized:
        return DensityMatrix(m, require_unit_trace=False)
    prob = path_probabilities(cfg)[jp]
    if prob < DARK_PORT_TOL:
        raise ImpossibleOutcome(
            f"output port {jp} has probability {prob!r}; cannot condition on it"
        )
    return DensityMatrix(m / prob)


def averaged_state_outside(cfg: InterferometerConfig, t: float) -> DensityMatrix:
    """Port-averaged state outside the interferometer.

    Ignoring the port (erasing which-path information) removes every
    interference term: the coherence is the mean of the two path decoherence
    factors, each with the outside delay added to its full inside delay.
    """
    of = OutputFunctions.from_config(cfg)
    coh = cfg.pol.c_h * np.conj(cfg.pol.c_v) * (of.kappa0_at(t) + of.kappa1_at(t)) / 2.0
    m = np.array(
        [
            [abs(cfg.pol.c_h) ** 2, coh],
            [np.conj(coh), abs(cfg.pol.c_v) ** 2],
        ]
    )
    return DensityMatrix(m)
