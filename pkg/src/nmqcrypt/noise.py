"""
Decoherence functions and Kraus sets for non-Markovian damping, dephasing
and depolarizing channels, plus their Markovian limits.

The damping function and the depolarizing Omega factors both have the form
``exp(-a x) [cos(d x) + w sin(d x) / d]`` where ``d`` is the square root of
a radicand that can be positive (oscillatory), zero (critical) or negative
(overdamped). :func:`damped_oscillation` evaluates all three regimes through
one code path; the overdamped branch is the analytic continuation
``d -> i|d|`` (cos -> cosh, sin/d -> sinh/|d|).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .density import I2, X, Y, Z, completeness_defect

CLAMP_TOL = 1e-12
CP_TOL = 1e-8


class CompletePositivityError(ValueError):
    """A depolarizing probability is genuinely negative."""


class Channel(enum.Enum):
    DAMPING = "damping"
    DEPHASING = "dephasing"
    DEPOLARIZING = "depolarizing"


@dataclass(frozen=True)
class DecoherenceParams:
    """Coupling strength ``gamma`` and reservoir line width ``Gamma``."""

    gamma: float
    Gamma: float

    def __post_init__(self):
        if not (self.gamma > 0 and self.Gamma > 0):
            raise ValueError(f"gamma and Gamma must be positive, got {self.gamma}, {self.Gamma}")
        if not (math.isfinite(self.gamma) and math.isfinite(self.Gamma)):
            raise ValueError("gamma and Gamma must be finite")

    @classmethod
    def from_ratio(cls, ratio: float, gamma: float = 1.0) -> "DecoherenceParams":
        """Build from the line-width ratio Gamma/gamma."""
        return cls(gamma=gamma, Gamma=ratio * gamma)

    @property
    def radicand(self) -> float:
        return 2.0 * self.gamma * self.Gamma - self.Gamma**2

    @property
    def d(self) -> complex:
        """sqrt(2 gamma Gamma - Gamma^2); imaginary in the overdamped regime."""
        r = self.radicand
        return complex(math.sqrt(r), 0.0) if r >= 0 else complex(0.0, math.sqrt(-r))


@dataclass(frozen=True)
class DepolarizingParams:
    """Ratios r_i = gamma_i / Gamma_i for the three Pauli components.

    ``Gamma`` is the common bandwidth that sets the time scale.
    """

    ratios: tuple[float, float, float]
    Gamma: float = 1.0

    def __post_init__(self):
        ratios = tuple(float(r) for r in self.ratios)
        if len(ratios) != 3:
            raise ValueError(f"need exactly three ratios, got {len(ratios)}")
        if not all(r > 0 and math.isfinite(r) for r in ratios):
            raise ValueError(f"ratios must be positive and finite, got {ratios}")
        if not self.Gamma > 0:
            raise ValueError(f"Gamma must be positive, got {self.Gamma}")
        object.__setattr__(self, "ratios", ratios)

    @classmethod
    def homogeneous(cls, ratio: float, Gamma: float = 1.0) -> "DepolarizingParams":
        return cls((ratio, ratio, ratio), Gamma)

    def radicands(self) -> tuple[float, float, float]:
        r = self.ratios
        return tuple(16.0 * (r[j] ** 2 + r[k] ** 2) - 1.0 for j, k in ((1, 2), (0, 2), (0, 1)))

    @property
    def d(self) -> tuple[complex, complex, complex]:
        return tuple(
            complex(math.sqrt(q), 0.0) if q >= 0 else complex(0.0, math.sqrt(-q))
            for q in self.radicands()
        )

    def markovian_rates(self) -> tuple[float, float, float]:
        """gamma_i = (4/Gamma)(gamma_j^2 + gamma_k^2) with gamma_j = r_j Gamma."""
        g = [r * self.Gamma for r in self.ratios]
        return tuple(4.0 / self.Gamma * (g[j] ** 2 + g[k] ** 2) for j, k in ((1, 2), (0, 2), (0, 1)))


class OmegaTriple(NamedTuple):
    omega1: float
    omega2: float
    omega3: float


class ProbQuad(NamedTuple):
    """Probabilities of X, Y, Z and I in a Pauli channel."""

    p1: float
    p2: float
    p3: float
    p4: float


@dataclass(frozen=True)
class KrausSet:
    operators: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        for k in ops:
            if k.shape != (2, 2):
                raise ValueError(f"Kraus operators must be 2x2, got {k.shape}")
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def completeness_defect(self) -> float:
        return completeness_defect(self.operators)


def _check_time(t: float) -> float:
    t = float(t)
    if not t >= 0 or not math.isfinite(t):
        raise ValueError(f"time must be finite and non-negative, got {t}")
    return t


def damped_oscillation(decay: float, radicand: float, x: float, weight: float) -> float:
    """Evaluate ``exp(-decay x) [cos(d x) + weight sin(d x)/d]`` with d = sqrt(radicand).

    Negative radicands give the hyperbolic continuation and ``radicand == 0``
    gives the limit ``exp(-decay x)(1 + weight x)``. For large overdamped
    arguments the exponentials are combined before evaluation so that
    ``cosh`` cannot overflow.
    """
    if radicand > 0:
        d = math.sqrt(radicand)
        return math.exp(-decay * x) * (math.cos(d * x) + weight * math.sin(d * x) / d)
    if radicand == 0:
        return math.exp(-decay * x) * (1.0 + weight * x)
    k = math.sqrt(-radicand)
    if k * x < 30.0:
        return math.exp(-decay * x) * (math.cosh(k * x) + weight * math.sinh(k * x) / k)
    return 0.5 * (
        (1.0 + weight / k) * math.exp((k - decay) * x)
        + (1.0 - weight / k) * math.exp(-(k + decay) * x)
    )


def _unit_interval(value: float, name: str) -> float:
    if value < -CLAMP_TOL or value > 1.0 + CLAMP_TOL or not math.isfinite(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return min(max(value, 0.0), 1.0)


def damping_p(params: DecoherenceParams, t: float) -> float:
    """Non-Markovian amplitude-damping function p(t) in [0, 1]."""
    t = _check_time(t)
    amp = damped_oscillation(params.Gamma, params.radicand, t / 2.0, params.Gamma)
    return min(amp * amp, 1.0)


def dephasing_p(params: DecoherenceParams, t: float) -> float:
    """Non-Markovian pure-dephasing function p(t) in [0, 1]."""
    t = _check_time(t)
    # t + (exp(-Gamma t) - 1)/Gamma, written with expm1 to keep small-t accuracy
    memory = t + math.expm1(-params.Gamma * t) / params.Gamma
    return math.exp(-0.5 * params.gamma * max(memory, 0.0))


def damping_p_markovian(eta: float) -> float:
    return 1.0 - _unit_interval(eta, "eta")


def dephasing_p_markovian(eta: float) -> float:
    return math.sqrt(1.0 - _unit_interval(eta, "eta"))


def damping_kraus(p: float) -> KrausSet:
    p = _unit_interval(p, "p")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(p)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(1.0 - p)], [0.0, 0.0]], dtype=complex)
    return KrausSet((k0, k1), "damping")


def dephasing_kraus(p: float) -> KrausSet:
    p = _unit_interval(p, "p")
    k0 = np.array([[1.0, 0.0], [0.0, p]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [0.0, math.sqrt(1.0 - p * p)]], dtype=complex)
    return KrausSet((k0, k1), "dephasing")


def depolarizing_omegas(params: DepolarizingParams, t: float) -> OmegaTriple:
    """Non-Markovian Omega factors at time ``t``."""
    t = _check_time(t)
    x = params.Gamma * t / 2.0
    return OmegaTriple(*(damped_oscillation(1.0, q, x, 1.0) for q in params.radicands()))


def depolarizing_omegas_markovian(params: DepolarizingParams, t: float) -> OmegaTriple:
    t = _check_time(t)
    return OmegaTriple(*(math.exp(-g * t / 2.0) for g in params.markovian_rates()))


def raw_depolarizing_probs(omegas) -> ProbQuad:
    """Pauli probabilities from an Omega triple, with no validity checks."""
    o1, o2, o3 = omegas
    return ProbQuad(
        0.25 * (1 + o1 - o2 - o3),
        0.25 * (1 - o1 + o2 - o3),
        0.25 * (1 - o1 - o2 + o3),
        0.25 * (1 + o1 + o2 + o3),
    )


def depolarizing_probs(omegas, t: float | None = None) -> ProbQuad:
    """Pauli probabilities, clamped for round-off.

    Values in [-1e-12, 0) become 0, values below -1e-8 raise
    :class:`CompletePositivityError`, anything in between warns.
    """
    raw = raw_depolarizing_probs(omegas)
    out = []
    for i, p in enumerate(raw, start=1):
        if p < -CP_TOL:
            at = "" if t is None else f" at t={t:g}"
            raise CompletePositivityError(f"P{i} = {p:.3e} < 0{at}; the map is not completely positive")
        if p < -CLAMP_TOL:
            warnings.warn(f"P{i} = {p:.3e} slightly negative, clamped to 0", RuntimeWarning, stacklevel=2)
        out.append(max(p, 0.0))
    return ProbQuad(*out)


def depolarizing_kraus(probs: ProbQuad) -> KrausSet:
    """Kraus set {sqrt(P1) X, sqrt(P2) Y, sqrt(P3) Z, sqrt(P4) I}.

    P4 pairs with the identity: it is the component equal to 1 at t = 0.
    """
    probs = ProbQuad(*probs)
    if any(p < 0 for p in probs):
        raise CompletePositivityError(f"negative probability in {tuple(probs)}")
    ops = tuple(math.sqrt(p) * s for p, s in zip(probs, (X, Y, Z, I2)))
    return KrausSet(ops, "depolarizing")


def homogeneous_depol_bound(Gamma: float) -> float:
    """Largest homogeneous coupling gamma keeping the depolarizing map CP.

    Equals Gamma * sqrt((1 + (pi/ln 3)^2) / 32); at this value the most
    negative Omega just reaches -1/3.
    """
    if not Gamma > 0:
        raise ValueError(f"Gamma must be positive, got {Gamma}")
    return Gamma * math.sqrt((1.0 + (math.pi / math.log(3.0)) ** 2) / 32.0)
