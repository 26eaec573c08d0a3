"""
Protocol schedules and the brute-force density-matrix oracle.

Each protocol is a list of legs applied in order to the initial state: a
:class:`NoiseSlot` sends one qubit (or both, with independent environments)
through the channel assigned to a numbered slot, and an :class:`Encoding`
is a party's equiprobable choice of unitary on a qubit. The oracle walks
every encoding branch exactly, expands every channel as a full Kraus sum
and compares against the noiseless reference ``U_A U_B |psi>``.

Slot numbering follows the four rounds of controlled quantum dialogue:
slots 1 and 2 carry qubits 1 and 2 from the controller to Bob, slot 3 takes
qubit 1 from Bob to Alice and slot 4 brings it back.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from . import noise
from .curve import FidelityCurve
from .density import (
    I2,
    MINUS,
    PLUS,
    BellKind,
    X,
    Y,
    Z,
    bell_state,
    fidelity_pure,
    ket,
    projector,
    validate_density,
)
from .noise import Channel, DecoherenceParams, DepolarizingParams, KrausSet


class ConfigurationError(ValueError):
    """Inconsistent protocol / channel configuration."""


class Protocol(enum.Enum):
    CQD = "cqd"
    CDSQC = "cdsqc"
    QD = "qd"
    QSDC = "qsdc"
    DSQC = "dsqc"
    QKA = "qka"
    BBM = "bbm"
    BB84 = "bb84"
    EKERT = "ekert"
    B92 = "b92"

    @classmethod
    def parse(cls, text) -> "Protocol":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            names = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown protocol {text!r}; expected one of {names}") from None

    @property
    def uses_bell_state(self) -> bool:
        return self not in (Protocol.BB84, Protocol.B92)


# bit values 00, 01, 10, 11
PAULI_ENCODINGS = (I2, X, 1j * Y, Z)


@dataclass(frozen=True)
class NoiseSlot:
    """Transit of one or two qubits; ``targets`` holds (slot, qubit) pairs."""

    targets: tuple[tuple[int, int], ...]

    def __post_init__(self):
        qubits = [q for _, q in self.targets]
        if not 1 <= len(self.targets) <= 2 or len(set(qubits)) != len(qubits):
            raise ValueError(f"bad noise slot targets {self.targets}")
        for slot, qubit in self.targets:
            if slot not in (1, 2, 3, 4) or qubit not in (1, 2):
                raise ValueError(f"bad noise slot target ({slot}, {qubit})")


@dataclass(frozen=True, eq=False)
class Encoding:
    party: str
    unitaries: tuple[np.ndarray, ...] = PAULI_ENCODINGS
    qubit: int = 1

    def __post_init__(self):
        for u in self.unitaries:
            u = np.asarray(u)
            if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, I2, atol=1e-12):
                raise ValueError(f"encoding for {self.party} is not a 2x2 unitary")


@dataclass(frozen=True, eq=False)
class SingleQubitEnsemble:
    states: tuple[np.ndarray, ...]
    name: str = ""


BB84_STATES = SingleQubitEnsemble((ket("0"), ket("1"), PLUS, MINUS), "bb84")
B92_STATES = SingleQubitEnsemble((ket("0"), PLUS), "b92")

Leg = Union[NoiseSlot, Encoding]


@dataclass(frozen=True)
class ProtocolSchedule:
    protocol: Protocol
    initial: Union[BellKind, SingleQubitEnsemble]
    legs: tuple[Leg, ...]

    @property
    def active_slots(self) -> frozenset[int]:
        return frozenset(s for leg in self.legs if isinstance(leg, NoiseSlot) for s, _ in leg.targets)

    @property
    def encoding_combinations(self) -> int:
        return math.prod(len(leg.unitaries) for leg in self.legs if isinstance(leg, Encoding))


_PAIR = NoiseSlot(((1, 1), (2, 2)))
_SLOT3 = NoiseSlot(((3, 1),))
_SLOT4 = NoiseSlot(((4, 1),))
_BOB_IDENTITY = Encoding("Bob", (I2,))

_LEGS: dict[Protocol, tuple[Leg, ...]] = {
    Protocol.CQD: (_PAIR, Encoding("Bob"), _SLOT3, Encoding("Alice"), _SLOT4),
    Protocol.CDSQC: (_PAIR, Encoding("Alice"), _SLOT4),
    Protocol.QD: (Encoding("Bob"), _SLOT3, Encoding("Alice"), _SLOT4),
    Protocol.QSDC: (_BOB_IDENTITY, _SLOT3, Encoding("Alice"), _SLOT4),
    Protocol.QKA: (_BOB_IDENTITY, _SLOT3, Encoding("Alice"), _SLOT4),
    # qubit 2 leaves first; its transit commutes with Bob's encoding on qubit 1
    Protocol.DSQC: (NoiseSlot(((2, 2),)), Encoding("Bob"), _SLOT3),
    Protocol.BBM: (_SLOT3,),
    Protocol.EKERT: (_PAIR,),
    Protocol.BB84: (_SLOT3,),
    Protocol.B92: (_SLOT3,),
}


def schedule_for(protocol, initial: BellKind | None = None) -> ProtocolSchedule:
    """Canonical schedule of a protocol; Bell protocols default to psi+."""
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.BB84:
        start = BB84_STATES
    elif protocol is Protocol.B92:
        start = B92_STATES
    else:
        start = BellKind(initial) if initial is not None else BellKind.PSI_PLUS
    if not protocol.uses_bell_state and initial is not None:
        raise ValueError(f"{protocol.value} uses single-qubit states; an initial Bell state is meaningless")
    return ProtocolSchedule(protocol, start, _LEGS[protocol])


@dataclass(frozen=True)
class SlotNoise:
    """Damping or dephasing channel of one slot.

    Either ``params`` (non-Markovian, time dependent) or ``eta`` (Markovian,
    fixed decoherence rate) is given.
    """

    channel: Channel
    params: DecoherenceParams | None = None
    eta: float | None = None

    def __post_init__(self):
        if self.channel not in (Channel.DAMPING, Channel.DEPHASING):
            raise ConfigurationError("per-slot noise must be damping or dephasing")
        if (self.params is None) == (self.eta is None):
            raise ConfigurationError("give exactly one of params or eta")

    def p(self, t: float) -> float:
        damping = self.channel is Channel.DAMPING
        if self.eta is not None:
            noise._check_time(t)
            return noise.damping_p_markovian(self.eta) if damping else noise.dephasing_p_markovian(self.eta)
        return noise.damping_p(self.params, t) if damping else noise.dephasing_p(self.params, t)

    def kraus(self, t: float) -> KrausSet:
        p = self.p(t)
        return noise.damping_kraus(p) if self.channel is Channel.DAMPING else noise.dephasing_kraus(p)


@dataclass(frozen=True)
class SlotAssignment:
    """Channels for the four slots of a run.

    Damping/dephasing runs give a :class:`SlotNoise` per slot (missing slots
    are noiseless, p = 1). Depolarizing runs give one
    :class:`DepolarizingParams` shared by every active slot; ``markovian``
    selects the exponential Omega factors.
    """

    slots: Mapping[int, SlotNoise] = field(default_factory=dict)
    depolarizing: DepolarizingParams | None = None
    markovian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "slots", dict(self.slots))
        for s, spec in self.slots.items():
            if s not in (1, 2, 3, 4):
                raise ConfigurationError(f"slot index must be 1..4, got {s}")
            if not isinstance(spec, SlotNoise):
                raise ConfigurationError(f"slot {s}: expected SlotNoise, got {type(spec).__name__}")
        if self.depolarizing is not None and self.slots:
            raise ConfigurationError("depolarizing runs use one parameter set for all slots")
        kinds = {spec.channel for spec in self.slots.values()}
        if len(kinds) > 1:
            raise ConfigurationError("all slots of a run must carry the same channel kind")
        if self.markovian and self.depolarizing is None:
            raise ConfigurationError("markovian flag only applies to depolarizing runs")

    @classmethod
    def uniform(cls, channel, params: DecoherenceParams, slots: Sequence[int] = (1, 2, 3, 4)):
        channel = Channel(channel)
        return cls({s: SlotNoise(channel, params) for s in slots})

    @classmethod
    def per_slot(cls, channel, ratios: Mapping[int, float], gamma: float = 1.0):
        """Non-Markovian slots from line-width ratios Gamma/gamma."""
        channel = Channel(channel)
        return cls({s: SlotNoise(channel, DecoherenceParams.from_ratio(r, gamma)) for s, r in ratios.items()})

    @property
    def channel(self) -> Channel | None:
        if self.depolarizing is not None:
            return Channel.DEPOLARIZING
        for spec in self.slots.values():
            return spec.channel
        return None

    def p_values(self, t: float) -> tuple[float, float, float, float]:
        if self.depolarizing is not None:
            raise ConfigurationError("depolarizing runs are described by Omega factors, not p values")
        return tuple(self.slots[s].p(t) if s in self.slots else 1.0 for s in (1, 2, 3, 4))

    def omegas(self, t: float) -> noise.OmegaTriple:
        if self.depolarizing is None:
            raise ConfigurationError("not a depolarizing run")
        if self.markovian:
            return noise.depolarizing_omegas_markovian(self.depolarizing, t)
        return noise.depolarizing_omegas(self.depolarizing, t)

    def kraus_sets(self, t: float) -> dict[int, KrausSet]:
        """Kraus set for every slot at time ``t`` (identity for noiseless slots)."""
        if self.depolarizing is not None:
            shared = noise.depolarizing_kraus(noise.depolarizing_probs(self.omegas(t), t))
            return {s: shared for s in (1, 2, 3, 4)}
        identity = KrausSet((I2,), "identity")
        return {s: self.slots[s].kraus(t) if s in self.slots else identity for s in (1, 2, 3, 4)}


def _lift(noise_slot: NoiseSlot, kraus: Mapping[int, KrausSet], dim: int) -> np.ndarray:
    """Stack of full-dimension Kraus operators for one transit leg."""
    if dim == 2:
        if len(noise_slot.targets) != 1 or noise_slot.targets[0][1] != 1:
            raise ConfigurationError("single-qubit protocols only have qubit 1")
        return np.asarray(kraus[noise_slot.targets[0][0]].operators)
    per_qubit = {1: np.asarray([I2]), 2: np.asarray([I2])}
    for slot, qubit in noise_slot.targets:
        per_qubit[qubit] = np.asarray(kraus[slot].operators)
    return np.einsum("aij,bkl->abikjl", per_qubit[1], per_qubit[2]).reshape(-1, 4, 4)


def _embed(u: np.ndarray, qubit: int, dim: int) -> np.ndarray:
    if dim == 2:
        return u
    return np.kron(u, I2) if qubit == 1 else np.kron(I2, u)


def _check(rho: np.ndarray, where: str) -> None:
    problems = validate_density(rho)
    if problems:
        raise AssertionError(f"invalid state after {where}: {'; '.join(problems)}")


def _walk(rho, ref, legs, stacks, dim, check) -> tuple[float, int]:
    """Depth-first over encoding branches; returns (sum of fidelities, branch count)."""
    for i, leg in enumerate(legs):
        if isinstance(leg, NoiseSlot):
            k = stacks[id(leg)]
            rho = np.einsum("kij,jl,kml->im", k, rho, k.conj())
            if check:
                _check(rho, f"slots {leg.targets}")
            continue
        total, count = 0.0, 0
        rest = legs[i + 1:]
        for u in leg.unitaries:
            full = _embed(np.asarray(u), leg.qubit, dim)
            s, c = _walk(full @ rho @ full.conj().T, full @ ref, rest, stacks, dim, check)
            total += s
            count += c
        return total, count
    return fidelity_pure(ref, rho), 1


def oracle_fidelity(schedule: ProtocolSchedule, assignment: SlotAssignment, t: float, check: bool = False) -> float:
    """Average fidelity by explicit Kraus evolution of the protocol.

    Bell-state protocols average <psi'|rho'|psi'> over every combination of
    encodings; single-qubit protocols average <psi|E(|psi><psi|)|psi> over
    their state ensemble. With ``check=True`` every intermediate state is
    validated as a density matrix.
    """
    if not isinstance(assignment, SlotAssignment):
        raise ConfigurationError("assignment must be a SlotAssignment")
    kraus = assignment.kraus_sets(t)

    if isinstance(schedule.initial, SingleQubitEnsemble):
        dim, starts = 2, schedule.initial.states
    else:
        dim, starts = 4, (bell_state(schedule.initial),)
    stacks = {id(leg): _lift(leg, kraus, dim) for leg in schedule.legs if isinstance(leg, NoiseSlot)}

    total, count = 0.0, 0
    for psi in starts:
        s, c = _walk(projector(psi), np.asarray(psi, dtype=complex), schedule.legs, stacks, dim, check)
        total += s
        count += c
    return min(max(total / count, 0.0), 1.0)


def oracle_curve(schedule: ProtocolSchedule, assignment: SlotAssignment, t_grid) -> FidelityCurve:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValueError("empty time grid")
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be non-negative and strictly increasing")
    values = np.array([oracle_fidelity(schedule, assignment, t) for t in t_grid])
    initial = schedule.initial.value if isinstance(schedule.initial, BellKind) else schedule.initial.name
    channel = assignment.channel
    meta = {
        "protocol": schedule.protocol.value,
        "initial": initial,
        "channel": channel.value if channel else "none",
        "source": "oracle",
    }
    return FidelityCurve(t_grid, oracle=values, metadata=meta)
