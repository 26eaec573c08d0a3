"""
Closed-form average fidelities for every protocol and channel.

Controlled quantum dialogue (CQD) is the parent case; the other protocols
are reductions of it with some slots set noiseless (p = 1). Depolarizing
channels compose by multiplying Omega factors, so a qubit that crosses n
depolarizing slots contributes Omega_i**n and the Bell-state overlap is
``(1 + sum_i prod Omega_i) / 4``.

Depolarizing results carry a ``note``: the frequently quoted prefactor 1/2
for these expressions gives F(0) = 2, and 1/4 is the value forced by
F(0) = 1 and by the Kraus-sum oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .density import BellKind
from .noise import Channel, OmegaTriple
from .protocols import ConfigurationError, Protocol, SlotAssignment

QUARTER_NOTE = "prefactor 1/4 (a printed 1/2 would give F(0)=2)"
DERIVED_NOTE = "closed form derived here and checked against the Kraus oracle"


@dataclass(frozen=True)
class SlotPs:
    """Decoherence function values of the four slots (1 = noiseless)."""

    p1: float = 1.0
    p2: float = 1.0
    p3: float = 1.0
    p4: float = 1.0

    def __post_init__(self):
        for name in ("p1", "p2", "p3", "p4"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class AnalyticResult:
    value: float
    formula: str
    note: str | None = None

    def __float__(self) -> float:
        return self.value


def _bell_kind(kind) -> BellKind:
    return BellKind(kind)


def cqd_damping(ps: SlotPs, kind: BellKind = BellKind.PSI_PLUS) -> AnalyticResult:
    p1, p2, p3, p4 = ps.p1, ps.p2, ps.p3, ps.p4
    root = math.sqrt(p1 * p2 * p3 * p4)
    if _bell_kind(kind).even_parity:
        value = 0.25 * (1 + 2 * root + p1 * p3 * p4 * (2 * p2 - 1) + p3 * p4 * (1 - p2))
        return AnalyticResult(value, "cqd-damping-psi")
    value = 0.25 * (1 + 2 * root + p1 * p3 * p4 + p3 * p4 * (p2 - 1))
    return AnalyticResult(value, "cqd-damping-phi")


def cqd_dephasing(ps: SlotPs) -> AnalyticResult:
    return AnalyticResult(0.5 * (1 + ps.p1 * ps.p2 * ps.p3 * ps.p4), "cqd-dephasing")


def _depol(omegas, power: int, formula: str, note: str = QUARTER_NOTE) -> AnalyticResult:
    o1, o2, o3 = omegas
    return AnalyticResult(0.25 * (1 + o1**power + o2**power + o3**power), formula, note)


def cqd_depolarizing(omegas: OmegaTriple) -> AnalyticResult:
    return _depol(omegas, 4, "cqd-depolarizing")


def cdsqc_damping(ps: SlotPs, kind: BellKind = BellKind.PSI_PLUS) -> AnalyticResult:
    """CQD damping with the Bob-to-Alice round removed (p3 = 1)."""
    r = cqd_damping(replace(ps, p3=1.0), kind)
    return AnalyticResult(r.value, r.formula.replace("cqd", "cdsqc"))


def cdsqc_dephasing(ps: SlotPs) -> AnalyticResult:
    return AnalyticResult(cqd_dephasing(replace(ps, p3=1.0)).value, "cdsqc-dephasing")


def cdsqc_depolarizing(omegas: OmegaTriple) -> AnalyticResult:
    return _depol(omegas, 3, "cdsqc-depolarizing")


def qd_family(channel, p3: float = 1.0, p4: float = 1.0, omegas: OmegaTriple | None = None) -> AnalyticResult:
    """Two rounds on one qubit of a Bell pair.

    Shared by QD, QSDC, QKA and (with its two transits relabelled) DSQC.
    Independent of the initial Bell state for every channel.
    """
    channel = Channel(channel)
    if channel is Channel.DAMPING:
        return AnalyticResult(0.25 * (1 + 2 * math.sqrt(p3 * p4) + p3 * p4), "qd-damping")
    if channel is Channel.DEPHASING:
        return AnalyticResult(0.5 * (1 + p3 * p4), "qd-dephasing")
    return _depol(_need(omegas), 2, "qd-depolarizing")


def bbm_fidelity(channel, p3: float = 1.0, omegas: OmegaTriple | None = None) -> AnalyticResult:
    channel = Channel(channel)
    if channel is Channel.DAMPING:
        return AnalyticResult(0.25 * (1 + 2 * math.sqrt(p3) + p3), "bbm-damping")
    if channel is Channel.DEPHASING:
        return AnalyticResult(0.5 * (1 + p3), "bbm-dephasing")
    return _depol(_need(omegas), 1, "bbm-depolarizing")


def bb84_fidelity(channel, p3: float = 1.0, omegas: OmegaTriple | None = None) -> AnalyticResult:
    """Average over |0>, |1>, |+>, |->; no state is a Y eigenstate so Omega_2 drops out."""
    channel = Channel(channel)
    if channel is Channel.DAMPING:
        return AnalyticResult(0.25 * (2 + math.sqrt(p3) + p3), "bb84-damping")
    if channel is Channel.DEPHASING:
        return AnalyticResult(0.25 * (3 + p3), "bb84-dephasing")
    o1, _, o3 = _need(omegas)
    return AnalyticResult(0.25 * (2 + o1 + o3), "bb84-depolarizing", QUARTER_NOTE)


def b92_fidelity(channel, p3: float = 1.0, omegas: OmegaTriple | None = None) -> AnalyticResult:
    """Average over |0> and |+>."""
    channel = Channel(channel)
    if channel is Channel.DAMPING:
        return AnalyticResult(0.25 * (3 + math.sqrt(p3)), "b92-damping", DERIVED_NOTE)
    if channel is Channel.DEPHASING:
        return AnalyticResult(0.25 * (3 + p3), "b92-dephasing", DERIVED_NOTE)
    o1, _, o3 = _need(omegas)
    return AnalyticResult(0.25 * (2 + o1 + o3), "b92-depolarizing", DERIVED_NOTE)


def ekert_fidelity(
    channel,
    p1: float = 1.0,
    p2: float = 1.0,
    omegas: OmegaTriple | None = None,
    kind: BellKind = BellKind.PSI_PLUS,
) -> AnalyticResult:
    """Both halves of the pair travel once from the source (p3 = p4 = 1)."""
    channel = Channel(channel)
    ps = SlotPs(p1, p2, 1.0, 1.0)
    if channel is Channel.DAMPING:
        r = cqd_damping(ps, kind)
        return AnalyticResult(r.value, r.formula.replace("cqd", "ekert"))
    if channel is Channel.DEPHASING:
        return AnalyticResult(cqd_dephasing(ps).value, "ekert-dephasing")
    return _depol(_need(omegas), 2, "ekert-depolarizing", DERIVED_NOTE)


def _need(omegas):
    if omegas is None:
        raise ConfigurationError("depolarizing evaluation needs an Omega triple")
    return omegas


def analytic_fidelity(protocol, assignment: SlotAssignment, t: float, kind: BellKind | None = None) -> AnalyticResult:
    """Evaluate the closed form matching ``protocol`` and the assignment's channel at ``t``."""
    protocol = Protocol.parse(protocol)
    if not isinstance(assignment, SlotAssignment):
        raise ConfigurationError("assignment must be a SlotAssignment")
    if kind is not None and not protocol.uses_bell_state:
        raise ConfigurationError(f"{protocol.value} does not start from a Bell state")
    kind = BellKind(kind) if kind is not None else BellKind.PSI_PLUS
    channel = assignment.channel or Channel.DEPHASING

    if channel is Channel.DEPOLARIZING:
        om = assignment.omegas(t)
        if protocol is Protocol.CQD:
            return cqd_depolarizing(om)
        if protocol is Protocol.CDSQC:
            return cdsqc_depolarizing(om)
        if protocol in QD_FAMILY:
            return qd_family(channel, omegas=om)
        if protocol is Protocol.EKERT:
            return ekert_fidelity(channel, omegas=om, kind=kind)
        return _single_round(protocol)(channel, omegas=om)

    ps = SlotPs(*assignment.p_values(t))
    damping = channel is Channel.DAMPING
    if protocol is Protocol.CQD:
        return cqd_damping(ps, kind) if damping else cqd_dephasing(ps)
    if protocol is Protocol.CDSQC:
        return cdsqc_damping(ps, kind) if damping else cdsqc_dephasing(ps)
    if protocol is Protocol.DSQC:
        # qubit 2's trip (slot 2) plays the role of the return round
        return qd_family(channel, p3=ps.p3, p4=ps.p2)
    if protocol in QD_FAMILY:
        return qd_family(channel, p3=ps.p3, p4=ps.p4)
    if protocol is Protocol.EKERT:
        return ekert_fidelity(channel, p1=ps.p1, p2=ps.p2, kind=kind)
    return _single_round(protocol)(channel, p3=ps.p3)


QD_FAMILY = frozenset({Protocol.QD, Protocol.QSDC, Protocol.DSQC, Protocol.QKA})


def _single_round(protocol: Protocol):
    if protocol is Protocol.BBM:
        return bbm_fidelity
    if protocol is Protocol.BB84:
        return bb84_fidelity
    return b92_fidelity
