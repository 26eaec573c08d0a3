"""
Run configurations, time sweeps, CSV output and the oracle cross-check.

Damping and dephasing runs are parameterised by the line-width ratio
Gamma/gamma of each slot and sampled on the dimensionless axis gamma*t
(gamma = 1). Depolarizing runs are parameterised by the three ratios
gamma_i/Gamma_i and sampled on Gamma*t (Gamma = 1).
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

import numpy as np

from . import analytic
from .curve import FidelityCurve, FidelityGrid
from .density import BellKind
from .noise import Channel, DepolarizingParams, homogeneous_depol_bound
from .protocols import (
    ConfigurationError,
    Protocol,
    SlotAssignment,
    oracle_fidelity,
    schedule_for,
)

REGIME_RATIOS = {"strong": 0.01, "weak": 0.1, "markovian": 5.0}
REGIMES = ("strong", "weak", "markovian", "custom")
MODES = ("analytic", "oracle", "both")

# gamma/Gamma at the edge of complete positivity for homogeneous depolarizing noise
DEPOL_BOUND_RATIO = homogeneous_depol_bound(1.0)
INHOMOGENEOUS_RATIOS = (0.2, 0.2, 5.0)

# (ratios, markovian) per regime for depolarizing runs
DEPOL_REGIMES = {
    "strong": (INHOMOGENEOUS_RATIOS, False),
    "weak": ((DEPOL_BOUND_RATIO / 2,) * 3, False),
    "markovian": (INHOMOGENEOUS_RATIOS, True),
}

AGREEMENT_TOL = 1e-10
F0_TOL = 1e-12


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def _short(x: float) -> str:
    # shortest round-trip form for metadata
    return repr(float(x))


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one fidelity curve.

    ``gamma_ratios`` holds Gamma/gamma for slots 1..4 and is only used by the
    ``custom`` regime; unused entries may be ``None``.
    """

    protocol: Protocol
    channel: Channel
    regime: str = "strong"
    gamma_ratios: tuple | None = None
    depol_ratios: tuple | None = None
    initial: BellKind | None = None
    tmax: float = 20.0
    steps: int = 400
    mode: str = "analytic"
    out: str | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        object.__setattr__(self, "channel", Channel(self.channel))
        if self.initial is not None:
            object.__setattr__(self, "initial", BellKind(self.initial))
        if self.regime not in REGIMES:
            raise ConfigurationError(f"regime must be one of {', '.join(REGIMES)}, got {self.regime!r}")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 2:
            raise ConfigurationError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not (self.tmax > 0 and math.isfinite(self.tmax)):
            raise ConfigurationError(f"tmax must be positive, got {self.tmax!r}")
        if self.initial is not None and not self.protocol.uses_bell_state:
            raise ConfigurationError(
                f"initial Bell state is meaningless for the single-qubit protocol {self.protocol.value}"
            )

        depol = self.channel is Channel.DEPOLARIZING
        if self.gamma_ratios is not None:
            if depol:
                raise ConfigurationError("slot line-width ratios do not apply to depolarizing runs")
            if self.regime != "custom":
                raise ConfigurationError(f"regime {self.regime!r} conflicts with explicit slot ratios")
            ratios = tuple(None if r is None else float(r) for r in self.gamma_ratios)
            if len(ratios) != 4 or any(r is not None and not r > 0 for r in ratios):
                raise ConfigurationError(f"need four positive slot ratios, got {self.gamma_ratios!r}")
            object.__setattr__(self, "gamma_ratios", ratios)
        if self.depol_ratios is not None:
            if not depol:
                raise ConfigurationError("depolarizing ratios given for a non-depolarizing channel")
            if self.regime in ("strong", "weak"):
                raise ConfigurationError(f"regime {self.regime!r} conflicts with explicit depolarizing ratios")
            object.__setattr__(self, "depol_ratios", tuple(float(r) for r in self.depol_ratios))
        if self.regime == "custom":
            if depol and self.depol_ratios is None:
                raise ConfigurationError("custom depolarizing runs need three ratios")
            if not depol:
                if self.gamma_ratios is None:
                    raise ConfigurationError("custom regime needs slot ratios")
                missing = [s for s in sorted(self.active_slots) if self.gamma_ratios[s - 1] is None]
                if missing:
                    raise ConfigurationError(f"no line-width ratio for slot(s) {missing}")
        # build once so that invalid parameters fail here rather than mid-sweep
        self.assignment()

    @property
    def active_slots(self) -> frozenset[int]:
        return schedule_for(self.protocol).active_slots

    @property
    def time_axis(self) -> str:
        return "Gamma_t" if self.channel is Channel.DEPOLARIZING else "gamma_t"

    def slot_ratios(self) -> dict[int, float]:
        """Gamma/gamma of every active slot."""
        if self.channel is Channel.DEPOLARIZING:
            return {}
        if self.regime == "custom":
            return {s: self.gamma_ratios[s - 1] for s in sorted(self.active_slots)}
        return {s: REGIME_RATIOS[self.regime] for s in sorted(self.active_slots)}

    def depolarizing_setting(self) -> tuple[tuple[float, float, float], bool]:
        if self.depol_ratios is not None:
            return self.depol_ratios, self.regime == "markovian"
        return DEPOL_REGIMES[self.regime]

    def assignment(self) -> SlotAssignment:
        if self.channel is Channel.DEPOLARIZING:
            ratios, markovian = self.depolarizing_setting()
            return SlotAssignment(depolarizing=DepolarizingParams(ratios, 1.0), markovian=markovian)
        return SlotAssignment.per_slot(self.channel, self.slot_ratios())

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.tmax, int(self.steps))

    def metadata(self) -> dict[str, str]:
        meta = {
            "protocol": self.protocol.value,
            "channel": self.channel.value,
            "regime": self.regime,
        }
        if self.channel is Channel.DEPOLARIZING:
            ratios, markovian = self.depolarizing_setting()
            meta["depol_ratios"] = ",".join(_short(r) for r in ratios)
            meta["depol_model"] = "markovian" if markovian else "non-markovian"
        else:
            meta["slot_ratios"] = ",".join(f"slot{s}={_short(r)}" for s, r in self.slot_ratios().items())
        if self.protocol.uses_bell_state:
            meta["initial"] = (self.initial or BellKind.PSI_PLUS).value
        meta.update(
            {
                "tmax": _short(self.tmax),
                "steps": str(int(self.steps)),
                "mode": self.mode,
                "time_axis": self.time_axis,
            }
        )
        if self.label:
            meta["label"] = self.label
        return meta


@dataclass(frozen=True)
class GridConfig:
    """Fidelity surface over uniform line-width ratio Gamma/gamma and gamma*t."""

    protocol: Protocol
    channel: Channel
    ratios: tuple[float, ...]
    tmax: float = 150.0
    steps: int = 301
    initial: BellKind | None = None
    label: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        object.__setattr__(self, "channel", Channel(self.channel))
        if self.channel is Channel.DEPOLARIZING:
            raise ConfigurationError("grids are defined for damping and dephasing only")
        if not self.ratios or any(not r > 0 for r in self.ratios):
            raise ConfigurationError("grid ratios must be positive")
        if self.steps < 2 or not self.tmax > 0:
            raise ConfigurationError("grid needs steps >= 2 and tmax > 0")


def run_sweep(config: RunConfig) -> FidelityCurve:
    """Sample the configured protocol over a uniform time grid."""
    times = config.times()
    assignment = config.assignment()
    kind = config.initial if config.protocol.uses_bell_state else None
    analytic_values = oracle_values = None
    if config.mode in ("analytic", "both"):
        analytic_values = np.array(
            [analytic.analytic_fidelity(config.protocol, assignment, t, kind).value for t in times]
        )
    if config.mode in ("oracle", "both"):
        schedule = schedule_for(config.protocol, kind)
        oracle_values = np.array([oracle_fidelity(schedule, assignment, t) for t in times])
    curve = FidelityCurve(times, analytic_values, oracle_values, config.metadata())
    if curve.max_abs_diff is not None:
        curve.metadata["max_abs_diff"] = format(curve.max_abs_diff, ".3e")
    return curve


def run_grid(config: GridConfig) -> FidelityGrid:
    times = np.linspace(0.0, config.tmax, int(config.steps))
    values = np.empty((len(config.ratios), times.size))
    kind = config.initial if config.protocol.uses_bell_state else None
    for i, ratio in enumerate(config.ratios):
        assignment = SlotAssignment.per_slot(config.channel, {s: ratio for s in (1, 2, 3, 4)})
        values[i] = [analytic.analytic_fidelity(config.protocol, assignment, t, kind).value for t in times]
    meta = {
        "protocol": config.protocol.value,
        "channel": config.channel.value,
        "ratio_axis": "Gamma/gamma (all slots)",
        "ratio_min": _short(min(config.ratios)),
        "ratio_max": _short(max(config.ratios)),
        "ratio_count": str(len(config.ratios)),
        "tmax": _short(config.tmax),
        "steps": str(int(config.steps)),
        "time_axis": "gamma_t",
    }
    if config.protocol.uses_bell_state:
        meta["initial"] = (config.initial or BellKind.PSI_PLUS).value
    if config.label:
        meta["label"] = config.label
    meta.update(config.extra)
    return FidelityGrid(config.ratios, times, values, meta)


def _write_rows(fh: TextIO, result: Union[FidelityCurve, FidelityGrid]) -> None:
    for key, value in result.metadata.items():
        fh.write(f"# {key}={value}\n")
    if isinstance(result, FidelityGrid):
        fh.write("ratio,gamma_t,fidelity\n")
        for i, ratio in enumerate(result.ratios):
            for j, t in enumerate(result.times):
                fh.write(f"{_fmt(ratio)},{_fmt(t)},{_fmt(result.values[i, j])}\n")
        return
    columns = [result.times]
    if result.analytic is not None and result.oracle is not None:
        fh.write("gamma_t,fidelity_analytic,fidelity_oracle,abs_diff\n")
        columns += [result.analytic, result.oracle, result.abs_diff]
    elif result.analytic is not None:
        fh.write("gamma_t,fidelity_analytic\n")
        columns.append(result.analytic)
    else:
        fh.write("gamma_t,fidelity_oracle\n")
        columns.append(result.oracle)
    for row in zip(*columns):
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def emit_csv(result: Union[FidelityCurve, FidelityGrid], destination) -> None:
    """Write a curve or grid as CSV to a path or an open text stream.

    Metadata goes first as ``# key=value`` lines; numbers use 17 significant
    digits and lines end in LF.
    """
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            _write_rows(fh, result)
    else:
        _write_rows(destination, result)


def csv_text(result: Union[FidelityCurve, FidelityGrid]) -> str:
    buf = io.StringIO()
    _write_rows(buf, result)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# oracle cross-check


@dataclass
class CaseResult:
    protocol: Protocol
    channel: Channel
    regime: str
    initial: BellKind | None
    max_abs_diff: float
    f0_analytic: float
    f0_oracle: float
    formula: str
    note: str | None = None

    @property
    def passed(self) -> bool:
        return (
            self.max_abs_diff <= AGREEMENT_TOL
            and abs(self.f0_analytic - 1.0) <= F0_TOL
            and abs(self.f0_oracle - 1.0) <= F0_TOL
        )

    def line(self) -> str:
        kind = self.initial.value if self.initial else "-"
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.protocol.value:6s} {self.channel.value:12s} {self.regime:9s} {kind:4s} "
            f"max|analytic-oracle|={self.max_abs_diff:.2e} "
            f"F0(analytic)={self.f0_analytic:.15g} F0(oracle)={self.f0_oracle:.15g}"
        )


@dataclass
class NormalizationCheck:
    """Corrected (1/4) against printed (1/2) depolarizing prefactor."""

    formula: str
    printed_f0: float
    corrected_f0: float
    max_dev_corrected: float
    max_dev_printed: float
    samples: int

    def line(self) -> str:
        return (
            f"{self.formula}: printed 1/2 gives F(0)={self.printed_f0:g}; corrected 1/4 gives "
            f"F(0)={self.corrected_f0:g}; over {self.samples} random points "
            f"max|corrected-oracle|={self.max_dev_corrected:.2e}, max|printed-oracle|={self.max_dev_printed:.3g}"
        )


@dataclass
class VerificationReport:
    cases: list[CaseResult]
    normalization: list[NormalizationCheck]
    density: int

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures and all(n.max_dev_corrected <= F0_TOL for n in self.normalization)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def render(self) -> str:
        out = [f"oracle vs closed form, {self.density} time points per case, tolerance {AGREEMENT_TOL:g}"]
        out += [c.line() for c in self.cases]
        out.append("")
        out.append("depolarizing normalization (printed prefactor 1/2 is inconsistent with F(0)=1):")
        out += ["  " + n.line() for n in self.normalization]
        notes = sorted({f"{c.formula}: {c.note}" for c in self.cases if c.note})
        if notes:
            out.append("")
            out.append("formula notes:")
            out += ["  " + n for n in notes]
        out.append("")
        failed = self.failures
        out.append(f"{len(self.cases) - len(failed)}/{len(self.cases)} cases passed")
        out.append("VERIFY PASS" if self.passed else "VERIFY FAIL")
        return "\n".join(out)


# slot ratios for the extra case where every slot differs, so slot mix-ups show up
MIXED_SLOT_RATIOS = (0.01, 0.1, 5.0, 0.03)
MIXED_DEPOL_RATIOS = (0.3, 0.5, 0.1)


def verification_assignments(channel: Channel) -> list[tuple[str, SlotAssignment, float]]:
    """(regime name, assignment, tmax) pairs covered by :func:`verify_all`."""
    out = []
    if channel is Channel.DEPOLARIZING:
        for regime, (ratios, markovian) in DEPOL_REGIMES.items():
            out.append((regime, SlotAssignment(depolarizing=DepolarizingParams(ratios), markovian=markovian), 20.0))
        out.append(("mixed", SlotAssignment(depolarizing=DepolarizingParams(MIXED_DEPOL_RATIOS)), 20.0))
        return out
    for regime, ratio in REGIME_RATIOS.items():
        out.append((regime, SlotAssignment.per_slot(channel, {s: ratio for s in (1, 2, 3, 4)}), 100.0))
    mixed = dict(zip((1, 2, 3, 4), MIXED_SLOT_RATIOS))
    out.append(("mixed", SlotAssignment.per_slot(channel, mixed), 100.0))
    return out


def check_case(protocol: Protocol, assignment: SlotAssignment, times: Iterable[float], kind: BellKind | None, regime: str = "") -> CaseResult:
    times = np.asarray(list(times), dtype=float)
    schedule = schedule_for(protocol, kind)
    diffs = []
    formula, note = "", None
    for t in times:
        a = analytic.analytic_fidelity(protocol, assignment, t, kind)
        formula, note = a.formula, a.note
        diffs.append(abs(a.value - oracle_fidelity(schedule, assignment, t)))
    f0a = analytic.analytic_fidelity(protocol, assignment, 0.0, kind).value
    f0o = oracle_fidelity(schedule, assignment, 0.0)
    return CaseResult(protocol, assignment.channel, regime, kind, float(max(diffs)), f0a, f0o, formula, note)


def normalization_checks(samples: int = 20, seed: int = 12345) -> list[NormalizationCheck]:
    """Compare 1/4 and 1/2 prefactors of the depolarizing closed forms with the oracle."""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(samples):
        ratios = tuple(rng.uniform(0.05, 0.5, size=3))
        t = float(rng.uniform(0.0, 10.0))
        points.append((SlotAssignment(depolarizing=DepolarizingParams(ratios)), t))
    checks = []
    for protocol in (Protocol.CQD, Protocol.CDSQC, Protocol.QD, Protocol.BBM, Protocol.BB84):
        schedule = schedule_for(protocol)
        dev_c, dev_p = [], []
        for assignment, t in points:
            corrected = analytic.analytic_fidelity(protocol, assignment, t).value
            oracle = oracle_fidelity(schedule, assignment, t)
            printed = _printed_half(protocol, assignment.omegas(t))
            dev_c.append(abs(corrected - oracle))
            dev_p.append(abs(printed - oracle))
        unit = (1.0, 1.0, 1.0)
        checks.append(
            NormalizationCheck(
                f"{protocol.value}-depolarizing",
                _printed_half(protocol, unit),
                analytic.analytic_fidelity(protocol, points[0][0], 0.0).value,
                max(dev_c),
                max(dev_p),
                samples,
            )
        )
    return checks


def _printed_half(protocol: Protocol, omegas) -> float:
    o1, o2, o3 = omegas
    if protocol is Protocol.BB84:
        return 0.5 * (2 + o1 + o3)
    power = {Protocol.CQD: 4, Protocol.CDSQC: 3, Protocol.QD: 2, Protocol.BBM: 1}[protocol]
    return 0.5 * (1 + o1**power + o2**power + o3**power)


def verify_all(density: int = 100) -> VerificationReport:
    """Cross-check every closed form against the oracle.

    Covers every protocol x channel x regime (strong, weak, markovian and a
    mixed-slot case) and every Bell state for Bell-pair protocols.
    """
    if density < 10:
        raise ValueError(f"grid density must be at least 10, got {density}")
    cases = []
    for channel in Channel:
        for regime, assignment, tmax in verification_assignments(channel):
            times = np.linspace(0.0, tmax, density)
            for protocol in Protocol:
                kinds = list(BellKind) if protocol.uses_bell_state else [None]
                for kind in kinds:
                    cases.append(check_case(protocol, assignment, times, kind, regime))
    return VerificationReport(cases, normalization_checks(), density)
