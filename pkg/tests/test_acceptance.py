"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""

import io
import math

import numpy as np
import pytest

from nmqcrypt import analytic
from nmqcrypt.analytic import SlotPs, analytic_fidelity
from nmqcrypt.cli import run_figure
from nmqcrypt.density import BellKind
from nmqcrypt.noise import (
    Channel,
    DecoherenceParams,
    DepolarizingParams,
    damping_kraus,
    damping_p,
    dephasing_kraus,
    dephasing_p,
    depolarizing_omegas,
    raw_depolarizing_probs,
)
from nmqcrypt.presets import PRESETS
from nmqcrypt.protocols import Protocol, SlotAssignment, SlotNoise, oracle_fidelity, schedule_for
from nmqcrypt.sweep import DEPOL_BOUND_RATIO, INHOMOGENEOUS_RATIOS, REGIME_RATIOS, verify_all

BELL_PROTOCOLS = [p for p in Protocol if p.uses_bell_state]


@pytest.fixture(scope="module")
def report():
    return verify_all(density=100)


def _uniform(channel, ratio):
    return SlotAssignment.per_slot(channel, {s: ratio for s in (1, 2, 3, 4)})


def _local_maxima(values, prominence):
    """Indices of interior 3-point maxima whose topographic prominence is at least ``prominence``."""
    peaks = []
    for i in range(1, len(values) - 1):
        if not (values[i] >= values[i - 1] and values[i] > values[i + 1]):
            continue
        # lowest point between the peak and the nearest higher sample (or the edge) on each side
        higher_left = np.nonzero(values[:i] > values[i])[0]
        higher_right = np.nonzero(values[i + 1:] > values[i])[0]
        lo = higher_left[-1] if higher_left.size else 0
        hi = i + 1 + higher_right[0] if higher_right.size else len(values) - 1
        base = max(values[lo: i + 1].min(), values[i: hi + 1].min())
        if values[i] - base >= prominence:
            peaks.append(i)
    return peaks


def test_criterion_01_oracle_equivalence(report, criterion):
    standard = [c for c in report.cases if c.regime in REGIME_RATIOS]
    covered = {(c.protocol, c.channel, c.regime) for c in standard}
    kinds_damping = {
        (c.protocol, c.initial) for c in standard if c.channel is Channel.DAMPING and c.protocol in BELL_PROTOCOLS
    }
    need_kinds = all(
        (p, k) in kinds_damping for p in (Protocol.CQD, Protocol.CDSQC, Protocol.EKERT) for k in BellKind
    )
    worst = max(c.max_abs_diff for c in report.cases)
    ok = len(covered) == 10 * 3 * 3 and need_kinds and worst <= 1e-10
    criterion(
        1,
        ok,
        f"{len(report.cases)} cases ({len(covered)} protocol/channel/regime triples, all Bell kinds), "
        f"100 points each, worst |analytic-oracle| = {worst:.2e} (tol 1e-10)",
    )
    assert ok


def test_criterion_02_normalization(report, criterion):
    f0 = [abs(c.f0_oracle - 1) for c in report.cases]
    rng = np.random.default_rng(2)
    dev_quarter, dev_half = [], []
    schedule = schedule_for(Protocol.CQD)
    for _ in range(25):
        ratios = tuple(rng.uniform(0.05, 0.5, size=3))
        t = float(rng.uniform(0, 10))
        a = SlotAssignment(depolarizing=DepolarizingParams(ratios))
        om = a.omegas(t)
        oracle = oracle_fidelity(schedule, a, t)
        dev_quarter.append(abs(0.25 * (1 + sum(o**4 for o in om)) - oracle))
        dev_half.append(abs(0.5 * (1 + sum(o**4 for o in om)) - oracle))
    recorded = any("printed 1/2 gives F(0)=2" in n.line() for n in report.normalization)
    ok = max(f0) <= 1e-12 and max(dev_quarter) <= 1e-12 and min(dev_half) > 1e-3 and recorded
    criterion(
        2,
        ok,
        f"max |F_oracle(0)-1| = {max(f0):.1e}; 25 random depolarizing CQD points: "
        f"max |1/4 form - oracle| = {max(dev_quarter):.1e}, min |1/2 form - oracle| = {min(dev_half):.3f}",
    )
    assert ok


def test_criterion_03_cptp(criterion):
    times = np.linspace(0, 100, 200)
    worst_completeness = 0.0
    for ratio in REGIME_RATIOS.values():
        params = DecoherenceParams.from_ratio(ratio)
        for t in times:
            worst_completeness = max(
                worst_completeness,
                damping_kraus(damping_p(params, t)).completeness_defect(),
                dephasing_kraus(dephasing_p(params, t)).completeness_defect(),
            )
    worst_sum, worst_min = 0.0, math.inf
    depol_times = np.linspace(0, 40, 4001)
    for ratios in ((DEPOL_BOUND_RATIO,) * 3, INHOMOGENEOUS_RATIOS):
        params = DepolarizingParams(ratios)
        for t in depol_times:
            probs = raw_depolarizing_probs(depolarizing_omegas(params, t))
            worst_sum = max(worst_sum, abs(sum(probs) - 1))
            worst_min = min(worst_min, min(probs))
    ok = worst_completeness <= 1e-12 and worst_sum <= 1e-12 and worst_min >= -1e-12
    criterion(
        3,
        ok,
        f"Kraus completeness defect {worst_completeness:.1e}; depolarizing |sum P - 1| {worst_sum:.1e}, "
        f"min P_i {worst_min:.2e} at gamma=c={DEPOL_BOUND_RATIO:.6f} and (0.2, 0.2, 5)",
    )
    assert ok


def test_criterion_04_revival(criterion):
    times = np.linspace(0, 100, 10001)[1:]
    a = SlotAssignment.per_slot(Channel.DAMPING, {3: 0.01})
    values = np.array([analytic_fidelity(Protocol.BBM, a, t).value for t in times])
    peaks = _local_maxima(values, 1e-4)
    expected = 2 * math.pi / DecoherenceParams.from_ratio(0.01).d.real
    first = times[peaks[0]] if peaks else math.nan
    ok = len(peaks) >= 2 and abs(first - expected) <= 0.05 * expected
    criterion(4, ok, f"{len(peaks)} revival peaks, first at gamma t = {first:.3f} (expected {expected:.3f} +- 5%)")
    assert ok


def test_criterion_05_markovian_monotone(criterion):
    times = np.linspace(0, 20, 400)
    peaks, worst_rise_default, count = 0, -math.inf, 0
    rising = set()
    for channel in (Channel.DAMPING, Channel.DEPHASING):
        a = _uniform(channel, REGIME_RATIOS["markovian"])
        for protocol in Protocol:
            for kind in (BellKind if protocol.uses_bell_state else [None]):
                values = np.array([analytic_fidelity(protocol, a, t, kind).value for t in times])
                peaks += len(_local_maxima(values, 1e-9))
                count += 1
                rise = float(np.diff(values).max())
                if kind in (None, BellKind.PSI_PLUS):
                    worst_rise_default = max(worst_rise_default, rise)
                elif rise > 1e-9:
                    rising.add(f"{protocol.value}/{kind.value}")
    ok = peaks == 0 and worst_rise_default <= 1e-9
    criterion(
        5,
        ok,
        f"{count} Markovian curves, {peaks} local maxima above prominence 1e-9; default-state curves "
        f"largest step increase {worst_rise_default:.1e}; late recovery toward 1/4 (no peak) in "
        f"{', '.join(sorted(rising)) or 'none'}",
    )
    assert ok


def test_criterion_06_dephasing_asymptote(criterion):
    a = _uniform(Channel.DEPHASING, 0.01)
    f = analytic_fidelity(Protocol.CQD, a, 100.0).value
    f_oracle = oracle_fidelity(schedule_for(Protocol.CQD), a, 100.0)
    ok = abs(f - 0.5) <= 1e-6 and abs(f_oracle - 0.5) <= 1e-6
    criterion(6, ok, f"F_CQD,dephasing(gamma t = 100) = {f:.12f}, |F - 1/2| = {abs(f - 0.5):.1e}")
    assert ok


def test_criterion_07_protocol_ordering(criterion):
    order = [Protocol.CQD, Protocol.CDSQC, Protocol.QD, Protocol.BBM, Protocol.BB84]
    family = [Protocol.QD, Protocol.QSDC, Protocol.DSQC, Protocol.QKA]
    worst_violation, worst_family = -math.inf, 0.0
    for p in np.linspace(0.001, 0.999, 500):
        eta = 1 - p * p
        a = SlotAssignment({s: SlotNoise(Channel.DEPHASING, eta=eta) for s in (1, 2, 3, 4)})
        values = [analytic_fidelity(proto, a, 0.0).value for proto in order]
        worst_violation = max(worst_violation, max(x - y for x, y in zip(values, values[1:])))
        fam = [analytic_fidelity(proto, a, 0.0).value for proto in family]
        worst_family = max(worst_family, max(fam) - min(fam))
    ok = worst_violation <= 1e-12 and worst_family <= 1e-12
    criterion(
        7,
        ok,
        f"500 equal-p dephasing points: max step down the order {worst_violation:.2e}, "
        f"QD-family spread {worst_family:.1e}",
    )
    assert ok


def test_criterion_08_reductions(criterion):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(1000):
        p1, p2, p3, p4 = rng.uniform(0, 1, size=4)
        ps = SlotPs(p1, p2, p3, p4)
        for kind in (BellKind.PSI_PLUS, BellKind.PHI_PLUS):
            worst = max(
                worst,
                abs(analytic.cdsqc_damping(ps, kind).value - analytic.cqd_damping(SlotPs(p1, p2, 1, p4), kind).value),
                abs(analytic.qd_family(Channel.DAMPING, p3, p4).value - analytic.cqd_damping(SlotPs(1, 1, p3, p4), kind).value),
            )
        worst = max(
            worst,
            abs(analytic.cdsqc_dephasing(ps).value - analytic.cqd_dephasing(SlotPs(p1, p2, 1, p4)).value),
            abs(analytic.qd_family(Channel.DEPHASING, p3, p4).value - analytic.cqd_dephasing(SlotPs(1, 1, p3, p4)).value),
            abs(analytic.bbm_fidelity(Channel.DAMPING, p3).value - analytic.cqd_damping(SlotPs(1, 1, p3, 1)).value),
            abs(analytic.bbm_fidelity(Channel.DEPHASING, p3).value - analytic.cqd_dephasing(SlotPs(1, 1, p3, 1)).value),
        )
    ok = worst <= 1e-14
    criterion(8, ok, f"1000 random SlotPs draws, worst reduction mismatch {worst:.1e} (tol 1e-14)")
    assert ok


def test_criterion_09_bell_kind_claims(criterion):
    rng = np.random.default_rng(9)
    deph_spread = family_spread = 0.0
    for _ in range(20):
        t = float(rng.uniform(0, 50))
        ratios = dict(zip((1, 2, 3, 4), rng.uniform(0.005, 5, size=4)))
        deph = SlotAssignment.per_slot(Channel.DEPHASING, ratios)
        vals = [oracle_fidelity(schedule_for(Protocol.CQD, k), deph, t) for k in BellKind]
        vals += [analytic_fidelity(Protocol.CQD, deph, t, k).value for k in BellKind]
        deph_spread = max(deph_spread, max(vals) - min(vals))
        assignments = [
            SlotAssignment.per_slot(Channel.DAMPING, ratios),
            deph,
            SlotAssignment(depolarizing=DepolarizingParams(tuple(rng.uniform(0.05, 0.5, size=3)))),
        ]
        for a in assignments:
            for protocol in (Protocol.QD, Protocol.QSDC, Protocol.DSQC, Protocol.QKA):
                vals = [oracle_fidelity(schedule_for(protocol, k), a, t) for k in BellKind]
                family_spread = max(family_spread, max(vals) - min(vals))
    ps = SlotPs(0.3, 0.6, 0.9, 0.8)
    psi = analytic.cqd_damping(ps, BellKind.PSI_PLUS).value
    phi = analytic.cqd_damping(ps, BellKind.PHI_PLUS).value
    a = SlotAssignment({s: SlotNoise(Channel.DAMPING, eta=1 - p) for s, p in zip((1, 2, 3, 4), (0.3, 0.6, 0.9, 0.8))})
    psi_o = oracle_fidelity(schedule_for(Protocol.CQD, BellKind.PSI_PLUS), a, 0.0)
    phi_o = oracle_fidelity(schedule_for(Protocol.CQD, BellKind.PHI_PLUS), a, 0.0)
    gap = abs(psi - phi)
    ok = deph_spread <= 1e-12 and family_spread <= 1e-12 and gap > 1e-3 and abs(psi_o - phi_o) > 1e-3
    criterion(
        9,
        ok,
        f"dephasing CQD spread over Bell kinds {deph_spread:.1e}; QD family spread {family_spread:.1e}; "
        f"damping CQD psi vs phi at p=(0.3,0.6,0.9,0.8): {psi:.6f} vs {phi:.6f}",
    )
    assert ok


def _csv_valid(text):
    lines = text.splitlines()
    body = [line for line in lines if not line.startswith("#")]
    if not any(line.startswith("# ") and "=" in line for line in lines) or not body:
        return False
    header = body[0].split(",")
    if header not in (
        ["gamma_t", "fidelity_analytic"],
        ["gamma_t", "fidelity_oracle"],
        ["gamma_t", "fidelity_analytic", "fidelity_oracle", "abs_diff"],
        ["ratio", "gamma_t", "fidelity"],
    ):
        return False
    rows = np.loadtxt(io.StringIO("\n".join(body[1:])), delimiter=",", ndmin=2)
    fid_col = header.index("fidelity") if "fidelity" in header else 1
    return (
        rows.shape[1] == len(header)
        and np.isfinite(rows).all()
        and (rows[:, fid_col] >= 0).all()
        and (rows[:, fid_col] <= 1 + 1e-10).all()
    )


def test_criterion_10_figure_presets(tmp_path, criterion):
    bad, total = [], 0
    for name in PRESETS:
        for path in run_figure(name, tmp_path / name):
            total += 1
            if not _csv_valid(path.read_text()):
                bad.append(path.name)
    fig1d = {p.name.split("_", 2)[2].removesuffix(".csv"): p for p in (tmp_path / "fig1d").iterdir()}

    def column(path):
        body = [line for line in path.read_text().splitlines() if not line.startswith("#")][1:]
        return np.loadtxt(io.StringIO("\n".join(body)), delimiter=",")[:, 1]

    crossings = int((column(fig1d["damping-NMs"]) > column(fig1d["dephasing-NMs"])).sum())
    ok = not bad and crossings >= 1
    criterion(
        10,
        ok,
        f"{len(PRESETS)} presets, {total} CSV files, invalid: {bad or 'none'}; "
        f"fig1d damping above dephasing at {crossings} grid points",
    )
    assert ok
