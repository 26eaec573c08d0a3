import csv
import io

import numpy as np
import pytest

from nmqcrypt import analytic
from nmqcrypt.curve import FidelityCurve, FidelityGrid
from nmqcrypt.density import BellKind
from nmqcrypt.noise import Channel
from nmqcrypt.presets import PRESETS, figure_preset, preset_names
from nmqcrypt.protocols import ConfigurationError, Protocol
from nmqcrypt.sweep import (
    DEPOL_BOUND_RATIO,
    GridConfig,
    RunConfig,
    check_case,
    csv_text,
    emit_csv,
    normalization_checks,
    run_grid,
    run_sweep,
    verification_assignments,
)


def _parse(text):
    meta, rows = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, value = line[2:].split("=", 1)
            meta[key] = value
        else:
            rows.append(line)
    return meta, list(csv.reader(rows))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(regime="fast"),
        dict(mode="fast"),
        dict(steps=1),
        dict(steps=2.5),
        dict(tmax=0),
        dict(tmax=float("inf")),
        dict(regime="strong", gamma_ratios=(0.1,) * 4),
        dict(regime="custom"),
        dict(regime="custom", gamma_ratios=(0.1, 0.1, None, 0.1)),
        dict(regime="custom", gamma_ratios=(0.1, 0.1, -1, 0.1)),
        dict(depol_ratios=(0.1, 0.1, 0.1), regime="markovian"),
    ],
)
def test_run_config_rejects(kwargs):
    with pytest.raises(ConfigurationError):
        RunConfig(Protocol.CQD, Channel.DAMPING, **kwargs)


def test_run_config_depolarizing_rules():
    with pytest.raises(ConfigurationError):
        RunConfig(Protocol.CQD, Channel.DEPOLARIZING, regime="custom")
    with pytest.raises(ConfigurationError):
        RunConfig(Protocol.CQD, Channel.DEPOLARIZING, regime="strong", depol_ratios=(0.1, 0.1, 0.1))
    with pytest.raises(ConfigurationError):
        RunConfig(Protocol.CQD, Channel.DEPOLARIZING, regime="custom", gamma_ratios=(0.1,) * 4)
    m = RunConfig(Protocol.CQD, Channel.DEPOLARIZING, regime="markovian", depol_ratios=(0.1, 0.2, 0.3))
    assert m.depolarizing_setting() == ((0.1, 0.2, 0.3), True)
    assert RunConfig(Protocol.CQD, Channel.DEPOLARIZING, regime="weak").depolarizing_setting()[0] == (
        DEPOL_BOUND_RATIO / 2,
    ) * 3


def test_run_config_single_qubit_initial():
    with pytest.raises(ConfigurationError):
        RunConfig(Protocol.BB84, Channel.DAMPING, initial=BellKind.PHI_PLUS)


def test_run_config_unused_slots_may_be_missing():
    cfg = RunConfig(Protocol.BBM, Channel.DAMPING, regime="custom", gamma_ratios=(None, None, 0.2, None))
    assert cfg.slot_ratios() == {3: 0.2}
    assert RunConfig(Protocol.CQD, Channel.DEPHASING, regime="weak").slot_ratios() == {s: 0.1 for s in (1, 2, 3, 4)}


def test_sweep_metadata_and_grid():
    cfg = RunConfig(Protocol.CQD, Channel.DAMPING, regime="weak", tmax=5, steps=11, initial=BellKind.PHI_PLUS)
    curve = run_sweep(cfg)
    assert np.allclose(curve.times, np.linspace(0, 5, 11))
    assert curve.analytic[0] == pytest.approx(1, abs=1e-12)
    assert curve.metadata["initial"] == "phi+"
    assert curve.metadata["time_axis"] == "gamma_t"
    depol = RunConfig(Protocol.BB84, Channel.DEPOLARIZING, steps=5).metadata()
    assert depol["time_axis"] == "Gamma_t" and "initial" not in depol


def test_csv_schema_analytic_and_both():
    cfg = RunConfig(Protocol.QD, Channel.DEPHASING, tmax=4, steps=5, mode="both", label="x")
    meta, rows = _parse(csv_text(run_sweep(cfg)))
    assert rows[0] == ["gamma_t", "fidelity_analytic", "fidelity_oracle", "abs_diff"]
    assert len(rows) == 6
    assert float(meta["max_abs_diff"]) <= 1e-10
    assert meta["protocol"] == "qd" and meta["label"] == "x"
    for row in rows[1:]:
        t, fa, fo, d = map(float, row)
        assert abs(fa - fo) == pytest.approx(d, abs=1e-17)
    _, rows = _parse(csv_text(run_sweep(RunConfig(Protocol.QD, Channel.DEPHASING, steps=3))))
    assert rows[0] == ["gamma_t", "fidelity_analytic"]
    _, rows = _parse(csv_text(run_sweep(RunConfig(Protocol.QD, Channel.DEPHASING, steps=3, mode="oracle"))))
    assert rows[0] == ["gamma_t", "fidelity_oracle"]


def test_csv_round_trips_full_precision(tmp_path):
    curve = run_sweep(RunConfig(Protocol.CQD, Channel.DAMPING, tmax=30, steps=7))
    path = tmp_path / "c.csv"
    emit_csv(curve, path)
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    _, rows = _parse(raw.decode())
    assert np.array_equal([float(r[1]) for r in rows[1:]], curve.analytic)
    buf = io.StringIO()
    emit_csv(curve, buf)
    assert buf.getvalue() == raw.decode()


def test_sweep_is_deterministic():
    cfg = RunConfig(Protocol.CDSQC, Channel.DEPOLARIZING, steps=50, mode="both")
    assert csv_text(run_sweep(cfg)) == csv_text(run_sweep(cfg))


def test_grid():
    grid = run_grid(GridConfig(Protocol.CQD, Channel.DEPHASING, (0.01, 0.02), tmax=10, steps=3))
    meta, rows = _parse(csv_text(grid))
    assert rows[0] == ["ratio", "gamma_t", "fidelity"]
    assert [r[0] for r in rows[1:]] == ["0.01"] * 3 + ["0.02"] * 3
    assert meta["ratio_count"] == "2"
    with pytest.raises(ConfigurationError):
        GridConfig(Protocol.CQD, Channel.DEPOLARIZING, (0.1,))
    with pytest.raises(ConfigurationError):
        GridConfig(Protocol.CQD, Channel.DAMPING, ())


def test_curve_validation():
    with pytest.raises(ValueError):
        FidelityCurve([0, 0], analytic=[1, 1])
    with pytest.raises(ValueError):
        FidelityCurve([0, 1], analytic=[1, 1.5])
    with pytest.raises(ValueError):
        FidelityCurve([0, 1])
    with pytest.raises(ValueError):
        FidelityGrid([0.1], [0, 1], np.zeros((2, 2)))
    c = FidelityCurve([0, 1], oracle=[1, 0.5])
    assert c.max_abs_diff is None and c.fidelity is c.oracle


@pytest.mark.parametrize("channel", list(Channel))
def test_verification_assignments_cover_regimes(channel):
    names = [name for name, _, _ in verification_assignments(channel)]
    assert names == ["strong", "weak", "markovian", "mixed"]


def test_check_case_detects_fault(monkeypatch):
    _, assignment, _ = verification_assignments(Channel.DEPOLARIZING)[0]
    times = np.linspace(0, 20, 10)
    assert check_case(Protocol.CQD, assignment, times, BellKind.PSI_PLUS).passed
    half = lambda om: analytic.AnalyticResult(0.5 * (1 + sum(o**4 for o in om)), "cqd-depolarizing")  # noqa: E731
    monkeypatch.setattr(analytic, "cqd_depolarizing", half)
    bad = check_case(Protocol.CQD, assignment, times, BellKind.PSI_PLUS)
    assert not bad.passed and bad.f0_analytic == 2.0
    assert bad.line().startswith("FAIL")


def test_normalization_checks():
    for check in normalization_checks(samples=5):
        assert check.printed_f0 == 2.0
        assert check.corrected_f0 == 1.0
        assert check.max_dev_corrected <= 1e-12
        assert check.max_dev_printed > 0.1


def test_presets_listed_and_errors():
    assert preset_names() == list(PRESETS)
    assert {"fig1a", "fig2b", "fig3a", "fig6c"} <= set(PRESETS)
    with pytest.raises(ConfigurationError, match="fig1a"):
        figure_preset("fig9z")
    assert len(figure_preset("fig1a")) == 9
    assert len(figure_preset("fig4a")) == 6
    assert len(figure_preset("fig5b")) == 30
    assert len(figure_preset("fig6a")) == 5


def test_fig1b_uses_phi_state():
    assert all(m.initial is BellKind.PHI_PLUS for m in figure_preset("fig1b"))
