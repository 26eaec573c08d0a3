"""
Named run sets that regenerate the data behind each figure.

Figures 1 and 4 mix regimes between rounds: slots 1 and 2 (controller to
Bob) share one line-width ratio and slots 3 and 4 share another, unless
a figure calls for three independent rounds.
"""

from __future__ import annotations

import itertools
from typing import Union

from .noise import Channel
from .protocols import ConfigurationError, Protocol
from .density import BellKind
from .sweep import DEPOL_BOUND_RATIO, INHOMOGENEOUS_RATIOS, REGIME_RATIOS, GridConfig, RunConfig

PresetMember = Union[RunConfig, GridConfig]

SHORT = {"strong": "NMs", "weak": "NMw", "markovian": "M"}
FIG2_RATIOS = tuple(round(0.001 * k, 3) for k in range(1, 101))
FIG5_RATIOS = tuple(round(0.001 * k, 3) for k in range(1, 31))
FIG3A_FRACTIONS = (0.25, 0.5, 0.75, 1.0)
FIG6_PROTOCOLS = (Protocol.CQD, Protocol.CDSQC, Protocol.QD, Protocol.BBM, Protocol.BB84)


def _two_round(protocol, channel, initial, tmax) -> list[RunConfig]:
    out = []
    for first, second in itertools.product(SHORT, repeat=2):
        a, b = REGIME_RATIOS[first], REGIME_RATIOS[second]
        out.append(
            RunConfig(
                protocol,
                channel,
                regime="custom",
                gamma_ratios=(a, a, b, b),
                initial=initial,
                tmax=tmax,
                label=f"{SHORT[first]}-{SHORT[second]}",
            )
        )
    return out


# (slot1, slot2, slot4) regimes for the three rounds of CDSQC
CDSQC_ROUNDS = (
    ("strong", "strong", "strong"),
    ("weak", "weak", "weak"),
    ("markovian", "markovian", "markovian"),
    ("strong", "strong", "markovian"),
    ("markovian", "markovian", "strong"),
    ("strong", "weak", "markovian"),
)


def _three_round(channel, initial) -> list[RunConfig]:
    out = []
    for r1, r2, r4 in CDSQC_ROUNDS:
        ratios = (REGIME_RATIOS[r1], REGIME_RATIOS[r2], None, REGIME_RATIOS[r4])
        out.append(
            RunConfig(
                Protocol.CDSQC,
                channel,
                regime="custom",
                gamma_ratios=ratios,
                initial=initial,
                tmax=20.0,
                label="-".join(SHORT[r] for r in (r1, r2, r4)),
            )
        )
    return out


def _depol_pair(protocol) -> list[RunConfig]:
    return [
        RunConfig(protocol, Channel.DEPOLARIZING, regime="custom", depol_ratios=INHOMOGENEOUS_RATIOS, tmax=20.0, label="NM"),
        RunConfig(protocol, Channel.DEPOLARIZING, regime="markovian", depol_ratios=INHOMOGENEOUS_RATIOS, tmax=20.0, label="M"),
    ]


def _fig1d() -> list[RunConfig]:
    return [
        RunConfig(Protocol.CQD, channel, regime=regime, tmax=100.0, label=f"{channel.value}-{SHORT[regime]}")
        for channel in (Channel.DAMPING, Channel.DEPHASING)
        for regime in ("strong", "markovian")
    ]


def _fig2(channels) -> list[GridConfig]:
    extra = {"axis_choice": "ratio 0.001..0.1 step 0.001, gamma_t 0..150 (ranges chosen here)"}
    return [GridConfig(Protocol.CQD, ch, FIG2_RATIOS, tmax=150.0, steps=301, label=ch.value, extra=extra) for ch in channels]


def _fig3a() -> list[RunConfig]:
    out = []
    for frac in FIG3A_FRACTIONS:
        ratios = (frac * DEPOL_BOUND_RATIO,) * 3
        out.append(RunConfig(Protocol.CQD, Channel.DEPOLARIZING, regime="custom", depol_ratios=ratios, tmax=20.0, label=f"{frac:g}c-NM"))
        out.append(RunConfig(Protocol.CQD, Channel.DEPOLARIZING, regime="markovian", depol_ratios=ratios, tmax=20.0, label=f"{frac:g}c-M"))
    return out


def _fig5(channel) -> list[RunConfig]:
    return [
        RunConfig(Protocol.CQD, channel, regime="custom", gamma_ratios=(r, r, r, r), tmax=100.0, label=f"ratio={r:g}")
        for r in FIG5_RATIOS
    ]


def _fig6(channel) -> list[RunConfig]:
    if channel is Channel.DEPOLARIZING:
        return [
            RunConfig(p, channel, regime="custom", depol_ratios=INHOMOGENEOUS_RATIOS, tmax=20.0, label=p.value)
            for p in FIG6_PROTOCOLS
        ]
    tmax = 100.0 if channel is Channel.DAMPING else 20.0
    return [RunConfig(p, channel, regime="strong", tmax=tmax, label=p.value) for p in FIG6_PROTOCOLS]


PRESETS = {
    "fig1a": lambda: _two_round(Protocol.CQD, Channel.DAMPING, BellKind.PSI_PLUS, 20.0),
    "fig1b": lambda: _two_round(Protocol.CQD, Channel.DAMPING, BellKind.PHI_PLUS, 20.0),
    "fig1c": lambda: _two_round(Protocol.CQD, Channel.DEPHASING, BellKind.PSI_PLUS, 20.0),
    "fig1d": _fig1d,
    "fig2a": lambda: _fig2((Channel.DAMPING,)),
    "fig2b": lambda: _fig2((Channel.DAMPING, Channel.DEPHASING)),
    "fig3a": _fig3a,
    "fig3b": lambda: _depol_pair(Protocol.CQD),
    "fig4a": lambda: _three_round(Channel.DAMPING, BellKind.PSI_PLUS),
    "fig4b": lambda: _three_round(Channel.DAMPING, BellKind.PHI_PLUS),
    "fig4c": lambda: _three_round(Channel.DEPHASING, BellKind.PSI_PLUS),
    "fig4d": lambda: _depol_pair(Protocol.CDSQC),
    "fig5a": lambda: _fig5(Channel.DAMPING),
    "fig5b": lambda: _fig5(Channel.DEPHASING),
    "fig6a": lambda: _fig6(Channel.DAMPING),
    "fig6b": lambda: _fig6(Channel.DEPHASING),
    "fig6c": lambda: _fig6(Channel.DEPOLARIZING),
}


def preset_names() -> list[str]:
    return list(PRESETS)


def figure_preset(name: str) -> list[PresetMember]:
    try:
        build = PRESETS[name.strip().lower()]
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; valid names: {', '.join(PRESETS)}") from None
    return build()
