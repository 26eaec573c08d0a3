"""Locate fidelity revival peaks of a protocol under non-Markovian damping.

Prints peak positions against the oscillation period 2 pi / d for a range of
line-width ratios, where d = sqrt(2 gamma Gamma - Gamma^2).
"""

from __future__ import annotations

import argparse

import numpy as np

from nmqcrypt import analytic_fidelity
from nmqcrypt.noise import Channel, DecoherenceParams
from nmqcrypt.protocols import Protocol, SlotAssignment


def peak_times(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    interior = (values[1:-1] >= values[:-2]) & (values[1:-1] > values[2:])
    return times[1:-1][interior]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--protocol", default="bbm")
    parser.add_argument("--ratios", type=float, nargs="+", default=[0.005, 0.01, 0.02, 0.05])
    parser.add_argument("--tmax", type=float, default=150.0)
    parser.add_argument("--steps", type=int, default=15001)
    args = parser.parse_args()

    protocol = Protocol.parse(args.protocol)
    times = np.linspace(0.0, args.tmax, args.steps)
    for ratio in args.ratios:
        assignment = SlotAssignment.per_slot(Channel.DAMPING, {s: ratio for s in (1, 2, 3, 4)})
        values = np.array([analytic_fidelity(protocol, assignment, t).value for t in times])
        period = 2 * np.pi / DecoherenceParams.from_ratio(ratio).d.real
        peaks = peak_times(times, values)
        shown = ", ".join(f"{t:.2f}" for t in peaks[:4]) or "none"
        print(f"Gamma/gamma={ratio:<6g} period={period:8.3f}  peaks at gamma t = {shown}")


if __name__ == "__main__":
    main()
