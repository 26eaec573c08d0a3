from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class FidelityCurve:
    """Sampled fidelities on a time grid.

    ``analytic`` and ``oracle`` are optional so the same container serves the
    closed-form path, the brute-force path, or both side by side.
    """

    times: np.ndarray
    analytic: np.ndarray | None = None
    oracle: np.ndarray | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or self.times.size == 0:
            raise ValueError("a curve needs at least one time point")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name in ("analytic", "oracle"):
            values = getattr(self, name)
            if values is None:
                continue
            values = np.asarray(values, dtype=float)
            if values.shape != self.times.shape:
                raise ValueError(f"{name} has shape {values.shape}, expected {self.times.shape}")
            if np.any(values < 0) or np.any(values > 1 + 1e-10):
                raise ValueError(f"{name} fidelities outside [0, 1]")
            setattr(self, name, values)
        if self.analytic is None and self.oracle is None:
            raise ValueError("a curve needs analytic or oracle values")

    @property
    def fidelity(self) -> np.ndarray:
        """The analytic values when present, otherwise the oracle values."""
        return self.analytic if self.analytic is not None else self.oracle

    @property
    def abs_diff(self) -> np.ndarray | None:
        if self.analytic is None or self.oracle is None:
            return None
        return np.abs(self.analytic - self.oracle)

    @property
    def max_abs_diff(self) -> float | None:
        diff = self.abs_diff
        return None if diff is None else float(diff.max())


@dataclass
class FidelityGrid:
    """Fidelity over (line-width ratio, time); ``values[i, j]`` is at ratios[i], times[j]."""

    ratios: np.ndarray
    times: np.ndarray
    values: np.ndarray
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.ratios = np.asarray(self.ratios, dtype=float)
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.ratios.size, self.times.size):
            raise ValueError("values must have shape (len(ratios), len(times))")
