"""Cross-check of the eigendecomposition pipeline against the closed forms."""
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from . import closed_forms
from .sweep import evaluate_points

TOLERANCE = 1e-9
GRID_POINTS = 5
RANDOM_SAMPLES = 10_000

# sampling box per model: name -> (low, high)
RANGES = {
    "xxz": {"J": (-2.0, 2.0), "Jz": (-2.0, 2.0), "B": (0.0, 2.0),
            "b": (-2.0, 2.0), "T": (0.1, 2.0)},
    "dm": {"J": (-3.0, 3.0), "D": (0.0, 3.0), "T": (0.1, 2.0)},
}
CLOSED = {
    "xxz": (closed_forms.xxz_mid, closed_forms.xxz_concurrence),
    "dm": (closed_forms.dm_mid, closed_forms.dm_concurrence),
}


@dataclass(frozen=True)
class Deviation:
    label: str
    points: int
    max_dev: float
    worst: Dict[str, float]

    @property
    def ok(self) -> bool:
        return self.max_dev <= TOLERANCE


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    grid_density: int
    samples: int
    deviations: List[Deviation]

    @property
    def ok(self) -> bool:
        return all(d.ok for d in self.deviations)

    def text(self) -> str:
        lines = [f"verify seed={self.seed} grid-density={self.grid_density} "
                 f"samples={self.samples} tolerance={TOLERANCE:g}"]
        for d in self.deviations:
            at = ", ".join(f"{k}={v:.12g}" for k, v in d.worst.items())
            lines.append(f"{d.label:<6} points={d.points:<7d} max|dev|={d.max_dev:.3e} "
                         f"{'ok  ' if d.ok else 'FAIL'} worst at {at}")
        lines.append("result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines) + "\n"


def check_points(model: str, seed: int = 0, grid_density: int = 1,
                 samples: int = RANDOM_SAMPLES) -> Dict[str, np.ndarray]:
    """Regular grid (``5 * grid_density`` per axis) plus seeded uniform samples."""
    box = RANGES[model]
    axes = [np.linspace(lo, hi, GRID_POINTS * grid_density) for lo, hi in box.values()]
    mesh = np.meshgrid(*axes, indexing="ij")
    # one generator per model so the XXZ and DM draws do not depend on each other
    rng = np.random.default_rng([seed, list(RANGES).index(model)])
    out = {}
    for (name, (lo, hi)), m in zip(box.items(), mesh):
        out[name] = np.concatenate([m.ravel(), rng.uniform(lo, hi, samples)])
    return out


def compare(model: str, params: Dict[str, np.ndarray], threads: int = 1) -> List[Deviation]:
    q_gen, c_gen, _ = evaluate_points(model, params, threads=threads)
    q_fn, c_fn = CLOSED[model]
    result = []
    for name, gen, fn in (("Q", q_gen, q_fn), ("C", c_gen, c_fn)):
        dev = np.abs(gen - fn(**params))
        # nan compares false; treat it as the worst possible deviation
        dev = np.where(np.isnan(dev), np.inf, dev)
        i = int(np.argmax(dev))
        result.append(Deviation(f"{model.upper()}-{name}", len(dev), float(dev[i]),
                                {k: float(v[i]) for k, v in params.items()}))
    return result


def run_verification(seed: int = 0, grid_density: int = 1, threads: int = 1,
                     samples: int = RANDOM_SAMPLES) -> VerificationReport:
    """Max |generic - closed form| of Q and C for both models.

    The report depends only on ``seed``, ``grid_density`` and ``samples``.
    """
    if grid_density < 1:
        raise ValueError("grid density must be >= 1")
    if samples < 0:
        raise ValueError("samples must be >= 0")
    devs = []
    for model in RANGES:
        devs += compare(model, check_points(model, seed, grid_density, samples), threads)
    return VerificationReport(seed, grid_density, samples, devs)
