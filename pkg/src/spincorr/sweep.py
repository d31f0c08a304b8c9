"""Parameter sweeps over the two models, figure presets and CSV output."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import io
import math
import os
from typing import Dict, Iterator, List, NamedTuple, Tuple

import numpy as np

from . import closed_forms
from .correlations import thermal_report
from .errors import (InvalidGrid, InvalidInput, InvalidState, MatrixOverflow,
                     NumericalFailure, SweepIOError)
from .models import dm_hamiltonian, xxz_hamiltonian

MODEL_PARAMETERS = {
    "xxz": ("J", "Jz", "B", "b", "T"),
    "dm": ("J", "D", "T"),
    # D = 0 model in the single variable x = exp(J/2T), closed form only
    "dm_isotropic": ("x",),
}
# points per work unit; fixed so results never depend on the thread count
CHUNK = 256
CSV_DIGITS = 12


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    step: float

    @property
    def count(self) -> int:
        return math.floor((self.stop - self.start) / self.step + 1e-9) + 1

    def values(self) -> np.ndarray:
        # rounding keeps decimal grids exact, e.g. b and -b stay negatives
        return np.round(self.start + self.step * np.arange(self.count), 12)

    def refined(self, density: int) -> "Axis":
        return replace(self, step=self.step / density)


def parse_axis(text: str) -> Axis:
    """Parse ``NAME=START:STOP:STEP`` (a bare ``NAME=VALUE`` gives one point)."""
    try:
        name, spec = text.split("=", 1)
        parts = [float(p) for p in spec.split(":")]
    except ValueError:
        raise InvalidInput(f"axis must look like NAME=START:STOP:STEP, got {text!r}") from None
    if len(parts) == 1:
        parts = [parts[0], parts[0], 1.0]
    if len(parts) != 3:
        raise InvalidInput(f"axis must look like NAME=START:STOP:STEP, got {text!r}")
    return Axis(name.strip(), *parts)


@dataclass(frozen=True)
class SweepGrid:
    model: str
    axes: Tuple[Axis, ...]
    fixed: Dict[str, float] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if self.model not in MODEL_PARAMETERS:
            raise InvalidGrid(f"unknown model {self.model!r}")
        if not 1 <= len(self.axes) <= 2:
            raise InvalidGrid("a sweep needs one or two axes")
        names = [a.name for a in self.axes] + list(self.fixed)
        wanted = MODEL_PARAMETERS[self.model]
        if sorted(names) != sorted(wanted):
            raise InvalidGrid(f"model {self.model} needs exactly {wanted} across axes "
                              f"and fixed values, got {names}")
        for a in self.axes:
            if not all(math.isfinite(v) for v in (a.start, a.stop, a.step)):
                raise InvalidGrid(f"axis {a.name} has non-finite bounds")
            if a.step <= 0 or a.start > a.stop:
                raise InvalidGrid(f"axis {a.name} needs step > 0 and start <= stop")
        for k, v in self.fixed.items():
            if not math.isfinite(v):
                raise InvalidGrid(f"fixed value {k} is not finite")
        temps = [a.values() for a in self.axes if a.name == "T"]
        temps += [np.array([self.fixed["T"]])] if "T" in self.fixed else []
        if any(np.any(t <= 0) for t in temps):
            raise InvalidGrid("all temperatures must be > 0")
        if self.model == "xxz":
            fields = [a.values() for a in self.axes if a.name == "B"]
            fields += [np.array([self.fixed["B"]])] if "B" in self.fixed else []
            if any(np.any(f < 0) for f in fields):
                raise InvalidGrid("uniform field B must be >= 0")
        if self.model == "dm_isotropic":
            xs = [a.values() for a in self.axes] + [np.array([self.fixed.get("x", 0.0)])]
            if any(np.any(x < 0) for x in xs):
                raise InvalidGrid("x must be >= 0")

    @property
    def axis_names(self) -> Tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def row_count(self) -> int:
        return math.prod(a.count for a in self.axes)

    @property
    def columns(self) -> Tuple[str, ...]:
        extra = ("Q", "C") if self.model == "dm_isotropic" else ("Q", "C", "logZ")
        return self.axis_names + extra

    def points(self) -> Dict[str, np.ndarray]:
        """Flat parameter arrays, first axis outermost."""
        mesh = np.meshgrid(*(a.values() for a in self.axes), indexing="ij")
        out = {a.name: m.ravel() for a, m in zip(self.axes, mesh)}
        for k, v in self.fixed.items():
            out[k] = np.full(self.row_count, float(v))
        return out

    def refined(self, density: int) -> "SweepGrid":
        if density < 1:
            raise InvalidGrid("grid density must be >= 1")
        return replace(self, axes=tuple(a.refined(density) for a in self.axes))

    def with_axes(self, overrides: Dict[str, Axis]) -> "SweepGrid":
        return replace(self, axes=tuple(overrides.get(a.name, a) for a in self.axes))


class SweepRow(NamedTuple):
    params: Dict[str, float]
    Q: float
    C: float
    logZ: float


@dataclass
class SweepResult:
    """Rows of a sweep stored column-wise; iterates as ``SweepRow``."""

    grid: SweepGrid
    params: Dict[str, np.ndarray]
    Q: np.ndarray
    C: np.ndarray
    logZ: np.ndarray

    def __len__(self):
        return len(self.Q)

    def __getitem__(self, i) -> SweepRow:
        return SweepRow({k: float(v[i]) for k, v in self.params.items()},
                        float(self.Q[i]), float(self.C[i]), float(self.logZ[i]))

    def __iter__(self) -> Iterator[SweepRow]:
        return (self[i] for i in range(len(self)))

    def column(self, name) -> np.ndarray:
        if name in self.params:
            return self.params[name]
        return getattr(self, name)


def _evaluate_chunk(model, params):
    if model == "dm_isotropic":
        x = params["x"]
        return (closed_forms.dm_isotropic_mid(x), closed_forms.dm_isotropic_concurrence(x),
                np.full(x.shape, np.nan))
    if model == "xxz":
        h = xxz_hamiltonian(params["J"], params["Jz"], params["B"], params["b"])
    else:
        h = dm_hamiltonian(params["J"], params["D"])
    report = thermal_report(h, params["T"])
    return report.Q, report.C, report.logZ


def evaluate_points(model: str, params: Dict[str, np.ndarray], threads: int = 1):
    """Q, C and log Z at each point of flat parameter arrays.

    Points are processed in fixed chunks of ``CHUNK``; the chunking and
    the output order are independent of ``threads``.
    """
    n = len(next(iter(params.values())))
    starts = range(0, n, CHUNK)

    def work(start):
        chunk = {k: v[start:start + CHUNK] for k, v in params.items()}
        try:
            return _evaluate_chunk(model, chunk)
        except (NumericalFailure, MatrixOverflow, InvalidState) as err:
            i = getattr(err, "index", None) or 0
            point = {k: float(v[i]) for k, v in chunk.items()}
            raise NumericalFailure(f"{err} at {model} point {point}", index=start + i) from err

    if threads > 1 and n > CHUNK:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return tuple(np.concatenate([p[j] for p in parts]) for j in range(3))


def run_sweep(grid: SweepGrid, threads: int = 1) -> SweepResult:
    params = grid.points()
    q, c, log_z = evaluate_points(grid.model, params, threads=threads)
    return SweepResult(grid, params, q, c, log_z)


FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")
FIG1_TEMPERATURES = (0.1, 0.4, 0.8, 1.5)
FIG2_JZ = (0.0, 0.4, 0.8)
FIG3_B_INHOMOGENEITY = (0.0, 0.8)
T_MIN = 1e-3


def figure_preset(fig_id: str) -> List[SweepGrid]:
    """Sweep grids reproducing one figure, one grid per panel/curve."""
    if fig_id == "fig1":
        return [SweepGrid("xxz", (Axis("b", -3, 3, 0.05),),
                          {"J": 1.0, "Jz": 0.0, "B": 0.0, "T": t}, label=f"T{t:g}")
                for t in FIG1_TEMPERATURES]
    if fig_id == "fig2":
        return [SweepGrid("xxz", (Axis("J", -3, 3, 0.05),),
                          {"Jz": jz, "B": 0.0, "b": 0.8, "T": 0.4}, label=f"Jz{jz:g}")
                for jz in FIG2_JZ]
    if fig_id == "fig3":
        return [SweepGrid("xxz", (Axis("B", 0, 3, 0.1), Axis("T", 0.1, 2, 0.1)),
                          {"J": 1.0, "Jz": 0.4, "b": b}, label=f"b{b:g}")
                for b in FIG3_B_INHOMOGENEITY]
    if fig_id == "fig4":
        return [SweepGrid("xxz", (Axis("b", -3, 3, 0.1), Axis("T", T_MIN, 2, 0.1)),
                          {"J": 1.0, "Jz": 0.8, "B": 0.0})]
    if fig_id == "fig5":
        return [SweepGrid("dm_isotropic", (Axis("x", 0, 5, 0.05),))]
    if fig_id == "fig6":
        return [SweepGrid("dm", (Axis("D", 0, 3, 0.1), Axis("J", -3, 3, 0.1)), {"T": 0.6})]
    raise InvalidInput(f"unknown figure {fig_id!r}; choose from {FIGURE_IDS}")


def _format(v) -> str:
    return format(float(v), f".{CSV_DIGITS}g")


def csv_text(result: SweepResult) -> str:
    cols = result.grid.columns
    lines = [",".join(cols)]
    data = [result.column(c) for c in cols]
    for i in range(len(result)):
        lines.append(",".join(_format(col[i]) for col in data))
    return "\n".join(lines) + "\n"


def emit_csv(result: SweepResult, destination) -> None:
    """Write a sweep as CSV: header row, LF line ends, 12 significant digits.

    ``destination`` is a path or a writable text stream.
    """
    if len(result) == 0:
        raise InvalidGrid("nothing to write: sweep has no rows")
    text = csv_text(result)
    if isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        destination.write(text)
        return
    path = os.fspath(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as err:
        raise SweepIOError(err.errno, f"cannot write {path}: {err.strerror}", path) from err


def read_csv(path) -> Tuple[List[str], np.ndarray]:
    """Read a file written by :func:`emit_csv`; returns (header, values)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    return header, np.array(rows)
