"""Two-qubit Hamiltonians and their Gibbs states.

Spin operators are Pauli matrices (eigenvalues +-1).  The basis is
``|11>, |10>, |01>, |00>`` where ``|1>`` is the sigma^z = +1 state.
"""
from dataclasses import dataclass
import math
from typing import NamedTuple, Union

import numpy as np

from . import linalg
from .errors import InvalidSpec, InvalidState, InvalidTemperature

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

DENSITY_ATOL = 1e-12


def _check_finite(**params):
    for name, value in params.items():
        if not math.isfinite(value):
            raise InvalidSpec(f"parameter {name} must be finite, got {value!r}")


@dataclass(frozen=True)
class XXZ:
    """Heisenberg XXZ pair in a uniform field ``B`` with inhomogeneity ``b``.

    H = 1/2 [J (XX + YY) + Jz ZZ + (B + b) Z1 + (B - b) Z2]
    """

    J: float
    Jz: float
    B: float
    b: float

    name = "xxz"
    parameters = ("J", "Jz", "B", "b")

    def __post_init__(self):
        _check_finite(J=self.J, Jz=self.Jz, B=self.B, b=self.b)
        if self.B < 0:
            raise InvalidSpec(f"uniform field B must be >= 0, got {self.B}")


@dataclass(frozen=True)
class XxxDM:
    """Isotropic XXX pair with a Dzyaloshinski-Moriya term ``D`` along z.

    H = J/2 [XX + YY + ZZ + D (X1 Y2 - Y1 X2)]
    """

    J: float
    D: float

    name = "dm"
    parameters = ("J", "D")

    def __post_init__(self):
        _check_finite(J=self.J, D=self.D)


HamiltonianSpec = Union[XXZ, XxxDM]
MODELS = {"xxz": XXZ, "dm": XxxDM}


def make_spec(model: str, **params) -> HamiltonianSpec:
    """Build a spec from a model name and keyword parameters."""
    try:
        cls = MODELS[model.lower()]
    except KeyError:
        raise InvalidSpec(f"unknown model {model!r}; choose from {sorted(MODELS)}") from None
    missing = [p for p in cls.parameters if p not in params]
    extra = [p for p in params if p not in cls.parameters]
    if missing or extra:
        raise InvalidSpec(f"model {model} takes {cls.parameters}; "
                          f"missing {missing}, unexpected {extra}")
    return cls(**{k: float(v) for k, v in params.items()})


@dataclass(frozen=True)
class ThermalPoint:
    spec: HamiltonianSpec
    T: float

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise InvalidTemperature(f"temperature must be positive and finite, got {self.T!r}")


def two_site(op1, op2):
    return np.kron(op1, op2)


def xxz_hamiltonian(J, Jz, B, b):
    """Vectorized XXZ Hamiltonian; parameters broadcast to shape ``(...)``."""
    J, Jz, B, b = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (J, Jz, B, b)))
    xx_yy = two_site(SIGMA_X, SIGMA_X) + two_site(SIGMA_Y, SIGMA_Y)
    zz = two_site(SIGMA_Z, SIGMA_Z)
    z1 = two_site(SIGMA_Z, IDENTITY_2)
    z2 = two_site(IDENTITY_2, SIGMA_Z)
    e = lambda x: x[..., None, None]
    return 0.5 * (e(J) * xx_yy + e(Jz) * zz + e(B + b) * z1 + e(B - b) * z2)


def dm_hamiltonian(J, D):
    """Vectorized XXX + DM Hamiltonian; parameters broadcast to shape ``(...)``."""
    J, D = np.broadcast_arrays(np.asarray(J, dtype=float), np.asarray(D, dtype=float))
    heis = sum(two_site(s, s) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z))
    dm_z = two_site(SIGMA_X, SIGMA_Y) - two_site(SIGMA_Y, SIGMA_X)
    e = lambda x: x[..., None, None]
    return 0.5 * e(J) * (heis + e(D) * dm_z)


def build_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    if isinstance(spec, XXZ):
        return xxz_hamiltonian(spec.J, spec.Jz, spec.B, spec.b)
    if isinstance(spec, XxxDM):
        return dm_hamiltonian(spec.J, spec.D)
    raise InvalidSpec(f"not a Hamiltonian spec: {spec!r}")


class GibbsState(NamedTuple):
    rho: np.ndarray
    log_z: np.ndarray


def gibbs_state(hamiltonian, T) -> GibbsState:
    """Thermal state ``exp(-H/T) / Z`` for a stack of Hamiltonians.

    Energies are shifted by the ground-state energy before exponentiation,
    so no Boltzmann weight exceeds 1; ``log_z`` is the natural log of the
    unshifted partition function.
    """
    T = np.asarray(T, dtype=float)
    if not np.all(np.isfinite(T) & (T > 0)):
        raise InvalidTemperature("temperature must be positive and finite")
    eig = linalg.eigh(hamiltonian)
    energies = eig.eigenvalues
    e0 = energies[..., :1]
    t = T[..., None]
    weights = np.exp(-(energies - e0) / t)
    total = weights.sum(axis=-1, keepdims=True)
    rho = linalg.matrix_function(eig, lambda w: np.exp(-(w - e0) / t) / total)
    log_z = -e0[..., 0] / T + np.log(total[..., 0])
    return GibbsState(rho, log_z)


def thermal_state(point: ThermalPoint) -> GibbsState:
    """Gibbs state of one parameter point (generic eigendecomposition route)."""
    return gibbs_state(build_hamiltonian(point.spec), point.T)


def check_density_matrix(rho, atol=DENSITY_ATOL):
    """Raise ``InvalidState`` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[-1]
    flat = rho.reshape((-1, n, n))
    herm = np.max(np.abs(flat - linalg.dagger(flat)), axis=(-2, -1))
    trace = np.abs(np.trace(flat, axis1=-2, axis2=-1) - 1.0)
    bad = (herm > atol) | (trace > atol)
    if bad.any():
        raise InvalidState("matrix is not Hermitian with unit trace", index=int(np.argmax(bad)))
    low = linalg.eigvalsh(flat)[:, 0]
    if (low < -atol).any():
        raise InvalidState("matrix has a negative eigenvalue", index=int(np.argmax(low < -atol)))
