"""Entropy, mutual information, measurement-induced disturbance and
concurrence for arbitrary two-qubit density matrices.

All quantities are in bits.  Functions accept one 4x4 matrix or a stack
``(..., 4, 4)``.
"""
from dataclasses import dataclass, asdict

import numpy as np

from . import linalg
from .errors import InvalidState
from .models import ThermalPoint, build_hamiltonian, gibbs_state

ENTROPY_CLAMP = 1e-12
MID_SLACK = 1e-10

SPIN_FLIP = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])).real
COMPUTATIONAL_PROJECTORS = np.array([[[1, 0], [0, 0]], [[0, 0], [0, 1]]], dtype=complex)


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Local rank-1 projectors; ``projectors_a[..., k, :, :]`` is the k-th one."""

    projectors_a: np.ndarray
    projectors_b: np.ndarray

    def product_projectors(self):
        """The four products Pa_i (x) Pb_j, shape ``(..., 4, 4, 4)``."""
        pa = self.projectors_a[..., :, None, :, :]
        pb = self.projectors_b[..., None, :, :, :]
        ops = linalg.kron(pa, pb)
        return ops.reshape(ops.shape[:-4] + (4, 4, 4))


@dataclass
class CorrelationReport:
    """Correlation quantities for one point, or arrays of them for a batch."""

    logZ: object
    S_rho: object
    S_a: object
    S_b: object
    I_rho: object
    I_measured: object
    Q: object
    C: object

    def as_dict(self):
        return {k: (float(v) if np.ndim(v) == 0 else np.asarray(v))
                for k, v in asdict(self).items()}


def _xlog2x(p):
    safe = np.where(p > 0, p, 1.0)
    return np.where(p > 0, p * np.log2(safe), 0.0)


def entropy_of_spectrum(p):
    """Shannon entropy (bits) of eigenvalue arrays ``(..., n)``.

    Values in ``[-ENTROPY_CLAMP, 0)`` are treated as zero; anything more
    negative means the input was not a density matrix.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < -ENTROPY_CLAMP):
        bad = np.nonzero((p < -ENTROPY_CLAMP).any(axis=-1).ravel())[0]
        raise InvalidState("negative eigenvalue in density matrix", index=int(bad[0]))
    p = np.where(p < 0, 0.0, p)
    return -np.sum(_xlog2x(p), axis=-1)


def von_neumann_entropy(rho):
    """``S(rho) = -tr rho log2 rho`` in bits."""
    return entropy_of_spectrum(linalg.eigvalsh(rho))


def mutual_information(rho):
    """``I = S(rho_a) + S(rho_b) - S(rho)`` in bits."""
    return (von_neumann_entropy(linalg.partial_trace(rho, "A"))
            + von_neumann_entropy(linalg.partial_trace(rho, "B"))
            - von_neumann_entropy(rho))


def _eigenprojectors(sigma):
    # rank-1 spectral projectors of a 2x2 marginal, falling back to the
    # computational basis when the two eigenvalues coincide
    eig = linalg.eigh(sigma)
    vecs = eig.eigenvectors
    proj = np.einsum("...ik,...jk->...kij", vecs, np.conj(vecs))
    degenerate = (eig.eigenvalues[..., 1] - eig.eigenvalues[..., 0]) < linalg.DEGENERACY_GAP
    return np.where(degenerate[..., None, None, None], COMPUTATIONAL_PROJECTORS, proj)


def induced_measurement(rho) -> ProjectiveMeasurement:
    """Local measurement given by the spectral resolutions of both marginals.

    Degenerate marginals (eigenvalue gap below ``DEGENERACY_GAP``) use
    computational-basis projectors ``|i><i|``.
    """
    return ProjectiveMeasurement(
        _eigenprojectors(linalg.partial_trace(rho, "A")),
        _eigenprojectors(linalg.partial_trace(rho, "B")),
    )


def apply_measurement(rho, measurement: ProjectiveMeasurement):
    """Non-selective local measurement ``sum_ij P_ij rho P_ij``."""
    ops = measurement.product_projectors()
    rho = np.asarray(rho, dtype=complex)
    out = np.einsum("...kij,...jl,...klm->...im", ops, rho, ops)
    return 0.5 * (out + linalg.dagger(out))


def _clamp_mid(q):
    return np.where((q < 0) & (q >= -MID_SLACK), 0.0, q)


def mid(rho):
    """Measurement-induced disturbance ``Q = I(rho) - I(Pi(rho))`` in bits."""
    measured = apply_measurement(rho, induced_measurement(rho))
    return _clamp_mid(mutual_information(rho) - mutual_information(measured))


def wootters_lambdas(rho):
    """Square roots of the eigenvalues of ``rho S rho* S``, descending.

    They equal the singular values of ``sqrt(rho) S sqrt(rho)*``, which is
    how they are computed here.
    """
    root = linalg.matrix_function(linalg.eigh(rho), lambda w: np.sqrt(np.clip(w, 0.0, None)))
    x = root @ SPIN_FLIP @ np.conj(root)
    return linalg.singular_values(x)


def concurrence(rho):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``, clipped to [0, 1]."""
    lam = wootters_lambdas(rho)
    return np.clip(lam[..., 0] - lam[..., 1:].sum(axis=-1), 0.0, 1.0)


def analyze(rho, log_z=np.nan) -> CorrelationReport:
    """Every correlation quantity of ``rho`` (single or batched)."""
    rho = np.asarray(rho, dtype=complex)
    s_a = von_neumann_entropy(linalg.partial_trace(rho, "A"))
    s_b = von_neumann_entropy(linalg.partial_trace(rho, "B"))
    s_rho = von_neumann_entropy(rho)
    i_rho = s_a + s_b - s_rho
    measured = apply_measurement(rho, induced_measurement(rho))
    i_measured = mutual_information(measured)
    q = _clamp_mid(i_rho - i_measured)
    return CorrelationReport(
        logZ=log_z, S_rho=s_rho, S_a=s_a, S_b=s_b,
        I_rho=i_rho, I_measured=i_measured, Q=q, C=concurrence(rho),
    )


def thermal_report(hamiltonians, T) -> CorrelationReport:
    """Batched :func:`analyze` of Gibbs states ``exp(-H/T)/Z``."""
    state = gibbs_state(hamiltonians, T)
    return analyze(state.rho, state.log_z)


def correlation_report(point: ThermalPoint) -> CorrelationReport:
    report = thermal_report(build_hamiltonian(point.spec), point.T)
    return CorrelationReport(**{k: float(v) for k, v in asdict(report).items()})
