"""Dense Hermitian linear algebra for 2x2 and 4x4 matrices.

Every routine accepts a single matrix of shape ``(n, n)`` or a stack of
shape ``(..., n, n)`` and works on the trailing two axes.  Two-qubit
states use the basis ordering ``|11>, |10>, |01>, |00>`` so index 0 is
``|11>``.
"""
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidDimension, MatrixOverflow, NotHermitian, NumericalFailure

SUPPORTED_DIMS = (2, 4)
JACOBI_TOL = 1e-13
MAX_SWEEPS = 100
DEGENERACY_GAP = 1e-10
HERMITIAN_ATOL = 1e-10
# components below this magnitude count as zero for the phase convention
_ZERO = 1e-12
# off-diagonal entries below this (relative to the matrix norm) are not
# rotated; their phase cannot be formed without overflow
_NEGLIGIBLE = 1e-290


class HermitianEigen(NamedTuple):
    """Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def _as_square(a, dims=SUPPORTED_DIMS):
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2] or a.shape[-1] not in dims:
        raise InvalidDimension(
            f"expected square matrices of size {dims}, got shape {a.shape}")
    return a


def hermitize(a):
    """Return the Hermitian part ``(A + A^H) / 2``."""
    a = _as_square(a)
    return 0.5 * (a + dagger(a))


def _rotate_pair(a, v, p, q):
    # one complex Jacobi rotation on every matrix of the stack
    apq = a[:, p, q].copy()
    mag = np.abs(apq)
    active = mag > _NEGLIGIBLE
    safe = np.where(active, mag, 1.0)
    phase = np.where(active, apq / safe, 1.0)
    app = a[:, p, p].real.copy()
    aqq = a[:, q, q].real.copy()
    tau = (aqq - app) / (2.0 * safe)
    t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    sp = (s * phase)[:, None]
    sm = (s * np.conj(phase))[:, None]
    c = c[:, None]

    colp = a[:, :, p].copy()
    colq = a[:, :, q].copy()
    newp = c * colp - sm * colq
    newq = sp * colp + c * colq
    a[:, :, p] = newp
    a[:, :, q] = newq
    a[:, p, :] = np.conj(newp)
    a[:, q, :] = np.conj(newq)
    a[:, p, p] = app - t * mag
    a[:, q, q] = aqq + t * mag
    a[:, p, q] = 0.0
    a[:, q, p] = 0.0

    vp = v[:, :, p].copy()
    vq = v[:, :, q].copy()
    v[:, :, p] = c * vp - sm * vq
    v[:, :, q] = sp * vp + c * vq


def _jacobi(a):
    """Cyclic Jacobi on a stack ``(N, n, n)``; returns unsorted (w, V).

    Each matrix stops rotating as soon as its own off-diagonal norm drops
    below tolerance, so its result does not depend on the rest of the stack.
    """
    a = a.copy()
    count, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    offdiag = ~np.eye(n, dtype=bool)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    limit = JACOBI_TOL * np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    polished = np.zeros(count, dtype=bool)

    for sweep in range(MAX_SWEEPS + 1):
        off = np.sqrt(np.sum(np.abs(a[:, offdiag]) ** 2, axis=-1))
        unconverged = off > limit
        if sweep == MAX_SWEEPS and unconverged.any():
            raise NumericalFailure(
                f"Jacobi did not converge in {MAX_SWEEPS} sweeps",
                index=int(np.argmax(unconverged)))
        # one extra sweep after convergence takes the remainder to roundoff
        live_mask = unconverged | (~polished & (off > 0.0))
        polished |= ~unconverged
        live = np.nonzero(live_mask)[0]
        if live.size == 0:
            break
        sub_a = a[live]
        sub_v = v[live]
        for p, q in pairs:
            _rotate_pair(sub_a, sub_v, p, q)
        a[live] = sub_a
        v[live] = sub_v

    return np.diagonal(a, axis1=-2, axis2=-1).real.copy(), v


def _canonicalize(w, v):
    # ascending order; inside degenerate clusters order by the size of the
    # first nonzero component (earlier position first on ties), then make
    # that component real positive
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)

    lead = np.argmax(np.abs(v) > _ZERO, axis=-2)
    lead_val = np.take_along_axis(v, lead[:, None, :], axis=-2)[:, 0, :]
    split = np.diff(w, axis=-1) >= DEGENERACY_GAP
    cluster = np.concatenate(
        [np.zeros(w.shape[:-1] + (1,), dtype=int), np.cumsum(split, axis=-1)], axis=-1)
    perm = np.lexsort((lead, -np.abs(lead_val), cluster), axis=-1)
    w = np.take_along_axis(w, perm, axis=-1)
    v = np.take_along_axis(v, perm[:, None, :], axis=-1)
    lead_val = np.take_along_axis(lead_val, perm, axis=-1)

    size = np.abs(lead_val)
    v = v * np.conj(np.where(size > 0, lead_val / np.where(size > 0, size, 1.0), 1.0))[:, None, :]
    return w, v


def _eigh_any(a):
    """Jacobi eigendecomposition for any square size; ``a`` must be Hermitian."""
    batch = a.shape[:-2]
    n = a.shape[-1]
    flat = a.reshape((-1, n, n))
    # scale each matrix by a power of two near its norm; exact, and keeps
    # tiny or huge inputs away from underflow in the rotations
    norm = np.sqrt(np.sum(np.abs(flat) ** 2, axis=(-2, -1)))
    _, exponent = np.frexp(np.where(norm > 0, norm, 1.0))
    w, v = _jacobi(flat * np.ldexp(1.0, -exponent)[:, None, None])
    w, v = _canonicalize(np.ldexp(w, exponent[:, None]), v)
    return HermitianEigen(w.reshape(batch + (n,)), v.reshape(batch + (n, n)))


def eigh(a) -> HermitianEigen:
    """Eigendecomposition of Hermitian 2x2 or 4x4 matrices.

    Uses cyclic complex Jacobi rotations.  Eigenvalues are returned in
    ascending order with unitary eigenvectors in the columns; inside a
    degenerate cluster the order follows the vectors, so neighbours may
    be out of order by less than ``DEGENERACY_GAP``.  Within a
    cluster of eigenvalues closer than ``DEGENERACY_GAP`` the vectors are
    ordered by descending magnitude of their first nonzero component (ties
    go to the vector whose first nonzero component comes earlier), and
    every vector is phased so that this component is real and positive.

    Raises
    ------
    InvalidDimension
        Matrix size not in ``SUPPORTED_DIMS``.
    NotHermitian
        ``max|A - A^H| > HERMITIAN_ATOL``.
    NumericalFailure
        Jacobi failed to converge (not expected for these sizes).
    """
    a = _as_square(a)
    if a.size and np.max(np.abs(a - dagger(a))) > HERMITIAN_ATOL:
        raise NotHermitian("matrix is not Hermitian within %g" % HERMITIAN_ATOL)
    return _eigh_any(0.5 * (a + dagger(a)))


def eigvalsh(a):
    return eigh(a).eigenvalues


def matrix_function(eig: HermitianEigen, f: Callable) -> np.ndarray:
    """Apply a real function spectrally: ``V diag(f(w)) V^H``.

    ``f`` receives the eigenvalue array (shape ``(..., n)``) and must
    return an array of the same shape.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        fw = np.asarray(f(eig.eigenvalues), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise MatrixOverflow("matrix function is not finite on the spectrum; "
                             "shift the argument before exponentiating")
    vecs = eig.eigenvectors
    out = (vecs * fw[..., None, :]) @ dagger(vecs)
    return 0.5 * (out + dagger(out))


def partial_trace(rho, keep):
    """Reduced 2x2 state of a two-qubit ``rho``.

    ``keep="A"`` traces out qubit b (gives rho^a); ``keep="B"`` traces out
    qubit a.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-2:] != (4, 4):
        raise InvalidDimension(f"partial_trace needs 4x4 input, got {rho.shape}")
    t = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    key = str(keep).upper()
    if key == "A":
        return np.einsum("...ijkj->...ik", t)
    if key == "B":
        return np.einsum("...ijil->...jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def kron(a, b):
    """Batched Kronecker product of two stacks of 2x2 matrices."""
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (4, 4))


def singular_values(x):
    """Singular values (descending) of 2x2 or 4x4 complex matrices.

    Computed as the positive half of the spectrum of the Hermitian
    dilation ``[[0, X], [X^H, 0]]``, which keeps absolute accuracy near
    zero (no square root of a Gram-matrix eigenvalue).
    """
    x = _as_square(x)
    n = x.shape[-1]
    dil = np.zeros(x.shape[:-2] + (2 * n, 2 * n), dtype=complex)
    dil[..., :n, n:] = x
    dil[..., n:, :n] = dagger(x)
    w = np.sort(_eigh_any(dil).eigenvalues, axis=-1)
    return np.abs(w[..., :n - 1:-1])
