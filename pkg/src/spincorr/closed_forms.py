"""Analytic thermal states, disturbance and concurrence for both models.

These are independent of the eigendecomposition pipeline and serve as
its oracle.  Every Boltzmann factor is carried relative to the largest
exponent at that point (``log_scale``), so the expressions stay finite
for temperatures far below the couplings.  All functions broadcast over
array arguments.
"""
from typing import NamedTuple

import numpy as np

from .errors import InvalidInput, InvalidTemperature

LN2 = np.log(2.0)
MID_SLACK = 1e-10


def _temperature(T):
    T = np.asarray(T, dtype=float)
    if np.any(~np.isfinite(T) | (T <= 0)):
        raise InvalidTemperature("temperature must be positive and finite")
    return T


def _xlog2x(p):
    safe = np.where(p > 0, p, 1.0)
    return np.where(p > 0, p * np.log2(safe), 0.0)


def _sinh_ratio(x):
    # (1 - exp(-2x)) / (2x), i.e. sinh(x) exp(-x) / x, for x >= 0
    small = x < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x, -np.expm1(-2.0 * safe) / (2.0 * safe))


def _clamp(q):
    return np.where((q < 0) & (q >= -MID_SLACK), 0.0, q)


class XxzDerived(NamedTuple):
    """Auxiliary quantities of the XXZ thermal state.

    ``m`` and ``n`` are the bare hyperbolic factors (they may overflow
    at very low T and are not used for evaluation).  ``rho22``, ``rho33``,
    ``s``, ``corner_11``, ``corner_00``, ``w_plus``, ``w_minus`` and ``Z``
    are multiplied by ``exp(-log_scale)``.
    """

    eta: np.ndarray
    m: np.ndarray
    n: np.ndarray
    s: np.ndarray
    rho22: np.ndarray
    rho33: np.ndarray
    corner_11: np.ndarray
    corner_00: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray
    Z: np.ndarray
    log_scale: np.ndarray

    @property
    def log_z(self):
        return self.log_scale + np.log(self.Z)


def xxz_derived(J, Jz, B, b, T) -> XxzDerived:
    T = _temperature(T)
    J, Jz, B, b, T = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (J, Jz, B, b, T)))
    eta = np.hypot(b, J)
    x = eta / T
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        m = np.cosh(x)
        n = np.where(eta > 0, b * np.sinh(x) / np.where(eta > 0, eta, 1.0), 0.0)

    e_11 = -(Jz + 2 * B) / (2 * T)
    e_00 = -(Jz - 2 * B) / (2 * T)
    e_plus = Jz / (2 * T) + x
    e_minus = Jz / (2 * T) - x
    scale = np.maximum(np.maximum(e_11, e_00), e_plus)
    c11 = np.exp(e_11 - scale)
    c00 = np.exp(e_00 - scale)
    w_plus = np.exp(e_plus - scale)
    w_minus = np.exp(e_minus - scale)

    # 1 -+ b/eta without cancellation; both are 1 on the eta = 0 line
    safe_eta = np.where(eta > 0, eta, 1.0)
    # factored so that subnormal eta cannot underflow to 0/0
    near = np.where(eta > 0, (J / safe_eta) * (J / (safe_eta + np.abs(b))), 1.0)
    far = 1.0 + np.where(eta > 0, np.abs(b) / safe_eta, 0.0)
    one_minus = np.where(b >= 0, near, far)
    one_plus = np.where(b >= 0, far, near)

    # e^{Jz/2T}(m -+ n) and e^{Jz/2T} J sinh(eta/T)/eta
    rho22 = 0.5 * (w_plus * one_minus + w_minus * one_plus)
    rho33 = 0.5 * (w_plus * one_plus + w_minus * one_minus)
    s = (J / T) * w_plus * _sinh_ratio(x)
    # (1 + e^{2B/T} + 2m e^{(Jz+B)/T}) e^{-(Jz+2B)/2T}
    Z = c11 + c00 + (w_plus + w_minus)
    return XxzDerived(eta, m, n, s, rho22, rho33, c11, c00, w_plus, w_minus, Z, scale)


def xxz_thermal_matrix(J, Jz, B, b, T):
    """Closed-form XXZ Gibbs state in the ``|11>,|10>,|01>,|00>`` basis."""
    d = xxz_derived(J, Jz, B, b, T)
    rho = np.zeros(d.Z.shape + (4, 4), dtype=complex)
    rho[..., 0, 0] = d.corner_11 / d.Z
    rho[..., 1, 1] = d.rho22 / d.Z
    rho[..., 2, 2] = d.rho33 / d.Z
    rho[..., 3, 3] = d.corner_00 / d.Z
    rho[..., 1, 2] = rho[..., 2, 1] = -d.s / d.Z
    return rho


def xxz_mid(J, Jz, B, b, T):
    """Measurement-induced disturbance of the XXZ Gibbs state (bits)."""
    d = xxz_derived(J, Jz, B, b, T)
    # pair each diagonal entry with the spectral weight it tends to as J -> 0,
    # which makes the J = 0 value exactly zero
    low = np.minimum(d.rho22, d.rho33)
    high = np.maximum(d.rho22, d.rho33)
    q = ((_xlog2x(d.w_minus / d.Z) - _xlog2x(low / d.Z))
         + (_xlog2x(d.w_plus / d.Z) - _xlog2x(high / d.Z)))
    return _clamp(q)


class XxzConcurrenceAux(NamedTuple):
    """Auxiliaries of the XXZ concurrence, each divided by ``exp(2 eta/T)``.

    ``nu``, ``xi_plus`` and ``xi_minus`` are also divided by
    ``Z^2 exp(Jz/T)``; ``root`` is ``sqrt(b^2 + mu + J^2) exp(-eta/T)``.
    """

    mu: np.ndarray
    nu: np.ndarray
    xi_plus: np.ndarray
    xi_minus: np.ndarray
    root: np.ndarray


def xxz_concurrence_aux(J, b, x) -> XxzConcurrenceAux:
    u = np.exp(-2.0 * x)
    mu = b * b * u + 0.5 * J * J * (1.0 + u * u)
    root = np.sqrt(b * b * u + mu + J * J * u)
    nu = np.abs(J) * 0.5 * (1.0 - u) * root
    xi_plus = mu + np.sqrt(2.0) * nu
    # xi+ xi- = mu^2 - 2 nu^2 = eta^4 (scaled), which avoids the cancellation
    # in mu - sqrt(2) nu at low temperature
    eta2_u = (b * b + J * J) * u
    xi_minus = eta2_u * eta2_u / np.where(xi_plus > 0, xi_plus, 1.0)
    return XxzConcurrenceAux(mu, nu, xi_plus, xi_minus, root)


def xxz_concurrence(J, Jz, B, b, T):
    """Thermal concurrence of the XXZ Gibbs state.

    ``sqrt(xi+) - sqrt(xi-)`` is evaluated as
    ``(xi+ - xi-) / (sqrt(xi+) + sqrt(xi-))`` and the ``1/eta`` prefactor
    is absorbed into ``sinh(eta/T)/eta``; on the ``J = b = 0`` line the
    value is 0.
    """
    d = xxz_derived(J, Jz, B, b, T)
    J, Jz, b, T = (np.broadcast_to(np.asarray(v, dtype=float), d.Z.shape) for v in (J, Jz, b, T))
    x = d.eta / T
    aux = xxz_concurrence_aux(J, b, x)
    root_sum = np.sqrt(aux.xi_plus) + np.sqrt(aux.xi_minus)
    coupled = (d.eta > 0) & (root_sum > 0)
    nu_over_eta = np.abs(J) * (_sinh_ratio(x) / T) * aux.root
    split = d.w_plus * 2.0 * np.sqrt(2.0) * nu_over_eta / np.where(coupled, root_sum, 1.0)
    corners = 2.0 * np.exp(-Jz / (2 * T) - d.log_scale)
    c = (split - corners) / d.Z
    return np.where(coupled, np.maximum(c, 0.0), 0.0)


class DmDerived(NamedTuple):
    """Auxiliary quantities of the XXX+DM thermal state.

    ``L_plus``, ``L_minus``, ``corner``, ``rho22``, ``LM_plus``
    (= L- M+), ``LM_minus`` (= L- M-) and ``Z`` are multiplied by
    ``exp(-log_scale)``.  ``delta`` keeps the sign of J.
    """

    delta: np.ndarray
    L_plus: np.ndarray
    L_minus: np.ndarray
    LM_plus: np.ndarray
    LM_minus: np.ndarray
    corner: np.ndarray
    rho22: np.ndarray
    Z: np.ndarray
    log_scale: np.ndarray

    @property
    def log_z(self):
        return self.log_scale + np.log(self.Z)


def dm_derived(J, D, T) -> DmDerived:
    T = _temperature(T)
    J, D, T = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (J, D, T)))
    delta = 2.0 * J * np.sqrt(1.0 + D * D)
    e_corner = -J / (2 * T)
    e_plus = (J + delta) / (2 * T)
    e_minus = (J - delta) / (2 * T)
    scale = np.maximum(e_corner, np.maximum(e_plus, e_minus))
    corner = np.exp(e_corner - scale)
    L_plus = np.exp(e_plus - scale)
    L_minus = np.exp(e_minus - scale)
    # L- M+- = L- (+-1 + e^{delta/T}) = L+ +- L-
    LM_plus = L_plus + L_minus
    LM_minus = L_plus - L_minus
    rho22 = 0.5 * LM_plus
    # 2 e^{-J/2T} (1 + e^{J/T} cosh(delta/2T))
    Z = 2.0 * corner + LM_plus
    return DmDerived(delta, L_plus, L_minus, LM_plus, LM_minus, corner, rho22, Z, scale)


def dm_thermal_matrix(J, D, T, theta=0.0):
    """Closed-form XXX+DM Gibbs state.

    The phase ``theta`` of the coherence ``-L- M- e^{i theta} / 2`` is
    not fixed by the closed form; pass the value observed numerically.
    """
    d = dm_derived(J, D, T)
    rho = np.zeros(d.Z.shape + (4, 4), dtype=complex)
    rho[..., 0, 0] = rho[..., 3, 3] = d.corner / d.Z
    rho[..., 1, 1] = rho[..., 2, 2] = d.rho22 / d.Z
    phase = np.exp(1j * np.asarray(theta, dtype=float))
    rho[..., 1, 2] = -0.5 * d.LM_minus * phase / d.Z
    rho[..., 2, 1] = np.conj(rho[..., 1, 2])
    return rho


def dm_mid(J, D, T):
    d = dm_derived(J, D, T)
    p22 = d.rho22 / d.Z
    q = -2.0 * _xlog2x(p22) + _xlog2x(d.L_minus / d.Z) + _xlog2x(d.L_plus / d.Z)
    return _clamp(q)


def dm_concurrence(J, D, T):
    d = dm_derived(J, D, T)
    return np.maximum((np.abs(d.LM_minus) - 2.0 * d.corner) / d.Z, 0.0)


def isotropic_x(J, T):
    """``x = exp(J / 2T)``, the single variable of the D = 0 model."""
    return np.exp(np.asarray(J, dtype=float) / (2 * _temperature(T)))


def _isotropic_arg(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x) | (x < 0)):
        raise InvalidInput("x = exp(J/2T) must be finite and >= 0")
    return x


def dm_isotropic_mid(x):
    """Disturbance of the D = 0 model as a function of ``x = exp(J/2T)``."""
    x = _isotropic_arg(x)
    low = x <= 1.0
    xl = np.where(low, x, 0.0)
    x4 = xl ** 4
    # x^4 log x -> 0 at x = 0
    x4_log = np.where(xl > 0, x4 * np.log2(np.where(xl > 0, xl, 1.0)), 0.0)
    q_low = (4 * x4_log - (1 + x4) * (-1 + np.log1p(x4) / LN2)) / (3 + x4)
    # same expression divided through by x^4, with y = x^-4
    xh = np.where(low, 2.0, x)
    y = xh ** -4.0
    q_high = (-4 * np.log2(xh) * y - (1 + y) * (-1 + np.log1p(y) / LN2)) / (1 + 3 * y)
    return np.where(low, q_low, q_high)


def dm_isotropic_concurrence(x):
    x = _isotropic_arg(x)
    low = x <= 1.0
    x4 = np.where(low, x, 0.0) ** 4
    c_low = (-2 + np.abs(-1 + x4)) / (3 + x4)
    y = np.where(low, 0.5, x) ** -4.0
    c_high = (-2 * y + np.abs(1 - y)) / (1 + 3 * y)
    return np.maximum(np.where(low, c_low, c_high), 0.0)
