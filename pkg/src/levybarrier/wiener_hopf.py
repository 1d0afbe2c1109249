"""Wiener-Hopf factors on sinh-deformed grids.

``phi_plus`` is evaluated directly on the upper main contour by a trapezoid sum over
the lower fine contour, ``phi_minus`` symmetrically; the cross values come from the
factorization identity ``phi_plus * phi_minus = q / (q + psi)``.

All routines accept an array of ``q`` values and return arrays of shape ``(len(q), n)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contours import ContourError, ContourGrid
from .levy import LevyModel

_TINY = 1e-300


class BranchError(ContourError):
    """``1 + psi/q`` winds around (or touches) the branch cut of the logarithm."""


@dataclass
class WhfTables:
    q: np.ndarray
    phi_plus_on_Lplus: np.ndarray
    phi_minus_on_Lminus: np.ndarray
    phi_plus_on_Lminus: np.ndarray
    phi_minus_on_Lplus: np.ndarray
    ratio_mp_on_Lplus: np.ndarray
    ratio_pm_on_Lminus: np.ndarray
    phi_minus_at_minus_i: np.ndarray | None = None


def log_one_plus(psi_vals, q):
    """Principal ``log(1 + psi/q)`` with a check that no branch cut is crossed.

    ``psi_vals`` has shape ``(n,)`` (ordered along a contour), ``q`` shape ``(m,)``.
    """
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    z = 1.0 + psi_vals[None, :] / q[:, None]
    if np.any(np.abs(z) < _TINY):
        raise BranchError("q + psi vanishes on a grid")
    neg_axis = (z.real <= 0) & (np.abs(z.imag) <= 1e-14 * np.abs(z))
    if np.any(neg_axis):
        raise BranchError("1 + psi/q lies on (-inf, 0] at a grid point")
    L = np.log(z)
    if L.shape[1] > 1 and np.any(np.abs(np.diff(L.imag, axis=1)) >= np.pi):
        raise BranchError("1 + psi/q crosses the negative real axis along the contour")
    return L


def _factor_exponent(q, targets, source: ContourGrid, psi_source):
    """``(zeta/(2 pi i)) sum_k xi ln(1+psi(eta_k)/q) der_k / (eta_k (xi - eta_k))``."""
    L = log_one_plus(psi_source, q)
    eta = source.points
    w = (source.zeta / (2j * np.pi)) * source.der / eta
    D = 1.0 / (targets[:, None] - eta[None, :])
    return targets[None, :] * ((L * w[None, :]) @ D.T)


def phi_plus_direct(q, target, source: ContourGrid, model: LevyModel, psi_source=None):
    """phi_plus_q on the points ``target`` (above ``source``, a lower fine grid)."""
    targets = np.atleast_1d(getattr(target, "points", target)).astype(complex)
    if psi_source is None:
        psi_source = model.psi(source.points)
    return np.exp(_factor_exponent(q, targets, source, psi_source))


def phi_minus_direct(q, target, source: ContourGrid, model: LevyModel, psi_source=None):
    """phi_minus_q on the points ``target`` (below ``source``, an upper fine grid)."""
    targets = np.atleast_1d(getattr(target, "points", target)).astype(complex)
    if psi_source is None:
        psi_source = model.psi(source.points)
    return np.exp(-_factor_exponent(q, targets, source, psi_source))


def phi_minus_at(q, xi0: complex, source: ContourGrid, model: LevyModel, psi_source=None):
    """Scalar phi_minus_q(xi0) for each q; ``xi0`` must lie below ``source``."""
    if np.imag(xi0) >= source.contour.apex:
        raise ContourError("point is not below the upper contour")
    return phi_minus_direct(q, np.array([xi0]), source, model, psi_source)[:, 0]


def phi_cross_via_reciprocal(q, psi_target, phi_direct):
    """The opposite factor on the same grid: ``1 / ((1 + psi/q) * phi_direct)``."""
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    z = 1.0 + psi_target[None, :] / q[:, None]
    if np.any(np.abs(z) < _TINY):
        raise ContourError("q + psi vanishes on a grid")
    return 1.0 / (z * phi_direct)


class FactorSolver:
    """Precomputed kernels for repeated evaluation of the factors on fixed grids."""

    def __init__(self, model: LevyModel, L_plus: ContourGrid, L_minus: ContourGrid,
                 L_plus_fine: ContourGrid, L_minus_fine: ContourGrid, need_minus_i: bool = False):
        self.model = model
        self.L_plus, self.L_minus = L_plus, L_minus
        self.psi_plus = model.psi(L_plus.points)
        self.psi_minus = model.psi(L_minus.points)
        self.psi_plus_fine = model.psi(L_plus_fine.points)
        self.psi_minus_fine = model.psi(L_minus_fine.points)
        self.L_plus_fine, self.L_minus_fine = L_plus_fine, L_minus_fine

        def kernel(targets, src):
            w = (src.zeta / (2j * np.pi)) * src.der / src.points
            return (targets[:, None] / (targets[:, None] - src.points[None, :])) * w[None, :]

        # phi_plus on L+ uses the lower fine grid; phi_minus on L- the upper one.
        self._Kp = kernel(L_plus.points, L_minus_fine).T.copy()
        minus_targets = L_minus.points
        if need_minus_i:
            minus_targets = np.append(minus_targets, -1j)
        self._Km = kernel(minus_targets, L_plus_fine).T.copy()
        self.need_minus_i = need_minus_i

    def tables(self, q) -> WhfTables:
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        Lm = log_one_plus(self.psi_minus_fine, q)
        Lp = log_one_plus(self.psi_plus_fine, q)
        pp = np.exp(Lm @ self._Kp)
        pm_all = np.exp(-(Lp @ self._Km))
        n = self.L_minus.size
        pm = pm_all[:, :n]
        at_mi = pm_all[:, n] if self.need_minus_i else None
        zp = 1.0 + self.psi_plus[None, :] / q[:, None]
        zm = 1.0 + self.psi_minus[None, :] / q[:, None]
        return WhfTables(
            q=q,
            phi_plus_on_Lplus=pp,
            phi_minus_on_Lminus=pm,
            phi_plus_on_Lminus=1.0 / (zm * pm),
            phi_minus_on_Lplus=1.0 / (zp * pp),
            ratio_mp_on_Lplus=1.0 / (zp * pp * pp),
            ratio_pm_on_Lminus=1.0 / (zm * pm * pm),
            phi_minus_at_minus_i=at_mi,
        )
