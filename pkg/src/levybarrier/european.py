"""European (no-barrier) prices under r = 0 by Fourier inversion on a sinh-deformed line."""

from __future__ import annotations

import math

import numpy as np

from .contours import family_contour, select_step
from .levy import LevyModel, ModelDomainError, analyticity, riskfree_residual

_Y_MAX = 200.0


def _contour_integral(model: LevyModel, T: float, xp: float, weight, upper: bool,
                      apex, eps: float = 1e-16) -> complex:
    """``int e^{i xp xi - T psi0(xi)} weight(xi) dxi`` over an upper or lower sinh contour.

    The grid is extended until the integrand is below ``eps`` at both ends.
    """
    info = analyticity(model)
    theta = 0.9 * min(info.gamma_prime_plus, math.pi / 2)
    omega, d = theta / 2, 0.9 * theta / 2
    contour = family_contour(apex[0], apex[1], omega if upper else -omega, d)
    zeta = select_step(d, eps)
    psi0 = model.psi0

    def terms(k):
        y = zeta * k
        xi = contour(y)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            expo = 1j * xp * xi - T * psi0(xi)
            val = np.where(expo.real < -745, 0.0, np.exp(np.minimum(expo.real, 700)) * np.exp(1j * expo.imag))
            out = val * weight(xi) * contour.derivative(y)
        return np.where(np.isfinite(out), out, 0.0)

    n = int(math.ceil(8.0 / zeta))
    while True:
        k = np.arange(-n, n + 1)
        vals = terms(k)
        tail = max(np.abs(vals[:5]).max(), np.abs(vals[-5:]).max())
        if tail < eps * 1e-2 or zeta * n >= _Y_MAX:
            break
        n *= 2
    return zeta * np.sum(vals)


def _apex(model: LevyModel, upper: bool, lo_cap: float = None):
    info = analyticity(model)
    if upper:
        return 0.25 * info.mu_plus, 0.5 * info.mu_plus
    bottom = info.mu_minus if lo_cap is None else max(info.mu_minus, lo_cap)
    return 0.5 * bottom, 0.25 * bottom


def euro_digital(model: LevyModel, a: float, T: float, x: float) -> float:
    """Price of the digital put paying ``1{x + X_T <= a}``."""
    if T <= 0:
        raise ValueError("T must be positive")
    xp = x - a + model.mu * T
    w = lambda xi: 1.0 / (-1j * xi)
    if xp >= 0:
        val = _contour_integral(model, T, xp, w, True, _apex(model, True)) / (2 * math.pi)
    else:
        val = 1.0 + _contour_integral(model, T, xp, w, False, _apex(model, False)) / (2 * math.pi)
    return float(np.real(val))


def euro_put(model: LevyModel, a: float, T: float, x: float) -> float:
    """Price of the European put ``(e^a - e^{x + X_T})_+`` on the upper contour."""
    xp = x - a + model.mu * T
    w = lambda xi: 1.0 / (xi * (xi + 1j))
    val = -math.exp(a) / (2 * math.pi) * _contour_integral(model, T, xp, w, True, _apex(model, True))
    return float(np.real(val))


def euro_call(model: LevyModel, a: float, T: float, x: float) -> float:
    """Price of the European call ``(e^{x + X_T} - e^a)_+``.

    For ``x' >= 0`` the upper-contour integral is the put and parity adds
    ``e^{x - T psi(-i)} - e^a``; for ``x' < 0`` the lower contour sits in ``(-1, 0)``
    and only the residue at ``-i`` is added.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    try:
        forward = math.exp(x - T * riskfree_residual(model))
    except ModelDomainError:
        raise
    xp = x - a + model.mu * T
    w = lambda xi: 1.0 / (xi * (xi + 1j))
    if xp >= 0:
        return euro_put(model, a, T, x) + forward - math.exp(a)
    val = _contour_integral(model, T, xp, w, False, _apex(model, False, lo_cap=-1.0))
    return float(forward - math.exp(a) / (2 * math.pi) * np.real(val))


def euro_constant(T: float = None, x: float = None) -> float:
    """European part of the no-touch option: the payoff is 1 everywhere."""
    return 1.0
