"""Characteristic exponents of the supported Levy models.

Convention: ``E[exp(i xi X_t)] = exp(-t psi(xi))`` and ``psi(xi) = -i mu xi + psi0(xi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import gamma

KOBOL = "kobol"
GAUSSIAN = "gaussian"


class ModelDomainError(ValueError):
    """Raised when a model is evaluated outside its domain of analyticity."""


@dataclass(frozen=True)
class AnalyticityInfo:
    mu_minus: float
    mu_plus: float
    gamma_minus: float
    gamma_plus: float
    gamma_prime_minus: float
    gamma_prime_plus: float
    nu: float


@dataclass(frozen=True)
class LevyModel:
    """KoBoL (CGMY) process, or a Brownian motion used as a closed-form oracle.

    ``nu`` is the order of the positive-jump component, ``nu_minus`` the order of
    the negative-jump one (defaults to ``nu``). ``lambda_minus < 0`` governs the
    decay of positive jumps, ``lambda_plus > 0`` the decay of negative jumps.
    """

    nu: float = 1.2
    lambda_plus: float = 1.0
    lambda_minus: float = -2.0
    c_plus: float = 1.0
    c_minus: float = 1.0
    mu: float = 0.0
    kind: str = KOBOL
    sigma: float = 0.0
    nu_minus: Optional[float] = None
    # Strip used for the Gaussian model, whose exponent is entire.
    gaussian_strip: float = 2.0

    def __post_init__(self):
        if self.kind == KOBOL:
            if not self.lambda_minus < 0.0 < self.lambda_plus:
                raise ValueError("need lambda_minus < 0 < lambda_plus")
            for nu in (self.nu, self.nu_neg):
                if not 0.0 < nu < 2.0 or nu == 1.0:
                    raise ValueError(f"order must lie in (0,2) minus {{1}}, got {nu}")
            if self.c_plus <= 0.0 or self.c_minus <= 0.0:
                raise ValueError("jump intensities must be positive")
        elif self.kind == GAUSSIAN:
            if self.sigma <= 0.0:
                raise ValueError("Gaussian model needs sigma > 0")
        else:
            raise ValueError(f"unsupported model kind {self.kind!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def kobol(cls, nu: float, lambda_plus: float, lambda_minus: float,
              c: Optional[float] = None, m2: Optional[float] = None,
              mu: float = 0.0) -> "LevyModel":
        """Symmetric-intensity KoBoL; give either ``c`` or the second moment ``m2``."""
        if (c is None) == (m2 is None):
            raise ValueError("give exactly one of c, m2")
        if c is None:
            c = calibrate_c(nu, lambda_plus, lambda_minus, m2)
        return cls(nu=nu, lambda_plus=lambda_plus, lambda_minus=lambda_minus,
                   c_plus=c, c_minus=c, mu=mu)

    @classmethod
    def gaussian(cls, sigma: float, mu: float = 0.0, strip: float = 2.0) -> "LevyModel":
        return cls(nu=2.0, lambda_plus=strip, lambda_minus=-strip, mu=mu,
                   kind=GAUSSIAN, sigma=sigma, gaussian_strip=strip)

    @property
    def nu_neg(self) -> float:
        return self.nu if self.nu_minus is None else self.nu_minus

    @property
    def order(self) -> float:
        """Order governing the growth of psi at infinity."""
        if self.kind == GAUSSIAN:
            return 2.0
        return max(self.nu, self.nu_neg)

    @property
    def is_symmetric(self) -> bool:
        return self.kind == KOBOL and self.c_plus == self.c_minus and self.nu_minus in (None, self.nu)

    def mirrored(self) -> "LevyModel":
        """Model of the reflected process -X."""
        if self.kind == GAUSSIAN:
            return replace(self, mu=-self.mu)
        return replace(self, lambda_plus=-self.lambda_minus, lambda_minus=-self.lambda_plus,
                       c_plus=self.c_minus, c_minus=self.c_plus,
                       nu=self.nu_neg, nu_minus=self.nu, mu=-self.mu)

    def with_drift(self, mu: float) -> "LevyModel":
        return replace(self, mu=mu)

    # -- exponent -------------------------------------------------------------

    def psi0(self, xi):
        xi = np.asarray(xi, dtype=complex)
        if self.kind == GAUSSIAN:
            return 0.5 * self.sigma ** 2 * xi * xi
        _check_cuts(xi, self.lambda_minus, self.lambda_plus)
        lp, lm = self.lambda_plus, self.lambda_minus
        nup, num = self.nu, self.nu_neg
        # Same power routine for both terms so that psi0(0) = 0 exactly.
        pos = self.c_plus * gamma(-nup) * (_cpow(-lm, nup) - _cpow(-lm - 1j * xi, nup))
        neg = self.c_minus * gamma(-num) * (_cpow(lp, num) - _cpow(lp + 1j * xi, num))
        return pos + neg

    def psi(self, xi):
        xi = np.asarray(xi, dtype=complex)
        return -1j * self.mu * xi + self.psi0(xi)

    def c_infinity(self, phi: float) -> complex:
        """Leading coefficient of psi0(rho e^{i phi}) ~ c_inf(phi) rho^nu (symmetric order)."""
        if self.kind == GAUSSIAN:
            return 0.5 * self.sigma ** 2 * np.exp(2j * phi)
        nu = self.order
        c = 0.5 * (self.c_plus + self.c_minus)
        return complex(-2.0 * c * gamma(-nu) * math.cos(nu * math.pi / 2) * np.exp(1j * nu * phi))


def _cpow(z, p):
    """Principal power with 0**p = 0 (finite limit at a branch point, p > 0)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    nz = z != 0
    out[nz] = np.exp(p * np.log(z[nz]))
    return out


def _check_cuts(xi, lambda_minus, lambda_plus):
    xi = np.atleast_1d(xi)
    on_axis = xi.real == 0.0
    if not np.any(on_axis):
        return
    im = xi.imag[on_axis]
    if np.any(im > lambda_plus) or np.any(im < lambda_minus):
        raise ModelDomainError("frequency on a branch cut of the characteristic exponent")


def psi(model: LevyModel, xi):
    """Characteristic exponent of ``model`` at ``xi`` (scalar or array)."""
    out = model.psi(xi)
    return complex(out) if np.ndim(out) == 0 else out


def calibrate_c(nu: float, lambda_plus: float, lambda_minus: float, m2: float) -> float:
    """Intensity c = c_+ = c_- giving psi''(0) = m2 for symmetric-intensity KoBoL."""
    if m2 <= 0:
        raise ValueError("m2 must be positive")
    if not 0 < nu < 2 or nu == 1:
        raise ValueError("order must lie in (0,2) minus {1}")
    return m2 / (gamma(2.0 - nu) * ((-lambda_minus) ** (nu - 2.0) + lambda_plus ** (nu - 2.0)))


def riskfree_residual(model: LevyModel) -> float:
    """psi(-i); zero exactly when r = 0 is the no-arbitrage rate.

    ``E exp(X_1)`` is finite only if positive jumps decay fast enough, i.e. ``lambda_minus <= -1``.
    """
    if model.kind == KOBOL and model.lambda_minus > -1.0:
        raise ModelDomainError("psi(-i) needs lambda_minus <= -1")
    return float(np.real(model.psi(-1j)))


def analyticity(model: LevyModel) -> AnalyticityInfo:
    if model.kind == GAUSSIAN:
        s = model.gaussian_strip
        return AnalyticityInfo(-s, s, -math.pi / 4, math.pi / 4, -math.pi / 4, math.pi / 4, 2.0)
    if model.kind != KOBOL:
        raise ValueError(f"unsupported model kind {model.kind!r}")
    nu = model.order
    gp = math.pi / 2 if nu <= 1 else math.pi / (2 * nu)
    return AnalyticityInfo(model.lambda_minus, model.lambda_plus, -math.pi / 2, math.pi / 2,
                           -gp, gp, nu)
