"""Sinh-deformed contours and truncated trapezoid grids.

A contour of the xi-plane is ``xi(y) = i*omega1 + b*sinh(i*omega + y)``; upper
contours (``omega > 0``) have wings going up, lower ones (``omega < 0``) down.
The Bromwich contour is ``q(y) = sigma + i*b*sinh(i*omega + y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .levy import LevyModel, analyticity

SINH_LAPLACE = "sinh"
GWR = "gwr"

# Fraction of the admissible angular sector actually used by a contour family.
_VARIANTS = {
    "A": dict(budget=0.90, k_d=0.90, apex=(0.10, 0.60), call_apex=(0.15, 0.60), eps_scale=1.0),
    "B": dict(budget=0.84, k_d=0.84, apex=(0.14, 0.52), call_apex=(0.22, 0.70), eps_scale=0.3),
}


class ContourError(RuntimeError):
    """Contour parameters are inconsistent with the model or with each other."""


class MethodModelError(ContourError):
    """The requested Laplace inversion cannot be used for this model."""


@dataclass(frozen=True)
class SinhContour:
    omega1: float
    b: float
    omega: float

    def __post_init__(self):
        if self.b <= 0 or not -math.pi / 2 < self.omega < math.pi / 2:
            raise ValueError("need b > 0 and |omega| < pi/2")

    @property
    def apex(self) -> float:
        """Ordinate of the point where the contour crosses the imaginary axis."""
        return self.omega1 + self.b * math.sin(self.omega)

    def __call__(self, y):
        return 1j * self.omega1 + self.b * np.sinh(1j * self.omega + np.asarray(y, dtype=float))

    def derivative(self, y):
        return self.b * np.cosh(1j * self.omega + np.asarray(y, dtype=float))


@dataclass(frozen=True)
class BromwichContour:
    sigma_l: float
    b_l: float
    omega_l: float

    def __post_init__(self):
        if self.sigma_l <= 0 or self.b_l <= 0 or not 0 < self.omega_l < math.pi / 2:
            raise ValueError("need sigma_l, b_l > 0 and omega_l in (0, pi/2)")
        if self.sigma_l - self.b_l * math.sin(self.omega_l) <= 0:
            raise ValueError("Bromwich contour must cross the real axis at q > 0")

    def __call__(self, y):
        return self.sigma_l + 1j * self.b_l * np.sinh(1j * self.omega_l + np.asarray(y, dtype=float))

    def derivative(self, y):
        return 1j * self.b_l * np.cosh(1j * self.omega_l + np.asarray(y, dtype=float))


@dataclass(frozen=True)
class ContourGrid:
    """Uniform grid ``y_k = zeta*k`` mapped onto a contour.

    For xi-contours ``k = -N..N``; for the Bromwich contour ``k = 0..N``.
    """

    contour: object
    zeta: float
    n_half: int
    half: bool = False
    y: np.ndarray = field(init=False, repr=False, compare=False)
    points: np.ndarray = field(init=False, repr=False, compare=False)
    der: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = np.arange(0 if self.half else -self.n_half, self.n_half + 1)
        y = self.zeta * k
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "points", self.contour(y))
        object.__setattr__(self, "der", self.contour.derivative(y))

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def weights(self) -> np.ndarray:
        """``zeta * derivative``: trapezoid weights in the xi variable."""
        return self.zeta * self.der


def map_point(contour, y):
    """Point and derivative of ``contour`` at parameter ``y``."""
    return contour(y), contour.derivative(y)


def select_step(d: float, eps: float) -> float:
    """Trapezoid step for an integrand analytic in a strip of half-width ``d``."""
    if d <= 0:
        raise ValueError("strip half-width must be positive")
    return 2.0 * math.pi * d / math.log(10.0 / eps)


def select_truncation(b: float, omega: float, distance: float, eps: float,
                      kappa: float = 0.4, zeta: Optional[float] = None):
    """Smallest ``Lambda`` with ``exp(-b*distance*kappa*sin|omega|*e^Lambda) < eps``.

    Returns ``(Lambda, N)`` with ``N = ceil(Lambda/zeta)`` (``N`` is None without ``zeta``).
    """
    if distance <= 0:
        raise ValueError("distance to the barrier must be positive")
    if not 0 < kappa < 0.5:
        raise ValueError("kappa must lie in (0, 0.5)")
    rate = b * distance * kappa * math.sin(abs(omega))
    lam = max(math.log(math.log(1.0 / eps) / rate), 0.0)
    n = None if zeta is None else int(math.ceil(lam / zeta))
    return lam, n


def family_contour(apex_lo: float, apex_hi: float, omega: float, d: float) -> SinhContour:
    """Contour whose deformations ``omega' in (omega-d, omega+d)`` keep the apex in [lo, hi]."""
    s_hi, s_lo = math.sin(omega + d), math.sin(omega - d)
    b = (apex_hi - apex_lo) / (s_hi - s_lo)
    return SinhContour(omega1=apex_hi - b * s_hi, b=b, omega=omega)


@dataclass
class ContourSet:
    """Everything the barrier engine needs for one deformation variant."""

    L_plus: ContourGrid
    L_minus: ContourGrid
    L_plus_fine: ContourGrid
    L_minus_fine: ContourGrid
    bromwich: Optional[ContourGrid]
    variant: str
    eps: float
    strip_d: float

    @property
    def sizes(self) -> dict:
        out = {"N+": self.L_plus.n_half, "N-": self.L_minus.n_half,
               "N+_1": self.L_plus_fine.n_half, "N-_1": self.L_minus_fine.n_half}
        if self.bromwich is not None:
            out["N_l"] = self.bromwich.n_half
        return out


def angle_budget(model: LevyModel, method: str, budget: float = 0.9):
    """Half-sector used by xi-contour families and by the Bromwich family.

    Returns ``(theta_xi, theta_q)``: xi-families use angles in ``(0, theta_xi)``,
    Bromwich families in ``(0, theta_q)``; with sinh-Laplace they satisfy
    ``nu*theta_xi + theta_q <= budget*pi/2`` so that ``q + psi`` stays away from 0.
    """
    total = budget * math.pi / 2
    info = analyticity(model)
    cone = budget * info.gamma_prime_plus
    if method == GWR:
        return cone, 0.0
    nu = info.nu
    theta_xi = min(total / (2 * nu), cone)
    theta_q = total - nu * theta_xi
    return theta_xi, theta_q


def check_method(model: LevyModel, method: str):
    if method == SINH_LAPLACE and model.order < 1 and model.mu != 0:
        raise MethodModelError(
            "sinh-accelerated Bromwich inversion needs nu >= 1 or mu = 0; use GWR")


def _apex_interval(lo_lim: float, hi_lim: float, frac, lower: bool):
    """Sub-interval of (lo_lim, hi_lim), measured from the end nearest the real axis."""
    f_lo, f_hi = frac
    width = hi_lim - lo_lim
    if lower:
        return hi_lim - f_hi * width, hi_lim - f_lo * width
    return lo_lim + f_lo * width, lo_lim + f_hi * width


def default_contour_set(model: LevyModel, h_minus: float, h_plus: float, xs: Sequence[float],
                        T: Optional[float] = None, method: str = SINH_LAPLACE,
                        variant: str = "A", eps: float = 1e-15, kind: str = "notouch",
                        a: Optional[float] = None, kappa: float = 0.4,
                        zeta_scale: float = 1.0) -> ContourSet:
    """Contours L+, L-, their fine versions and (for sinh-Laplace) the Bromwich grid.

    ``zeta_scale < 1`` refines every grid step by that factor at fixed truncation
    lengths, for convergence studies.
    """
    check_method(model, method)
    par = _VARIANTS[variant]
    eps = eps * par["eps_scale"]
    info = analyticity(model)
    theta_xi, theta_q = angle_budget(model, method, par["budget"])
    omega = theta_xi / 2
    d = par["k_d"] * theta_xi / 2

    up_lo, up_hi = _apex_interval(0.0, info.mu_plus, par["apex"], lower=False)
    if kind == "call":
        if info.mu_minus >= -1.0:
            raise ContourError("call payoff needs lambda_minus < -1")
        dn_lo, dn_hi = _apex_interval(info.mu_minus, -1.0, par["call_apex"], lower=True)
    else:
        dn_lo, dn_hi = _apex_interval(info.mu_minus, 0.0, par["apex"], lower=True)
    c_plus = family_contour(up_lo, up_hi, omega, d)
    c_minus = family_contour(dn_lo, dn_hi, -omega, d)

    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    inside = xs[(xs > h_minus) & (xs < h_plus)]
    width = h_plus - h_minus
    dist_p = [width] + ([float(np.min(inside - h_minus))] if inside.size else [])
    dist_m = [width] + ([float(np.min(h_plus - inside))] if inside.size else [])
    if a is not None:
        dist_p.append(h_plus - a)
        dist_m.append(a - h_minus)

    zeta = select_step(d, eps) * zeta_scale
    lam_p, n_p = select_truncation(c_plus.b, omega, min(dist_p), eps, kappa, zeta)
    lam_m, n_m = select_truncation(c_minus.b, omega, min(dist_m), eps, kappa, zeta)
    L_plus = ContourGrid(c_plus, zeta, n_p)
    L_minus = ContourGrid(c_minus, zeta, n_m)

    # The log-integrand of the factor formulas decays only like |eta|^-1 log|eta|
    # in the y variable, so the fine grids extend by ~log(1/eps) beyond the main ones.
    zeta1 = zeta / 2
    extra = math.log(1.0 / eps) + math.log(10.0 * (max(lam_p, lam_m) + math.log(1.0 / eps)))
    L_plus_fine = ContourGrid(c_plus, zeta1, int(math.ceil((lam_p + extra) / zeta1)))
    L_minus_fine = ContourGrid(c_minus, zeta1, int(math.ceil((lam_m + extra) / zeta1)))

    brom = None
    if method == SINH_LAPLACE:
        if T is None:
            raise ValueError("sinh-Laplace contours need the maturity T")
        brom = bromwich_grid(T, theta_q, par["k_d"], eps, zeta_scale)
    return ContourSet(L_plus, L_minus, L_plus_fine, L_minus_fine, brom, variant, eps, d)


def bromwich_grid(T: float, theta_q: float, k_d: float, eps: float,
                  zeta_scale: float = 1.0) -> ContourGrid:
    """Half grid on the sinh-deformed Bromwich contour for maturity ``T``."""
    omega_l = theta_q / 2
    d_l = k_d * theta_q / 2
    sigma_l = max(1.0, 1.0 / T)
    b_l = sigma_l / (2.0 * math.sin(omega_l))
    contour = BromwichContour(sigma_l, b_l, omega_l)
    growth = sigma_l * T
    zeta_l = zeta_scale * 2 * math.pi * d_l / (math.log(10.0 / eps) + growth)
    rate = T * b_l * math.sin(omega_l) / 2
    lam = math.log((math.log(1.0 / eps) + growth + 5.0) / rate)
    return ContourGrid(contour, zeta_l, int(math.ceil(lam / zeta_l)), half=True)
