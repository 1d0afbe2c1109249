"""Self-contained numerical checks that need no published data."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .contours import bromwich_grid, default_contour_set
from .engine import PayoffSpec
from .laplace import GWRDegradedWarning, invert_gwr, invert_sinh
from .levy import LevyModel
from .pricing import PriceRequest, price
from .wiener_hopf import phi_minus_direct, phi_plus_direct


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _benchmark_model(nu=1.2):
    return LevyModel.kobol(nu, 1.0, -2.0, m2=0.1)


def wh_identity_residual(model: LevyModel, qs, zeta_scale: float = 1.0) -> float:
    """Max of ``|phi+ phi- (1 + psi/q) - 1|`` with both factors computed directly on the real line."""
    cs = default_contour_set(model, -0.05, 0.05, [0.0], T=0.25, zeta_scale=zeta_scale)
    xi = np.concatenate([-np.logspace(-3, 4, 40), [0.0], np.logspace(-3, 4, 40)]).astype(complex)
    worst = 0.0
    for q in qs:
        pp = phi_plus_direct([q], xi, cs.L_minus_fine, model)[0]
        pm = phi_minus_direct([q], xi, cs.L_plus_fine, model)[0]
        worst = max(worst, float(np.abs(pp * pm * (1 + model.psi(xi) / q) - 1).max()))
    return worst


def brownian_residual(sigma: float = math.sqrt(2.0), qs=(1.0, 5.0), zeta_scale: float = 1.0) -> float:
    """Distance to the closed-form factors ``kappa/(kappa -+ i xi)``, ``kappa = sqrt(2q)/sigma``."""
    model = LevyModel.gaussian(sigma)
    cs = default_contour_set(model, -0.05, 0.05, [0.0], T=0.25, zeta_scale=zeta_scale)
    worst = 0.0
    for q in qs:
        k = math.sqrt(2 * q) / sigma
        xp, xm = cs.L_plus.points, cs.L_minus.points
        pp = phi_plus_direct([q], xp, cs.L_minus_fine, model)[0]
        pm = phi_minus_direct([q], xm, cs.L_plus_fine, model)[0]
        worst = max(worst, float(np.abs(pp - k / (k - 1j * xp)).max()),
                    float(np.abs(pm - k / (k + 1j * xm)).max()))
    return worst


def laplace_pairs(zeta_scale: float = 1.0):
    """Errors of both inverters on textbook transform pairs."""
    out = {}
    # 1/q has identical Gaver functionals, so the rho table ends early by design.
    warnings.simplefilter("ignore", GWRDegradedWarning)
    for name, F, T, exact in [("1/q", lambda q: 1 / q, 1.0, 1.0),
                              ("1/(q+1)", lambda q: 1 / (q + 1), 1.0, math.exp(-1.0)),
                              ("1/q^2", lambda q: 1 / q ** 2, 2.0, 2.0)]:
        grid = bromwich_grid(T, 0.7, 0.9, 1e-15, zeta_scale)
        out["sinh " + name] = abs(invert_sinh(F, T, grid) - exact)
        out["gwr " + name] = abs(invert_gwr(F, T) - exact)
    out["gwr q/(q^2+1)"] = abs(invert_gwr(lambda q: q / (q * q + 1), math.pi / 2))
    return out


def mirror_residual(zeta_scale: float = 1.0) -> float:
    """No-touch price against the price of the reflected problem."""
    m = _benchmark_model()
    xs = np.array([-0.03, 0.0, 0.02])
    a = price(PriceRequest(m, PayoffSpec.no_touch(-0.05, 0.05), 0.25, xs, zeta_scale=zeta_scale)).values
    b = price(PriceRequest(m.mirrored(), PayoffSpec.no_touch(-0.05, 0.05), 0.25, -xs,
                           zeta_scale=zeta_scale)).values
    return float(np.abs(a - b).max())


def run_all(zeta_scale: float = 1.0) -> List[CheckResult]:
    results = []

    def check(name: str, fn: Callable[[], float], tol: float):
        try:
            err = fn()
            results.append(CheckResult(name, err <= tol, f"{err:.3e} (tol {tol:.0e})"))
        except Exception as exc:  # a failing suite must not abort the others
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))

    check("wiener-hopf identity", lambda: wh_identity_residual(_benchmark_model(), (1.0, 5.0, 25.0), zeta_scale), 1e-12)
    check("brownian factors", lambda: brownian_residual(zeta_scale=zeta_scale), 1e-12)
    pairs = None

    def pair(key):
        nonlocal pairs
        if pairs is None:
            pairs = laplace_pairs(zeta_scale)
        return pairs[key]

    for key, tol in [("sinh 1/q", 1e-12), ("sinh 1/(q+1)", 1e-12), ("sinh 1/q^2", 1e-12),
                     ("gwr 1/q", 1e-10), ("gwr 1/(q+1)", 1e-8)]:
        check("laplace " + key, lambda key=key: pair(key), tol)
    check("mirror symmetry", lambda: mirror_residual(zeta_scale), 1e-12)
    return results
