"""Double-barrier option pricing under KoBoL Levy processes.

Laplace transforms in time are computed in the Fourier dual space through the
Wiener-Hopf factorization on sinh-deformed contours, then inverted by a
sinh-accelerated Bromwich rule or by Gaver-Wynn-Rho.
"""

from .engine import PayoffSpec
from .levy import LevyModel, calibrate_c, psi, riskfree_residual
from .pricing import PriceReport, PriceRequest, price, price_curve

__all__ = ["LevyModel", "PayoffSpec", "PriceRequest", "PriceReport", "price", "price_curve",
           "psi", "calibrate_c", "riskfree_residual"]
