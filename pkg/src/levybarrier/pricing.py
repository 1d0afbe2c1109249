"""Top-level pricing: contours, per-q engine, Laplace inversion and the European part."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import european
from .contours import GWR, SINH_LAPLACE, MethodModelError, default_contour_set
from .engine import (CALL, DIGITAL, NOTOUCH, RESOLVENT, TRUNCATED, BarrierEngine,
                     CorridorTooNarrow, PayoffSpec)
from .laplace import bromwich_nodes, gwr_from_samples, gwr_nodes, sinh_sum
from .levy import LevyModel, ModelDomainError, riskfree_residual

log = logging.getLogger(__name__)

AUTO = "auto"
METHODS = (SINH_LAPLACE, GWR, AUTO)


@dataclass
class PriceRequest:
    model: LevyModel
    payoff: PayoffSpec
    T: float
    xs: Sequence[float]
    method: str = AUTO
    tolerance: float = 1e-15
    dual_run: bool = False
    block: Optional[str] = None      # None picks truncation or resolvent from T
    M0: int = 9
    gwr_M: int = 8
    variant: str = "A"
    threads: int = 1
    zeta_scale: float = 1.0

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("maturity must be positive")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.block not in (None, TRUNCATED, RESOLVENT):
            raise ValueError(f"unknown block {self.block!r}")
        self.xs = np.atleast_1d(np.asarray(self.xs, dtype=float))


@dataclass
class PriceReport:
    xs: np.ndarray
    values: np.ndarray
    errors: Optional[np.ndarray]
    method: str
    block: str
    sizes: dict
    elapsed: float
    knocked: np.ndarray
    riskfree_residual: Optional[float] = None
    notes: List[str] = field(default_factory=list)


def resolve_method(model: LevyModel, method: str) -> str:
    if method == AUTO:
        return GWR if (model.order < 1 and model.mu != 0) else SINH_LAPLACE
    return method


def choose_block(model: LevyModel, T: float) -> str:
    """Resolvent summation for long maturities, where the truncated series loses accuracy."""
    limit = 1.0 if model.order >= 1 else 3.0
    return RESOLVENT if T >= limit else TRUNCATED


def european_part(model: LevyModel, payoff: PayoffSpec, T: float, xs) -> np.ndarray:
    if payoff.kind == NOTOUCH:
        return np.array([european.euro_constant(T, x) for x in xs])
    if payoff.kind == DIGITAL:
        return np.array([european.euro_digital(model, payoff.a, T, x) for x in xs])
    return np.array([european.euro_call(model, payoff.a, T, x) for x in xs])


def _evaluate(engine: BarrierEngine, q, threads: int) -> np.ndarray:
    if threads <= 1 or q.size <= engine.chunk:
        return engine(q)
    chunks = [q[i:i + engine.chunk] for i in range(0, q.size, engine.chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(engine, chunks))
    return np.concatenate(parts, axis=0)


def correction(model: LevyModel, payoff: PayoffSpec, T: float, xs, method: str, variant: str,
               tolerance: float, block: str, M0: int = 9, gwr_M: int = 8, threads: int = 1,
               zeta_scale: float = 1.0):
    """Barrier correction ``V^1`` at the spots ``xs`` (all strictly inside the corridor)."""
    cs = default_contour_set(model, payoff.h_minus, payoff.h_plus, xs, T=T, method=method,
                             variant=variant, eps=tolerance,
                             kind="call" if payoff.kind == CALL else payoff.kind,
                             a=payoff.a, zeta_scale=zeta_scale)
    engine = BarrierEngine(model, payoff, xs, cs, block=block, M0=M0)
    if method == SINH_LAPLACE:
        q, w = bromwich_nodes(cs.bromwich)
        F = _evaluate(engine, q, threads) / q[:, None]
        return sinh_sum(F.T, q, w, T), cs.sizes
    q = gwr_nodes(T, gwr_M)
    F = np.real(_evaluate(engine, q.astype(complex), threads)) / q[:, None]
    return gwr_from_samples(F.T, T, gwr_M), {**cs.sizes, "M": gwr_M}


def price(req: PriceRequest) -> PriceReport:
    """Price ``req.payoff`` at every spot; spots on or outside a barrier get 0 and a knocked flag."""
    t0 = time.perf_counter()
    model, payoff = req.model, req.payoff
    method = resolve_method(model, req.method)
    if method == SINH_LAPLACE and model.order < 1 and model.mu != 0:
        raise MethodModelError("sinh-accelerated Bromwich inversion needs nu >= 1 or mu = 0; use GWR")
    block = req.block or choose_block(model, req.T)
    xs = req.xs
    inside = (xs > payoff.h_minus) & (xs < payoff.h_plus)
    values = np.zeros(xs.size)
    errors = np.zeros(xs.size) if req.dual_run else None
    notes = []
    try:
        rf = riskfree_residual(model)
    except ModelDomainError:
        rf = None
    if rf is not None and abs(rf) > 1e-14:
        notes.append(f"psi(-i) = {rf:.3e}: r = 0 is not the no-arbitrage rate for this model")

    sizes = {}
    if np.any(inside):
        xin = xs[inside]
        euro = european_part(model, payoff, req.T, xin)

        def run(variant, meth):
            return correction(model, payoff, req.T, xin, meth, variant, req.tolerance, block,
                              req.M0, req.gwr_M, req.threads, req.zeta_scale)

        try:
            v1, sizes = run(req.variant, method)
        except CorridorTooNarrow:
            if req.method != AUTO or method == GWR:
                raise
            log.warning("series diverged on the complex Bromwich contour; retrying with GWR")
            notes.append("fell back to GWR after divergence on the Bromwich contour")
            method = GWR
            v1, sizes = run(req.variant, method)
        values[inside] = euro + v1
        if req.dual_run:
            other = "B" if req.variant == "A" else "A"
            v1b, _ = run(other, method)
            errors[inside] = np.abs(v1 - v1b)
    return PriceReport(xs=xs, values=values, errors=errors, method=method, block=block,
                       sizes=sizes, elapsed=time.perf_counter() - t0, knocked=~inside,
                       riskfree_residual=rf, notes=notes)


def price_curve(req: PriceRequest, normalize: bool = False):
    """Rows ``(x, V)`` or ``(x, V, V/(x - h_-)^{nu/2})`` over the requested spots."""
    rep = price(req)
    rows = []
    for x, v in zip(rep.xs, rep.values):
        if normalize:
            dist = x - req.payoff.h_minus
            norm = v / dist ** (req.model.order / 2) if dist > 0 else float("nan")
            rows.append((float(x), float(v), float(norm)))
        else:
            rows.append((float(x), float(v)))
    return rows, rep
