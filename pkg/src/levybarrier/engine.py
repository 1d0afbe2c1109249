"""Dual-space core of the double-barrier scheme, evaluated for a batch of ``q``.

Vectors ``w_plus`` live on the lower contour L-, ``w_minus`` on the upper contour L+.
Every discretized Cauchy integral is ``(zeta/2pi) sum_k f(eta_k) der_k / (eta_k - xi_j)``
with ``eta`` on the source grid and ``xi`` on the target grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .contours import ContourError, ContourSet
from .levy import LevyModel
from .wiener_hopf import FactorSolver, WhfTables

NOTOUCH = "notouch"
DIGITAL = "digital"
CALL = "call"
KINDS = (NOTOUCH, DIGITAL, CALL)

TRUNCATED = "truncated"
RESOLVENT = "resolvent"


class CorridorTooNarrow(ArithmeticError):
    """The alternating series diverges for some q."""


class SingularSystem(ArithmeticError):
    """The resolvent system is singular or not contractive."""


@dataclass(frozen=True)
class PayoffSpec:
    kind: str
    h_minus: float
    h_plus: float
    a: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown payoff kind {self.kind!r}")
        if not self.h_minus < self.h_plus:
            raise ValueError("need h_minus < h_plus")
        if self.kind != NOTOUCH:
            if self.a is None or not self.h_minus < self.a < self.h_plus:
                raise ValueError("log-strike must lie strictly between the barriers")
        elif self.a is not None:
            raise ValueError("no-touch payoff takes no strike")

    @classmethod
    def no_touch(cls, h_minus, h_plus):
        return cls(NOTOUCH, h_minus, h_plus)

    @classmethod
    def digital_put(cls, a, h_minus, h_plus):
        return cls(DIGITAL, h_minus, h_plus, a)

    @classmethod
    def call(cls, a, h_minus, h_plus):
        return cls(CALL, h_minus, h_plus, a)

    @property
    def width(self) -> float:
        return self.h_plus - self.h_minus


@dataclass
class CauchyMatrices:
    """``D_pm[j,k] = 1/(xi-_k - xi+_j)`` (source L-, target L+) and its mirror ``D_mp``."""

    D_pm: np.ndarray
    D_mp: np.ndarray

    @classmethod
    def build(cls, xi_plus, xi_minus):
        D_pm = 1.0 / (xi_minus[None, :] - xi_plus[:, None])
        D_mp = 1.0 / (xi_plus[None, :] - xi_minus[:, None])
        if not (np.all(np.isfinite(D_pm)) and np.all(np.isfinite(D_mp))):
            raise ContourError("contours L+ and L- intersect")
        return cls(D_pm, D_mp)


@dataclass
class WhatPair:
    w_plus: np.ndarray
    w_minus: np.ndarray
    j: object = 1
    last_increment: Optional[np.ndarray] = None


def safe_exp(z):
    """``exp`` with underflow to 0 below -745 and an error above +700 (real part)."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.real > 700):
        raise ContourError("growing exponential on a contour; check its orientation")
    out = np.zeros_like(z)
    ok = z.real > -745
    out[ok] = np.exp(z[ok])
    return out


def initial_what(payoff: PayoffSpec, contours: ContourSet, whf: WhfTables) -> WhatPair:
    """``W^+_1`` on L- and ``W^-_1`` on L+ for a batch of q (leading axis)."""
    Lp, Lm = contours.L_plus, contours.L_minus
    xp, xm = Lp.points, Lm.points
    nq = whf.q.size
    if payoff.kind == NOTOUCH:
        wp = np.broadcast_to(-1j / xm, (nq, xm.size)).copy()
        wm = np.broadcast_to(1j / xp, (nq, xp.size)).copy()
        return WhatPair(wp, wm, 1)

    hm, hp, a = payoff.h_minus, payoff.h_plus, payoff.a
    D = CauchyMatrices.build(xp, xm)
    up = (Lp.zeta / (2 * np.pi)) * Lp.der * safe_exp(1j * (hp - a) * xp) / xp
    dn = (Lm.zeta / (2 * np.pi)) * Lm.der * safe_exp(1j * (hm - a) * xm) / xm
    if payoff.kind == DIGITAL:
        wp = -(whf.phi_minus_on_Lplus * up[None, :]) @ D.D_mp.T
        wm = -1.0 / (1j * xp)[None, :] + (whf.phi_plus_on_Lminus * dn[None, :]) @ D.D_pm.T
        return WhatPair(wp, wm, 1)

    # call
    if whf.phi_minus_at_minus_i is None:
        raise ValueError("call payoff needs phi_minus(-i)")
    ea = math.exp(a)
    up = up / (xp + 1j)
    dn = dn / (xm + 1j)
    wp = (whf.phi_minus_at_minus_i[:, None] * math.exp(hp) / (1j * xm - 1)[None, :]
          - ea / (1j * xm)[None, :]
          - 1j * ea * ((whf.phi_minus_on_Lplus * up[None, :]) @ D.D_mp.T))
    wm = 1j * ea * ((whf.phi_plus_on_Lminus * dn[None, :]) @ D.D_pm.T)
    return WhatPair(wp, wm, 1)


def build_transfer_matrices(payoff: PayoffSpec, contours: ContourSet, whf: WhfTables,
                            cauchy: Optional[CauchyMatrices] = None):
    """Batched ``K_mp`` (L+ -> L-) and ``K_pm`` (L- -> L+), shapes ``(nq, N-, N+)``, ``(nq, N+, N-)``."""
    Lp, Lm = contours.L_plus, contours.L_minus
    if cauchy is None:
        cauchy = CauchyMatrices.build(Lp.points, Lm.points)
    width = payoff.width
    cp = (Lp.zeta / (2 * np.pi)) * Lp.der * safe_exp(1j * width * Lp.points)
    cm = (Lm.zeta / (2 * np.pi)) * Lm.der * safe_exp(-1j * width * Lm.points)
    K_mp = cauchy.D_mp[None, :, :] * (cp[None, :] * whf.ratio_mp_on_Lplus)[:, None, :]
    K_pm = cauchy.D_pm[None, :, :] * (cm[None, :] * whf.ratio_pm_on_Lminus)[:, None, :]
    return K_mp, K_pm


def _matvec(K, w):
    return np.matmul(K, w[..., None])[..., 0]


def next_what(w: WhatPair, K_mp, K_pm) -> WhatPair:
    return WhatPair(1j * _matvec(K_mp, w.w_minus), -1j * _matvec(K_pm, w.w_plus),
                    w.j + 1 if isinstance(w.j, int) else w.j)


def sum_series_truncated(w1: WhatPair, K_mp, K_pm, M0: int = 9) -> WhatPair:
    """Partial sum ``sum_{j=1}^{M0+1} (-1)^j W_j`` of the alternating series.

    ``M0`` counts the iteration cycles applied after the first term, so ``M0 = 0``
    returns ``-W_1`` and the default ``M0 = 9`` sums ten terms.
    """
    if M0 < 0:
        raise ValueError("M0 must be non-negative")
    sp, sm = -w1.w_plus.copy(), -w1.w_minus.copy()
    cur = w1
    growth = 0
    prev_norm = None
    inc = np.maximum(np.abs(w1.w_plus).max(axis=-1), np.abs(w1.w_minus).max(axis=-1))
    for j in range(2, M0 + 2):
        cur = next_what(cur, K_mp, K_pm)
        sign = -1.0 if j % 2 else 1.0
        sp += sign * cur.w_plus
        sm += sign * cur.w_minus
        inc = np.maximum(np.abs(cur.w_plus).max(axis=-1), np.abs(cur.w_minus).max(axis=-1))
        if prev_norm is not None and np.any(inc > prev_norm):
            growth += 1
            if growth >= 3:
                raise CorridorTooNarrow("alternating series diverges: corridor too narrow for this q")
        else:
            growth = 0
        prev_norm = inc
    return WhatPair(sp, sm, "summed", inc)


def spectral_radius_estimate(K, iters: int = 30, seed: int = 0) -> np.ndarray:
    """Power-iteration estimate of the spectral radius of each matrix in a batch."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(K.shape[:-1]) + 0j
    rho = np.zeros(K.shape[0])
    for _ in range(iters):
        v = _matvec(K, v)
        rho = np.linalg.norm(v, axis=-1)
        v = v / np.where(rho == 0, 1.0, rho)[..., None]
    return rho


def sum_series_resolvent(w1: WhatPair, w2: WhatPair, K_mp, K_pm, mode: str = "solve",
                         check_radius: bool = True) -> WhatPair:
    """``(I - K_mp K_pm)^{-1} (W_2 - W_1)`` on L-, for every q in the batch.

    The sum on L+ follows from the recursion, ``S^- = -W^-_1 + i K_pm S^+``, which
    avoids a second cubic-cost product and solve.
    """
    Kp = np.matmul(K_mp, K_pm)   # acts on vectors over L-
    if check_radius:
        rho = spectral_radius_estimate(Kp)
        if np.any(rho >= 1.0):
            raise SingularSystem(f"resolvent series not contractive (radius {rho.max():.3g})")
    rp = w2.w_plus - w1.w_plus
    A = np.eye(Kp.shape[-1]) - Kp
    try:
        if mode == "inverse":
            wp = _matvec(np.linalg.inv(A), rp)
        elif mode == "solve":
            wp = np.linalg.solve(A, rp[..., None])[..., 0]
        else:
            raise ValueError(f"unknown resolvent mode {mode!r}")
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"singular resolvent system: {exc}") from exc
    wm = -w1.w_minus + 1j * _matvec(K_pm, wp)
    return WhatPair(wp, wm, "summed")


def final_kernels(contours: ContourSet, payoff: PayoffSpec, xs):
    """q-independent factors of the final step, shapes ``(len(xs), N-)`` and ``(len(xs), N+)``."""
    Lp, Lm = contours.L_plus, contours.L_minus
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= payoff.h_minus) or np.any(xs >= payoff.h_plus):
        raise ValueError("spots must lie strictly inside the corridor")
    Ep = (Lm.zeta / (2 * np.pi)) * Lm.der[None, :] * safe_exp(1j * (xs[:, None] - payoff.h_plus) * Lm.points[None, :])
    Em = (Lp.zeta / (2 * np.pi)) * Lp.der[None, :] * safe_exp(1j * (xs[:, None] - payoff.h_minus) * Lp.points[None, :])
    return Ep, Em


def correction_transform(summed: WhatPair, whf: WhfTables, kernels) -> np.ndarray:
    """``V~1(q, x)``, shape ``(nq, len(xs))``."""
    Ep, Em = kernels
    return ((summed.w_plus * whf.phi_plus_on_Lminus) @ Ep.T
            + (summed.w_minus * whf.phi_minus_on_Lplus) @ Em.T)


class BarrierEngine:
    """Evaluates ``q -> V~1(q, xs)`` for fixed model, payoff, spots and contours."""

    def __init__(self, model: LevyModel, payoff: PayoffSpec, xs: Sequence[float],
                 contours: ContourSet, block: str = TRUNCATED, M0: int = 9,
                 resolvent_mode: str = "solve", chunk: int = 16):
        self.model, self.payoff, self.contours = model, payoff, contours
        self.xs = np.atleast_1d(np.asarray(xs, dtype=float))
        self.block, self.M0, self.resolvent_mode, self.chunk = block, M0, resolvent_mode, chunk
        self.factors = FactorSolver(model, contours.L_plus, contours.L_minus,
                                    contours.L_plus_fine, contours.L_minus_fine,
                                    need_minus_i=payoff.kind == CALL)
        self.cauchy = CauchyMatrices.build(contours.L_plus.points, contours.L_minus.points)
        self.kernels = final_kernels(contours, payoff, self.xs)
        self.last_increment = None

    def summed_what(self, q) -> tuple:
        whf = self.factors.tables(q)
        w1 = initial_what(self.payoff, self.contours, whf)
        K_mp, K_pm = build_transfer_matrices(self.payoff, self.contours, whf, self.cauchy)
        if self.block == TRUNCATED:
            s = sum_series_truncated(w1, K_mp, K_pm, self.M0)
            self.last_increment = s.last_increment
        elif self.block == RESOLVENT:
            w2 = next_what(w1, K_mp, K_pm)
            s = sum_series_resolvent(w1, w2, K_mp, K_pm, self.resolvent_mode)
        else:
            raise ValueError(f"unknown summation block {self.block!r}")
        return s, whf

    def __call__(self, q) -> np.ndarray:
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        out = np.empty((q.size, self.xs.size), dtype=complex)
        for start in range(0, q.size, self.chunk):
            sl = slice(start, start + self.chunk)
            s, whf = self.summed_what(q[sl])
            out[sl] = correction_transform(s, whf, self.kernels)
        return out
