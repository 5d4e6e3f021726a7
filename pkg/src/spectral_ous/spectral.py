"""Spectral resolutions and functional calculus.

Spectra are finite here, so the continuous and the Borel calculus both act
by evaluation on the spectral points: ``g(a) = sum_i g(λ_i) P_i``. Interval
arguments follow the right-closed convention ``(u, v]``, matching the
right-continuity of ``λ -> p_{a,λ}``; spectral points within the cluster
threshold of an endpoint count as sitting on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .compression import orthogonal_decomposition, projection_sum, rickart_map
from .core import ContractError, order_unit_norm, spectral_bounds_by_bisection


class FunctionEvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = True

    def contains(self, x, tol=0.0):
        if self.lo_closed:
            above = x >= self.lo - tol
        else:
            above = x > self.lo + tol
        if self.hi_closed:
            below = x <= self.hi + tol
        else:
            below = x < self.hi - tol
        return above and below


REAL_LINE = (Interval(-math.inf, math.inf, False, False),)


def half_open(u, v):
    """``(u, v]``."""
    return Interval(float(u), float(v), False, True)


@dataclass(frozen=True)
class SpectralResolution:
    ctx: object
    jumps: tuple
    atoms: tuple
    cumulative: tuple
    threshold: float

    def index(self, lam):
        """Number of jumps at or below ``lam``."""
        return int(np.searchsorted(np.asarray(self.jumps), lam + self.threshold, side="right"))

    def at(self, lam):
        """``p_{a,λ}``."""
        i = self.index(lam)
        return self.ctx.proj_zero() if i == 0 else self.cumulative[i - 1]


def spectral_resolution(a):
    ctx = a.ctx
    atoms = ctx.spectral_atoms(a)
    jumps = tuple(v for v, _ in atoms)
    projs = tuple(q for _, q in atoms)
    cumulative = []
    for i in range(len(projs)):
        cumulative.append(projection_sum(ctx, projs[:i + 1]))
    return SpectralResolution(ctx, jumps, projs, tuple(cumulative), ctx.cluster_threshold(a))


def resolution_definition_residual(a, lams):
    """``max ||p_{a,λ} − ((a − λ)⁺)*||`` over ``lams``; the right side is built
    from the comparability decomposition and the Rickart map."""
    res = spectral_resolution(a)
    worst = 0.0
    for lam in lams:
        direct = rickart_map(orthogonal_decomposition(a.shift(-lam)).a_plus)
        worst = max(worst, order_unit_norm(res.at(lam).element - direct.element))
    return worst


def spectral_bounds(a):
    """``(L_a, U_a)``: smallest and largest spectral points."""
    res = spectral_resolution(a)
    return res.jumps[0], res.jumps[-1]


def spectral_bounds_residual(a):
    lo, hi = spectral_bounds(a)
    blo, bhi = spectral_bounds_by_bisection(a)
    return max(abs(lo - blo), abs(hi - bhi))


def rs_partition(lower, upper, mesh):
    """Grid for ``[L − mesh, U]``: ``L − mesh`` followed by the points ``U − k·mesh``.

    Anchoring at ``U`` makes the grid for ``mesh/2`` a refinement of the grid
    for ``mesh``.
    """
    if not mesh > 0:
        raise ContractError("mesh must be positive")
    start = lower - mesh
    k = int(math.floor((upper - start) / mesh))
    while k > 0 and upper - k * mesh <= start:
        k -= 1
    while upper - (k + 1) * mesh > start:
        k += 1
    pts = [start] + [upper - j * mesh for j in range(k, 0, -1)] + [upper]
    return pts


def rs_integral_approx(a, mesh):
    """Riemann-Stieltjes sum ``Σ t_i (p_{a,t_i} − p_{a,t_{i−1}})`` and its error ``||a − sum||``."""
    res = spectral_resolution(a)
    pts = rs_partition(res.jumps[0], res.jumps[-1], mesh)
    ctx = a.ctx
    total = ctx.zero()
    prev_idx = res.index(pts[0])
    prev = res.at(pts[0]).element
    for t in pts[1:]:
        idx = res.index(t)
        if idx != prev_idx:
            cur = res.at(t).element
            total = total + t * (cur - prev)
            prev, prev_idx = cur, idx
    return total, order_unit_norm(a - total)


# -- real functions -------------------------------------------------------------

@dataclass(frozen=True)
class RealFunction:
    """A function applied to finite spectra.

    ``preimage(λ)`` returns ``g^{-1}((−∞, λ])`` as a tuple of intervals, or
    ``None`` when not declared.
    """

    name: str
    fn: Callable[[float], float]
    continuous: bool = True
    preimage: Callable[[float], tuple] | None = field(default=None, compare=False)

    def __call__(self, x):
        try:
            val = float(self.fn(float(x)))
        except (ArithmeticError, ValueError) as exc:
            raise FunctionEvaluationError(f"{self.name} failed at {x!r}: {exc}") from exc
        if not math.isfinite(val):
            raise FunctionEvaluationError(f"{self.name} is not finite at {x!r}")
        return val


def identity():
    return RealFunction("id", lambda t: t, True, lambda lam: (Interval(-math.inf, lam),))


def constant(c):
    c = float(c)
    return RealFunction(f"const {c!r}", lambda t: c, True,
                        lambda lam: REAL_LINE if lam >= c else ())


def poly(*coeffs):
    """``c0 + c1 t + ... + ck t^k``."""
    cs = [float(c) for c in coeffs] or [0.0]

    def fn(t):
        acc = 0.0
        for c in reversed(cs):
            acc = acc * t + c
        return acc

    while len(cs) > 1 and cs[-1] == 0.0:
        cs = cs[:-1]
    pre = None
    if len(cs) == 1:
        pre = constant(cs[0]).preimage
    elif len(cs) == 2:
        c0, c1 = cs

        def pre(lam):
            b = (lam - c0) / c1
            return (Interval(-math.inf, b),) if c1 > 0 else (Interval(b, math.inf, True, False),)
    elif len(cs) == 3 and cs[1] == 0.0 and cs[2] > 0.0:
        c0, c2 = cs[0], cs[2]

        def pre(lam):
            if lam < c0:
                return ()
            r = math.sqrt((lam - c0) / c2)
            return (Interval(-r, r, True, True),)
    return RealFunction("poly " + " ".join(repr(c) for c in coeffs), fn, True, pre)


def square_fn():
    return poly(0.0, 0.0, 1.0)


def positive_part():
    return RealFunction("pos", lambda t: max(t, 0.0), True,
                        lambda lam: (Interval(-math.inf, lam),) if lam >= 0 else ())


def absolute():
    def pre(lam):
        return (Interval(-lam, lam, True, True),) if lam >= 0 else ()
    return RealFunction("abs", abs, True, pre)


def indicator(u, v):
    """``χ_{(u, v]}``."""
    u, v = float(u), float(v)

    def pre(lam):
        if lam < 0:
            return ()
        if lam < 1:
            return (Interval(-math.inf, u), Interval(v, math.inf, False, False))
        return REAL_LINE
    return RealFunction(f"chi {u!r} {v!r}", lambda t: 1.0 if u < t <= v else 0.0, False, pre)


def root(n):
    """``t -> t^{1/n}`` on nonnegative spectra."""
    n = int(n)
    if n < 1:
        raise ContractError("root order must be >= 1")

    def fn(t):
        if t < 0:
            if t > -1e-12:
                return 0.0
            raise ValueError("negative argument")
        return t ** (1.0 / n)

    def pre(lam):
        return (Interval(-math.inf, lam ** n),) if lam >= 0 else ()
    return RealFunction(f"root {n}", fn, True, pre)


def parse_function(spec):
    """Parse ``poly c0 ... ck`` | ``pos`` | ``abs`` | ``chi u v`` | ``root n``."""
    tok = spec.split()
    if not tok:
        raise ContractError("empty function spec")
    head, args = tok[0], tok[1:]
    try:
        if head == "poly" and args:
            return poly(*[float(x) for x in args])
        if head == "pos" and not args:
            return positive_part()
        if head == "abs" and not args:
            return absolute()
        if head == "chi" and len(args) == 2:
            return indicator(float(args[0]), float(args[1]))
        if head == "root" and len(args) == 1:
            return root(int(args[0]))
        if head == "id" and not args:
            return identity()
    except ValueError as exc:
        raise ContractError(f"bad function spec {spec!r}") from exc
    raise ContractError(f"unknown function spec {spec!r}")


# -- calculi ------------------------------------------------------------------

def _apply(a, g):
    ctx = a.ctx
    out = ctx.zero()
    for lam, q in ctx.spectral_atoms(a):
        out = out + g(lam) * q.element
    return out


def continuous_fc(a, g):
    """``g(a) = Σ g(λ_i) P_i`` for a continuous ``g``."""
    if not g.continuous:
        raise ContractError(f"{g.name} is not continuous; use borel_fc")
    return _apply(a, g)


def borel_fc(a, g):
    """Bounded Borel calculus; on finite spectra it acts by evaluation."""
    return _apply(a, g)


def spectral_measure(a, intervals):
    """``ξ_a(B) = χ_B(a)`` for a finite union ``B`` of intervals."""
    ctx = a.ctx
    tau = ctx.cluster_threshold(a)
    hit = [q for lam, q in ctx.spectral_atoms(a) if any(iv.contains(lam, tau) for iv in intervals)]
    return projection_sum(ctx, hit)


def pushforward_check(a, g, lam):
    """``||p_{g(a),λ} − ξ_a(g^{-1}((−∞, λ]))||``."""
    if g.preimage is None:
        raise ContractError(f"no declared preimage for {g.name}")
    ga = borel_fc(a, g)
    lhs = spectral_resolution(ga).at(lam)
    rhs = spectral_measure(a, g.preimage(lam))
    return order_unit_norm(lhs.element - rhs.element)


def support_sequence(e, orders):
    """``[(n, e^{1/n}), ...]`` for the support-limit check."""
    return [(n, continuous_fc(e, root(n))) for n in orders]


__all__ = [
    "Interval", "half_open", "SpectralResolution", "spectral_resolution",
    "resolution_definition_residual", "spectral_bounds", "spectral_bounds_residual",
    "rs_partition", "rs_integral_approx", "RealFunction", "identity", "constant", "poly",
    "square_fn", "positive_part", "absolute", "indicator", "root", "parse_function",
    "continuous_fc", "borel_fc", "spectral_measure", "pushforward_check", "support_sequence",
    "FunctionEvaluationError",
]
