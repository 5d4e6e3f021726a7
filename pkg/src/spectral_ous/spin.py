"""Generalized spin factors ``A = R x X*`` over a finite-dimensional normed space.

The cone is ``{(alpha, y) : ||y||_* <= alpha}``. Sharp elements are 0, 1 and
the atoms ``p = (1/2)(1, y)`` with ``||y||_* = 1``; the compression with
focus ``p`` is ``(alpha, w) -> (alpha + <w, x_y>) p`` where ``x_y`` is the
norming point of ``y`` chosen by :func:`duality_map`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .core import ContractError, Element, ModelContext, Projection, order_unit_norm
from .report import VerificationReport
from .rng import ShiftRegisterRNG

DUAL_UNIT_TOL = 1e-8
DUALITY_POST_TOL = 1e-8
SHARP_TOL = 1e-9
P_RANGE = (1.1, 10.0)


class DualityMapError(ArithmeticError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NormOracle:
    """A norm on ``X = R^n`` together with its dual norm on ``X*``.

    ``lp(p, n)`` gives the closed-form ℓ_p family. Custom norms pass three
    callables; when ``duality_map`` is omitted the norming point is found by
    maximizing ``<y, u>/||u||`` starting from ``u = y``.
    """

    def __init__(self, n, norm, dual_norm, duality_map=None, name="custom", p=None):
        if int(n) < 1:
            raise ContractError("norm dimension must be >= 1")
        self.n = int(n)
        self.norm = norm
        self.dual_norm = dual_norm
        self._duality_map = duality_map
        self.name = name
        self.p = p

    @classmethod
    def lp(cls, p, n):
        p = float(p)
        if not 1.0 < p < np.inf:
            raise ContractError(f"lp exponent must lie in (1, inf), got {p}")
        q = p / (p - 1.0)

        def norm(x):
            return float(np.sum(np.abs(x) ** p) ** (1.0 / p))

        def dual_norm(y):
            return float(np.sum(np.abs(y) ** q) ** (1.0 / q))

        def dmap(y):
            return np.sign(y) * np.abs(y) ** (q - 1.0)

        oracle = cls(n, norm, dual_norm, dmap, name=f"l{p:g}", p=p)
        oracle.q = q
        return oracle

    @property
    def is_lp(self):
        return self.p is not None

    def key(self):
        return ("lp", self.p, self.n) if self.is_lp else ("custom", id(self), self.n)

    def raw_duality_map(self, y):
        if self._duality_map is not None:
            return np.asarray(self._duality_map(np.asarray(y, dtype=float)), dtype=float)
        y = np.asarray(y, dtype=float)
        # solve for the representative with a positive leading entry so the
        # selection is exactly odd: x_{-y} = -x_y
        nz = np.flatnonzero(y)
        sign = -1.0 if nz.size and y[nz[0]] < 0 else 1.0
        return sign * _ascent_norming_point(self, sign * y, sign * y)

    def __repr__(self):
        return f"NormOracle({self.name}, n={self.n})"


def _ascent_norming_point(norm, y, start):
    """Maximize ``<y, u>/||u||`` over ``u``; return the maximizer on the unit sphere."""
    def neg(u):
        nu = norm.norm(u)
        return -float(y @ u) / nu if nu > 0 else 0.0

    u0 = start / max(norm.norm(start), 1e-300)
    res = minimize(neg, u0, method="BFGS", options={"gtol": 1e-12, "xrtol": 1e-10})
    u = res.x
    return u / norm.norm(u)


def duality_map(norm, y):
    """Unit ``x_y`` in ``X`` with ``<y, x_y> = 1`` for a unit dual vector ``y``."""
    y = np.asarray(y, dtype=float)
    dn = norm.dual_norm(y)
    if abs(dn - 1.0) > DUAL_UNIT_TOL:
        raise ContractError(f"duality_map needs a unit dual vector, got dual norm {dn}")
    x = norm.raw_duality_map(y)
    nx, pair = norm.norm(x), float(y @ x)
    if abs(nx - 1.0) > DUALITY_POST_TOL or abs(pair - 1.0) > DUALITY_POST_TOL:
        raise DualityMapError(
            f"norming point fails post-check: ||x|| = {nx!r}, <y,x> = {pair!r}",
            witness={"y": y.tolist(), "x": x.tolist()})
    return x


@dataclass(frozen=True, eq=False)
class SpinProjection(Projection):
    tag: str = "zero"
    y: np.ndarray | None = None


class SpinModel(ModelContext):
    kind = "spin"

    def __init__(self, norm, eps_cone=1e-9, eps_eq=1e-9):
        super().__init__(norm.n, eps_cone, eps_eq)
        self.norm_oracle = norm
        self._xcache = {}

    def _key(self):
        return (self.kind, self.n, self.norm_oracle.key())

    @property
    def dim(self):
        return self.n + 1

    @property
    def descriptor(self):
        o = self.norm_oracle
        return f"spin:{o.p:g}:{self.n}" if o.is_lp else f"spin:{o.name}:{self.n}"

    def pair(self, alpha, y):
        return Element(self, np.concatenate([[float(alpha)], np.asarray(y, dtype=float)]))

    @staticmethod
    def split(a):
        return float(a.coords[0]), a.coords[1:]

    def unit(self):
        return self.pair(1.0, np.zeros(self.n))

    def format_coords(self, a):
        alpha, y = self.split(a)
        o = self.norm_oracle
        head = f"{o.p!r}" if o.is_lp else o.name
        return f"spin p {head} alpha {alpha!r} y " + " ".join(repr(float(v)) for v in y)

    def dual_norm(self, y):
        return self.norm_oracle.dual_norm(y)

    def x_of(self, y):
        """Cached norming point of a unit dual vector."""
        key = y.tobytes()
        x = self._xcache.get(key)
        if x is None:
            x = duality_map(self.norm_oracle, y)
            if len(self._xcache) < 100_000:
                self._xcache[key] = x
        return x

    # -- order -----------------------------------------------------------
    def cone_margin(self, a):
        alpha, y = self.split(a)
        return alpha - self.dual_norm(y)

    def exact_cone_test(self, a):
        alpha, y = self.split(a)
        return self.dual_norm(y) <= alpha

    def norm(self, a):
        alpha, y = self.split(a)
        return abs(alpha) + self.dual_norm(y)

    # -- projections -------------------------------------------------------
    def proj_zero(self):
        return SpinProjection(self.zero(), "zero", None)

    def proj_one(self):
        return SpinProjection(self.unit(), "one", None)

    def atom(self, y):
        y = np.asarray(y, dtype=float)
        return SpinProjection(self.pair(0.5, 0.5 * y), "atom", y)

    def complement(self, p):
        if p.tag == "zero":
            return self.proj_one()
        if p.tag == "one":
            return self.proj_zero()
        return self.atom(-p.y)

    def as_projection(self, e):
        if isinstance(e, SpinProjection):
            return e
        if isinstance(e, Projection):
            e = e.element
        alpha, y = self.split(e)
        dn = self.dual_norm(y)
        if abs(alpha) + dn <= SHARP_TOL:
            return self.proj_zero()
        if abs(alpha - 1.0) + dn <= SHARP_TOL:
            return self.proj_one()
        if abs(alpha - 0.5) <= SHARP_TOL and abs(dn - 0.5) <= SHARP_TOL:
            return self.atom(y / dn)
        raise ContractError(f"element {e} is not sharp in {self.descriptor}")

    def compress(self, p, a):
        p = self.as_projection(p)
        if p.tag == "zero":
            return self.zero()
        if p.tag == "one":
            return a
        alpha, w = self.split(a)
        return (alpha + float(w @ self.x_of(p.y))) * p.element

    def spectral_atoms(self, a):
        alpha, w = self.split(a)
        r = self.dual_norm(w)
        tau = 1e-8 * (1.0 + abs(alpha) + r)
        if r <= tau:
            return [(_snap(alpha, tau), self.proj_one())]
        u = w / r
        return [(_snap(alpha - r, tau), self.atom(-u)), (_snap(alpha + r, tau), self.atom(u))]

    def cluster_threshold(self, a):
        return 1e-8 * (1.0 + self.norm(a))

    def jordan(self, a, b):
        return 0.25 * (square(a + b) - square(a - b))

    # -- sampling ----------------------------------------------------------
    def unit_dual(self, rng):
        while True:
            y = rng.normal(self.n)
            dn = self.dual_norm(y)
            if dn > 1e-6:
                return y / dn

    def random_element(self, rng):
        return self.pair(rng.normal(), rng.normal(self.n))

    def random_effect(self, rng):
        u = self.unit_dual(rng)
        r = 0.5 * rng.uniform()
        alpha = r + (1.0 - 2.0 * r) * rng.uniform()
        return self.pair(alpha, r * u)

    def random_projection(self, rng, rank=None):
        t = rng.uniform()
        if t < 0.1:
            return self.proj_zero()
        if t < 0.2:
            return self.proj_one()
        return self.atom(self.unit_dual(rng))

    def random_positive(self, rng):
        y = rng.normal(self.n)
        return self.pair(self.dual_norm(y) + abs(rng.normal()), y)


def _snap(x, tau):
    return 0.0 if abs(x) <= tau else x


def sharp_projection(norm_or_ctx, y):
    """Atom ``(1/2)(1, y/||y||_*)``."""
    ctx = norm_or_ctx if isinstance(norm_or_ctx, SpinModel) else SpinModel(norm_or_ctx)
    y = np.asarray(y, dtype=float)
    dn = ctx.dual_norm(y)
    if dn == 0.0:
        raise ContractError("sharp_projection needs a nonzero dual vector")
    return ctx.atom(y / dn)


def compression_apply(p, a):
    return a.ctx.compress(p, a)


def square(a):
    """``a²`` through the two-point spectral decomposition of ``a``."""
    ctx = a.ctx
    out = ctx.zero()
    for lam, p in ctx.spectral_atoms(a):
        out = out + (lam * lam) * p.element
    return out


def quarter_square_product(a, b):
    return a.ctx.jordan(a, b)


def explicit_spin_product(a, b):
    """``(α,y)∘(β,z) = (αβ + y·z, αz + βy)``; the Hilbert-space product."""
    ctx = a.ctx
    alpha, y = ctx.split(a)
    beta, z = ctx.split(b)
    return ctx.pair(alpha * beta + float(y @ z), alpha * z + beta * y)


def bilinearity_defect(a, b, c):
    j = quarter_square_product
    return order_unit_norm(j(a + b, c) - j(a, c) - j(b, c))


def psi(norm, y):
    """``ψ(y) = ||y||_* x_{y/||y||_*}``, ``ψ(0) = 0``."""
    y = np.asarray(y, dtype=float)
    r = norm.dual_norm(y)
    if r == 0.0:
        return np.zeros_like(y)
    return r * duality_map(norm, y / r)


def symmetry_defect(norm, y, z):
    """``|<z, x_y> − <y, x_z>|`` for unit dual vectors."""
    return abs(float(z @ duality_map(norm, y)) - float(y @ duality_map(norm, z)))


def eq7_residual(p, q):
    """Order unit norm of ``J_p(q)+J_{1-p}(1-q) − J_q(p) − J_{1-q}(1-p)``."""
    ctx = p.ctx
    one = ctx.unit()
    pc, qc = ctx.complement(p), ctx.complement(q)
    lhs = ctx.compress(p, q.element) + ctx.compress(pc, one - q.element)
    rhs = ctx.compress(q, p.element) + ctx.compress(qc, one - p.element)
    return order_unit_norm(lhs - rhs)


def jb_condition_gap(p, q):
    """``(eq7 residual, symmetry defect)``; the defect is 0 unless both are atoms."""
    gap = eq7_residual(p, q)
    if getattr(p, "tag", None) == "atom" and getattr(q, "tag", None) == "atom":
        return gap, symmetry_defect(p.ctx.norm_oracle, p.y, q.y)
    return gap, 0.0


def psi_linearity_defect(norm, y, z, w):
    """``|<w, ψ(y+z) − ψ(y) − ψ(z)>|`` with ``w`` normalized to the dual unit sphere."""
    w = np.asarray(w, dtype=float)
    w = w / norm.dual_norm(w)
    return abs(float(w @ (psi(norm, np.add(y, z)) - psi(norm, y) - psi(norm, z))))


def psi_gram(norm, basis_vectors, samples=100, seed=0):
    """Gram matrix ``G_ij = <v_i, ψ(v_j)>`` and the sampled ψ-linearity defect."""
    vs = [np.asarray(v, dtype=float) for v in basis_vectors]
    for v in vs:
        if norm.dual_norm(v) == 0.0:
            raise ContractError("psi_gram needs nonzero vectors")
    images = [psi(norm, v) for v in vs]
    g = np.array([[float(vi @ pj) for pj in images] for vi in vs])
    defect = 0.0
    for t in range(samples):
        rng = ShiftRegisterRNG.for_trial(seed, t)
        y, z, w = rng.normal(norm.n), rng.normal(norm.n), rng.normal(norm.n)
        defect = max(defect, psi_linearity_defect(norm, y, z, w))
    return g, defect


def probe_duality_uniqueness(norm, samples=20, seed=0, tol=1e-6):
    """Sample unit dual vectors and compare norming points from several starts.

    A custom norm whose norming points depend on the start is not smooth in
    the dual, so ``x_y`` is not canonical there; the report says so.
    """
    ctx = SpinModel(norm)
    rep = VerificationReport(suite="duality-uniqueness", model=ctx.descriptor, seed=seed,
                             trials=samples)
    worst = 0.0
    for t in range(samples):
        rng = ShiftRegisterRNG.for_trial(seed, t)
        y = ctx.unit_dual(rng)
        x0 = duality_map(norm, y)
        for _ in range(3):
            start = y + 0.5 * rng.normal(norm.n)
            x1 = _ascent_norming_point(norm, y, start)
            if abs(float(y @ x1) - 1.0) > DUALITY_POST_TOL:
                continue
            d = float(np.max(np.abs(x1 - x0)))
            if d > worst:
                worst = d
                if d > tol:
                    rep.add_witness("non-unique norming point", [ctx.pair(0.0, y)], d)
    rep.add_check("norming_point_spread", worst, tol, trials=samples)
    return rep
