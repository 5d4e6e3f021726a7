"""Model-independent order unit space layer.

An order unit space is handled through a :class:`ModelContext`, which owns the
coordinates, the positive cone and the unit. Elements carry their context and
an immutable coordinate vector; every operation is interpreted relative to
the context of its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

EPS_CONE = 1e-9
EPS_EQ = 1e-9
BISECTION_ITERATIONS = 60


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class EigenError(ArithmeticError):
    """The eigensolver did not converge; carries the last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RankAmbiguityError(ArithmeticError):
    """A subspace dimension could not be decided at the working tolerance."""


class ModelContext:
    """Base class for the concrete models.

    Subclasses implement coordinates, cone margin, closed-form norm,
    compressions and the spectral decomposition. ``eps_cone`` is the base of
    the relative cone tolerance ``eps_cone * max(1, ||a||)``.
    """

    kind = "abstract"

    def __init__(self, n, eps_cone=EPS_CONE, eps_eq=EPS_EQ):
        if int(n) < 1:
            raise ContractError(f"model dimension must be >= 1, got {n}")
        for name, val in (("eps_cone", eps_cone), ("eps_eq", eps_eq)):
            if not (0.0 < val < 1e-3):
                raise ContractError(f"{name} must lie in (0, 1e-3), got {val}")
        self.n = int(n)
        self.eps_cone = float(eps_cone)
        self.eps_eq = float(eps_eq)

    # -- identity -------------------------------------------------------
    def _key(self):
        return (self.kind, self.n)

    def __eq__(self, other):
        return isinstance(other, ModelContext) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"

    # -- coordinates ----------------------------------------------------
    @property
    def dim(self):
        raise NotImplementedError

    @property
    def descriptor(self):
        raise NotImplementedError

    def element(self, coords):
        return Element(self, coords)

    def zero(self):
        return Element(self, np.zeros(self.dim))

    def unit(self):
        raise NotImplementedError

    def basis(self):
        """Coordinate basis elements, used to tabulate linear maps."""
        eye = np.eye(self.dim)
        return [Element(self, row) for row in eye]

    # -- order structure (model specific) ---------------------------------
    def cone_margin(self, a):
        """Signed distance-like margin: >= 0 exactly on the cone."""
        raise NotImplementedError

    def exact_cone_test(self, a):
        """Tolerance-free cone test used by the bisection norm oracle."""
        raise NotImplementedError

    def norm(self, a):
        raise NotImplementedError

    # -- compressions and spectra (model specific) ------------------------
    def compress(self, p, a):
        raise NotImplementedError

    def spectral_atoms(self, a):
        """Ascending ``[(value, Projection), ...]`` with orthogonal atoms summing to 1."""
        raise NotImplementedError

    def as_projection(self, e):
        raise NotImplementedError

    def complement(self, p):
        raise NotImplementedError

    def jordan(self, a, b):
        raise NotImplementedError

    def cluster_threshold(self, a):
        return 1e-8 * (1.0 + self.norm(a))

    def format_coords(self, a):
        raise NotImplementedError


def _fmt(x):
    return repr(float(x))


@dataclass(frozen=True, eq=False)
class Element:
    """A member of the order unit space of ``ctx``."""

    ctx: ModelContext
    coords: np.ndarray = field(repr=False)
    _memo: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.float64).reshape(-1)
        if c.shape[0] != self.ctx.dim:
            raise ContractError(
                f"coordinate length {c.shape[0]} does not match {self.ctx.descriptor} (needs {self.ctx.dim})")
        if not np.all(np.isfinite(c)):
            raise ContractError("element coordinates must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def _same(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.ctx != self.ctx:
            raise ContractError(f"context mismatch: {self.ctx.descriptor} vs {other.ctx.descriptor}")
        return other

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Element(self.ctx, self.coords + other.coords)

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Element(self.ctx, self.coords - other.coords)

    def __neg__(self):
        return Element(self.ctx, -self.coords)

    def __mul__(self, t):
        if isinstance(t, Element):
            return NotImplemented
        return Element(self.ctx, float(t) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, t):
        return Element(self.ctx, self.coords / float(t))

    def shift(self, t):
        """``self + t*1``."""
        return self + t * self.ctx.unit()

    @cached_property
    def matrix(self):
        return self.ctx.to_matrix(self.coords)

    def __repr__(self):
        return f"Element({format_element(self)!r})"

    def __str__(self):
        return format_element(self)


@dataclass(frozen=True, eq=False)
class Projection:
    """An element certified sharp in its model; the focus of a compression."""

    element: Element

    @property
    def ctx(self):
        return self.element.ctx

    def __repr__(self):
        return f"Projection({format_element(self.element)!r})"


def _check_ctx(ctx, *elements):
    for a in elements:
        if a.ctx != ctx:
            raise ContractError(f"element of {a.ctx.descriptor} used with {ctx.descriptor}")


def cone_tolerance(a):
    return a.ctx.eps_cone * max(1.0, a.ctx.norm(a))


def cone_contains(ctx, a, tol=None):
    """True iff ``a`` is in the positive cone up to the relative tolerance."""
    _check_ctx(ctx, a)
    t = cone_tolerance(a) if tol is None else tol
    return ctx.cone_margin(a) >= -t


def cone_deficit(a):
    """How far ``a`` sits outside the cone (0 when inside)."""
    return max(0.0, -a.ctx.cone_margin(a))


def order_leq(a, b):
    if a.ctx != b.ctx:
        raise ContractError("order_leq: context mismatch")
    return cone_contains(a.ctx, b - a)


def order_unit_norm(a):
    return a.ctx.norm(a)


def is_effect(e):
    return order_leq(e.ctx.zero(), e) and order_leq(e, e.ctx.unit())


def distance(a, b):
    return order_unit_norm(a - b)


def bisection_norm(a, iterations=BISECTION_ITERATIONS):
    """Order unit norm as ``inf{t >= 0 : -t <= a <= t}`` by bisection.

    Uses the tolerance-free cone oracle of the model, so it is independent
    of the closed-form norm.
    """
    ctx = a.ctx
    one = ctx.unit()
    lo, hi = 0.0, float(np.sum(np.abs(a.coords)))

    def inside(t):
        return ctx.exact_cone_test(t * one - a) and ctx.exact_cone_test(t * one + a)

    if inside(lo):
        return 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return hi


def spectral_bounds_by_bisection(a, iterations=BISECTION_ITERATIONS):
    """``(sup{t: t <= a}, inf{t: a <= t})`` from the order relation alone."""
    ctx = a.ctx
    one = ctx.unit()
    r = float(np.sum(np.abs(a.coords))) + 1.0
    lo, hi = -r, r
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ctx.exact_cone_test(a - mid * one):
            lo = mid
        else:
            hi = mid
    lower = lo
    lo, hi = -r, r
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ctx.exact_cone_test(mid * one - a):
            hi = mid
        else:
            lo = mid
    return lower, hi


# -- text format -------------------------------------------------------------

def format_element(a):
    return a.ctx.format_coords(a)


def parse_element(text, ctx=None):
    """Parse ``matrix n <n> rowmajor ...`` or ``spin p <p> alpha <a> y ...``.

    When ``ctx`` is omitted a default context is built from the header.
    """
    from .matrix import MatrixModel
    from .spin import NormOracle, SpinModel

    tok = text.split()
    if not tok:
        raise ContractError("empty element text")
    try:
        if tok[0] == "matrix":
            if tok[1] != "n" or tok[3] != "rowmajor":
                raise ContractError("expected 'matrix n <n> rowmajor <floats>'")
            n = int(tok[2])
            vals = [float(v) for v in tok[4:]]
            if len(vals) != n * n:
                raise ContractError(f"matrix n {n} needs {n * n} entries, got {len(vals)}")
            ctx = ctx or MatrixModel(n)
            if not isinstance(ctx, MatrixModel) or ctx.n != n:
                raise ContractError("element header does not match context")
            return ctx.from_matrix(np.array(vals).reshape(n, n))
        if tok[0] == "spin":
            if tok[1] != "p" or tok[3] != "alpha" or tok[5] != "y":
                raise ContractError("expected 'spin p <p> alpha <float> y <floats>'")
            p = float(tok[2])
            alpha = float(tok[4])
            y = [float(v) for v in tok[6:]]
            if not y:
                raise ContractError("spin element needs at least one y coordinate")
            ctx = ctx or SpinModel(NormOracle.lp(p, len(y)))
            if not isinstance(ctx, SpinModel) or ctx.n != len(y):
                raise ContractError("element header does not match context")
            return Element(ctx, [alpha] + y)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ContractError):
            raise
        raise ContractError(f"malformed element text: {text!r}") from exc
    raise ContractError(f"unknown element kind {tok[0]!r}")


def isclose_elements(a, b, tol=None):
    tol = a.ctx.eps_eq if tol is None else tol
    return distance(a, b) <= tol


__all__ = [
    "ContractError", "EigenError", "RankAmbiguityError", "ModelContext", "Element",
    "Projection", "cone_contains", "cone_deficit", "order_leq", "order_unit_norm",
    "is_effect", "bisection_norm", "spectral_bounds_by_bisection", "parse_element",
    "format_element", "distance", "isclose_elements",
]
