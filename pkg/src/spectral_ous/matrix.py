"""The JB-algebra of real symmetric ``n x n`` matrices.

Coordinates are the upper triangle in row-major order, off-diagonal entries
stored once. The Jordan product is ``(ab + ba)/2``, compressions are
``x -> pxp`` and spectra come from a cyclic Jacobi eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (ContractError, EigenError, Element, ModelContext, Projection,
                   RankAmbiguityError, order_unit_norm)
from .kernels import jacobi_sweeps
from .report import VerificationReport

JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
IDEMPOTENT_TOL = 1e-9
RANK_CUTOFF = 1e-8
# singular values this close to the cutoff (by factor) make a rank decision ambiguous
RANK_AMBIGUITY_FACTOR = 100.0
COMMUTE_TOL = 1e-9


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple
    cluster_values: tuple
    spectral_projections: tuple
    threshold: float
    sweeps: int

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


class MatrixModel(ModelContext):
    """Symmetric matrices of size ``n`` ordered by positive semidefiniteness."""

    kind = "matrix"

    def __init__(self, n, eps_cone=1e-9, eps_eq=1e-9):
        super().__init__(n, eps_cone, eps_eq)
        self._iu = np.triu_indices(self.n)

    @property
    def dim(self):
        return self.n * (self.n + 1) // 2

    @property
    def descriptor(self):
        return f"matrix:{self.n}"

    def to_matrix(self, coords):
        m = np.zeros((self.n, self.n))
        m[self._iu] = coords
        return m + np.triu(m, 1).T

    def from_matrix(self, m):
        m = np.asarray(m, dtype=np.float64)
        if m.shape != (self.n, self.n):
            raise ContractError(f"expected {self.n}x{self.n} matrix, got {m.shape}")
        return Element(self, (0.5 * (m + m.T))[self._iu])

    def unit(self):
        return self.from_matrix(np.eye(self.n))

    def format_coords(self, a):
        vals = " ".join(repr(float(v)) for v in a.matrix.reshape(-1))
        return f"matrix n {self.n} rowmajor {vals}"

    # -- order -----------------------------------------------------------
    def cone_margin(self, a):
        return float(eigen_decompose(a).eigenvalues[0])

    def exact_cone_test(self, a):
        try:
            np.linalg.cholesky(a.matrix)
        except np.linalg.LinAlgError:
            return False
        return True

    def norm(self, a):
        w = eigen_decompose(a).eigenvalues
        return float(max(abs(w[0]), abs(w[-1])))

    # -- algebra ---------------------------------------------------------
    def jordan(self, a, b):
        ma, mb = a.matrix, b.matrix
        return self.from_matrix(0.5 * (ma @ mb + mb @ ma))

    def compress(self, p, a):
        pm = p.element.matrix
        return self.from_matrix(pm @ a.matrix @ pm)

    def spectral_atoms(self, a):
        es = eigen_decompose(a)
        return list(zip(es.cluster_values, es.spectral_projections))

    def as_projection(self, e):
        if isinstance(e, Projection):
            return e
        m = e.matrix
        if np.max(np.abs(np.linalg.eigvalsh(m @ m - m))) > IDEMPOTENT_TOL:
            raise ContractError("element is not idempotent within tolerance")
        return Projection(e)

    def complement(self, p):
        return Projection(self.unit() - p.element)

    def proj_zero(self):
        return Projection(self.zero())

    def proj_one(self):
        return Projection(self.unit())

    def projection_from_vectors(self, v):
        v = np.asarray(v).reshape(self.n, -1)
        return Projection(self.from_matrix(v @ v.T))

    # -- sampling ----------------------------------------------------------
    def random_element(self, rng):
        return self.from_matrix(rng.symmetric_gaussian(self.n))

    def random_projection(self, rng, rank=None):
        if rank is None:
            rank = rng.integers(0, self.n + 1)
        q = rng.orthonormal_frame(self.n)
        return self.projection_from_vectors(q[:, :rank])

    def random_effect(self, rng):
        q = rng.orthonormal_frame(self.n)
        w = rng.uniform(self.n)
        return self.from_matrix((q * w) @ q.T)

    def random_positive(self, rng):
        g = rng.normal((self.n, self.n))
        return self.from_matrix(g @ g.T / self.n)


def _sort_eig(w, v):
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigen_decompose(a):
    """Eigenvalues, eigenvectors and spectral clusters of a symmetric element."""
    cached = a._memo.get("eig")
    if cached is not None:
        return cached
    m = a.matrix
    w, v, sweeps, off = jacobi_sweeps(np.ascontiguousarray(m), JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    fro = float(np.linalg.norm(m))
    if off > JACOBI_REL_TOL * fro:
        raise EigenError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps", residual=off)
    w, v = _sort_eig(w, v)
    nrm = float(max(abs(w[0]), abs(w[-1])))
    tau = 1e-8 * (1.0 + nrm)
    clusters, values, projs = [], [], []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tau:
            idx = tuple(range(start, i))
            clusters.append(idx)
            val = float(np.mean(w[start:i]))
            # 0 is a distinguished spectral point (supports, Rickart map)
            values.append(0.0 if abs(val) <= tau else val)
            vc = v[:, start:i]
            projs.append(Projection(a.ctx.from_matrix(vc @ vc.T)))
            start = i
    es = EigenSystem(w, v, tuple(clusters), tuple(values), tuple(projs), tau, sweeps)
    a._memo["eig"] = es
    return es


def _require_matrix(*els):
    for e in els:
        if not isinstance(e.ctx, MatrixModel):
            raise ContractError("operation is defined for the matrix model only")
    ctx = els[0].ctx
    for e in els[1:]:
        if e.ctx != ctx:
            raise ContractError("context mismatch")


def jordan_product(a, b):
    if a.ctx != b.ctx:
        raise ContractError("context mismatch")
    return a.ctx.jordan(a, b)


def triple_product(a, b, c):
    """``{abc} = (a∘b)∘c + (b∘c)∘a − (a∘c)∘b``."""
    j = jordan_product
    return j(j(a, b), c) + j(j(b, c), a) - j(j(a, c), b)


def quadratic_map(a, b):
    """``U_a b = 2a∘(a∘b) − a²∘b``."""
    j = jordan_product
    return 2.0 * j(a, j(a, b)) - j(j(a, a), b)


def _as_element(p):
    return p.element if isinstance(p, Projection) else p


def mult_operator_identity_check(p, a):
    """Residual of ``U_p = 2T_p² − T_p`` and ``T_p = ½(I + U_p − U_{1−p})`` at ``a``."""
    pe = _as_element(p)
    pe = pe.ctx.as_projection(pe).element
    one = pe.ctx.unit()
    tp = jordan_product(pe, a)
    up = quadratic_map(pe, a)
    r1 = order_unit_norm(up - (2.0 * jordan_product(pe, tp) - tp))
    r2 = order_unit_norm(tp - 0.5 * (a + up - quadratic_map(one - pe, a)))
    return max(r1, r2)


def _rank_decision(s, cutoff_rel=RANK_CUTOFF):
    """Number of singular values above the cutoff; raises when ambiguous."""
    if s.size == 0 or s[0] == 0.0:
        return 0
    cut = cutoff_rel * s[0]
    near = (s > cut / RANK_AMBIGUITY_FACTOR) & (s < cut * RANK_AMBIGUITY_FACTOR)
    if np.any(near):
        raise RankAmbiguityError(f"singular value {s[near][0]:.3e} within ambiguity band of cutoff {cut:.3e}")
    return int(np.sum(s > cut))


def lattice_meet(p, q):
    """Projection onto ``range(p) ∩ range(q)``."""
    _require_matrix(p.element, q.element)
    ctx = p.ctx
    m = 2.0 * np.eye(ctx.n) - p.element.matrix - q.element.matrix
    u, s, _ = np.linalg.svd(m)
    r = _rank_decision(s) if np.any(s) else 0
    null = u[:, r:]
    return ctx.projection_from_vectors(null)


def lattice_join(p, q):
    ctx = p.ctx
    meet = lattice_meet(ctx.complement(p), ctx.complement(q))
    return ctx.complement(meet)


def operator_commute(a, b, tol=COMMUTE_TOL):
    """``T_aT_b = T_bT_a`` on the coordinate basis, cross-checked against ``ab = ba``."""
    _require_matrix(a, b)
    worst = 0.0
    for e in a.ctx.basis():
        d = jordan_product(a, jordan_product(b, e)) - jordan_product(b, jordan_product(a, e))
        worst = max(worst, float(np.max(np.abs(d.coords))))
    verdict = worst <= tol
    comm = a.matrix @ b.matrix - b.matrix @ a.matrix
    direct = float(np.max(np.abs(comm))) <= 4.0 * tol
    if verdict != direct and min(worst, float(np.max(np.abs(comm)))) > tol / 100:
        raise ArithmeticError(f"operator commutation and ab=ba disagree (residual {worst:.3e})")
    return verdict


def support(a):
    """Carrier ``s(a)``: sum of spectral projections with nonzero value."""
    es = eigen_decompose(a)
    vecs = [es.eigenvectors[:, list(c)] for c, val in zip(es.clusters, es.cluster_values)
            if abs(val) > es.threshold]
    if not vecs:
        return a.ctx.proj_zero()
    return a.ctx.projection_from_vectors(np.hstack(vecs))


def _linear_map_matrix(ctx, fn):
    return np.column_stack([fn(e).coords for e in ctx.basis()])


def annihilator_check(a):
    """Compare ``{a}^⊥ = {x : U_x(a) = 0}`` with ``U_p(A)`` for ``p = 1 − s(a)``.

    For positive ``a`` the annihilator is the kernel of ``T_a``; both sides are
    computed as coordinate subspaces and compared by rank.
    """
    _require_matrix(a)
    ctx = a.ctx
    rep = VerificationReport(suite="annihilator", model=ctx.descriptor, trials=1)
    if ctx.cone_margin(a) < -ctx.eps_cone * max(1.0, ctx.norm(a)):
        raise ContractError("annihilator_check requires a positive element")
    p = ctx.complement(support(a))
    rep.details["p"] = str(p.element)
    try:
        ta = _linear_map_matrix(ctx, lambda x: jordan_product(a, x))
        up = _linear_map_matrix(ctx, lambda x: ctx.compress(p, x))
        _, s_t, vt = np.linalg.svd(ta)
        r_t = _rank_decision(s_t)
        ker = vt[r_t:].T
        u_u, s_u, _ = np.linalg.svd(up)
        r_u = _rank_decision(s_u)
        rng_basis = u_u[:, :r_u]
        stacked = np.hstack([ker, rng_basis])
        s_st = np.linalg.svd(stacked, compute_uv=False) if stacked.size else np.zeros(0)
        r_st = _rank_decision(s_st)
    except RankAmbiguityError as exc:
        rep.mark_unknown(str(exc))
        return rep
    dim_k, dim_r = ker.shape[1], rng_basis.shape[1]
    rep.details.update(annihilator_dim=dim_k, compressed_range_dim=dim_r, joint_rank=r_st)
    rep.add_flag("dimensions_agree", dim_k == dim_r == r_st)
    res_in = 0.0
    for col in rng_basis.T:
        x = Element(ctx, col)
        res_in = max(res_in, order_unit_norm(quadratic_map(x, a)))
    res_out = 0.0
    for col in ker.T:
        x = Element(ctx, col)
        res_out = max(res_out, order_unit_norm(quadratic_map(x, a)),
                      order_unit_norm(x - ctx.compress(p, x)))
    tol = 1e-9 * (1.0 + order_unit_norm(a))
    rep.add_check("range_annihilates", res_in, tol, trials=dim_r)
    rep.add_check("kernel_in_range", res_out, tol, trials=dim_k)
    return rep


def jb_norm_axioms(a, b, tol=1e-9):
    """Slacks of ‖a∘b‖ ≤ ‖a‖‖b‖, ‖a²‖ ≤ ‖a‖², ‖a²‖ ≤ ‖a²+b²‖."""
    n = order_unit_norm
    a2 = jordan_product(a, a)
    b2 = jordan_product(b, b)
    na, nb, na2 = n(a), n(b), n(a2)
    slacks = (na * nb - n(jordan_product(a, b)), na * na - na2, n(a2 + b2) - na2)
    rep = VerificationReport(suite="jb-norm-axioms", model=a.ctx.descriptor, trials=1)
    for name, s in zip(("JBi", "JBii", "JBiii"), slacks):
        rep.add_check(name, -s, tol)
    rep.details["slacks"] = list(slacks)
    return rep
