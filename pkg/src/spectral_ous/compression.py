"""Compression bases over either model.

Everything here is written against the :class:`~spectral_ous.core.ModelContext`
interface (``compress``, ``complement``, ``spectral_atoms``,
``as_projection``), so the same code runs on symmetric matrices and on spin
factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (ContractError, Element, Projection, RankAmbiguityError, cone_contains,
                   cone_deficit, is_effect, order_leq, order_unit_norm)
from .report import VerificationReport
from .rng import ShiftRegisterRNG

RESIDUAL_TOL = 1e-9
MAX_CLUSTERS = 20
EXHAUSTIVE_CLOSURE_CLUSTERS = 6


def J(p, a):
    """Apply the compression with focus ``p``."""
    return p.ctx.compress(p, a)


def T(p, a):
    """``T_p = ½(I + J_p − J_{1−p})``."""
    return 0.5 * (a + J(p, a) - J(p.ctx.complement(p), a))


def as_projection(x):
    if isinstance(x, Projection):
        return x
    return x.ctx.as_projection(x)


def projection_sum(ctx, projections):
    """Sum of mutually orthogonal projections, certified sharp."""
    total = ctx.zero()
    for p in projections:
        total = total + p.element
    return ctx.as_projection(total)


# -- axioms -------------------------------------------------------------------

def verify_compression_axioms(p, samples, tol=1e-8):
    """Check F1 ``J(1) = p``, F2 ``e <= p => J(e) = e``, F3 ``J(e) = 0 => e <= 1-p``.

    F2 is exercised on ``J_p(f)`` and ``½J_p(f)``; F3 on the kernel effects
    ``J_{1-p}(f)``.
    """
    p = as_projection(p)
    ctx = p.ctx
    one = ctx.unit()
    pc = ctx.complement(p)
    rep = VerificationReport(suite="compression-axioms", model=ctx.descriptor, trials=len(samples))
    rep.add_check("F1", order_unit_norm(J(p, one) - p.element), tol, trials=1)
    f2 = f3 = premise = positivity = 0.0
    for f in samples:
        jf = J(p, f)
        positivity = max(positivity, cone_deficit(jf))
        for e in (jf, 0.5 * jf):
            r = order_unit_norm(J(p, e) - e) + cone_deficit(p.element - e)
            if r > f2:
                f2 = r
                if r > tol:
                    rep.add_witness("F2", [p.element, e], r)
        k = J(pc, f)
        premise = max(premise, order_unit_norm(J(p, k)))
        r = cone_deficit(pc.element - k)
        if r > f3:
            f3 = r
            if r > tol:
                rep.add_witness("F3", [p.element, k], r)
    n = len(samples)
    rep.add_check("F2", f2, tol, trials=n)
    rep.add_check("F3", f3, tol, trials=n)
    rep.add_check("F3_kernel", premise, tol, trials=n)
    rep.add_check("positive", positivity, tol, trials=n)
    return rep


def base_identity_residual(p, q, r, samples):
    """``max ||J_{p+r}(J_{q+r}(a)) − J_r(a)||`` over ``samples``.

    Raises :class:`ContractError` unless ``p + q + r <= 1`` and ``p + r``,
    ``q + r`` are projections.
    """
    ctx = p.ctx
    if not order_leq(p.element + q.element + r.element, ctx.unit()):
        raise ContractError("base identity needs p + q + r <= 1")
    pr = ctx.as_projection(p.element + r.element)
    qr = ctx.as_projection(q.element + r.element)
    worst = 0.0
    for a in samples:
        worst = max(worst, order_unit_norm(J(pr, J(qr, a)) - J(r, a)))
    return worst


verify_base_identity = base_identity_residual


def commute_residual(a, p):
    p = as_projection(p)
    return order_unit_norm(a - J(p, a) - J(p.ctx.complement(p), a))


def commutes(a, p, tol=RESIDUAL_TOL):
    """``a C p``: ``a = J_p(a) + J_{1-p}(a)``."""
    return commute_residual(a, p) <= tol * max(1.0, order_unit_norm(a))


def complementarity_residuals(p, positives, kernel_positives):
    """Sampled residuals for ``Ker+(J_p) = Im+(J_{1-p})``.

    ``positives`` are mapped into ``Im+(J_{1-p})`` and must be killed by
    ``J_p``; ``kernel_positives`` are positive elements built in ``Ker(J_p)``
    and must be fixed by ``J_{1-p}``.
    """
    pc = p.ctx.complement(p)
    image_side = max((order_unit_norm(J(p, J(pc, b))) for b in positives), default=0.0)
    kernel_side = 0.0
    for k in kernel_positives:
        kernel_side = max(kernel_side, order_unit_norm(J(pc, k) - k) + order_unit_norm(J(p, k)))
    return image_side, kernel_side


def principal_residual(p, effects):
    """Largest violation of ``e, f <= p, e + f <= 1 => e + f <= p`` over pairs."""
    worst = 0.0
    one = p.ctx.unit()
    for e, f in zip(effects[::2], effects[1::2]):
        e, f = J(p, e), J(p, f)
        s = 0.5 * (e + f)
        if order_leq(e, p.element) and order_leq(f, p.element) and order_leq(s, one):
            worst = max(worst, cone_deficit(p.element - s))
    return worst


# -- compatibility --------------------------------------------------------------

class Compatibility(NamedTuple):
    verdict: bool | None
    certificate: str


def _try_projection(x):
    try:
        return as_projection(x)
    except ContractError:
        return None


def mackey_compatible(e, f):
    """Decide compatibility of projections; certify it for general effects.

    Returns ``Compatibility(verdict, certificate)``; ``verdict`` is ``None``
    when no implemented certificate applies.
    """
    if e.ctx != f.ctx:
        raise ContractError("context mismatch")
    pe, pf = _try_projection(e), _try_projection(f)
    if pe is not None and pf is not None:
        return Compatibility(commutes(pe.element, pf), "projection-commutation")
    if not (is_effect(e) and is_effect(f)):
        raise ContractError("mackey_compatible needs effects")
    if order_leq(e, f) or order_leq(f, e):
        return Compatibility(True, "order")
    if order_leq(e + f, e.ctx.unit()):
        return Compatibility(True, "orthogonal-sum")
    if all(commutes(e, q) for _, q in f.ctx.spectral_atoms(f)):
        return Compatibility(True, "spectral-commutation")
    return Compatibility(None, "unknown")


# -- spectral pieces ----------------------------------------------------------

def _nonzero_atoms(a):
    tau = a.ctx.cluster_threshold(a)
    return [(lam, q) for lam, q in a.ctx.spectral_atoms(a) if abs(lam) > tau]


def support(a):
    """Carrier ``s(a)``: the smallest projection ``p`` with ``p∘a = a``."""
    return projection_sum(a.ctx, [q for _, q in _nonzero_atoms(a)])


def rickart_map(a):
    """``a* = 1 − s(a)``."""
    return a.ctx.complement(support(a))


def rickart_condition(a, p, tol=RESIDUAL_TOL):
    """Right side of the Rickart biconditional: ``a ∈ C(p)`` and ``J_p(a) = 0``."""
    scale = max(1.0, order_unit_norm(a))
    return commutes(a, p, tol) and order_unit_norm(J(p, a)) <= tol * scale


@dataclass(frozen=True)
class OrthogonalDecomposition:
    p: Projection
    a_plus: Element
    a_minus: Element
    abs: Element


def orthogonal_decomposition(a):
    """``a = a⁺ − a⁻`` split by the least projection ``p = s(a⁺)``."""
    ctx = a.ctx
    tau = ctx.cluster_threshold(a)
    plus, minus, pos = ctx.zero(), ctx.zero(), []
    for lam, q in ctx.spectral_atoms(a):
        if lam > tau:
            plus = plus + lam * q.element
            pos.append(q)
        elif lam < -tau:
            minus = minus - lam * q.element
    p = projection_sum(ctx, pos)
    return OrthogonalDecomposition(p, plus, minus, plus + minus)


def least_projection_decomposition(a):
    """Comparability decomposition found by searching ``P(a)``.

    Among projections ``q`` of the bicommutant with ``a ∈ C(q)`` and
    ``J_{1-q}(a) <= 0 <= J_q(a)``, returns the one below all others.
    """
    ctx = a.ctx
    query = bicommutant(a)
    cands = []
    for q in query.projections:
        if not commutes(a, q):
            continue
        jp, jm = J(q, a), J(ctx.complement(q), a)
        if cone_contains(ctx, jp) and cone_contains(ctx, -jm):
            cands.append((q, jp, -jm))
    if not cands:
        raise ArithmeticError("no separating projection in P(a)")
    for q, jp, jm in cands:
        if all(order_leq(q.element, r.element) for r, _, _ in cands):
            return OrthogonalDecomposition(q, jp, jm, jp + jm)
    raise ArithmeticError("separating projections have no least element")


def projection_cover(e):
    """``e°``: the least projection above the effect ``e``; equals ``s(e)``."""
    if not is_effect(e):
        raise ContractError("projection_cover needs an effect")
    return support(e)


# -- commutants -----------------------------------------------------------------

@dataclass(frozen=True)
class CommutantQuery:
    generators: tuple
    atoms: tuple
    values: tuple
    projections: tuple

    @property
    def basis(self):
        """Basis of the bicommutant ``CC(a)``: the spectral atoms."""
        return tuple(q.element for q in self.atoms)


def bicommutant(a):
    """``P(a)`` as the Boolean algebra of unions of spectral atoms of ``a``."""
    ctx = a.ctx
    atoms = ctx.spectral_atoms(a)
    k = len(atoms)
    if k > MAX_CLUSTERS:
        raise ContractError(f"{k} spectral clusters exceed the cap of {MAX_CLUSTERS}")
    projs = []
    for mask in range(1 << k):
        projs.append(projection_sum(ctx, [q for i, (_, q) in enumerate(atoms) if mask >> i & 1]))
    return CommutantQuery((a,), tuple(q for _, q in atoms), tuple(v for v, _ in atoms), tuple(projs))


def verify_bicommutant(query, tol=RESIDUAL_TOL):
    """Boolean closure of ``P(a)`` (exhaustive for few atoms) and ``a ∈ span``."""
    a = query.generators[0]
    ctx = a.ctx
    rep = VerificationReport(suite="bicommutant", model=ctx.descriptor, trials=len(query.projections))
    recon = ctx.zero()
    for v, q in zip(query.values, query.atoms):
        recon = recon + v * q.element
    rep.add_check("in_span", order_unit_norm(a - recon), tol * (1.0 + order_unit_norm(a)))
    projs = query.projections
    k = len(query.atoms)
    if k <= EXHAUSTIVE_CLOSURE_CLUSTERS:
        pairs = itertools.product(range(len(projs)), repeat=2)
    else:
        pairs = [(i, (7 * i + 3) % len(projs)) for i in range(len(projs))][:4096]
    worst = 0.0
    n_pairs = 0
    for i, j in pairs:
        p, q = projs[i], projs[j]
        # disjoint-union indexing: the meet of masks i, j is mask i & j
        worst = max(worst, order_unit_norm(J(p, q.element) - projs[i & j].element))
        n_pairs += 1
    comp = max(order_unit_norm(ctx.complement(projs[i]).element - projs[(len(projs) - 1) ^ i].element)
               for i in range(len(projs)))
    rep.add_check("meet_closed", worst, tol, trials=n_pairs)
    rep.add_check("complement_closed", comp, tol, trials=len(projs))
    rep.details["boolean_algebra_size"] = len(projs)
    return rep


def extended_commute(a, b):
    """``aCb``: every projection of ``P(a)`` is compatible with every one of ``P(b)``.

    Compatibility with the atoms suffices, because the projections compatible
    with a fixed projection are closed under complements and orthogonal sums.
    Returns ``None`` if some pair is undecided.
    """
    unknown = False
    for _, p in a.ctx.spectral_atoms(a):
        for _, q in b.ctx.spectral_atoms(b):
            v = mackey_compatible(p.element, q.element).verdict
            if v is False:
                return False
            if v is None:
                unknown = True
    return None if unknown else True


def rickart_biconditional(a, extra=(), tol=RESIDUAL_TOL):
    """Check ``p <= a* ⇔ (a ∈ C(p) and J_p(a) = 0)`` on ``P(a)`` and ``extra``.

    Also recomputes ``a*`` as the largest projection of ``P(a)`` satisfying the
    right side and ``s(a)`` as the smallest with ``p∘a = a``, and reports
    ``||a* − (1 − s(a))||``. Projections in ``extra`` with ``J_p(a) = 0`` but
    ``a ∉ C(p)`` are recorded as witnesses that the commutation clause is
    needed.
    """
    ctx = a.ctx
    star = rickart_map(a)
    query = bicommutant(a)
    rep = VerificationReport(suite="rickart", model=ctx.descriptor, trials=len(query.projections))
    mismatches = 0
    best = None
    for q in query.projections:
        lhs = order_leq(q.element, star.element)
        rhs = rickart_condition(a, q, tol)
        if lhs != rhs:
            mismatches += 1
            rep.add_witness("biconditional", [a, q.element], 1.0)
        if rhs and (best is None or order_leq(best.element, q.element)):
            best = q
    rep.add_check("biconditional_P(a)", mismatches, 0, trials=len(query.projections))
    smallest = None
    for q in query.projections:
        if order_unit_norm(ctx.jordan(q.element, a) - a) <= tol * max(1.0, order_unit_norm(a)):
            if smallest is None or order_leq(q.element, smallest.element):
                smallest = q
    scale = 1.0
    rep.add_check("star_equals_1_minus_support",
                  max(order_unit_norm(best.element - ctx.complement(smallest).element),
                      order_unit_norm(best.element - star.element)), tol * scale)
    needed = 0
    extra_mismatch = 0
    for q in extra:
        lhs = order_leq(q.element, star.element)
        rhs = rickart_condition(a, q, tol)
        if lhs != rhs:
            extra_mismatch += 1
        if order_unit_norm(J(q, a)) <= tol * max(1.0, order_unit_norm(a)) and not lhs:
            needed += 1
            rep.add_witness("commutation-clause-needed", [a, q.element], commute_residual(a, q))
    rep.add_check("biconditional_extra", extra_mismatch, 0, trials=len(extra))
    rep.details["commutation_clause_witnesses"] = needed
    return rep


def neutral_cone_witness(a):
    """Projections ``q`` with ``J_q(a) = 0`` but ``a ∉ C(q)`` (matrix model, indefinite ``a``).

    Mixes a positive and a negative eigenvector so the compressed value
    vanishes; returns an empty list when ``a`` is semidefinite.
    """
    from .matrix import MatrixModel, eigen_decompose

    if not isinstance(a.ctx, MatrixModel):
        return []
    es = eigen_decompose(a)
    w, v = es.eigenvalues, es.eigenvectors
    if not (w[0] < -es.threshold and w[-1] > es.threshold):
        return []
    lp, lm = w[-1], -w[0]
    c, s = np.sqrt(lm / (lp + lm)), np.sqrt(lp / (lp + lm))
    x = c * v[:, -1] + s * v[:, 0]
    return [a.ctx.projection_from_vectors(x)]


# -- JB condition -------------------------------------------------------------

def eq7_residual(p, q):
    """``||J_p(q) + J_{1-p}(1-q) − J_q(p) − J_{1-q}(1-p)||``."""
    ctx = p.ctx
    one = ctx.unit()
    pc, qc = ctx.complement(p), ctx.complement(q)
    lhs = J(p, q.element) + J(pc, one - q.element)
    rhs = J(q, p.element) + J(qc, one - p.element)
    return order_unit_norm(lhs - rhs)


def t_condition_residual(p, q):
    """``||T_p(q) − T_q(p)||``; equivalent to the residual above up to a factor."""
    return order_unit_norm(T(p, q.element) - T(q, p.element))


# -- blocks ---------------------------------------------------------------------

def _boolean_atoms(ctx, generators):
    """Atoms of the Boolean algebra generated by compatible projections."""
    atoms = [ctx.proj_one()]
    for g in generators:
        gc = ctx.complement(g)
        nxt = []
        for at in atoms:
            for side in (g, gc):
                m = J(side, at.element)
                if order_unit_norm(m) > RESIDUAL_TOL:
                    nxt.append(ctx.as_projection(m))
        atoms = nxt
    return atoms


def _commutant_dim(ctx, atoms):
    rows = []
    for q in atoms:
        qc = ctx.complement(q)
        rows.append(np.column_stack([(e - J(q, e) - J(qc, e)).coords for e in ctx.basis()]))
    m = np.vstack(rows) if rows else np.zeros((1, ctx.dim))
    s = np.linalg.svd(m, compute_uv=False)
    from .matrix import _rank_decision
    return ctx.dim - _rank_decision(s)


def block_and_cblock(generators, pool=(), samples=20, seed=0, tol=RESIDUAL_TOL):
    """Close compatible ``generators`` to a Boolean algebra and extend it to a block.

    ``pool`` is the candidate set used for greedy maximal extension; the
    report records its size, since maximality is only relative to it. The
    C-block is ``span`` of the block; its dimension is compared with the
    dimension of the commutant of the block, and associativity of the
    Jordan product is sampled inside it.
    """
    gens = [as_projection(g) for g in generators]
    if not gens:
        raise ContractError("block_and_cblock needs at least one generator")
    ctx = gens[0].ctx
    for g, h in itertools.combinations(gens, 2):
        if not commutes(g.element, h):
            raise ContractError("generators are not pairwise compatible")
    rep = VerificationReport(suite="block", model=ctx.descriptor, seed=seed, trials=samples)
    atoms = _boolean_atoms(ctx, gens)
    rep.details["generated_size"] = 2 ** len(atoms)
    used = 0
    for cand in pool:
        cand = as_projection(cand)
        if all(commutes(cand.element, at) for at in atoms):
            refined = _boolean_atoms(ctx, atoms + [cand])
            if len(refined) > len(atoms):
                atoms = refined
                used += 1
    rep.details.update(pool_size=len(pool), pool_used=used, block_size=2 ** len(atoms),
                       atoms=len(atoms))
    total = projection_sum(ctx, atoms)
    rep.add_check("atoms_partition_unity", order_unit_norm(total.element - ctx.unit()), tol)
    try:
        cdim = _commutant_dim(ctx, atoms)
    except RankAmbiguityError as exc:
        rep.mark_unknown(str(exc))
        return rep
    rep.details["cblock_span_dim"] = len(atoms)
    rep.details["commutant_dim"] = cdim
    rep.add_flag("cblock_span_equals_commutant", cdim == len(atoms))
    worst = 0.0
    for t in range(samples):
        rng = ShiftRegisterRNG.for_trial(seed, t)
        x, y, z = (sum((rng.normal() * at.element for at in atoms), ctx.zero()) for _ in range(3))
        j = ctx.jordan
        worst = max(worst, order_unit_norm(j(j(x, y), z) - j(x, j(y, z))))
    rep.add_check("associative", worst, 1e-8, trials=samples)
    rep.details["atom_elements"] = [str(at.element) for at in atoms]
    return rep
