"""Optimality verification for uniform fits.

A model is a best approximation exactly when convex weights on the positive
and negative extreme points match every lifted monomial moment up to the
model degree; feasibility of that moment system is one small LP.  When it is
infeasible, the Farkas multipliers assemble into a polynomial of the same
degree that strictly separates the two extreme sets, which is the classical
separability (isolability) view of non-optimality.  Both views are exposed
and must agree; tests lean on that cross-check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from ._linalg import nullspace_vector
from .fitting import ExtremeSets, SampleSet
from .lp import LinearProgram, LpFailure, solve, solve_exact
from .monomials import MonomialBasis, Number, PolynomialModel, build_basis, evaluate, lift

MOMENT_TOL = 1e-8
ISOLABLE_MARGIN = 1e-9
_SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class IntersectionCertificate:
    """Convex weights proving the lifted extreme hulls intersect.

    `alpha` weights the points of `plus_indices`, `beta` those of
    `minus_indices`; each side sums to one and every basis monomial moment
    matches within `moment_residual`.
    """

    degree: int
    plus_indices: tuple[int, ...]
    minus_indices: tuple[int, ...]
    alpha: tuple[Number, ...]
    beta: tuple[Number, ...]
    moment_residual: Number
    exact: bool = False

    @property
    def support_size(self) -> int:
        return sum(1 for w in self.alpha if w > 0) + sum(1 for w in self.beta if w > 0)


@dataclass(frozen=True)
class SeparationWitness:
    """Polynomial strictly positive on E+ and strictly negative on E-.

    Normalised so the smaller of the two margins equals one.  A margin is
    None when the corresponding extreme set is empty (the trivially
    improvable case).
    """

    model: PolynomialModel
    plus_margin: Optional[Number]  # min of L over E+
    minus_margin: Optional[Number]  # max of L over E-


@dataclass(frozen=True)
class IsolabilityResult:
    isolable: bool
    margin: Number
    witness: Optional[SeparationWitness]


VerificationOutcome = Union[IntersectionCertificate, SeparationWitness]


def _points_of(samples: SampleSet, exact: bool):
    return samples.as_fractions()[0] if exact else samples.as_floats()[0]


def _moment_lp(plus_lifted, minus_lifted) -> LinearProgram:
    p, q = len(plus_lifted), len(minus_lifted)
    width = len(plus_lifted[0])
    rows = [
        ([1] * p + [0] * q, "==", 1),
        ([0] * p + [1] * q, "==", 1),
    ]
    for k in range(1, width):  # the constant moment is implied by the sums
        rows.append(([u[k] for u in plus_lifted] + [-v[k] for v in minus_lifted], "==", 0))
    return LinearProgram([0] * (p + q), rows, ((0, None),) * (p + q))


def _moment_residual(plus_lifted, minus_lifted, alpha, beta) -> Number:
    width = len(plus_lifted[0])
    worst: Number = 0
    for k in range(width):
        diff = sum(a * u[k] for a, u in zip(alpha, plus_lifted)) - sum(
            b * v[k] for b, v in zip(beta, minus_lifted)
        )
        if abs(diff) > worst:
            worst = abs(diff)
    return worst


def _margins(model: PolynomialModel, plus_pts, minus_pts):
    plus_margin = min((evaluate(model, x) for x in plus_pts), default=None)
    minus_margin = max((evaluate(model, y) for y in minus_pts), default=None)
    return plus_margin, minus_margin


def _normalized_witness(coeffs, basis, plus_pts, minus_pts) -> Optional[SeparationWitness]:
    model = PolynomialModel(basis, tuple(coeffs))
    plus_margin, minus_margin = _margins(model, plus_pts, minus_pts)
    gaps = []
    if plus_margin is not None:
        gaps.append(plus_margin)
    if minus_margin is not None:
        gaps.append(-minus_margin)
    t = min(gaps)
    if t <= 0:
        return None
    scaled = PolynomialModel(basis, tuple(c / t for c in coeffs))
    plus_margin, minus_margin = _margins(scaled, plus_pts, minus_pts)
    return SeparationWitness(scaled, plus_margin, minus_margin)


def _constant_witness(basis: MonomialBasis, sign: int, plus_pts, minus_pts) -> SeparationWitness:
    coeffs = [0] * basis.size
    coeffs[0] = sign
    model = PolynomialModel(basis, tuple(coeffs))
    plus_margin, minus_margin = _margins(model, plus_pts, minus_pts)
    return SeparationWitness(model, plus_margin, minus_margin)


def _max_margin(plus_lifted, minus_lifted, width, exact: bool):
    """Maximise t with <A, lift> >= t on E+, <= -t on E-, |A|_inf <= 1."""
    nv = width + 1
    objective = [0] * width + [-1]  # maximise t
    rows = []
    for u in plus_lifted:
        rows.append((list(u) + [-1], ">=", 0))
    for v in minus_lifted:
        rows.append((list(v) + [1], "<=", 0))
    bounds = [(-1, 1)] * width + [(None, None)]
    sol = (solve_exact if exact else solve)(LinearProgram(objective, rows, bounds))
    if sol.status != "optimal":
        raise LpFailure(f"margin LP came back {sol.status}", {"status": sol.status})
    return sol.x[width], sol.x[:width]


def hulls_intersect(plus_points, minus_points, degree: int, exact: bool = False) -> bool:
    """Whether the lifted degree-`degree` hulls of two raw point lists meet."""
    if not plus_points or not minus_points:
        return False
    d = len(plus_points[0])
    basis = build_basis(d, degree)
    plus_lifted = [lift(p, basis) for p in plus_points]
    minus_lifted = [lift(p, basis) for p in minus_points]
    sol = (solve_exact if exact else solve)(_moment_lp(plus_lifted, minus_lifted))
    return sol.status == "optimal"


def check_hull_intersection(
    extremes: ExtremeSets, samples: SampleSet, degree: int, exact: bool = False
) -> VerificationOutcome:
    """Certificate of optimality, or a strict separating polynomial.

    Feasibility of the moment-matching LP over the extreme sets yields the
    certificate weights; infeasibility converts the Farkas witness into a
    degree-`degree` polynomial separating E+ from E-, normalised so the
    smaller margin is one.
    """
    pts = _points_of(samples, exact)
    basis = build_basis(samples.dimension, degree)

    if extremes.degenerate:
        # exact fit: any shared point certifies optimality outright
        alpha = tuple([1] + [0] * (len(extremes.plus) - 1))
        beta = tuple([1] + [0] * (len(extremes.minus) - 1))
        return IntersectionCertificate(
            degree, tuple(extremes.plus), tuple(extremes.minus), alpha, beta, 0, exact
        )
    plus_pts = [pts[i] for i in extremes.plus]
    minus_pts = [pts[i] for i in extremes.minus]
    if not extremes.plus:
        return _constant_witness(basis, -1, plus_pts, minus_pts)
    if not extremes.minus:
        return _constant_witness(basis, 1, plus_pts, minus_pts)

    plus_lifted = [lift(p, basis) for p in plus_pts]
    minus_lifted = [lift(p, basis) for p in minus_pts]
    sol = (solve_exact if exact else solve)(_moment_lp(plus_lifted, minus_lifted))
    if sol.status == "optimal":
        p = len(plus_lifted)
        alpha = tuple(sol.x[:p])
        beta = tuple(sol.x[p:])
        residual = _moment_residual(plus_lifted, minus_lifted, alpha, beta)
        return IntersectionCertificate(
            degree, tuple(extremes.plus), tuple(extremes.minus), alpha, beta, residual, exact
        )
    if sol.status != "infeasible":
        raise LpFailure(f"moment LP came back {sol.status}", {"status": sol.status})

    # Farkas multipliers: (mass row E+, mass row E-, one per non-constant monomial)
    y = sol.farkas
    lam_plus, lam_minus = y[0], y[1]
    half = Fraction(1, 2) if exact else 0.5
    coeffs = [-(lam_plus - lam_minus) * half] + [-ck for ck in y[2:]]
    witness = _normalized_witness(coeffs, basis, plus_pts, minus_pts)
    if witness is None:
        # float-mode Farkas too noisy to give strict margins; fall back to the
        # margin-maximising LP, which must separate if the moment LP is infeasible
        t, coeffs = _max_margin(plus_lifted, minus_lifted, basis.size, exact)
        witness = _normalized_witness(coeffs, basis, plus_pts, minus_pts)
        if witness is None:
            raise LpFailure(
                "moment system infeasible but no strict separator found (degenerate instance)",
                {"margin": float(t)},
            )
    return witness


def check_linear_case(
    extremes: ExtremeSets, samples: SampleSet, exact: bool = False
) -> VerificationOutcome:
    """Hull intersection of the extreme sets directly in R^d (degree 1)."""
    return check_hull_intersection(extremes, samples, 1, exact)


def caratheodory_reduce(
    cert: IntersectionCertificate,
    samples: SampleSet,
    degree: Optional[int] = None,
    exact: Optional[bool] = None,
) -> IntersectionCertificate:
    """Equivalent certificate supported on at most n_m + 2 points in total.

    Iterates affine-dependence elimination on the combined lifted system:
    while the support is too large, a null direction of the active columns
    shifts weight until some entry hits zero.  Moments and the per-side
    normalisations are preserved.
    """
    degree = cert.degree if degree is None else degree
    exact = cert.exact if exact is None else exact
    pts = _points_of(samples, exact)
    basis = build_basis(samples.dimension, degree)
    target = basis.nonconstant_count + 2

    entries = [("+", i, w) for i, w in zip(cert.plus_indices, cert.alpha)]
    entries += [("-", i, w) for i, w in zip(cert.minus_indices, cert.beta)]
    support_tol = 0 if exact else _SUPPORT_TOL

    def support():
        return [k for k, (_, _, w) in enumerate(entries) if w > support_tol]

    while True:
        live = support()
        if len(live) <= target:
            break
        columns = []
        for k in live:
            side, idx, _ = entries[k]
            u = lift(pts[idx], basis)
            if side == "+":
                columns.append(list(u) + [1, 0])
            else:
                columns.append([-g for g in u] + [0, 1])
        rows = [[col[r] for col in columns] for r in range(basis.size + 2)]
        eta = nullspace_vector(rows, exact)
        if eta is None:
            warnings.warn("support reduction found no affine dependence; returning input certificate")
            return cert
        if all(e <= 0 for e in eta):
            eta = [-e for e in eta]
        steps = [
            (entries[k][2] / e, k, pos)
            for pos, (k, e) in enumerate(zip(live, eta))
            if e > 0
        ]
        if not steps:
            warnings.warn("degenerate null direction during support reduction; returning input certificate")
            return cert
        tau = min(s[0] for s in steps)
        for pos, k in enumerate(live):
            side, idx, w = entries[k]
            w = w - tau * eta[pos]
            if not exact and abs(w) <= _SUPPORT_TOL:
                w = 0
            if exact and w < 0:
                w = Fraction(0)
            entries[k] = (side, idx, max(w, 0) if not exact else w)

    plus = [(i, w) for side, i, w in entries if side == "+" and w > support_tol]
    minus = [(i, w) for side, i, w in entries if side == "-" and w > support_tol]
    plus_lifted = [lift(pts[i], basis) for i, _ in plus]
    minus_lifted = [lift(pts[i], basis) for i, _ in minus]
    residual = _moment_residual(
        plus_lifted, minus_lifted, [w for _, w in plus], [w for _, w in minus]
    )
    return IntersectionCertificate(
        degree,
        tuple(i for i, _ in plus),
        tuple(i for i, _ in minus),
        tuple(w for _, w in plus),
        tuple(w for _, w in minus),
        residual,
        exact,
    )


def check_isolability(
    extremes: ExtremeSets, samples: SampleSet, degree: int, exact: bool = False
) -> IsolabilityResult:
    """Strict separability of E+ and E- by a polynomial of the given degree.

    Maximises the margin t subject to <A, lift(x)> >= t on E+, <= -t on E-
    and |A|_inf <= 1; the sets are isolable when the optimum exceeds 1e-9
    (exactly positive in rational mode).
    """
    if not extremes.plus and not extremes.minus:
        raise ValueError("both extreme sets are empty")
    pts = _points_of(samples, exact)
    basis = build_basis(samples.dimension, degree)
    plus_pts = [pts[i] for i in extremes.plus]
    minus_pts = [pts[i] for i in extremes.minus]
    plus_lifted = [lift(p, basis) for p in plus_pts]
    minus_lifted = [lift(p, basis) for p in minus_pts]
    t, coeffs = _max_margin(plus_lifted, minus_lifted, basis.size, exact)
    isolable = (t > 0) if exact else (t > ISOLABLE_MARGIN)
    witness = None
    if isolable:
        witness = _normalized_witness(coeffs, basis, plus_pts, minus_pts)
    return IsolabilityResult(isolable=isolable, margin=t, witness=witness)


def find_critical_point_set(
    extremes: ExtremeSets, samples: SampleSet, degree: int, exact: bool = False
) -> Optional[list[int]]:
    """A minimal non-isolable extreme subset, or None when already isolable.

    Greedy with index-order tie-breaking: walk the extreme indices once and
    drop every point whose removal keeps the remainder non-isolable.  In the
    result, deleting any single member restores isolability.
    """
    base = check_isolability(extremes, samples, degree, exact)
    if base.isolable:
        return None
    plus = set(extremes.plus)
    minus = set(extremes.minus)

    def isolable_without(idx: int) -> bool:
        trial = ExtremeSets(
            plus=tuple(sorted(plus - {idx})),
            minus=tuple(sorted(minus - {idx})),
            psi=extremes.psi,
            rel_tol=extremes.rel_tol,
        )
        if not trial.plus and not trial.minus:
            return True  # nothing left to separate
        return check_isolability(trial, samples, degree, exact).isolable

    for idx in sorted(plus | minus):
        if not isolable_without(idx):
            plus.discard(idx)
            minus.discard(idx)
    return sorted(plus | minus)


def verify_certificate(
    cert: IntersectionCertificate, samples: SampleSet, degree: Optional[int] = None
) -> Number:
    """Replay certificate weights through the monomial layer; returns the residual."""
    degree = cert.degree if degree is None else degree
    pts = _points_of(samples, cert.exact)
    basis = build_basis(samples.dimension, degree)
    plus_lifted = [lift(pts[i], basis) for i in cert.plus_indices]
    minus_lifted = [lift(pts[i], basis) for i in cert.minus_indices]
    return _moment_residual(plus_lifted, minus_lifted, cert.alpha, cert.beta)


def verify_witness(
    witness: SeparationWitness, extremes: ExtremeSets, samples: SampleSet
) -> bool:
    """Replay a separating polynomial; True when the separation is strict."""
    ok = True
    for i in extremes.plus:
        ok = ok and evaluate(witness.model, samples.points[i]) > 0
    for i in extremes.minus:
        ok = ok and evaluate(witness.model, samples.points[i]) < 0
    return ok
