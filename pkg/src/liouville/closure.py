"""Closure of the subgroup generated by supp(mu): V + lattice decompositions.

Structured cases are decided exactly (1-d gcd/irrationality, rational lattices
via Hermite normal form, coordinate-axis products, Kronecker shapes, affine
pieces); anything else falls back to the numerical density probe and is never
certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any

from . import ratlinalg as rl
from .exactreal import (
    ConstantBasis,
    ExtendedRational,
    format_coordinate,
    rational_gcd_many,
    rational_ratio,
)
from .measures import Point, SupportDescriptor, point_is_zero


@dataclass(frozen=True)
class ClosedSubgroup:
    """closure(G(supp)) = span(v_basis) + Z-span(lambda_basis)."""

    dimension: int
    basis: ConstantBasis
    v_basis: tuple[Point, ...]
    lambda_basis: tuple[Point, ...]
    orthogonal: bool
    provenance: str  # "exact" | "numerical-probe"
    route: str
    witness: Any = None
    orthogonal_exact: bool = True
    probe: Any = None

    @property
    def v_dim(self) -> int:
        return len(self.v_basis)

    @property
    def lattice_rank(self) -> int:
        return len(self.lambda_basis)

    def is_full(self) -> bool:
        return self.v_dim == self.dimension

    def is_certified(self) -> bool:
        return self.provenance == "exact"


@dataclass(frozen=True)
class HyperplaneCertificate:
    """Witness that supp(mu) lies in H + cZ for a codimension-1 space H."""

    normal: Point  # H = normal-orthogonal hyperplane
    c: Point
    h_basis: tuple[Point, ...]
    exact: bool = True

    def pairing(self, x: Point) -> ExtendedRational:
        return er_dot(self.normal, x)


class ClosureError(ValueError):
    pass


# -- exact vector helpers ----------------------------------------------------------


def er_dot(u: Point, v: Point) -> ExtendedRational:
    """Exact inner product; raises NotRepresentableError on constant products."""
    acc = u[0].basis.zero()
    for a, b in zip(u, v):
        acc = acc + a * b
    return acc


def point_from_fractions(basis: ConstantBasis, vec) -> Point:
    return tuple(basis.from_rational(Fraction(c)) for c in vec)


def rational_parts(p: Point):
    """Coordinate slices of a point: one rational vector per basis constant."""
    m = p[0].basis.size + 1
    return [[c.coords[k] for c in p] for k in range(m)]


def is_rational_point(p: Point) -> bool:
    return all(c.is_rational() for c in p)


def scalar_direction_split(p: Point):
    """Write p = scale * w with w rational primitive, or return None.

    Works whenever all coordinates are rational multiples of one coordinate,
    e.g. (pi, 2*pi) = pi * (1, 2).
    """
    pivot = next((c for c in p if not c.is_zero()), None)
    if pivot is None:
        return None
    ratios = []
    for c in p:
        if c.is_zero():
            ratios.append(Fraction(0))
            continue
        r = rational_ratio(pivot, c)
        if r is None:
            return None
        ratios.append(r)
    denom = math.lcm(*(r.denominator for r in ratios))
    ints = [r * denom for r in ratios]
    g = math.gcd(*(abs(int(c)) for c in ints if c != 0))
    prim = [Fraction(c, g) for c in ints]
    scale = pivot.scale(Fraction(g, denom))
    return scale, prim


# -- 1-d closure ---------------------------------------------------------------------


def closure_1d(support: SupportDescriptor) -> ClosedSubgroup:
    """Dense or g*Z: Remark-level trichotomy for subgroups of the line."""
    if support.dimension != 1:
        raise ClosureError("closure_1d requires dimension 1")
    basis = _descriptor_basis(support)
    if support.is_empty():
        return ClosedSubgroup(1, basis, (), (), True, "exact", "trivial")
    if support.contains_interval_or_ball or support.has_accumulation_point or support.dense_directions:
        route = "interval_or_ball" if support.contains_interval_or_ball else "accumulation"
        full = (point_from_fractions(basis, [1]),)
        return ClosedSubgroup(1, basis, full, (), True, "exact", route)
    scalars = support.positive_scalars_1d()
    if not scalars:
        return ClosedSubgroup(1, basis, (), (), True, "exact", "trivial")
    a1 = scalars[0]
    ratios = []
    for b in scalars:
        r = rational_ratio(a1, b)
        if r is None:
            full = (point_from_fractions(basis, [1]),)
            return ClosedSubgroup(
                1, basis, full, (), True, "exact", "irrational_pair", witness=(a1, b)
            )
        ratios.append(r)
    g = a1.scale(rational_gcd_many(ratios))
    return ClosedSubgroup(1, basis, (), ((g,),), True, "exact", "lattice")


def _descriptor_basis(support: SupportDescriptor) -> ConstantBasis:
    for p in support.finite_points:
        return p[0].basis
    for d in support.dense_directions:
        return d[0].basis
    for bas, off in support.affine_pieces:
        return off[0].basis
    return ConstantBasis()


# -- rational lattice and Kronecker machinery ------------------------------------------


def lattice_hnf(generators) -> tuple[Point, ...]:
    """Hermite-normal-form basis of the lattice spanned by rational points."""
    if not generators:
        return ()
    basis = generators[0][0].basis
    vecs = []
    for gvec in generators:
        if not is_rational_point(gvec):
            raise ClosureError("lattice_hnf requires purely rational coordinates")
        vecs.append([c.coords[0] for c in gvec])
    cols = rl.hnf_lattice(vecs)
    return tuple(point_from_fractions(basis, col) for col in cols)


def kronecker_check(c: Point):
    """Density test for Z^d + cZ: rank of {1, c_1, ..., c_d} over Q.

    Returns ("dense", None) or ("not_dense", dependency) where dependency is
    a nonzero rational vector (l_0, l_1, ..., l_d) with
    l_0*1 + sum_i l_i*c_i = 0.
    """
    d = len(c)
    m = c[0].basis.size
    rows = [[Fraction(1)] + [Fraction(0)] * m]
    for ci in c:
        rows.append(list(ci.coords))
    if rl.rank(rows) == d + 1:
        return ("dense", None)
    dep = rl.left_dependency(rows)
    return ("not_dense", tuple(dep))


def _kronecker_closure(basis: ConstantBasis, c: Point):
    """Exact closure of Z^d + cZ when {1, c_i} are rationally dependent.

    The annihilator {xi in Z^d : <xi, c> in Z} is an integer lattice cut out
    by rational linear conditions; the closure is its dual: V = real kernel,
    lattice = Z-span of a rational right inverse.
    """
    d = len(c)
    m = basis.size
    # integer xi with sum_i xi_i c_i^{(k)} = 0 for every irrational constant k
    rows = []
    for k in range(1, m + 1):
        row = [ci.coords[k] for ci in c]
        if any(x != 0 for x in row):
            rows.append(row)
    if rows:
        ints, _ = rl.clear_denominators(rows)
        kernel = rl.integer_kernel(ints)
    else:
        kernel = [tuple(int(i == j) for i in range(d)) for j in range(d)]
    if not kernel:
        # annihilator trivial: closure is everything
        v = tuple(point_from_fractions(basis, [int(i == j) for i in range(d)]) for j in range(d))
        return v, ()
    # inside that lattice, require <xi, c^{(0)}> in Z
    c0 = [ci.coords[0] for ci in c]
    fr = [sum(Fraction(k[i]) * c0[i] for i in range(d)) for k in kernel]
    cong = rl.congruence_lattice(fr)
    xi_basis = []
    for mvec in cong:
        xi = [sum(mvec[j] * kernel[j][i] for j in range(len(kernel))) for i in range(d)]
        xi_basis.append(xi)
    xi_basis = [x for x in rl.hnf_lattice(xi_basis)]
    if not xi_basis:
        v = tuple(point_from_fractions(basis, [int(i == j) for i in range(d)]) for j in range(d))
        return v, ()
    # V = rational kernel of the annihilator rows
    vker = rl.nullspace(xi_basis)
    v_basis = tuple(point_from_fractions(basis, vec) for vec in vker)
    # lattice: rational solutions of Xi y_i = e_i
    s = len(xi_basis)
    lam = []
    for i in range(s):
        rhs = [Fraction(int(j == i)) for j in range(s)]
        y = rl.solve(xi_basis, rhs)
        if y is None:
            raise ClosureError("annihilator basis is rank-deficient")
        lam.append(point_from_fractions(basis, y))
    return v_basis, tuple(lam)


# -- multi-d closure ---------------------------------------------------------------


def closure_multid(support: SupportDescriptor, probe_config=None) -> ClosedSubgroup:
    """Structured-case engine per the decision theory; probe fallback otherwise."""
    d = support.dimension
    if d == 1:
        return closure_1d(support)
    basis = _descriptor_basis(support)
    full_v = tuple(
        point_from_fractions(basis, [int(i == j) for i in range(d)]) for j in range(d)
    )
    if support.contains_interval_or_ball or support.spheres:
        return ClosedSubgroup(d, basis, full_v, (), True, "exact", "interval_or_ball")

    # assemble V from affine pieces and dense directions
    v_dirs: list[Point] = []
    for piece_basis, offset in support.affine_pieces:
        v_dirs.extend(piece_basis)
        if not point_is_zero(offset):
            raise ClosureError("affine pieces with nonzero offsets are not supported")
    v_dirs.extend(support.dense_directions)
    points = [p for p in support.finite_points if not point_is_zero(p)]

    if not v_dirs:
        result = _closure_points_only(basis, d, points, support, probe_config)
        if result is not None:
            return result
        return _probe_closure(basis, support, probe_config)

    # rationalize V directions so reductions stay exact
    v_rat = []
    for dir_ in v_dirs:
        split = scalar_direction_split(dir_)
        if split is None:
            return _probe_closure(basis, support, probe_config)
        v_rat.append(split[1])
    v_span = _rational_span_basis(v_rat)
    if len(v_span) == d:
        return ClosedSubgroup(d, basis, full_v, (), True, "exact", "affine_span")

    # reduce residual points modulo V in an exact rational complement
    comp = _rational_complement(v_span, d)
    reduced = []
    for p in points:
        beta = _reduce_mod_subspace(p, v_span, comp, basis)
        if beta is None:
            return _probe_closure(basis, support, probe_config)
        if not point_is_zero(beta):
            reduced.append(beta)
    sub = SupportDescriptor(dimension=len(comp), finite_points=tuple(_dedup(reduced)))
    inner = (
        closure_1d(sub)
        if len(comp) == 1
        else _closure_points_only(basis, len(comp), list(sub.finite_points), sub, probe_config)
    )
    if inner is None or not inner.is_certified():
        return _probe_closure(basis, support, probe_config)
    # map W-coordinates back to R^d
    comp_points = [point_from_fractions(basis, w) for w in comp]
    v_basis = tuple(point_from_fractions(basis, v) for v in v_span)
    v_extra = tuple(_combine(comp_points, v) for v in inner.v_basis)
    lam = tuple(_combine(comp_points, v) for v in inner.lambda_basis)
    if len(v_basis) + len(v_extra) == d:
        return ClosedSubgroup(d, basis, full_v, (), True, "exact", "affine_plus_" + inner.route)
    return ClosedSubgroup(
        d,
        basis,
        v_basis + v_extra,
        lam,
        False,
        "exact",
        "affine_plus_" + inner.route,
        witness=inner.witness,
    )


def _closure_points_only(basis, d, points, support, probe_config):
    """Finite-point dispatch: rational HNF, axis products, collinear, Kronecker."""
    if not points:
        return ClosedSubgroup(d, basis, (), (), True, "exact", "trivial")

    if all(is_rational_point(p) for p in points):
        lam = lattice_hnf(points)
        return ClosedSubgroup(d, basis, (), lam, True, "exact", "lattice")

    axes = _axis_split(points, d)
    if axes is not None:
        return _axis_closure(basis, d, axes)

    collinear = _collinear_closure(basis, d, points)
    if collinear is not None:
        return collinear

    kron = _kronecker_case(basis, d, points)
    if kron is not None:
        return kron
    return None


def _dedup(points):
    out = []
    seen = set()
    for p in points:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _axis_split(points, d):
    """Group points by the single axis they live on; None if any point is off-axis."""
    axes: dict[int, list[ExtendedRational]] = {}
    for p in points:
        nz = [i for i, c in enumerate(p) if not c.is_zero()]
        if len(nz) != 1:
            return None
        axes.setdefault(nz[0], []).append(p[nz[0]])
    return axes


def _axis_closure(basis, d, axes):
    """Per-axis 1-d closures combined along orthogonal coordinate axes."""
    v_basis = []
    lam = []
    routes = []
    for i, scalars in sorted(axes.items()):
        sub = SupportDescriptor(dimension=1, finite_points=tuple((s,) for s in scalars))
        cl = closure_1d(sub)
        routes.append(cl.route)
        unit = [Fraction(0)] * d
        unit[i] = Fraction(1)
        if cl.is_full():
            v_basis.append(point_from_fractions(basis, unit))
        elif cl.lambda_basis:
            g = cl.lambda_basis[0][0]
            vec = [basis.zero()] * d
            vec[i] = g
            lam.append(tuple(vec))
    route = "axes"
    if any(r == "irrational_pair" for r in routes):
        route = "irrational_pair"
    elif all(r == "lattice" for r in routes):
        route = "lattice"
    return ClosedSubgroup(d, basis, tuple(v_basis), tuple(lam), True, "exact", route)


def _collinear_closure(basis, d, points):
    """All points rational multiples of one direction: 1-d closure on the line."""
    split0 = scalar_direction_split(points[0])
    if split0 is None:
        return None
    scale0, w = split0
    wpt = point_from_fractions(basis, w)
    scalars = []
    for p in points:
        # p = t * w requires every coordinate ratio rational wrt the direction
        t = None
        for ci, wi in zip(p, wpt):
            if wi.is_zero():
                if not ci.is_zero():
                    return None
                continue
            t_i = _er_ratio(ci, wi)
            if t_i is None:
                return None
            if t is None:
                t = t_i
            elif not (t - t_i).is_zero():
                return None
        scalars.append(t)
    sub = SupportDescriptor(dimension=1, finite_points=tuple((abs(s),) for s in scalars))
    cl = closure_1d(sub)
    if cl.is_full():
        return ClosedSubgroup(
            d, basis, (wpt,), (), True, "exact", "collinear_" + cl.route, witness=cl.witness
        )
    g = cl.lambda_basis[0][0]
    lam = tuple(c * g if c.is_rational() or g.is_rational() else None for c in wpt)
    if any(v is None for v in lam):
        return None
    return ClosedSubgroup(d, basis, (), (lam,), True, "exact", "collinear_lattice")


def _er_ratio(num: ExtendedRational, den: ExtendedRational):
    """num/den as ExtendedRational when representable (den rational, or
    proportional coordinate vectors)."""
    if den.is_zero():
        return None
    if den.is_rational():
        return num.scale(Fraction(1) / den.as_rational())
    r = rational_ratio(den, num)
    if r is None:
        return None
    return den.basis.from_rational(r)


def _kronecker_case(basis, d, points):
    """d rational pair-points forming a basis plus one extra point."""
    rational = _dedup([p for p in points if is_rational_point(p)])
    extra = _dedup([p for p in points if not is_rational_point(p)])
    # keep one representative per +- pair
    rational = _positive_reps(rational)
    extra = _positive_reps(extra)
    if len(extra) != 1 or len(rational) != d:
        return None
    mat = [[p[i].coords[0] for p in rational] for i in range(d)]
    if rl.rank(mat) != d:
        return None
    # base change: coordinates of the extra point in the rational basis
    cprime = []
    m = basis.size
    parts = rational_parts(extra[0])
    sols = []
    for k in range(m + 1):
        sol = rl.solve(mat, parts[k])
        if sol is None:
            return None
        sols.append(sol)
    for i in range(d):
        coords = tuple(Fraction(sols[k][i]) for k in range(m + 1))
        cprime.append(ExtendedRational(basis, coords))
    cprime = tuple(cprime)
    verdict, dependency = kronecker_check(cprime)
    if verdict == "dense":
        full = tuple(
            point_from_fractions(basis, [int(i == j) for i in range(d)]) for j in range(d)
        )
        return ClosedSubgroup(
            d, basis, full, (), True, "exact", "kronecker", witness={"c": cprime}
        )
    v_prime, lam_prime = _kronecker_closure(basis, cprime)
    # map back: x = M y with M columns the rational basis points
    M = [[rational[j][i].coords[0] for j in range(d)] for i in range(d)]
    v_basis = tuple(_apply_rational_matrix(basis, M, v) for v in v_prime)
    lam = tuple(_apply_rational_matrix(basis, M, v) for v in lam_prime)
    return ClosedSubgroup(
        d,
        basis,
        v_basis,
        lam,
        False,
        "exact",
        "kronecker",
        witness={"c": cprime, "dependency": dependency},
    )


def _positive_reps(points):
    out = []
    seen = set()
    for p in points:
        np_ = tuple(-c for c in p)
        if p in seen or np_ in seen:
            continue
        seen.add(p)
        sign = next((c.sign() for c in p if not c.is_zero()), 1)
        out.append(p if sign > 0 else np_)
    return out


def _apply_rational_matrix(basis, M, p: Point) -> Point:
    d = len(M)
    out = []
    for i in range(d):
        acc = basis.zero()
        for j in range(d):
            acc = acc + p[j].scale(M[i][j])
        out.append(acc)
    return tuple(out)


def _rational_span_basis(vecs):
    """Row-reduced basis of the rational span of rational vectors."""
    rows, pivots = rl.rref(vecs)
    return [tuple(r) for r in rows[: len(pivots)]]


def _rational_complement(v_span, d):
    """Coordinate vectors completing v_span to a basis of Q^d."""
    rows = [list(v) for v in v_span]
    comp = []
    for j in range(d):
        e = [Fraction(int(i == j)) for i in range(d)]
        cand = rows + [list(c) for c in comp] + [e]
        if rl.rank(cand) == len(cand):
            comp.append(tuple(e))
    return comp


def _reduce_mod_subspace(p: Point, v_span, comp, basis):
    """Coordinates of p along the complement, solving p = V a + W b exactly."""
    d = len(p)
    cols = [list(v) for v in v_span] + [list(w) for w in comp]
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(d)]
    parts = rational_parts(p)
    out = [[Fraction(0)] * (basis.size + 1) for _ in comp]
    for k in range(basis.size + 1):
        sol = rl.solve(mat, parts[k])
        if sol is None:
            return None
        for t in range(len(comp)):
            out[t][k] = sol[len(v_span) + t]
    return tuple(ExtendedRational(basis, tuple(c)) for c in out)


def _combine(comp_points, coeffs: Point) -> Point:
    """sum_t coeffs[t] * comp_points[t] with exact scalar products."""
    d = len(comp_points[0])
    basis = comp_points[0][0].basis
    out = [basis.zero()] * d
    for t, coef in enumerate(coeffs):
        for i in range(d):
            out[i] = out[i] + comp_points[t][i] * coef
    return tuple(out)


def _probe_closure(basis, support, probe_config) -> ClosedSubgroup:
    from . import numerics

    result = None
    if support.finite_points:
        cfg = probe_config or {}
        result = numerics.density_probe(
            support.finite_points,
            R=cfg.get("R", 3.0),
            n_max=cfg.get("n_max", 30),
            grid_div=cfg.get("grid_div", 100),
        )
    return ClosedSubgroup(
        support.dimension,
        basis,
        (),
        (),
        False,
        "numerical-probe",
        "probe",
        probe=result,
    )


# -- orthogonalization ----------------------------------------------------------------


def orthogonalize(group: ClosedSubgroup) -> ClosedSubgroup:
    """Replace each lattice vector a by a - proj_V(a); same generated group."""
    if not group.v_basis or not group.lambda_basis:
        return replace(group, orthogonal=True, orthogonal_exact=True)
    if all(is_rational_point(v) for v in group.v_basis):
        vr = [[c.coords[0] for c in v] for v in group.v_basis]
        G = [[sum(a * b for a, b in zip(u, w)) for w in vr] for u in vr]
        new_lam = []
        for a in group.lambda_basis:
            rhs = []
            for v in vr:
                acc = group.basis.zero()
                for vc, ac in zip(v, a):
                    acc = acc + ac.scale(vc)
                rhs.append(acc)
            coeffs = _solve_er(G, rhs, group.basis)
            proj = [group.basis.zero()] * group.dimension
            for t, c in enumerate(coeffs):
                for i in range(group.dimension):
                    proj[i] = proj[i] + c.scale(vr[t][i])
            new_lam.append(tuple(ac - pc for ac, pc in zip(a, proj)))
        return replace(
            group, lambda_basis=tuple(new_lam), orthogonal=True, orthogonal_exact=True
        )
    # numeric fallback at declared precision
    import numpy as np

    V = np.array([[float(c) for c in v] for v in group.v_basis]).T
    Q, _ = np.linalg.qr(V)
    new_lam = []
    for a in group.lambda_basis:
        av = np.array([float(c) for c in a])
        proj = Q @ (Q.T @ av)
        new_lam.append(
            tuple(
                ExtendedRational(
                    group.basis,
                    (Fraction(x).limit_denominator(10**12),) + (Fraction(0),) * group.basis.size,
                )
                for x in (av - proj)
            )
        )
    return replace(
        group, lambda_basis=tuple(new_lam), orthogonal=True, orthogonal_exact=False
    )


def _solve_er(G, rhs, basis):
    """Solve the rational SPD system G x = rhs with ExtendedRational rhs."""
    m = basis.size + 1
    cols = []
    for k in range(m):
        b = [r.coords[k] for r in rhs]
        sol = rl.solve(G, b)
        cols.append(sol)
    out = []
    for i in range(len(rhs)):
        out.append(ExtendedRational(basis, tuple(cols[k][i] for k in range(m))))
    return out


# -- hyperplane certificates -------------------------------------------------------------


def hyperplane_certificate(group: ClosedSubgroup, support: SupportDescriptor) -> HyperplaneCertificate:
    """Build (H, c) with supp in H + cZ from a non-full orthogonalized closure."""
    if group.is_full():
        raise ClosureError("closure is dense; no hyperplane certificate exists")
    d = group.dimension
    basis = group.basis
    if not all(is_rational_point(v) for v in group.v_basis):
        return _numeric_certificate(group, support)

    lam_rational = all(is_rational_point(v) for v in group.lambda_basis)
    if group.lambda_basis and lam_rational:
        vr = [[c.coords[0] for c in v] for v in group.lambda_basis]

        def dot(u, v):
            return sum(Fraction(a) * Fraction(b) for a, b in zip(u, v))

        mvec, _ = rl.shortest_vector(vr, dot)
        cvec = [sum(Fraction(m) * v[i] for m, v in zip(mvec, vr)) for i in range(d)]
        g = math.gcd(*(abs(m) for m in mvec))
        mprim = [m // g for m in mvec]
        U = rl.complete_primitive(mprim)
        rest = []
        for jcol in range(1, len(vr)):
            rest.append(
                tuple(
                    sum(Fraction(U[i][jcol]) * vr[i][t] for i in range(len(vr)))
                    for t in range(d)
                )
            )
        c_point = _canonical_sign(point_from_fractions(basis, cvec))
        h_rows = [[c.coords[0] for c in v] for v in group.v_basis] + [list(r) for r in rest]
    elif group.lambda_basis:
        # lattice directions with a common irrational scale: use scalar split
        split = scalar_direction_split(group.lambda_basis[0])
        if split is None or len(group.lambda_basis) != 1:
            return _numeric_certificate(group, support)
        c_point = _canonical_sign(group.lambda_basis[0])
        h_rows = [[c.coords[0] for c in v] for v in group.v_basis]
    else:
        c_point = None
        h_rows = [[c.coords[0] for c in v] for v in group.v_basis]

    # pad H to dimension d-1 with rational vectors orthogonal to everything used
    pad_rows = list(h_rows)
    if c_point is not None and is_rational_point(c_point):
        pad_rows = pad_rows + [[c.coords[0] for c in c_point]]
    elif c_point is not None:
        split = scalar_direction_split(c_point)
        pad_rows = pad_rows + [list(split[1])]
    padding = rl.nullspace(pad_rows) if pad_rows else [
        [Fraction(int(i == j)) for i in range(d)] for j in range(d)
    ]
    h_basis_vecs = list(h_rows)
    for vec in padding:
        if len(h_basis_vecs) >= d - 1:
            break
        h_basis_vecs.append(list(vec))
    if len(h_basis_vecs) != d - 1:
        raise ClosureError("failed to assemble a codimension-1 hyperplane")
    if h_basis_vecs:
        normal_vecs = rl.nullspace(h_basis_vecs)
        if len(normal_vecs) != 1:
            raise ClosureError("hyperplane basis is degenerate")
        normal = point_from_fractions(basis, _primitive(normal_vecs[0]))
    else:
        normal = point_from_fractions(basis, [Fraction(1)])
    if c_point is None:
        c_point = _canonical_sign(normal)
    cert = HyperplaneCertificate(
        normal=normal,
        c=c_point,
        h_basis=tuple(point_from_fractions(basis, v) for v in h_basis_vecs),
        exact=True,
    )
    _validate_certificate(cert, support)
    return cert


def _primitive(vec):
    denom = math.lcm(*(Fraction(c).denominator for c in vec))
    ints = [int(Fraction(c) * denom) for c in vec]
    g = math.gcd(*(abs(c) for c in ints if c != 0))
    return [Fraction(c, g) for c in ints]


def _canonical_sign(p: Point) -> Point:
    sign = next((c.sign() for c in p if not c.is_zero()), 1)
    return p if sign > 0 else tuple(-c for c in p)


def _validate_certificate(cert: HyperplaneCertificate, support: SupportDescriptor):
    """Every finite support point must satisfy <n, x> in <n, c>*Z exactly."""
    period = er_dot(cert.normal, cert.c)
    for x in support.finite_points:
        val = er_dot(cert.normal, x)
        if period.is_zero():
            if not val.is_zero():
                raise ClosureError("certificate fails: c in H but support pairs nonzero")
            continue
        r = rational_ratio(period, val)
        if r is None or r.denominator != 1:
            raise ClosureError(
                f"certificate fails at {_fmt_point(x)}: pairing {val} not an integer "
                f"multiple of {period}"
            )
    for piece_basis, _ in support.affine_pieces:
        for v in piece_basis:
            if not er_dot(cert.normal, v).is_zero():
                raise ClosureError("certificate fails: affine piece not inside H")
    for dirv in support.dense_directions:
        if not er_dot(cert.normal, dirv).is_zero():
            raise ClosureError("certificate fails: dense direction not inside H")


def _numeric_certificate(group: ClosedSubgroup, support: SupportDescriptor) -> HyperplaneCertificate:
    """Float fallback for closures with irrational V; flagged non-exact."""
    import numpy as np

    d = group.dimension
    basis = group.basis
    rows = [[float(c) for c in v] for v in group.v_basis]
    for v in group.lambda_basis[1:]:
        rows.append([float(c) for c in v])
    c_point = group.lambda_basis[0] if group.lambda_basis else None
    A = np.array(rows, dtype=float) if rows else np.zeros((0, d))
    if c_point is not None:
        A = np.vstack([A, [[float(c) for c in c_point]]])
    _, s, vt = np.linalg.svd(A) if A.size else (None, np.zeros(0), np.eye(d))
    ns = vt[len(s[s > 1e-12]):] if A.size else np.eye(d)
    h_rows = rows + [list(v) for v in ns[: d - 1 - len(rows)]]
    normal = np.array(vt[-1]) if A.size else np.eye(d)[0]
    napprox = tuple(
        ExtendedRational(basis, (Fraction(x).limit_denominator(10**12),) + (Fraction(0),) * basis.size)
        for x in normal
    )
    if c_point is None:
        c_point = napprox
    return HyperplaneCertificate(
        normal=napprox,
        c=c_point,
        h_basis=tuple(
            tuple(
                ExtendedRational(basis, (Fraction(x).limit_denominator(10**12),) + (Fraction(0),) * basis.size)
                for x in row
            )
            for row in h_rows
        ),
        exact=False,
    )


# -- measure decomposition ---------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """mu = sum over lattice points a of mu_a with supp(mu_a) in V + a."""

    group: ClosedSubgroup
    coset_keys: tuple[tuple[int, ...], ...]  # integer coordinates in lambda_basis
    coset_points: tuple[Point, ...]
    parts: tuple[tuple, ...]  # parallel: tuple of (point, weight) atom lists
    separation: float
    mass_off_origin_bound: float

    def part_for(self, key):
        return self.parts[self.coset_keys.index(tuple(key))]


class DecompositionError(ValueError):
    pass


def decompose_measure(mu, group: ClosedSubgroup) -> Decomposition:
    """Partition atoms by coset V + a and verify the decomposition laws."""
    from .measures import AffinePart

    if group.is_full():
        raise DecompositionError("Liouville holds; nothing to decompose")
    if not group.orthogonal:
        group = orthogonalize(group)
    d = group.dimension
    basis = group.basis

    atom_items = [(a.point, a.weight) for a in mu.atoms]
    for seq in mu.sequences:
        for n in range(1, seq.truncation + 1):
            p = seq.point(n)
            w = basis.from_rational(seq.weight(n))
            atom_items.append((p, w))
            atom_items.append((tuple(-c for c in p), w))
    for part in mu.continuous:
        if not isinstance(part, AffinePart):
            raise DecompositionError(
                "only atomic and affine-supported parts can be decomposed"
            )

    # coset coordinates by exact linear solve x = V t + sum m_i lambda_i
    keys = {}
    for p, w in atom_items:
        m = _coset_coordinates(p, group)
        if m is None:
            raise DecompositionError(f"atom {_fmt_point(p)} lies in no coset V + a")
        keys.setdefault(tuple(m), []).append((p, w))

    # enumeration ball: all finite support plus the origin coset
    radius = 0.0
    for p, _ in atom_items:
        radius = max(radius, math.sqrt(sum(float(c) ** 2 for c in p)))
    lattice_keys = _lattice_keys_in_ball(group, radius)
    for k in keys:
        if k not in lattice_keys:
            lattice_keys.append(k)
    zero_key = tuple(0 for _ in group.lambda_basis)
    if zero_key not in lattice_keys:
        lattice_keys.append(zero_key)
    lattice_keys.sort()

    coset_points = []
    parts = []
    for key in lattice_keys:
        pt = [basis.zero()] * d
        for m, lamv in zip(key, group.lambda_basis):
            for i in range(d):
                pt[i] = pt[i] + lamv[i] * Fraction(m)
        coset_points.append(tuple(pt))
        parts.append(tuple(keys.get(key, ())))

    _verify_symmetry_pairing(lattice_keys, parts, basis)

    separation = math.inf
    for key, pt in zip(lattice_keys, coset_points):
        if any(key):
            separation = min(separation, math.sqrt(sum(float(c) ** 2 for c in pt)))
    if separation == 0:
        raise DecompositionError("lattice separation collapsed to 0")

    mass = 0.0
    for key, part in zip(lattice_keys, parts):
        if any(key):
            mass += sum(float(w) for _, w in part)
    for seq in mu.sequences:
        if seq.accumulation_scalar() is None:
            mass += seq.weights.total_bound()
    if math.isinf(mass):
        raise DecompositionError("off-origin mass bound is infinite")

    return Decomposition(
        group=group,
        coset_keys=tuple(lattice_keys),
        coset_points=tuple(coset_points),
        parts=tuple(parts),
        separation=separation,
        mass_off_origin_bound=mass,
    )


def _coset_coordinates(p: Point, group: ClosedSubgroup):
    """Integer coordinates m with p - sum m_i lambda_i in span(V), or None."""
    d = group.dimension
    basis = group.basis
    if not all(is_rational_point(v) for v in group.v_basis):
        return None
    nv = len(group.v_basis)
    nl = len(group.lambda_basis)
    if nl == 0:
        beta = _membership_in_span(p, group.v_basis, basis)
        return [] if beta else None
    # handle irrational lattice vectors via a common scalar factor
    if not all(is_rational_point(v) for v in group.lambda_basis):
        return _coset_coordinates_scaled(p, group)
    cols = [[c.coords[0] for c in v] for v in group.v_basis] + [
        [c.coords[0] for c in v] for v in group.lambda_basis
    ]
    mat = [[cols[j][i] for j in range(nv + nl)] for i in range(d)]
    parts = rational_parts(p)
    msol = None
    for k in range(basis.size + 1):
        sol = rl.solve(mat, parts[k])
        if sol is None:
            return None
        mk = sol[nv:]
        if k == 0:
            msol = mk
        elif any(c != 0 for c in mk):
            # lattice coordinates must be rational integers (constant part only)
            return None
    if msol is None or any(c.denominator != 1 for c in msol):
        return None
    # consistency: residual must lie in span(V); guaranteed by the solve
    return [int(c) for c in msol]


def _coset_coordinates_scaled(p: Point, group: ClosedSubgroup):
    """Lattice basis of the form alpha * (rational vectors): divide out alpha."""
    splits = [scalar_direction_split(v) for v in group.lambda_basis]
    if any(s is None for s in splits):
        return None
    alpha = splits[0][0]
    scaled = []
    for s, _ in splits:
        r = rational_ratio(alpha, s)
        if r is None:
            return None
    # express p in the same scaled frame: p = alpha * q requires ratios
    psplit = scalar_direction_split(p)
    if psplit is None:
        return None
    pscale, pdir = psplit
    r = rational_ratio(alpha, pscale)
    if r is None:
        return None
    basis = group.basis
    q = point_from_fractions(basis, [r * c for c in pdir])
    lam_scaled = []
    for s, w in splits:
        rr = rational_ratio(alpha, s)
        lam_scaled.append(point_from_fractions(basis, [rr * c for c in w]))
    sub = ClosedSubgroup(
        group.dimension,
        basis,
        group.v_basis,
        tuple(lam_scaled),
        group.orthogonal,
        group.provenance,
        group.route,
    )
    return _coset_coordinates(q, sub)


def _membership_in_span(p: Point, v_basis, basis) -> bool:
    if not v_basis:
        return point_is_zero(p)
    rows = [[c.coords[0] for c in v] for v in v_basis]
    parts = rational_parts(p)
    mat = [[rows[j][i] for j in range(len(rows))] for i in range(len(p))]
    return all(rl.solve(mat, part) is not None for part in parts)


def _lattice_keys_in_ball(group: ClosedSubgroup, radius: float):
    """All integer lattice coordinates whose points lie in the closed ball."""
    r = len(group.lambda_basis)
    if r == 0:
        return [()]
    import numpy as np

    B = np.array([[float(c) for c in v] for v in group.lambda_basis]).T
    G = B.T @ B
    Ginv = np.linalg.inv(G)
    bounds = [int(math.floor(math.sqrt(max(Ginv[i, i], 0.0)) * radius + 1e-9)) for i in range(r)]
    keys = []
    import itertools

    for m in itertools.product(*(range(-b, b + 1) for b in bounds)):
        vec = B @ np.array(m, dtype=float)
        if np.linalg.norm(vec) <= radius + 1e-9:
            keys.append(tuple(int(x) for x in m))
    return keys


def _verify_symmetry_pairing(keys, parts, basis):
    """mu_a(.) must equal mu_{-a}(-.) atom by atom."""
    index = {k: i for i, k in enumerate(keys)}
    for k, part in zip(keys, parts):
        nk = tuple(-x for x in k)
        if nk not in index:
            if part:
                raise DecompositionError(f"missing mirror coset for {k}")
            continue
        mirror = dict()
        for p, w in parts[index[nk]]:
            mirror[tuple(-c for c in p)] = w
        for p, w in part:
            if p not in mirror or not (mirror[p] - w).is_zero():
                raise DecompositionError(f"symmetry pairing fails at coset {k}")


def _fmt_point(p: Point) -> str:
    return "(" + ", ".join(format_coordinate(c) for c in p) + ")"
