"""Type-II points of the Berkovich line over Laurent series, disk seminorms,
the dynamical Green potential, the tree Monge-Ampere measure, and the
non-Archimedean Lyapunov exponent (all for one-dimensional dynamics).

Conventions
-----------
* The t-adic norm is normalized by ``|t| = r`` with a caller-chosen
  ``r in (0, 1)``.  Seminorm computations return exact rational *exponents*
  ``q`` with value ``r**q``; real values are ``q * log(r)`` in natural logs.
* A type-II point is the sup-seminorm of a closed disk ``D(a, r**s)`` in an
  affine chart (``z`` or ``1/z``).  The Gauss point is ``D(0, 1)`` in the z
  chart.  Points are canonicalized so the center has norm <= 1 in the
  chosen chart, and every type-II point also has a z-chart disk description
  used for the tree algebra.
* Edge lengths on the tree are differences of radius exponents (the
  hyperbolic metric in units of ``log(1/r)``); the Monge-Ampere of a
  potential is the sum of outgoing slopes plus a unit Dirac mass at the
  Gauss point, which pins the sign convention through the base case
  (zero potential gives the Dirac mass at the Gauss point).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import (ChartError, ConventionError, DegenerateFamilyError,
                     LaurentError, PrecisionError)
from .laurent import LaurentSeries, newton_puiseux, taylor_shift
from .poly import HomogeneousPoly, jacobian_determinant, iterate_pair

_INF = math.inf


def _as_series(x) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, str):
        return LaurentSeries.parse(x)
    return LaurentSeries.const(x)


def _as_frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TypeIPoint:
    """Classical point given by Laurent (or Puiseux) homogeneous coordinates."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(_as_series(c) for c in coords)
        if all(c.is_zero() for c in coords):
            raise ChartError("type-I point needs a nonzero coordinate vector")
        self.coords = coords

    def __repr__(self):
        return "<TypeIPoint [" + " : ".join(str(c) for c in self.coords) + "]>"


class TypeIIPoint:
    """Disk point ``D(center, r**s)`` in an affine chart, canonicalized.

    Divisorial points (order of vanishing along a component divided by the
    multiplicity of t) are exactly the points with rational ``s``; the pair
    (order, multiplicity) is carried by the single Fraction ``s``.
    """

    __slots__ = ("chart", "center", "s", "_zpair")

    def __init__(self, center, s, chart: str = "z"):
        center = _as_series(center)
        s = _as_frac(s)
        if chart not in ("z", "1/z"):
            raise ChartError(f"unknown chart {chart!r}")
        a, sz = (center, s) if chart == "z" else _upair_to_zpair(center, s)
        a, sz = _reduce_center(a, sz)
        alpha = a.order()
        if alpha >= sz:
            # the disk contains the chart origin; re-center at 0
            a = LaurentSeries.zero()
            if sz >= 0:
                self.chart, self.center, self.s = "z", a, sz
            else:
                self.chart, self.center, self.s = "1/z", a, -sz
        elif alpha >= 0:
            self.chart, self.center, self.s = "z", a, sz
        else:
            c, su = _invert_center(a, sz)
            self.chart, self.center, self.s = "1/z", _reduce_center(c, su)[0], su
        self._zpair = (a, sz)

    @classmethod
    def gauss(cls) -> "TypeIIPoint":
        return cls(LaurentSeries.zero(), 0, "z")

    def is_gauss(self) -> bool:
        return self.chart == "z" and self.s == 0 and self.center.is_zero()

    def zpair(self):
        """(center, radius exponent) of the same point as a z-chart disk."""
        return self._zpair

    def radius_exp(self) -> Fraction:
        return self.s

    def coord_exponent(self) -> Fraction:
        """Exponent e with |affine coordinate| = r**e at this point (own chart)."""
        return min(self.center.order(), self.s)

    def __eq__(self, other):
        if not isinstance(other, TypeIIPoint):
            return NotImplemented
        (a, s), (b, u) = self._zpair, other._zpair
        if s != u:
            return False
        diff = a - b
        if diff.is_zero():
            if diff.is_exact_zero() or diff.trunc_order >= s:
                return True
            raise PrecisionError("cannot decide point equality at available precision")
        return diff.order() >= s

    def __hash__(self):
        return hash(self.s)  # equality needs series comparison; hash on radius only

    def __repr__(self):
        return f"<TypeIIPoint chart={self.chart} D({self.center}, r^{self.s})>"

    def record(self) -> dict:
        """JSON-friendly description."""
        return {"chart": self.chart, "center": str(self.center),
                "s": f"{self.s.numerator}/{self.s.denominator}"}


def _reduce_center(a: LaurentSeries, s: Fraction):
    """Drop center terms with exponent >= s (they do not move the disk).

    When the input is known at least up to exponent s the reduced center is an
    exact representative of the point; otherwise the truncation is kept so
    later comparisons stay honest.
    """
    exact_enough = a.trunc_order >= s
    if a.is_zero():
        return (LaurentSeries.zero() if exact_enough else a), s
    kept = {e: c for e, c in a.items() if e < s}
    trunc = _INF if exact_enough else a.trunc_order
    return LaurentSeries(kept, trunc=trunc), s


def _invert_center(a: LaurentSeries, s: Fraction):
    """z-chart disk with |center| > 1 as a 1/z-chart disk (via inversion)."""
    alpha = a.order()
    su = s - 2 * alpha
    window = int(math.ceil(float(su - alpha))) + 4
    c = a.inverse(window=max(window, 8))
    return c, su


def _upair_to_zpair(c: LaurentSeries, su: Fraction):
    """1/z-chart disk as a z-chart disk."""
    if c.is_zero():
        if not c.is_exact_zero() and c.trunc_order < su:
            raise ChartError(
                "1/z-chart center is zero only to truncation; cannot change chart")
        return LaurentSeries.zero(), -su
    gamma = c.order()
    if gamma >= su:
        return LaurentSeries.zero(), -su
    window = int(math.ceil(float(su - 2 * gamma - (-gamma)))) + 4
    a = c.inverse(window=max(window, 8))
    return a, su - 2 * gamma


def type2_from_zpair(a, s) -> TypeIIPoint:
    """Construct a point from any z-chart disk description."""
    return TypeIIPoint(_as_series(a), _as_frac(s), "z")


# -- seminorms -------------------------------------------------------------------


def poly_seminorm(f, xi: TypeIIPoint):
    """Exponent q with |f| = r**q at the disk point, for a one-variable
    polynomial with LaurentSeries coefficients (ascending, in the chart of xi).

    The value is the min over j of ord(f_j) + j*s after recentering f at the
    disk center.  Returns ``math.inf`` when f is zero to truncation; raises
    PrecisionError when truncated coefficients could change the answer.
    """
    coeffs = [c if isinstance(c, LaurentSeries) else LaurentSeries.const(c) for c in f]
    center = xi.center
    s = xi.s
    shifted = taylor_shift(coeffs, center)
    best = _INF
    for j, c in enumerate(shifted):
        if not c.is_zero():
            cand = c.order() + j * s
            if cand < best:
                best = cand
    for j, c in enumerate(shifted):
        if c.is_zero() and not c.is_exact_zero():
            if c.trunc_order + j * s < best:
                raise PrecisionError(
                    "truncated coefficient could dominate the disk seminorm")
    return best


def homog_seminorm(P: HomogeneousPoly, xi: TypeIIPoint):
    """Exponent of |P| / max(|w0|, |w1|)**d at the point (chart-normalized)."""
    if P.nvars != 2:
        raise LaurentError("homog_seminorm requires a two-variable polynomial")
    coeffs = P.dehomogenized(xi.chart)
    q = poly_seminorm(coeffs, xi)
    m = min(Fraction(0), xi.coord_exponent())
    if q == _INF:
        return _INF
    return q - P.degree * m


def _homog_exponent_zpair(P: HomogeneousPoly, zpair):
    """Same normalized exponent, computed on a raw z-chart disk description.

    Valid for any center and radius (disks of the affine line never contain
    the point at infinity), and avoids the chart inversion of canonical
    representations.
    """
    a, s = zpair
    shifted = taylor_shift(P.dehomogenized("z"), a)
    best = _INF
    for j, c in enumerate(shifted):
        if not c.is_zero():
            best = min(best, c.order() + j * s)
    for j, c in enumerate(shifted):
        if c.is_zero() and not c.is_exact_zero() and c.trunc_order + j * s < best:
            raise PrecisionError("truncated coefficient could dominate the seminorm")
    if best == _INF:
        return _INF
    m = min(Fraction(0), a.order(), s)
    return best - P.degree * m


# -- resultant --------------------------------------------------------------------


def _det_laurent(matrix) -> LaurentSeries:
    """Determinant of a square LaurentSeries matrix by subset expansion."""
    n = len(matrix)
    states = {0: LaurentSeries.one()}
    for i in range(n):
        new: dict = {}
        row = matrix[i]
        for mask, acc in states.items():
            for j in range(n):
                if mask >> j & 1:
                    continue
                entry = row[j]
                if entry.is_zero() and entry.is_exact_zero():
                    continue
                sign = -1 if bin(mask >> (j + 1)).count("1") % 2 else 1
                term = acc * entry * sign
                key = mask | (1 << j)
                new[key] = new[key] + term if key in new else term
        states = new
    return states.get((1 << n) - 1, LaurentSeries.zero())


def sylvester_matrix(p0: HomogeneousPoly, p1: HomogeneousPoly):
    """Sylvester matrix of two binary forms of the same degree d (size 2d)."""
    d = p0.degree
    a = p0.dehomogenized("z")[::-1]  # descending coefficients a_d .. a_0
    b = p1.dehomogenized("z")[::-1]
    n = 2 * d
    rows = []
    for i in range(d):
        row = [LaurentSeries.zero() for _ in range(n)]
        for j, c in enumerate(a):
            row[i + j] = c
        rows.append(row)
    for i in range(d):
        row = [LaurentSeries.zero() for _ in range(n)]
        for j, c in enumerate(b):
            row[i + j] = c
        rows.append(row)
    return rows


def resultant_valuation(R) -> Fraction:
    """t-adic order of the resultant of (P0, P1); finite for genuine families.

    After unit-normalizing the family lift (dividing out the minimal
    coefficient order), a zero value detects good reduction at the Gauss
    point.  An identically-zero resultant raises DegenerateFamilyError.
    """
    det = _det_laurent(sylvester_matrix(R.p0, R.p1))
    if det.is_zero():
        if det.is_exact_zero():
            raise DegenerateFamilyError(
                f"resultant of {getattr(R, 'label', '?')!r} vanishes identically")
        raise PrecisionError("resultant is zero to truncation; increase precision")
    return det.order()


def good_reduction_exponent(R) -> Fraction:
    """ord(Res) - 2d * (minimal coefficient order): zero iff good reduction."""
    return resultant_valuation(R) - 2 * R.degree * R.min_coeff_order()


# -- dynamical Green potential ------------------------------------------------------


class GreenEvaluator:
    """Canonical-metric Green potential of a degree-d family, evaluated at
    type-II points through the homogeneous iterates.

    The n-th approximant is ``d**(-n) * q_n * log(r)`` where ``q_n`` is the
    minimum of the chart-normalized seminorm exponents of the n-th iterate's
    sections.  Successive approximants differ by ``d**-(n+1) * g1(R^n xi)``,
    so a uniform bound C on |g1| certifies the tail: the evaluator stops at
    the first n with ``C * d**-n / (1 - 1/d) < tol``, or at ``n_max`` with
    the achieved bound reported.
    """

    def __init__(self, R, r: float, n_max: int = 12, tol: float = 1e-3):
        if not 0.0 < r < 1.0:
            raise LaurentError("radius must lie in (0, 1)")
        self.R = R
        self.r = r
        self.n_max = n_max
        self.tol = tol
        d = R.degree
        ordmin = R.min_coeff_order()
        ordres = resultant_valuation(R)
        upper = ordres - (2 * d - 1) * ordmin  # one-step seminorm exponent range
        self.c_exponent = max(abs(ordmin), abs(upper))
        self.c_constant = float(self.c_exponent) * abs(math.log(r))
        n = 0
        while n < n_max and self._tail_bound(n) >= tol:
            n += 1
        self.n_star = n
        self._iterates: dict = {}
        # polynomial families admit an exact forward-orbit evaluation of the
        # partial sums, cheap at any depth; rational ones iterate symbolically
        self._affine = R.affine_coeffs() if R.is_polynomial() else None

    def _tail_bound(self, n: int) -> float:
        d = self.R.degree
        return self.c_constant * d ** float(-n) / (1.0 - 1.0 / d)

    def sections(self, n: int):
        """Sections of the n-th iterate (cached); n = 0 is the identity datum."""
        if n == 0:
            one = LaurentSeries.one()
            return (HomogeneousPoly(2, 1, {(1, 0): one}),
                    HomogeneousPoly(2, 1, {(0, 1): one}))
        if n not in self._iterates:
            self._iterates[n] = iterate_pair(self.R.p0, self.R.p1, n)
        return self._iterates[n]

    def approximant_exponent(self, xi: TypeIIPoint, n: int) -> Fraction:
        """q with n-th approximant = q * log(r) (exact).

        Realized either as d**-n times the minimal normalized seminorm
        exponent of the n-th iterate's sections, or equivalently (telescoping
        the one-step potential) as the forward-orbit partial sum; the two
        agree exactly and the orbit route is used for polynomial families.
        """
        if self._affine is not None:
            return self._orbit_exponent(xi.zpair(), n)
        q0, q1 = self.sections(n)
        e = min(homog_seminorm(q0, xi), homog_seminorm(q1, xi))
        if e == _INF:
            raise DegenerateFamilyError("all iterate sections vanish at the point")
        return Fraction(e) / self.R.degree ** n

    def _one_step_exponent(self, zpair) -> Fraction:
        e = min(_homog_exponent_zpair(self.R.p0, zpair),
                _homog_exponent_zpair(self.R.p1, zpair))
        if e == _INF:
            raise DegenerateFamilyError("all sections vanish at the point")
        return Fraction(e)

    def _orbit_exponent(self, zpair, n: int) -> Fraction:
        d = self.R.degree
        total = Fraction(0)
        cur = zpair
        for k in range(n):
            total += self._one_step_exponent(cur) / d ** (k + 1)
            center, s = map_disk(self._affine, cur)
            cur = _reduce_center(center, s)
        return total

    def exponent(self, xi: TypeIIPoint):
        """(exact exponent at the certified step, float tail bound)."""
        return self.approximant_exponent(xi, self.n_star), self._tail_bound(self.n_star)

    def value(self, xi: TypeIIPoint):
        """(potential value in natural logs, certified error bound)."""
        q, bound = self.exponent(xi)
        return float(q) * math.log(self.r), bound


def green_g1(R, xi: TypeIIPoint, r: float) -> float:
    """One-step potential: (min over sections of the seminorm exponent) * log r."""
    e = min(homog_seminorm(R.p0, xi), homog_seminorm(R.p1, xi))
    if e == _INF:
        return -_INF
    return float(e) * math.log(r)


def green_gR(R, xi: TypeIIPoint, n_max: int = 8, tol: float = 1e-3, r: float = 0.5):
    """(value, certified error bound) of the Green potential at one point.

    For repeated evaluation over a probe tree build a GreenEvaluator once.
    """
    return GreenEvaluator(R, r, n_max=n_max, tol=tol).value(xi)


# -- finite subtrees and the tree measure -------------------------------------------


class BerkTree:
    """Finite subtree of the Berkovich line spanned by type-II points.

    ``vertices`` are canonicalized points (the Gauss point always included),
    ``edges`` are (i, j, length) with exact Fraction lengths equal to the
    radius-exponent gap along the path.
    """

    def __init__(self, vertices, zpairs, edges, gauss_index: int):
        self.vertices = vertices
        self.zpairs = zpairs
        self.edges = edges
        self.gauss_index = gauss_index
        self.adjacency = {i: [] for i in range(len(vertices))}
        for i, j, length in edges:
            self.adjacency[i].append((j, length))
            self.adjacency[j].append((i, length))

    def __len__(self):
        return len(self.vertices)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def leaves(self):
        return [i for i in range(len(self.vertices))
                if self.degree(i) <= 1 and i != self.gauss_index]


def _join(zp, zq):
    """z-pair of the path join of two disk points."""
    (a, s), (b, u) = zp, zq
    diff = a - b
    if diff.is_zero():
        if diff.is_exact_zero() or diff.trunc_order >= min(s, u):
            return (a, min(s, u))
        raise PrecisionError("join depth exceeds the available center precision")
    return (a, min(s, u, diff.order()))


def subtree_span(points) -> BerkTree:
    """Smallest tree containing the given points and the Gauss point."""
    if not points:
        raise ChartError("need at least one point")
    pts = [p if isinstance(p, TypeIIPoint) else type2_from_zpair(*p) for p in points]
    pts.append(TypeIIPoint.gauss())
    zpairs = [p.zpair() for p in pts]
    # closure under pairwise joins (pairwise suffices on a tree)
    all_pairs = list(zpairs)
    n0 = len(all_pairs)
    for i in range(n0):
        for j in range(i + 1, n0):
            all_pairs.append(_join(all_pairs[i], all_pairs[j]))
    uniq_pairs = []
    uniq_points = []
    for zp in all_pairs:
        pt = type2_from_zpair(*zp)
        if not any(pt == q for q in uniq_points):
            uniq_points.append(pt)
            uniq_pairs.append(zp)
    order = sorted(range(len(uniq_points)), key=lambda i: uniq_pairs[i][1])
    uniq_points = [uniq_points[i] for i in order]
    uniq_pairs = [uniq_pairs[i] for i in order]
    edges = []
    for i in range(1, len(uniq_points)):
        a_i, s_i = uniq_pairs[i]
        parent = None
        for j in range(len(uniq_points)):
            if j == i:
                continue
            a_j, s_j = uniq_pairs[j]
            if s_j >= s_i:
                continue
            diff = a_j - a_i
            contains = diff.is_zero() and (diff.is_exact_zero() or diff.trunc_order >= s_j)
            if not contains and not diff.is_zero():
                contains = diff.order() >= s_j
            if contains and (parent is None or s_j > uniq_pairs[parent][1]):
                parent = j
        if parent is None:
            raise ChartError("disconnected point set: no containing vertex found")
        edges.append((i, parent, s_i - uniq_pairs[parent][1]))
    gauss_index = next(i for i, p in enumerate(uniq_points) if p.is_gauss())
    return BerkTree(uniq_points, uniq_pairs, edges, gauss_index)


class TreeMeasure:
    """Atomic measure on the vertices of a finite subtree."""

    def __init__(self, tree: BerkTree, masses, r: float, clipped: float = 0.0,
                 negative_report=None):
        self.tree = tree
        self.masses = [float(m) for m in masses]
        self.r = r
        self.clipped = clipped
        self.negative_report = negative_report or []

    def total_mass(self) -> float:
        return sum(self.masses)

    def mass_at_gauss(self) -> float:
        return self.masses[self.tree.gauss_index]

    def leaf_mass_fraction(self) -> float:
        total = self.total_mass()
        if total == 0:
            return 0.0
        return sum(self.masses[i] for i in self.tree.leaves()) / total

    def records(self):
        out = []
        for pt, m in zip(self.tree.vertices, self.masses):
            rec = pt.record()
            rec["mass"] = m
            out.append(rec)
        return out

    def support(self):
        return [(pt, m) for pt, m in zip(self.tree.vertices, self.masses) if m != 0.0]


def tree_ma(g, tree: BerkTree, r: float, on_negative: str = "raise") -> TreeMeasure:
    """Monge-Ampere measure of a potential on a finite probe tree.

    ``g`` maps a TypeIIPoint to either a float (natural-log value) or an
    exact Fraction exponent q (value q * log r).  The mass at a vertex is the
    sum of outgoing slopes of g, in units of |log r| per unit edge length,
    plus a unit Dirac at the Gauss point.  Mass sitting beyond a leaf of the
    finite tree is absorbed by the leaf (retraction).  Negative vertex masses
    beyond tolerance signal a normalization-convention failure: raised by
    default, recorded when ``on_negative='report'``.
    """
    values = [g(v) for v in tree.vertices]
    exact = all(isinstance(v, Fraction) for v in values)
    tol = 1e-6
    masses = []
    report = []
    clipped_total = 0.0
    for i in range(len(tree.vertices)):
        if exact:
            acc = Fraction(0)
            for j, length in tree.adjacency[i]:
                acc += -(values[j] - values[i]) / length  # value = q*log r, log r < 0
            mass = acc + (1 if i == tree.gauss_index else 0)
            mass = float(mass)
        else:
            acc = 0.0
            logr = abs(math.log(r))
            for j, length in tree.adjacency[i]:
                acc += (values[j] - values[i]) / (float(length) * logr)
            mass = acc + (1.0 if i == tree.gauss_index else 0.0)
        if mass < -tol:
            msg = (f"negative mass {mass:.3e} at vertex {tree.vertices[i]!r}: "
                   "Monge-Ampere normalization convention failure")
            if on_negative == "raise":
                raise ConventionError(msg)
            report.append(msg)
        if mass < 0:
            clipped_total += -mass
            mass = 0.0
        masses.append(mass)
    return TreeMeasure(tree, masses, r, clipped=clipped_total, negative_report=report)


# -- non-Archimedean Lyapunov exponent ----------------------------------------------


def det_norm_exponent(R, xi: TypeIIPoint):
    """Exponent q with |det dR| = r**q in the sup metric at a type-II point.

    Computed as (normalized Jacobian seminorm) - 2 * (normalized section
    seminorm); the chart normalizations cancel so the result is intrinsic.
    """
    jac = jacobian_determinant(R.p0, R.p1)
    qj = homog_seminorm(jac, xi)
    q1 = min(homog_seminorm(R.p0, xi), homog_seminorm(R.p1, xi))
    if qj == _INF or q1 == _INF:
        return _INF
    return qj - 2 * q1


def na_lyapunov(R, mu: TreeMeasure) -> float:
    """Integral of log|det dR| against an atomic tree measure (natural logs)."""
    logr = math.log(mu.r)
    total = 0.0
    for pt, mass in mu.support():
        q = det_norm_exponent(R, pt)
        if q == _INF:
            return -_INF if logr < 0 else _INF
        total += mass * float(q) * logr
    return total


# -- probe trees ---------------------------------------------------------------------


def map_disk(affine_coeffs, zpair):
    """Forward image of a disk point under an affine polynomial map.

    ``affine_coeffs`` are the polynomial's LaurentSeries coefficients
    (ascending); the image of D(a, r**s) is D(p(a), r**s') with
    s' = min over j >= 1 of ord(shift_j) + j*s.
    """
    a, s = zpair
    shifted = taylor_shift(list(affine_coeffs), a)
    center = shifted[0]
    best = _INF
    for j in range(1, len(shifted)):
        c = shifted[j]
        if not c.is_zero():
            best = min(best, c.order() + j * s)
    if best == _INF:
        raise DegenerateFamilyError("constant map has no disk image")
    return center, _as_frac(best)


def critical_centers(R, target=Fraction(6)):
    """Truncated Puiseux expansions of the finite critical points of a
    polynomial family (roots of the derivative of the affine polynomial)."""
    coeffs = R.affine_coeffs()
    deriv = [c * float(j) for j, c in enumerate(coeffs) if j >= 1]
    if len(deriv) <= 1:
        return []
    return newton_puiseux(deriv, Fraction(target))


def build_probe_tree(R, s_min=-3, s_max=3, q: int = 2, orbit_len: int = 2,
                     include_critical: bool = True) -> BerkTree:
    """Default probe tree: a radius grid at center 0, forward-orbit segments
    of the grid disks, and (for polynomial families) critical-orbit centers
    carrying their own radius grids."""
    zero = LaurentSeries.zero()
    grid = [Fraction(j, q) for j in range(int(s_min * q), int(s_max * q) + 1)]
    pairs = [(zero, s) for s in grid]
    if R.is_polynomial():
        coeffs = R.affine_coeffs()
        # forward orbit segments of the grid disks
        for s in grid:
            cur = (zero, s)
            for _ in range(orbit_len):
                try:
                    cur = map_disk(coeffs, cur)
                except DegenerateFamilyError:
                    break
                pairs.append(cur)
        # critical-orbit centers, each with its own radius grid
        centers = []
        if include_critical:
            try:
                centers.extend(critical_centers(R, target=Fraction(s_max + 3)))
            except (PrecisionError, LaurentError):
                pass
        orbit = []
        for c in centers:
            cur = c
            for _ in range(orbit_len):
                cur = taylor_shift(coeffs, cur)[0]
                orbit.append(cur)
        distinct = []
        for c in centers + orbit:
            if c.is_zero():
                continue
            if not any((c - c2).is_zero() for c2 in distinct):
                distinct.append(c)
        for c in distinct:
            for s in grid:
                pairs.append((c, s))
    points = []
    for a, s in pairs:
        try:
            points.append(type2_from_zpair(a, s))
        except (PrecisionError, ChartError):
            continue
    return subtree_span(points)
