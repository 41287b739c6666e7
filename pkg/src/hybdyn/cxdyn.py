"""Complex dynamics at a fixed parameter: specialization, backward-orbit
sampling of the measure of maximal entropy, Monte-Carlo integration, and
Lyapunov estimation.

Points on the Riemann sphere are kept as homogeneous pairs (w0, w1) with
sup-norm 1 so that both charts stay numerically safe.  The backward sampler
draws a uniformly random inverse branch at each step, realizing the balanced
pullback; classical equidistribution makes the empirical measure converge to
the measure of maximal entropy.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (DegenerateMapError, UnsupportedDegreeError,
                     UnsupportedMapError)

_MAX_ROOT_DEGREE = 8


class RationalMapC:
    """Complex rational map of degree d in homogeneous coordinates."""

    def __init__(self, p0c, p1c, label: str = ""):
        self.p0c = np.asarray(p0c, dtype=complex)  # ascending in z, length d+1
        self.p1c = np.asarray(p1c, dtype=complex)
        if self.p0c.shape != self.p1c.shape or self.p0c.ndim != 1:
            raise DegenerateMapError("coefficient arrays must share length d+1")
        self.degree = len(self.p0c) - 1
        self.label = label
        s0 = np.abs(self.p0c).max()
        s1 = np.abs(self.p1c).max()
        if s0 == 0 or s1 == 0:
            raise DegenerateMapError("zero section")
        res = _sylvester_det(self.p0c, self.p1c)
        # the resultant is degree d in each section's coefficients; strongly
        # degenerating lifts (huge coefficient spread) shrink it legitimately,
        # so the relative tolerance is kept small
        if abs(res) <= 1e-15 * (s0 * s1) ** self.degree:
            raise DegenerateMapError(
                f"resultant vanishes to tolerance for map {label!r}")
        self.resultant = res
        # chart-z Wronskian p0' p1 - p0 p1', and the 1/z-chart data
        self._wz = _polysub(np.convolve(npoly.polyder(self.p0c), self.p1c),
                            np.convolve(self.p0c, npoly.polyder(self.p1c)))
        self._q0 = self.p1c[::-1].copy()
        self._q1 = self.p0c[::-1].copy()
        self._wu = _polysub(np.convolve(npoly.polyder(self._q0), self._q1),
                            np.convolve(self._q0, npoly.polyder(self._q1)))

    def apply(self, pts: np.ndarray) -> np.ndarray:
        """Forward image of homogeneous points, renormalized to sup-norm 1."""
        pts = np.atleast_2d(pts)
        z_chart = np.abs(pts[:, 0]) <= np.abs(pts[:, 1])
        z = np.where(z_chart, _safe_div(pts[:, 0], pts[:, 1]),
                     _safe_div(pts[:, 1], pts[:, 0]))
        out = np.empty_like(pts)
        # in the 1/z chart the map reads [q0 : q1](u) with the roles swapped
        out[:, 0] = np.where(z_chart, npoly.polyval(z, self.p0c),
                             npoly.polyval(z, self._q1))
        out[:, 1] = np.where(z_chart, npoly.polyval(z, self.p1c),
                             npoly.polyval(z, self._q0))
        return _normalize(out)

    def __repr__(self):
        return f"<RationalMapC deg={self.degree} {self.label!r}>"


def _polysub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] -= b
    return out


def _safe_div(a, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(b != 0, a / np.where(b != 0, b, 1.0), 0.0)


def _normalize(pts: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1]))
    if np.any(scale == 0):
        raise DegenerateMapError("image of a point vanished in both coordinates")
    return pts / scale[:, None]


def _sylvester_det(a: np.ndarray, b: np.ndarray) -> complex:
    d = len(a) - 1
    m = np.zeros((2 * d, 2 * d), dtype=complex)
    for i in range(d):
        m[i, i: i + d + 1] = a[::-1]
        m[d + i, i: i + d + 1] = b[::-1]
    return complex(np.linalg.det(m))


def specialize(R, t: complex, r: float | None = None) -> RationalMapC:
    """Specialize a family at a nonzero parameter; checks non-degeneracy."""
    t = complex(t)
    if t == 0:
        raise DegenerateMapError("specialization requires t != 0")
    if r is not None and abs(t) > r:
        raise DegenerateMapError(f"|t| = {abs(t)} exceeds the radius {r}")
    d = R.degree
    root = t ** (1.0 / _common_ram(R)) if _common_ram(R) > 1 else None
    p0c = np.array([c.eval(t, root=root) for c in R.p0.dehomogenized("z")], dtype=complex)
    p1c = np.array([c.eval(t, root=root) for c in R.p1.dehomogenized("z")], dtype=complex)
    try:
        return RationalMapC(p0c, p1c, label=f"{getattr(R, 'label', '')}@t={t}")
    except DegenerateMapError as exc:
        raise DegenerateMapError(f"degenerate specialization at t = {t}: {exc}")


def _common_ram(R) -> int:
    ram = 1
    for poly in (R.p0, R.p1):
        for c in poly.coeffs.values():
            ram = ram * c.ram // math.gcd(ram, c.ram)
    return ram


@dataclass
class SampleSet:
    """Backward-orbit sample of the equilibrium measure (seeded, reproducible)."""

    points: np.ndarray  # (n_keep, 2) complex homogeneous, sup-norm 1
    seed: int
    n_burn: int
    n_keep: int

    def to_csv(self) -> str:
        """Chart-aware affine CSV (re, im, chart); chart 1 is the 1/z chart."""
        buf = io.StringIO()
        buf.write("re,im,chart\n")
        for w0, w1 in self.points:
            if abs(w0) <= abs(w1):
                z = w0 / w1
                buf.write(f"{z.real!r},{z.imag!r},0\n")
            else:
                u = w1 / w0
                buf.write(f"{u.real!r},{u.imag!r},1\n")
        return buf.getvalue()

    def affine(self) -> np.ndarray:
        """Affine coordinates z = w0/w1 (inf where w1 = 0)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.points[:, 0] / self.points[:, 1]


def _preimages(R: RationalMapC, target: np.ndarray) -> np.ndarray:
    """The d preimages of a homogeneous point, with multiplicity."""
    d = R.degree
    y0, y1 = target
    qc = y1 * R.p0c - y0 * R.p1c  # ascending; roots are the finite preimages
    scale = np.abs(qc).max()
    if scale == 0:
        raise DegenerateMapError("preimage polynomial vanished identically")
    deg = d
    while deg > 0 and abs(qc[deg]) <= 1e-14 * scale:
        deg -= 1
    n_inf = d - deg
    roots = _poly_roots(qc[: deg + 1]) if deg > 0 else []
    out = np.empty((d, 2), dtype=complex)
    for i, z in enumerate(roots):
        if abs(z) <= 1.0:
            out[i] = (z, 1.0)
        else:
            out[i] = (1.0, 1.0 / z)
    for i in range(deg, d):
        out[i] = (1.0, 0.0)
    return out


def _poly_roots(qc: np.ndarray):
    """Roots of an ascending-coefficient polynomial; closed form for degree 2,
    companion-matrix eigenvalues (numpy.roots) up to degree 8."""
    deg = len(qc) - 1
    if deg == 1:
        return [-qc[0] / qc[1]]
    if deg == 2:
        c, b, a = qc
        sq = np.sqrt(complex(b * b - 4 * a * c))
        if (np.conj(b) * sq).real < 0:
            sq = -sq
        qq = -(b + sq) / 2.0
        if qq == 0:
            return [0.0 + 0j, -b / a]
        return [qq / a, c / qq]
    if deg > _MAX_ROOT_DEGREE:
        raise UnsupportedDegreeError(f"preimage degree {deg} > {_MAX_ROOT_DEGREE}")
    try:
        return list(np.roots(qc[::-1]))
    except np.linalg.LinAlgError as exc:
        raise DegenerateMapError(
            f"root finder failed on preimage polynomial {list(qc)}: {exc}")


def backward_sample(R: RationalMapC, seed: int, n_burn: int, n_keep: int,
                    start) -> SampleSet:
    """Random backward orbit: one uniformly chosen preimage per step.

    ``start`` is an affine complex number or a homogeneous pair; starts on
    (numerically) exceptional points are detected and perturbed.
    """
    rng = np.random.default_rng(seed)
    point = _as_point(start)
    for attempt in range(8):
        try:
            return _walk(R, rng, seed, n_burn, n_keep, point)
        except _ExceptionalStart:
            eps = 0.25 + 0.5 * rng.random()
            angle = 2 * math.pi * rng.random()
            point = _as_point(_to_affine(point) + eps * complex(math.cos(angle),
                                                                math.sin(angle)))
    raise DegenerateMapError("could not move the start off the exceptional set")


class _ExceptionalStart(Exception):
    pass


def _as_point(p) -> np.ndarray:
    if isinstance(p, (tuple, list, np.ndarray)) and len(p) == 2:
        arr = np.array([complex(p[0]), complex(p[1])], dtype=complex)
    else:
        z = complex(p)
        arr = np.array([z, 1.0], dtype=complex) if abs(z) <= 1 else \
            np.array([1.0, 1.0 / z], dtype=complex)
    scale = max(abs(arr[0]), abs(arr[1]))
    return arr / scale


def _to_affine(p) -> complex:
    return p[0] / p[1] if p[1] != 0 else 1e6 + 0j


def _chordal(p, q) -> float:
    num = abs(p[0] * q[1] - p[1] * q[0])
    return num / (max(abs(p[0]), abs(p[1])) * max(abs(q[0]), abs(q[1])))


def _walk(R, rng, seed, n_burn, n_keep, start) -> SampleSet:
    d = R.degree
    kept = np.empty((n_keep, 2), dtype=complex)
    current = start.copy()
    for step in range(n_burn + n_keep):
        pre = _preimages(R, current)
        if step < 3 and all(_chordal(pre[i], current) < 1e-12 for i in range(d)):
            raise _ExceptionalStart
        current = pre[rng.integers(d)]
        if step >= n_burn:
            kept[step - n_burn] = current
    return SampleSet(points=kept, seed=seed, n_burn=n_burn, n_keep=n_keep)


@dataclass
class IntegralResult:
    mean: float
    stderr: float
    n_used: int
    n_excluded: int
    warn: bool

    def __iter__(self):
        yield self.mean
        yield self.stderr


def integrate_mu(R: RationalMapC, f, s: SampleSet) -> IntegralResult:
    """Monte-Carlo integral of f over the sample; -inf/nan values are
    excluded and counted, with a warning status above 1% exclusions."""
    vals = np.asarray(f(s.points), dtype=float)
    finite = np.isfinite(vals)
    kept = vals[finite]
    n_used = int(finite.sum())
    n_exc = int(len(vals) - n_used)
    if n_used == 0:
        return IntegralResult(math.nan, math.nan, 0, n_exc, True)
    mean = float(kept.mean())
    stderr = float(kept.std(ddof=1) / math.sqrt(n_used)) if n_used > 1 else 0.0
    return IntegralResult(mean, stderr, n_used, n_exc, n_exc > 0.01 * len(vals))


def log_det_norm(R: RationalMapC, pts: np.ndarray) -> np.ndarray:
    """log of the spherical derivative norm at homogeneous points.

    Chart-stable form of log(|f'(z)| (1+|z|^2) / (1+|f(z)|^2)): evaluates
    log|W| + log(|w0|^2+|w1|^2) - log(|P0|^2+|P1|^2) in whichever affine
    chart has coordinate of modulus <= 1.
    """
    pts = np.atleast_2d(pts)
    z_chart = np.abs(pts[:, 0]) <= np.abs(pts[:, 1])
    z = np.where(z_chart, _safe_div(pts[:, 0], pts[:, 1]),
                 _safe_div(pts[:, 1], pts[:, 0]))
    out = np.empty(len(pts), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        for mask, w, c0, c1 in ((z_chart, R._wz, R.p0c, R.p1c),
                                (~z_chart, R._wu, R._q0, R._q1)):
            if not mask.any():
                continue
            zz = z[mask]
            wv = np.abs(npoly.polyval(zz, w))
            v0 = np.abs(npoly.polyval(zz, c0))
            v1 = np.abs(npoly.polyval(zz, c1))
            out[mask] = (np.log(wv) + np.log1p(np.abs(zz) ** 2)
                         - np.log(v0 ** 2 + v1 ** 2))
    return out


def lyapunov_complex(R: RationalMapC, s: SampleSet) -> IntegralResult:
    """Monte-Carlo Lyapunov exponent against the sampled equilibrium measure."""
    return integrate_mu(R, lambda pts: log_det_norm(R, pts), s)


# -- escape-rate oracle ---------------------------------------------------------------


def escape_green(coeffs, z0: complex, n_max: int = 700) -> float:
    """Escape-rate potential of an affine polynomial at a point.

    Iterates the polynomial and returns lim d^{-n} log+ |orbit|.  Once the
    orbit is astronomically large the limit equals
    ``d^{-n} (log|z_n| + log|lead|/(d-1))`` up to a relatively negligible
    tail, so the value is stable to far better than 1e-10.  Orbits that
    never get large within n_max steps contribute 0 (any true escape would
    only add a d^{-n_max}-sized correction).
    """
    c = np.asarray(coeffs, dtype=complex)
    d = len(c) - 1
    if d < 2:
        raise UnsupportedMapError("escape rate needs degree >= 2")
    lead = abs(c[d])
    if lead == 0:
        raise DegenerateMapError("leading coefficient vanished")
    z = complex(z0)
    big = 1e30  # d <= 8 keeps |p(z)| under the float range at this size
    for n in range(1, n_max + 1):
        z = complex(npoly.polyval(z, c))
        if abs(z) > big:
            return (math.log(abs(z)) + math.log(lead) / (d - 1)) / d ** n
    return 0.0


def przytycki_oracle(R, t: complex) -> float:
    """Independent Lyapunov oracle for polynomial families:
    log d plus the escape-rate potential summed over finite critical points."""
    if not R.is_polynomial():
        raise UnsupportedMapError("oracle requires a polynomial family (P1 = c*w1^d)")
    ram = _common_ram(R)
    root = complex(t) ** (1.0 / ram) if ram > 1 else None
    coeffs = np.array([c.eval(complex(t), root=root) for c in R.affine_coeffs()],
                      dtype=complex)
    d = len(coeffs) - 1
    if abs(coeffs[d]) == 0:
        raise DegenerateMapError(f"degenerate specialization at t = {t}")
    deriv = npoly.polyder(coeffs)
    crit = np.roots(deriv[::-1]) if d > 1 else []
    total = math.log(d)
    for z in crit:
        total += escape_green(coeffs, complex(z))
    return total
