"""Homogeneous polynomials with Laurent-series coefficients.

The general representation keeps a map from exponent vectors to coefficients
and supports any number of variables (sections of data live in w0..wk).  The
two-variable case additionally gets dense helpers used by the dynamical
iteration, where coefficients are stored on an integer (w0-power, t-exponent)
grid and products become 2-D convolutions.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import convolve2d

from .errors import LaurentError, ParseError, PrecisionError
from .laurent import LaurentSeries

_INF = math.inf


class HomogeneousPoly:
    """Homogeneous polynomial of fixed degree in ``nvars`` variables."""

    __slots__ = ("nvars", "degree", "coeffs")

    def __init__(self, nvars: int, degree: int, coeffs: dict):
        """``coeffs`` maps exponent tuples (length nvars, summing to degree)
        to LaurentSeries.  Exactly-zero series are dropped; zero-to-truncation
        coefficients are kept because they still bound unknown terms."""
        clean = {}
        for exps, c in coeffs.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ParseError(f"bad exponent vector {exps}")
            if sum(exps) != degree:
                raise ParseError(
                    f"monomial {exps} has degree {sum(exps)}, expected {degree}")
            if not isinstance(c, LaurentSeries):
                c = LaurentSeries.const(c)
            if not c.is_exact_zero():
                clean[exps] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("HomogeneousPoly is immutable")

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        """True when no coefficient has a known nonzero term."""
        return all(c.is_zero() for c in self.coeffs.values())

    def min_coeff_order(self):
        """Smallest t-adic order over all coefficients (inf when zero);
        zero-to-truncation coefficients contribute their truncation order,
        which is a valid lower bound for their unknown terms."""
        if not self.coeffs:
            return _INF
        return min(c.order() for c in self.coeffs.values())

    def truncation_order(self):
        """Smallest truncation order over the coefficients (inf when exact)."""
        tr = _INF
        for c in self.coeffs.values():
            tr = min(tr, c.trunc_order)
        return tr

    def coeff_list(self) -> list:
        """Two-variable only: coefficients ascending in the w0-power."""
        if self.nvars != 2:
            raise LaurentError("coeff_list requires a two-variable polynomial")
        out = [LaurentSeries.zero() for _ in range(self.degree + 1)]
        for (a, _b), c in self.coeffs.items():
            out[a] = c
        return out

    @classmethod
    def from_coeff_list(cls, coeffs: list, degree: int | None = None) -> "HomogeneousPoly":
        """Two-variable polynomial from coefficients ascending in w0-power."""
        if degree is None:
            degree = len(coeffs) - 1
        return cls(2, degree, {(a, degree - a): c for a, c in enumerate(coeffs)})

    def dehomogenized(self, chart: str = "z") -> list:
        """One-variable coefficient list: ``P(z, 1)`` for chart "z",
        ``P(1, u)`` for chart "1/z" (ascending in the affine variable)."""
        if self.nvars != 2:
            raise LaurentError("dehomogenization requires two variables")
        out = [LaurentSeries.zero() for _ in range(self.degree + 1)]
        for (a, b), c in self.coeffs.items():
            out[a if chart == "z" else b] = c
        return out

    def swapped(self) -> "HomogeneousPoly":
        """Exchange the two variables."""
        if self.nvars != 2:
            raise LaurentError("swap requires two variables")
        return HomogeneousPoly(2, self.degree,
                               {(b, a): c for (a, b), c in self.coeffs.items()})

    # -- algebra -----------------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, LaurentSeries)):
            return HomogeneousPoly(self.nvars, self.degree,
                                   {e: c * other for e, c in self.coeffs.items()})
        if self.nvars != other.nvars:
            raise LaurentError("variable-count mismatch")
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return HomogeneousPoly(self.nvars, self.degree + other.degree, out)

    __rmul__ = __mul__

    def __add__(self, other):
        if self.nvars != other.nvars or self.degree != other.degree:
            raise LaurentError("cannot add polynomials of different shape")
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return HomogeneousPoly(self.nvars, self.degree, out)

    def __neg__(self):
        return self * (-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, n: int):
        if n < 0:
            raise LaurentError("negative polynomial power")
        result = HomogeneousPoly(self.nvars, 0, {(0,) * self.nvars: LaurentSeries.one()})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        return (self.nvars, self.degree, self.coeffs) == (other.nvars, other.degree, other.coeffs)

    def __hash__(self):
        return hash((self.nvars, self.degree, tuple(sorted(self.coeffs.items()))))

    def derivative(self, var: int) -> "HomogeneousPoly":
        out: dict = {}
        for e, c in self.coeffs.items():
            if e[var] == 0:
                continue
            ne = list(e)
            ne[var] -= 1
            ne = tuple(ne)
            term = c * float(e[var])
            out[ne] = out[ne] + term if ne in out else term
        return HomogeneousPoly(self.nvars, max(self.degree - 1, 0), out)

    # -- evaluation ----------------------------------------------------------------

    def eval_numeric(self, w, t: complex, root: complex | None = None):
        """Evaluate at complex homogeneous coordinates.

        ``w`` is a sequence of ``nvars`` scalars or equally-shaped numpy
        arrays; coefficients are specialized at the complex parameter ``t``.
        """
        w = [np.asarray(x, dtype=complex) for x in w]
        total = None
        for e, c in self.coeffs.items():
            cv = c.eval(t, root=root)
            term = np.full_like(w[0], cv)
            for x, k in zip(w, e):
                if k:
                    term = term * x ** k
            total = term if total is None else total + term
        if total is None:
            return np.zeros_like(w[0])
        return total

    def eval_series(self, w: list) -> LaurentSeries:
        """Evaluate at Laurent-series homogeneous coordinates."""
        total = LaurentSeries.zero()
        for e, c in self.coeffs.items():
            term = c
            for x, k in zip(w, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def emit(self, varnames: list | None = None) -> str:
        """Textual form parseable by the expression grammar."""
        if varnames is None:
            varnames = [f"w{i}" for i in range(self.nvars)]
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            factors = []
            for name, k in zip(varnames, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            coeff_text = str(c)
            if coeff_text == "1" and factors:
                text = "*".join(factors)
            else:
                if c.is_monomial() and " " not in coeff_text and not coeff_text.startswith("-"):
                    ctext = coeff_text
                else:
                    ctext = f"({coeff_text})"
                text = "*".join([ctext] + factors) if factors else ctext
            parts.append(text)
        return " + ".join(parts)

    def __repr__(self):
        return f"<HomogeneousPoly deg={self.degree} {self.emit()}>"


def jacobian_determinant(p0: HomogeneousPoly, p1: HomogeneousPoly) -> HomogeneousPoly:
    """det of the 2x2 matrix of partial derivatives (degree 2d-2)."""
    return (p0.derivative(0) * p1.derivative(1)) - (p0.derivative(1) * p1.derivative(0))


# -- dense two-variable fast path ---------------------------------------------------
#
# A two-variable homogeneous polynomial whose coefficients are exact series on
# the integer exponent grid is stored as a complex array ``arr[a, j]`` holding
# the coefficient of ``w0^a * w1^(deg-a) * t^(j + off)``.  Products of such
# polynomials are plain 2-D convolutions.


class _Dense2:
    __slots__ = ("deg", "arr", "off")

    def __init__(self, deg: int, arr: np.ndarray, off: int):
        self.deg = deg
        self.arr = arr
        self.off = off


def _to_dense(p: HomogeneousPoly) -> _Dense2 | None:
    if p.nvars != 2:
        return None
    lo, hi = None, None
    for c in p.coeffs.values():
        if c.ram != 1 or c.trunc is not None:
            return None
        for k in c.terms:
            lo = k if lo is None else min(lo, k)
            hi = k if hi is None else max(hi, k)
    if lo is None:
        lo, hi = 0, 0
    arr = np.zeros((p.degree + 1, hi - lo + 1), dtype=complex)
    for (a, _b), c in p.coeffs.items():
        for k, v in c.terms.items():
            arr[a, k - lo] = v
    return _Dense2(p.degree, arr, lo)


def _from_dense(d: _Dense2) -> HomogeneousPoly:
    coeffs = {}
    for a in range(d.deg + 1):
        row = d.arr[a]
        nz = np.nonzero(row)[0]
        if len(nz):
            series = LaurentSeries._make(1, {int(j) + d.off: complex(row[j]) for j in nz}, None)
            coeffs[(a, d.deg - a)] = series
    return HomogeneousPoly(2, d.deg, coeffs)


def _dense_mul(x: _Dense2, y: _Dense2) -> _Dense2:
    arr = convolve2d(x.arr, y.arr)  # direct method: products are exact
    return _Dense2(x.deg + y.deg, arr, x.off + y.off)


def _dense_pow(x: _Dense2, n: int) -> _Dense2:
    result = _Dense2(0, np.ones((1, 1), dtype=complex), 0)
    base = x
    while n:
        if n & 1:
            result = _dense_mul(result, base)
        base = _dense_mul(base, base) if n > 1 else base
        n >>= 1
    return result


def compose_pair(p: HomogeneousPoly, q0: HomogeneousPoly, q1: HomogeneousPoly) -> HomogeneousPoly:
    """Substitute ``(w0, w1) -> (q0, q1)`` into a two-variable polynomial."""
    if p.nvars != 2:
        raise LaurentError("composition requires two variables")
    d0, d1 = _to_dense(q0), _to_dense(q1)
    if d0 is not None and d1 is not None and _to_dense(p) is not None:
        pows0 = {0: _Dense2(0, np.ones((1, 1), dtype=complex), 0)}
        pows1 = {0: _Dense2(0, np.ones((1, 1), dtype=complex), 0)}
        total = None
        for (a, b), c in p.coeffs.items():
            if a not in pows0:
                pows0[a] = _dense_pow(d0, a)
            if b not in pows1:
                pows1[b] = _dense_pow(d1, b)
            term = _dense_mul(pows0[a], pows1[b])
            cd = _to_dense(HomogeneousPoly(2, 0, {(0, 0): c}))
            term = _dense_mul(term, cd)
            if total is None:
                total = term
            else:
                # align offsets and degrees before adding
                off = min(total.off, term.off)
                deg = max(total.deg, term.deg)
                w = max(total.off + total.arr.shape[1], term.off + term.arr.shape[1]) - off
                arr = np.zeros((deg + 1, w), dtype=complex)
                arr[: total.deg + 1, total.off - off: total.off - off + total.arr.shape[1]] += total.arr
                arr[: term.deg + 1, term.off - off: term.off - off + term.arr.shape[1]] += term.arr
                total = _Dense2(deg, arr, off)
        if total is None:
            raise LaurentError("empty polynomial in composition")
        return _from_dense(total)
    # generic (Puiseux or truncated) path
    pows0g = {0: HomogeneousPoly(2, 0, {(0, 0): LaurentSeries.one()})}
    pows1g = {0: pows0g[0]}
    total_g = None
    for (a, b), c in p.coeffs.items():
        if a not in pows0g:
            pows0g[a] = q0 ** a
        if b not in pows1g:
            pows1g[b] = q1 ** b
        term = pows0g[a] * pows1g[b] * c
        total_g = term if total_g is None else total_g + term
    return total_g


def iterate_pair(p0: HomogeneousPoly, p1: HomogeneousPoly, n: int):
    """Homogeneous iterates: returns the pair of sections of the n-th iterate.

    Uses the recursion (next iterate) = (map composed with current iterate);
    raises PrecisionError when truncation is exhausted along the way.
    """
    if n < 1:
        raise LaurentError("iteration count must be >= 1")
    cur0, cur1 = p0, p1
    for _ in range(n - 1):
        cur0, cur1 = compose_pair(p0, cur0, cur1), compose_pair(p1, cur0, cur1)
        for section in (cur0, cur1):
            if section.is_zero() and section.truncation_order() != _INF:
                raise PrecisionError("iterate truncation underflow: no certain terms left")
    return cur0, cur1
