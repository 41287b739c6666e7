"""Shipped example families and datum pairs used by the test suites and docs."""

from __future__ import annotations

from .admissible import AdmissibleDatum
from .parser import RationalMapFamily, parse_family, parse_sections

#: families exercised by the verification suites
FAMILY_TEXTS = (
    "z^2",
    "z^2 - 2",
    "z^2 + 1/t",
    "z^2 + t*z",
    "(z^2 - t)/z",
    "z^3 + t*z",
)


def shipped_families() -> list:
    return [parse_family(text) for text in FAMILY_TEXTS]


def shipped_family(text: str) -> RationalMapFamily:
    if text not in FAMILY_TEXTS:
        raise KeyError(f"{text!r} is not a shipped family")
    return parse_family(text)


def shipped_datum_pairs() -> list:
    """Three datum pairs covering equal and mixed degrees."""
    pairs = [
        (parse_sections(["w0", "w1"], k=1, d=1),
         parse_sections(["t*w0", "t*w1"], k=1, d=1)),
        (parse_sections(["t*w0", "w1"], k=1, d=1),
         parse_sections(["w0^2", "t*w1^2", "w0*w1"], k=1, d=2)),
        (parse_sections(["w0^2 + t*w1^2", "w1^2"], k=1, d=2),
         parse_sections(["t^2*w0", "w1"], k=1, d=1)),
    ]
    return pairs


def coordinate_sections(k: int = 1) -> AdmissibleDatum:
    texts = [f"w{i}" for i in range(k + 1)]
    return parse_sections(texts, k=k, d=1)


def twisted_lift(family: RationalMapFamily, power: int = 1) -> RationalMapFamily:
    """Same map with both sections multiplied by t**power (a different lift)."""
    from .laurent import LaurentSeries

    s = LaurentSeries.t_power(power)
    return RationalMapFamily(family.degree, family.p0 * s, family.p1 * s,
                             label=f"{family.label} (t^{power} lift)")
