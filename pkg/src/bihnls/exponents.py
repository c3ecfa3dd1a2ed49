"""Exact exponent algebra.

Exponents live in the extended rationals: ordinary fractions plus a single
point at +infinity.  Nothing here ever touches a binary float, so every
admissibility test and every strict inequality is decided exactly.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Any, Callable, Optional, Union

from .errors import InvalidParams

__all__ = [
    "ExtRational", "INF", "as_ext", "as_fraction", "inv", "parse_rational",
    "LebesguePair", "PowerLaw", "Split", "Constant", "ProblemParams",
    "Criticality", "is_biharmonic_admissible", "holder_conjugate",
    "scaling_index", "classify_criticality",
]

RationalLike = Union["ExtRational", Fraction, int, str]

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_RATIO = re.compile(r"^[+-]?\d+\s*/\s*\d+$")


def parse_rational(text: str) -> "ExtRational":
    """Parse "p/q", an integer, a plain decimal, or "inf".

    Decimals are read digit by digit ("0.25" is exactly 1/4); exponent
    notation is refused because it usually means a float slipped in.
    """
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity", "oo"):
        return INF
    if _RATIO.match(t):
        num, den = t.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return ExtRational(Fraction(int(num), int(den)))
    if _DECIMAL.match(t):
        return ExtRational(Fraction(t))
    raise ValueError(f"not an exact rational literal: {text!r}")


@total_ordering
class ExtRational:
    """A rational number or +infinity.

    Finite values wrap a Fraction (always in lowest terms).  Infinity is
    its own case, so 1/inf is 0 by definition rather than by a large
    sentinel.  Binary floats are refused at construction.
    """

    __slots__ = ("_q",)

    def __init__(self, value: Any = 0):
        if isinstance(value, ExtRational):
            self._q = value._q
        elif isinstance(value, bool):
            raise TypeError("booleans are not exponents")
        elif isinstance(value, (int, Fraction)):
            self._q = Fraction(value)
        elif isinstance(value, Rational):
            self._q = Fraction(value.numerator, value.denominator)
        elif isinstance(value, str):
            self._q = parse_rational(value)._q
        elif value is None:
            self._q = None
        else:
            raise TypeError(f"exact rational expected, got {type(value).__name__}")

    @classmethod
    def infinity(cls) -> "ExtRational":
        return cls(None)

    # -- inspection ------------------------------------------------------
    @property
    def is_inf(self) -> bool:
        return self._q is None

    @property
    def numerator(self) -> int:
        if self._q is None:
            raise ArithmeticError("infinity has no numerator")
        return self._q.numerator

    @property
    def denominator(self) -> int:
        if self._q is None:
            raise ArithmeticError("infinity has no denominator")
        return self._q.denominator

    def fraction(self) -> Fraction:
        if self._q is None:
            raise ArithmeticError("infinity is not a finite rational")
        return self._q

    def reciprocal(self) -> "ExtRational":
        """1/x with 1/inf = 0 and 1/0 = inf (the usual exponent convention)."""
        if self._q is None:
            return ExtRational(0)
        if self._q == 0:
            return INF
        return ExtRational(1 / self._q)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: Any) -> "ExtRational":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._q is None or o._q is None:
            return INF
        return ExtRational(self._q + o._q)

    __radd__ = __add__

    def __neg__(self) -> "ExtRational":
        if self._q is None:
            raise ArithmeticError("-inf is not representable")
        return ExtRational(-self._q)

    def __pos__(self) -> "ExtRational":
        return self

    def __sub__(self, other: Any) -> "ExtRational":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o._q is None:
            raise ArithmeticError("subtracting inf is not representable")
        if self._q is None:
            return INF
        return ExtRational(self._q - o._q)

    def __rsub__(self, other: Any) -> "ExtRational":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> "ExtRational":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._q is None or o._q is None:
            fin = o._q if self._q is None else self._q
            if fin is None or fin > 0:
                return INF
            raise ArithmeticError("inf times a nonpositive value")
        return ExtRational(self._q * o._q)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "ExtRational":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o._q is None:
            if self._q is None:
                raise ArithmeticError("inf/inf")
            return ExtRational(0)
        if o._q == 0:
            raise ZeroDivisionError("division by zero")
        if self._q is None:
            if o._q > 0:
                return INF
            raise ArithmeticError("inf divided by a negative value")
        return ExtRational(self._q / o._q)

    def __rtruediv__(self, other: Any) -> "ExtRational":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    # -- comparison ------------------------------------------------------
    def __eq__(self, other: Any) -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._q == o._q

    def __lt__(self, other: Any) -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._q is None:
            return False
        if o._q is None:
            return True
        return self._q < o._q

    def __hash__(self) -> int:
        return hash(self._q) if self._q is not None else hash(float("inf"))

    def __bool__(self) -> bool:
        return self._q is None or self._q != 0

    def __float__(self) -> float:
        return float("inf") if self._q is None else float(self._q)

    def __str__(self) -> str:
        return "inf" if self._q is None else str(self._q)

    def __repr__(self) -> str:
        return f"ExtRational({str(self)!r})"


def _coerce(x: Any):
    if isinstance(x, ExtRational):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return ExtRational(x)
    if isinstance(x, str):
        return parse_rational(x)
    return NotImplemented


INF = ExtRational.infinity()


def as_ext(x: RationalLike) -> ExtRational:
    return x if isinstance(x, ExtRational) else ExtRational(x)


def as_fraction(x: RationalLike) -> Fraction:
    return as_ext(x).fraction()


def inv(x: RationalLike) -> Fraction:
    """Reciprocal as a finite Fraction; 1/inf = 0.  Zero is rejected."""
    e = as_ext(x)
    if e.is_inf:
        return Fraction(0)
    if e.fraction() == 0:
        raise ZeroDivisionError("reciprocal of zero exponent")
    return 1 / e.fraction()


@dataclass(frozen=True)
class LebesguePair:
    """Exponent pair (time, space), both in [1, inf]."""

    time: ExtRational
    space: ExtRational

    def __post_init__(self):
        t, x = as_ext(self.time), as_ext(self.space)
        object.__setattr__(self, "time", t)
        object.__setattr__(self, "space", x)
        for v in (t, x):
            if v._q is not None and v._q < 1:
                raise ValueError(f"Lebesgue exponent {v} below 1")

    @classmethod
    def parse(cls, text: str) -> "LebesguePair":
        parts = text.replace("(", "").replace(")", "").split(",")
        if len(parts) != 2:
            raise ValueError(f"pair must look like 'q,r': {text!r}")
        return cls(parse_rational(parts[0]), parse_rational(parts[1]))

    def __iter__(self):
        yield self.time
        yield self.space

    def __str__(self) -> str:
        return f"({self.time},{self.space})"


def is_biharmonic_admissible(pair: LebesguePair, N: int) -> bool:
    g, r = pair.time._q, pair.space._q
    if (g is not None and g.numerator < 2 * g.denominator) or \
            (r is not None and r.numerator < 2 * r.denominator):
        return False
    if r is None:
        # 4/g = N/2, never at the forbidden endpoint (2, inf) for N = 4
        return g is not None and N != 4 and 8 * g.denominator == N * g.numerator
    if g is None:
        return 2 * r.denominator == r.numerator
    # 4/g + N/r = N/2 with denominators cleared
    gn, gd, rn, rd = g.numerator, g.denominator, r.numerator, r.denominator
    return 8 * gd * rn + 2 * N * rd * gn == N * gn * rn


def holder_conjugate(p: RationalLike) -> ExtRational:
    p = as_ext(p)
    if p < 1:
        raise ValueError(f"Hölder exponent {p} outside [1, inf]")
    return ExtRational(1 - inv(p)).reciprocal()


# -- problem parameters ---------------------------------------------------

def _complex(v: Any) -> complex:
    return complex(v)


@dataclass(frozen=True)
class PowerLaw:
    """K(x) = lam |x|^(-b)."""

    lam: complex
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", _complex(self.lam))
        object.__setattr__(self, "b", as_fraction(self.b))


@dataclass(frozen=True)
class Split:
    """K = bounded part + integrable part, the latter in L^1 and L^beta.

    The two parts are field specs understood by
    ``evolution.potential.realize_potential`` (small dicts such as
    ``{"kind": "gaussian", "amp": 1, "width": 1}``).
    """

    beta: Fraction
    bounded_part: dict = field(default_factory=lambda: {"kind": "constant", "value": 0})
    integrable_part: dict = field(default_factory=lambda: {"kind": "constant", "value": 0})
    lam: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "beta", as_fraction(self.beta))
        object.__setattr__(self, "lam", _complex(self.lam))


@dataclass(frozen=True)
class Constant:
    """K = lam everywhere, the b -> 0 end of the power-law family.

    The lemma engine needs an L^beta exponent even here; pass ``beta`` if
    witnesses are wanted.
    """

    lam: complex
    beta: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "lam", _complex(self.lam))
        if self.beta is not None:
            object.__setattr__(self, "beta", as_fraction(self.beta))


Potential = Union[PowerLaw, Split, Constant]


@dataclass(frozen=True)
class ProblemParams:
    """One Cauchy problem: dimension, regularity, power, dispersion, potential."""

    N: int
    s: Fraction
    alpha: Fraction
    mu: int = 0
    potential: Potential = field(default_factory=lambda: PowerLaw(1.0, Fraction(1, 4)))
    nonlinearity: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "s", as_fraction(self.s))
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        N, s, a = self.N, self.s, self.alpha
        if not isinstance(N, int) or N < 1:
            raise InvalidParams("dimension N must be a positive integer", "N >= 1")
        if not (0 < s <= 2):
            raise InvalidParams(f"s = {s} outside (0, 2]", "0 < s <= 2")
        if a <= 0:
            raise InvalidParams(f"alpha = {a} must be positive", "alpha > 0")
        if self.mu not in (0, -1):
            raise InvalidParams(f"mu = {self.mu} not in {{0, -1}}", "mu in {0, -1}")
        pot = self.potential
        if isinstance(pot, PowerLaw):
            top = min(Fraction(N, 2), Fraction(4))
            if not (0 < pot.b < top):
                raise InvalidParams(f"b = {pot.b} outside (0, {top})", "0 < b < min(N/2, 4)")
        elif isinstance(pot, (Split, Constant)):
            beta = pot.beta
            if beta is not None and beta <= max(Fraction(2), Fraction(N, 4)):
                raise InvalidParams(
                    f"beta = {beta} must exceed max(2, N/4)", "beta > max(2, N/4)")
        else:
            raise InvalidParams(f"unknown potential {pot!r}", "potential kind")

    @property
    def lam(self) -> complex:
        return self.potential.lam

    @property
    def b(self) -> Optional[Fraction]:
        """Decay exponent used by the L^beta lemmas (N/beta off the power law)."""
        pot = self.potential
        if isinstance(pot, PowerLaw):
            return pot.b
        if pot.beta is None:
            return None
        return Fraction(self.N) / pot.beta

    @property
    def beta(self) -> Optional[Fraction]:
        pot = self.potential
        if isinstance(pot, PowerLaw):
            return Fraction(self.N) / pot.b
        return pot.beta

    def with_alpha(self, alpha) -> "ProblemParams":
        return ProblemParams(self.N, self.s, alpha, self.mu, self.potential, self.nonlinearity)


def scaling_index(N: int, alpha: RationalLike, b: RationalLike = 0) -> Fraction:
    alpha, b = as_fraction(alpha), as_fraction(b)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return Fraction(N, 2) - (4 - b) / alpha


class Criticality(str, enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


def classify_criticality(params: ProblemParams, s: Optional[RationalLike] = None) -> Criticality:
    s = params.s if s is None else as_fraction(s)
    if not (0 < s <= 2):
        raise ValueError(f"s = {s} outside (0, 2]")
    b = params.b if params.b is not None else Fraction(0)
    gap = params.N - 2 * s
    if gap <= 0:
        return Criticality.SUBCRITICAL
    lhs, rhs = gap * params.alpha, 8 - 2 * b
    if lhs < rhs:
        return Criticality.SUBCRITICAL
    if lhs == rhs:
        return Criticality.CRITICAL
    return Criticality.SUPERCRITICAL
