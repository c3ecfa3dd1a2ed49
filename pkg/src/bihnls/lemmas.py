"""Witness exponents for the nonlinear estimates, built and checked exactly.

Each lemma is a list of cases.  A case has an exact predicate, a list of
upper bounds for the free parameter eps, and formulas for its exponent
pairs.  Formulas are written for reciprocals (1/gamma, 1/rho, ...) so a
vanishing denominator lands on infinity instead of raising.

``construct_witness`` picks the case whose predicate holds, sets
eps = min(bounds)/2, evaluates the pairs and records an exact margin for
every strict condition.  If that fails and ``rescue`` is on, it retries
the same case with smaller eps and then the sibling cases of the same
lemma; whatever verifies is returned together with a note saying how the
predicate's own choice failed.  With ``rescue=False`` the first failure is
raised as ConstructionFailed.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import ConstructionFailed, HypothesisViolated, MarginMismatch
from .exponents import (
    INF, Constant, ExtRational, LebesguePair, PowerLaw, ProblemParams, as_fraction,
    is_biharmonic_admissible, inv,
)

__all__ = [
    "LEMMA_IDS", "LemmaWitness", "select_epsilon", "construct_witness",
    "construct_all", "verify_witness", "lemma_applies", "GWPClass",
    "classify_gwp", "ckn_exponents", "CKNExponents", "gwp_threshold", "lwp_hypotheses",
]

F = Fraction
LEMMA_IDS = tuple(f"L4.{k}" for k in range(1, 11))
LOW_REGULARITY = LEMMA_IDS[:8]
HIGH_REGULARITY = LEMMA_IDS[8:]
LBETA_BRANCH = ("L4.1", "L4.3", "L4.5", "L4.7")
LINF_BRANCH = ("L4.2", "L4.4", "L4.6", "L4.8")
RESCUE_HALVINGS = 12


def select_epsilon(bounds) -> Fraction:
    bounds = [as_fraction(b) for b in bounds]
    if not bounds:
        raise ValueError("select_epsilon needs at least one bound")
    bad = [b for b in bounds if b <= 0]
    if bad:
        raise ValueError(f"nonpositive eps bound {bad[0]}")
    return min(bounds) / 2


# -- context ---------------------------------------------------------------

@dataclass(frozen=True)
class _Ctx:
    N: Fraction
    s: Fraction
    a: Fraction          # alpha
    b: Fraction
    beta: Optional[Fraction]

    @property
    def A(self) -> Fraction:
        return (self.N - 2 * self.s) * self.a

    @property
    def inv_4star(self) -> Fraction:
        # 4* = 2N/(N-4) for N >= 5 and infinity below
        return (self.N - 4) / (2 * self.N) if self.N >= 5 else F(0)


def _ctx(params: ProblemParams, s) -> _Ctx:
    s = params.s if s is None else as_fraction(s)
    b = params.b
    return _Ctx(F(params.N), s, params.alpha, b if b is not None else F(0), params.beta)


def _pair_from_inv(label: str, it: Fraction, ix: Fraction) -> LebesguePair:
    vals = []
    for name, v in zip(label.split(","), (it, ix)):
        if v < 0 or v > 1:
            raise ConstructionFailed(
                f"exponent {name} has reciprocal {v} outside [0, 1]", f"{name} in [1,inf]", v)
        vals.append(ExtRational(v).reciprocal())
    return LebesguePair(*vals)


# -- case tables ------------------------------------------------------------
# build(ctx, eps) -> {pair label: (1/time, 1/space)}

@dataclass(frozen=True)
class _Case:
    case_id: int
    label: str
    predicate: Callable[[_Ctx], bool]
    bounds: Callable[[_Ctx], list]
    build: Callable[[_Ctx, Optional[Fraction]], dict]


def _no_bounds(c):
    return []


ENDPOINT = (F(0), F(1, 2))

_L41 = (
    _Case(1, "1", lambda c: c.A < 2 * c.s - 2 * c.b, _no_bounds,
          lambda c, e: {"gamma,rho": ENDPOINT, "q,r": ENDPOINT}),
    _Case(2, "2", lambda c: 2 * c.s - 2 * c.b <= c.A < 4 + 2 * c.s - 2 * c.b,
          lambda c: [("4+2s-2b-(N-2s)a", 4 + 2 * c.s - 2 * c.b - c.A),
                     ("8-2b-(N-2s)a", 8 - 2 * c.b - c.A), ("2", F(2))],
          lambda c, e: {
              "gamma,rho": ((c.A - 2 * c.s + 2 * c.b + e) / 8,
                            (c.N + 2 * c.s - 2 * c.b - c.A - e) / (2 * c.N)),
              "q,r": ENDPOINT}),
    _Case(3, "3", lambda c: c.A >= 4 + 2 * c.s - 2 * c.b and c.N >= 5,
          lambda c: [("(8-2b-(N-2s)a)/2", (8 - 2 * c.b - c.A) / 2), ("s", c.s)],
          lambda c, e: {
              "gamma,rho": (F(1, 2), (c.N - 4) / (2 * c.N)),
              "q,r": ((c.A - (4 + 2 * c.s - 2 * c.b) + 2 * e) / (8 * (c.a + 1)),
                      (c.N + 2 * c.s * (c.a + 1) + 4 - 2 * c.b - 2 * e) / (2 * c.N * (c.a + 1)))}),
    _Case(4, "4", lambda c: c.A >= 4 + 2 * c.s - 2 * c.b and c.N <= 4,
          lambda c: [("(N-b)/N", (c.N - c.b) / c.N), ("(8-2b-(N-2s)a)/N", (8 - 2 * c.b - c.A) / c.N)],
          lambda c, e: {
              "gamma,rho": (c.N * (1 - e) / 8, e / 2),
              "q,r": ((c.A - (1 - 2 * e) * c.N - 2 * c.s + 2 * c.b) / (8 * (c.a + 1)),
                      ((1 - e) * c.N - c.b + c.s * (c.a + 1)) / (c.N * (c.a + 1)))}),
)

_L42 = (
    _Case(1, "1", lambda c: c.A < 2 * c.s, _no_bounds,
          lambda c, e: {"gamma,rho": ENDPOINT, "q,r": ENDPOINT}),
    _Case(2, "2", lambda c: 2 * c.s <= c.A < 4 + 2 * c.s,
          lambda c: [("4+2s-(N-2s)a", 4 + 2 * c.s - c.A), ("8-(N-2s)a", 8 - c.A),
                     ("2s(a+1)/N", 2 * c.s * (c.a + 1) / c.N)],
          lambda c, e: {
              "gamma,rho": ((c.A - 2 * c.s + e) / 8, (c.N + 2 * c.s - c.A - e) / (2 * c.N)),
              "q,r": ENDPOINT}),
    _Case(3, "3", lambda c: c.A >= 4 + 2 * c.s and c.N >= 5,
          lambda c: [("(8-(N-2s)a)/2", (8 - c.A) / 2), ("s", c.s)],
          lambda c, e: {
              "gamma,rho": (F(1, 2), (c.N - 4) / (2 * c.N)),
              "q,r": ((c.A - (4 + 2 * c.s) + 2 * e) / (8 * (c.a + 1)),
                      (c.N + 2 * c.s * (c.a + 1) + 4 - 2 * e) / (2 * c.N * (c.a + 1)))}),
    _Case(4, "4", lambda c: c.A >= 4 + 2 * c.s and c.N <= 4,
          lambda c: [("1/2", F(1, 2)), ("(8-(N-2s)a)/N", (8 - c.A) / c.N)],
          lambda c, e: {
              "gamma,rho": (c.N * (1 - e) / 8, e / 2),
              "q,r": ((c.A - (1 - 2 * e) * c.N - 2 * c.s) / (8 * (c.a + 1)),
                      ((1 - e) * c.N + c.s * (c.a + 1)) / (c.N * (c.a + 1)))}),
)

_L43 = (
    _Case(1, "1", lambda c: c.N >= 2 * c.s + 4,
          lambda c: [("(8-2b-(N-2s)a)/2", (8 - 2 * c.b - c.A) / 2), ("2", F(2))],
          lambda c, e: {
              "gamma,rho": (F(1, 2), (c.N - 4) / (2 * c.N)),
              "q,r": ((2 - e) / (4 * (c.a + 1)), (c.N * (c.a + 1) - 4 + 2 * e) / (2 * c.N * (c.a + 1))),
              "m,n": ((2 - e) / (4 * (c.a + 1)), (c.N * (c.a + 1) - 4 + 2 * e) / (2 * c.N * (c.a + 1)))}),
    _Case(2, "2", lambda c: c.N < 2 * c.s + 4,
          lambda c: [("(N-b)/(2a)", (c.N - c.b) / (2 * c.a)),
                     ("(8-2b-(N-2s)a)/(2a)", (8 - 2 * c.b - c.A) / (2 * c.a)),
                     ("(N-2s)/2", (c.N - 2 * c.s) / 2)],
          lambda c, e: {
              "gamma,rho": ((c.b + 2 * c.a * e) / 8, (c.N - c.b - 2 * c.a * e) / (2 * c.N)),
              "q,r": ((c.N - 2 * c.s - 2 * e) / 8, (c.s + e) / c.N),
              "m,n": ((c.b + 2 * c.a * e) / 8, (c.N - c.b - 2 * c.a * e) / (2 * c.N))}),
)

_L44 = (
    _Case(1, "1", lambda c: True,
          lambda c: [("N-2s", c.N - 2 * c.s), ("(8-(N-2s)a)/2", (8 - c.A) / 2), ("a*s", c.a * c.s)],
          lambda c, e: {"q,r": ((c.A + 2 * e) / (8 * (c.a + 2)),
                                (c.N + c.a * c.s - e) / (c.N * (c.a + 2)))}),
)

_QBAR_LOW = lambda c: (F(1, 2), (c.N + 4 - 2 * c.s) / (2 * c.N))   # noqa: E731
_QBAR_STD = lambda c: ((4 - c.s) / 4, F(1, 2))                      # noqa: E731

_L45 = (
    _Case(1, "1.1", lambda c: c.N + 2 * c.s >= 4 and c.A < 4 - 2 * c.b, _no_bounds,
          lambda c, e: {"qbar,rbar": _QBAR_LOW(c), "q,r": ENDPOINT}),
    _Case(2, "1.2", lambda c: c.N + 2 * c.s >= 4 and c.A >= 4 - 2 * c.b,
          lambda c: [("(8-2b-(N-2s)a)/2", (8 - 2 * c.b - c.A) / 2), ("2a", 2 * c.a),
                     ("(N+4-2b-2s)/2", (c.N + 4 - 2 * c.b - 2 * c.s) / 2)],
          lambda c, e: {
              "qbar,rbar": _QBAR_LOW(c),
              "q,r": ((c.A - 4 + 2 * c.b + 2 * e) / (8 * (c.a + 1)),
                      (c.N + 4 - 2 * c.b - 2 * e + 2 * c.s * c.a) / (2 * c.N * (c.a + 1)))}),
    _Case(3, "2.1", lambda c: c.N + 2 * c.s < 4 and c.A < 2 * c.s - 2 * c.b, _no_bounds,
          lambda c, e: {"qbar,rbar": _QBAR_STD(c), "q,r": ENDPOINT}),
    _Case(4, "2.2", lambda c: c.N + 2 * c.s < 4 and c.A >= 2 * c.s - 2 * c.b,
          lambda c: [("(8-2b-(N-2s)a)/2", (8 - 2 * c.b - c.A) / 2), ("(N-2b)/2", (c.N - 2 * c.b) / 2)],
          lambda c, e: {
              "qbar,rbar": _QBAR_STD(c),
              "q,r": ((c.A - 2 * c.s + 2 * c.b + 2 * e) / (8 * (c.a + 1)),
                      (c.N - 2 * c.b - 2 * e + 2 * c.s * (c.a + 1)) / (2 * c.N * (c.a + 1)))}),
)

_L46 = (
    _Case(1, "1", lambda c: c.A < 2 * c.s, _no_bounds,
          lambda c, e: {"qbar,rbar": _QBAR_STD(c), "q,r": ENDPOINT}),
    _Case(2, "2", lambda c: 2 * c.s <= c.A < 4 * c.a + 4 + 2 * c.s,
          lambda c: [("(8-(N-2s)a)/2", (8 - c.A) / 2), ("s(a+1)", c.s * (c.a + 1)), ("N/2", c.N / 2),
                     # printed with -2s; +2s is where q >= 2 stops holding and
                     # matches the case's own upper end
                     ("(4a+4+2s-(N-2s)a)/2", (4 * c.a + 4 + 2 * c.s - c.A) / 2)],
          lambda c, e: {
              "qbar,rbar": _QBAR_STD(c),
              "q,r": ((c.A - 2 * c.s + 2 * e) / (8 * (c.a + 1)),
                      (c.N - 2 * e + 2 * c.s * (c.a + 1)) / (2 * c.N * (c.a + 1)))}),
    _Case(3, "3", lambda c: c.A > 4 * c.a + 4 + 2 * c.s,
          lambda c: [("b", c.b), ("s", c.s), ("N-2s", c.N - 2 * c.s), ("(8-(N-2s)a)/2", (8 - c.A) / 2)],
          lambda c, e: {
              "qbar,rbar": (((8 - (c.N - 2 * c.s)) * c.a + 16 - 2 * e) / (8 * (c.a + 2)),
                            (c.A + c.N - 2 * c.s + e) / (c.N * (c.a + 2))),
              "q,r": ((c.A + 2 * e) / (8 * (c.a + 2)), (c.N + c.s * c.a - e) / (c.N * (c.a + 2)))}),
)


def _l49_build(c, e):
    return {
        "q,r": (c.N * (2 * c.a + 2 + e * c.a) / (8 * (c.a + 1) * (2 + e)),
                e / (2 * (2 + e) * (c.a + 1))),
        "gamma,rho": (c.N * c.a / (8 * (c.a + 1)), 1 / (2 * c.a + 2)),
    }


def _beta_bound(c):
    if c.beta is None:
        raise HypothesisViolated("an L^beta exponent is required", "beta given")
    return [("beta-2", c.beta - 2)]


_L49 = (_Case(1, "1", lambda c: True, _beta_bound, _l49_build),)
_L410 = (_Case(1, "1", lambda c: True, _beta_bound,
               lambda c, e: {"qbar,rbar": _QBAR_STD(c), **_l49_build(c, e)}),)


# -- conditions ---------------------------------------------------------------
# each returns (margins, checks, aux) from the pairs alone

def _i(pairs, label):
    p = pairs[label]
    return inv(p.time), inv(p.space)


def _cond_41(c, P):
    ig, ir_ = _i(P, "gamma,rho")
    iq, ir = _i(P, "q,r")
    sigma = 1 - ig - (c.a + 1) * iq - c.s / 4
    il = 1 - ig - (c.a + 1) * iq
    ip = 1 - ir_ - (c.a + 1) * (ir - c.s / c.N)
    margins = [("a1", sigma), ("a2", ir - c.s / c.N), ("a3", ip - c.b / c.N), ("p>1", 1 - ip)]
    checks = [("l>=1", 0 <= il <= 1)]
    return margins, checks, {"sigma": sigma, "l": _rec(il), "p": _rec(ip)}


def _cond_42(c, P):
    ig, ir_ = _i(P, "gamma,rho")
    iq, ir = _i(P, "q,r")
    sigma = 1 - ig - (c.a + 1) * iq - c.s / 4
    il = 1 - ig - (c.a + 1) * iq
    margins = [("b1", sigma), ("b2", ir - c.s / c.N),
               ("b3 upper", (c.a + 1) * ir - (1 - ir_)),
               ("b3 lower", (1 - ir_) - (c.a + 1) * (ir - c.s / c.N))]
    checks = [("l>=1", 0 <= il <= 1)]
    return margins, checks, {"sigma": sigma, "l": _rec(il), "p": _rec((1 - ir_) / (c.a + 1))}


def _triple(c, P):
    ig, ir_ = _i(P, "gamma,rho")
    iq, ir = _i(P, "q,r")
    im, in_ = _i(P, "m,n")
    sigma = 1 - ig - c.a * iq - im
    ip = 1 - ir_ - c.a * (ir - c.s / c.N) - in_
    return ig, iq, ir, im, sigma, ip


def _cond_43(c, P):
    ig, iq, ir, im, sigma, ip = _triple(c, P)
    iqt = (1 - ig - im) / c.a
    margins = [("c1", sigma), ("c2", ir - c.s / c.N), ("c3", ip - c.b / c.N), ("p>1", 1 - ip),
               ("r<4*", ir - c.inv_4star), ("q~>1", 1 - iqt), ("q~<q", iqt - iq)]
    return margins, [], {"sigma": sigma, "p": _rec(ip), "q_tilde": _rec(iqt)}


def _cond_47(c, P):
    ig, iq, ir, im, sigma, ip = _triple(c, P)
    margins = [("c1", sigma), ("c2", ir - c.s / c.N), ("c3", ip - c.b / c.N), ("p>1", 1 - ip)]
    return margins, [], {"sigma": sigma, "p": _rec(ip)}


def _single(c, P):
    iq, ir = _i(P, "q,r")
    sigma = 1 - (c.a + 2) * iq
    ip = (1 - 2 * ir) / c.a                     # 1 = 2/r + alpha/p
    margins = [("1-(a+2)/q", sigma), ("r<N/s", ir - c.s / c.N),
               ("(a+1)/r>1-1/r", (c.a + 2) * ir - 1),
               ("1-1/r>a(1/r-s/N)+1/r", 1 - 2 * ir - c.a * (ir - c.s / c.N))]
    return iq, ir, sigma, ip, margins


def _cond_44(c, P):
    iq, ir, sigma, ip, margins = _single(c, P)
    iqt = (1 - 2 * iq) / c.a                    # 1 = 2/q + alpha/q~
    margins += [("r<4*", ir - c.inv_4star), ("q~>1", 1 - iqt), ("q~<q", iqt - iq)]
    return margins, [], {"sigma": sigma, "p": _rec(ip), "q_tilde": _rec(iqt)}


def _cond_48(c, P):
    iq, ir, sigma, ip, margins = _single(c, P)
    return margins, [], {"sigma": sigma, "p": _rec(ip)}


def _qbar_checks(c, P):
    iqb, irb = _i(P, "qbar,rbar")
    return iqb, irb, [
        ("1<=qbar<=2", F(1, 2) <= iqb <= 1),
        ("1<=rbar<=2", F(1, 2) <= irb <= 1),
        ("4/qbar-N(1/2-1/rbar)=4-s", 4 * iqb - c.N * (F(1, 2) - irb) == 4 - c.s),
    ]


def _cond_45(c, P):
    iqb, irb, checks = _qbar_checks(c, P)
    iq, ir = _i(P, "q,r")
    sigma = iqb - (c.a + 1) * iq
    ip = irb - (c.a + 1) * (ir - c.s / c.N)
    margins = [("e1", sigma), ("e2", ir - c.s / c.N), ("e3", ip - c.b / c.N), ("p>1", 1 - ip)]
    return margins, checks, {"sigma": sigma, "p": _rec(ip)}


def _cond_46(c, P):
    iqb, irb, checks = _qbar_checks(c, P)
    iq, ir = _i(P, "q,r")
    sigma = iqb - (c.a + 1) * iq
    margins = [("f1", sigma), ("f2", ir - c.s / c.N),
               ("f3 upper", (c.a + 1) * ir - irb),
               ("f3 lower", irb - (c.a + 1) * (ir - c.s / c.N))]
    return margins, checks, {"sigma": sigma, "p": _rec(irb / (c.a + 1))}


def _cond_49_common(c, P, eps):
    iq, ir = _i(P, "q,r")
    ig, irho = _i(P, "gamma,rho")
    checks = [
        ("1/(2+eps)+(a+1)/r=1/2", 1 / (2 + eps) + (c.a + 1) * ir == F(1, 2)),
        ("(a+1)/rho=1/2", (c.a + 1) * irho == F(1, 2)),
    ]
    margins = [("r<inf", ir), ("rho<inf", irho)]
    return iq, ig, margins, checks


def _cond_49(c, P, eps):
    iq, ig, margins, checks = _cond_49_common(c, P, eps)
    sigma = min(1 - iq, 1 - c.s / 4)
    return margins + [("sigma>0", sigma)], checks, {"sigma": sigma}


def _cond_410(c, P, eps):
    iq, ig, margins, checks = _cond_49_common(c, P, eps)
    iqb, irb, qchecks = _qbar_checks(c, P)
    sigma = min(iqb, 1 - iq, 1 - ig)
    return margins + [("sigma>0", sigma)], checks + qchecks, {"sigma": sigma}


def _rec(x: Fraction) -> ExtRational:
    return ExtRational(x).reciprocal() if x >= 0 else ExtRational(1 / x)


@dataclass(frozen=True)
class _Lemma:
    cases: tuple
    conditions: Callable
    admissible: tuple
    high: bool = False          # s >= N/2 regime
    uses_eps_in_conditions: bool = False


_LEMMAS = {
    "L4.1": _Lemma(_L41, _cond_41, ("gamma,rho", "q,r")),
    "L4.2": _Lemma(_L42, _cond_42, ("gamma,rho", "q,r")),
    "L4.3": _Lemma(_L43, _cond_43, ("gamma,rho", "q,r", "m,n")),
    "L4.4": _Lemma(_L44, _cond_44, ("q,r",)),
    "L4.5": _Lemma(_L45, _cond_45, ("q,r",)),
    "L4.6": _Lemma(_L46, _cond_46, ("q,r",)),
    "L4.7": _Lemma(_L43, _cond_47, ("gamma,rho", "q,r", "m,n")),
    "L4.8": _Lemma(_L44, _cond_48, ("q,r",)),
    "L4.9": _Lemma(_L49, _cond_49, ("q,r", "gamma,rho"), high=True, uses_eps_in_conditions=True),
    "L4.10": _Lemma(_L410, _cond_410, ("q,r", "gamma,rho"), high=True, uses_eps_in_conditions=True),
}


# -- witness -------------------------------------------------------------------

@dataclass
class LemmaWitness:
    lemma_id: str
    case_id: int
    case_label: str
    pairs: dict
    auxiliary: dict
    margins: list
    admissible: tuple
    predicted_case: int = 0
    notes: list = field(default_factory=list)

    @property
    def sigma(self) -> ExtRational:
        return self.auxiliary["sigma"]

    @property
    def eps(self) -> Optional[ExtRational]:
        return self.auxiliary.get("eps")

    @property
    def min_margin(self) -> Fraction:
        return min(m for _, m in self.margins)

    @property
    def rescued(self) -> bool:
        return bool(self.notes)

    def margin(self, label: str) -> Fraction:
        for lab, m in self.margins:
            if lab == label:
                return m
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma_id,
            "case": self.case_id,
            "case_label": self.case_label,
            "predicted_case": self.predicted_case,
            "pairs": {k: [str(p.time), str(p.space)] for k, p in self.pairs.items()},
            "admissible": list(self.admissible),
            "auxiliary": {k: str(v) for k, v in self.auxiliary.items()},
            "margins": [[lab, str(m)] for lab, m in self.margins],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "LemmaWitness":
        return cls(
            lemma_id=d["lemma"], case_id=int(d["case"]), case_label=d["case_label"],
            pairs={k: LebesguePair(ExtRational(t), ExtRational(x)) for k, (t, x) in d["pairs"].items()},
            auxiliary={k: ExtRational(v) for k, v in d["auxiliary"].items()},
            margins=[(lab, Fraction(m)) for lab, m in d["margins"]],
            admissible=tuple(d["admissible"]), predicted_case=int(d.get("predicted_case", 0)),
            notes=list(d.get("notes", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "LemmaWitness":
        return cls.from_dict(json.loads(text))


# -- hypotheses ----------------------------------------------------------------

def lemma_applies(lemma_id: str, params: ProblemParams, s=None) -> Optional[str]:
    """None if the lemma's hypotheses hold, else the failing inequality."""
    c = _ctx(params, s)
    lem = _LEMMAS[lemma_id]
    if not (0 < c.s <= 2):
        return "0 < s <= 2"
    if lem.high:
        if c.s < c.N / 2:
            return "s >= N/2"
        if c.beta is None:
            return "beta given"
        return None
    if c.s >= c.N / 2:
        return "s < N/2"
    if params.b is None:
        return "beta given"
    if not c.A < 8 - 2 * c.b:
        return "(N-2s)alpha < 8-2N/beta"
    return None


def _check_hypotheses(lemma_id, params, s):
    if lemma_id not in _LEMMAS:
        raise KeyError(f"unknown lemma {lemma_id!r}")
    failed = lemma_applies(lemma_id, params, s)
    if failed:
        raise HypothesisViolated(f"{lemma_id}: hypothesis {failed} fails", failed)


def _evaluate(lemma_id, lem, case, c, eps):
    """Instantiate one case at a given eps.  Raises ConstructionFailed."""
    try:
        raw = case.build(c, eps)
        pairs = {k: _pair_from_inv(k, *v) for k, v in raw.items()}
    except ZeroDivisionError as exc:
        raise ConstructionFailed(f"{lemma_id} case {case.label}: {exc}", "division") from None
    return pairs, _assess(lemma_id, lem, case, c, pairs, eps)


def _assess(lemma_id, lem, case, c, pairs, eps):
    try:
        if lem.uses_eps_in_conditions:
            margins, checks, aux = lem.conditions(c, pairs, eps)
        else:
            margins, checks, aux = lem.conditions(c, pairs)
    except ZeroDivisionError as exc:
        raise ConstructionFailed(f"{lemma_id} case {case.label}: {exc}", "division") from None
    if eps is not None:
        margins = [("eps>0", eps)] + [(f"eps<{lab}", bd - eps) for lab, bd in case.bounds(c)] + margins
        aux = {"eps": ExtRational(eps), **aux}
    checks = list(checks) + [
        (f"{k} admissible", is_biharmonic_admissible(pairs[k], int(c.N))) for k in lem.admissible
    ]
    aux["sigma"] = ExtRational(aux["sigma"])
    return margins, checks, aux


def _first_failure(margins, checks):
    for lab, ok in checks:
        if not ok:
            return lab, None
    for lab, m in margins:
        if m <= 0:
            return lab, m
    return None


def _try_case(lemma_id, lem, case, c, halvings):
    """Return (pairs, margins, aux, eps, halvings, first error) or raise."""
    bounds = case.bounds(c)
    if not bounds:
        pairs, (margins, checks, aux) = _evaluate(lemma_id, lem, case, c, None)
        bad = _first_failure(margins, checks)
        if bad:
            raise ConstructionFailed(
                f"{lemma_id} case {case.label}: condition {bad[0]} fails (margin {bad[1]})", *bad)
        return pairs, margins, aux, None, 0, None
    vals = [v for _, v in bounds]
    nonpos = [(lab, v) for lab, v in bounds if v <= 0]
    if nonpos:
        lab, v = nonpos[0]
        raise ConstructionFailed(
            f"{lemma_id} case {case.label}: eps bound {lab} = {v} is not positive", f"eps<{lab}", v)
    eps0 = select_epsilon(vals)
    first = None
    for k in range(halvings + 1):
        eps = eps0 / 2 ** k
        try:
            pairs, (margins, checks, aux) = _evaluate(lemma_id, lem, case, c, eps)
            bad = _first_failure(margins, checks)
            if bad is None:
                return pairs, margins, aux, eps, k, first
            err = ConstructionFailed(
                f"{lemma_id} case {case.label} at eps={eps}: condition {bad[0]} fails (margin {bad[1]})",
                *bad)
        except ConstructionFailed as exc:
            err = exc
        first = first or err
    raise first


def construct_witness(lemma_id: str, params: ProblemParams, s=None, *, rescue: bool = True) -> LemmaWitness:
    _check_hypotheses(lemma_id, params, s)
    lem = _LEMMAS[lemma_id]
    c = _ctx(params, s)
    chosen = [case for case in lem.cases if case.predicate(c)]
    predicted = chosen[0] if chosen else None
    notes = []
    if predicted is None:
        notes.append("no case predicate covers these parameters")
        order = list(lem.cases)
    else:
        order = [predicted] + [cs for cs in lem.cases if cs is not predicted]
    if not rescue:
        if predicted is None:
            raise ConstructionFailed(f"{lemma_id}: no case predicate covers these parameters", "case")
        order = [predicted]
    first_err = None
    for case in order:
        try:
            pairs, margins, aux, eps, k, halving_err = _try_case(
                lemma_id, lem, case, c, RESCUE_HALVINGS if rescue else 0)
        except ConstructionFailed as exc:
            if first_err is None:
                first_err = exc
            continue
        if case is not predicted and predicted is not None:
            notes.append(f"case {predicted.label} failed ({first_err}); case {case.label} formulas verified")
        if k:
            notes.append(f"eps halved {k} time(s) after: {halving_err}")
        return LemmaWitness(
            lemma_id=lemma_id, case_id=case.case_id, case_label=case.label,
            pairs=pairs, auxiliary=aux, margins=margins, admissible=lem.admissible,
            predicted_case=predicted.case_id if predicted else 0, notes=notes,
        )
    raise first_err


def construct_all(params: ProblemParams, s=None, *, rescue: bool = True) -> dict:
    """Witnesses for every lemma whose hypotheses hold, both potential branches.

    Values are LemmaWitness or the ConstructionFailed raised for that lemma.
    """
    out = {}
    for lid in LEMMA_IDS:
        if lemma_applies(lid, params, s):
            continue
        try:
            out[lid] = construct_witness(lid, params, s, rescue=rescue)
        except ConstructionFailed as exc:
            out[lid] = exc
    return out


def verify_witness(w: LemmaWitness, params: ProblemParams, s=None) -> list:
    """Recompute every margin of ``w`` from its pairs and eps alone."""
    _check_hypotheses(w.lemma_id, params, s)
    lem = _LEMMAS[w.lemma_id]
    c = _ctx(params, s)
    cases = [cs for cs in lem.cases if cs.case_id == w.case_id]
    if not cases:
        raise MarginMismatch(f"{w.lemma_id} has no case {w.case_id}")
    case = cases[0]
    if set(w.pairs) != set(case.build(c, Fraction(1, 2) if case.bounds(c) else None)):
        raise MarginMismatch("pair labels do not match the case")
    eps = w.auxiliary.get("eps")
    eps = eps.fraction() if eps is not None else None
    if (eps is None) != (not case.bounds(c)):
        raise MarginMismatch("eps presence does not match the case")
    margins, checks, aux = _assess(w.lemma_id, lem, case, c, w.pairs, eps)
    failed = [lab for lab, ok in checks if not ok]
    if failed:
        raise MarginMismatch(f"check {failed[0]} fails on re-verification")
    if [lab for lab, _ in margins] != [lab for lab, _ in w.margins]:
        raise MarginMismatch("margin labels differ")
    for (lab, m), (_, m0) in zip(margins, w.margins):
        if m != m0:
            raise MarginMismatch(f"margin {lab}: recomputed {m}, recorded {m0}")
    for k, v in aux.items():
        if k in w.auxiliary and w.auxiliary[k] != v:
            raise MarginMismatch(f"auxiliary {k}: recomputed {v}, recorded {w.auxiliary[k]}")
        if k not in w.auxiliary:
            raise MarginMismatch(f"auxiliary {k} missing")
    return margins


# -- global theory bookkeeping ---------------------------------------------------

class GWPClass(str, enum.Enum):
    GLOBAL_SUBCRITICAL = "global_subcritical"
    GLOBAL_SMALL_DATA = "global_small_data"
    LOCAL_ONLY = "local_only"


def gwp_threshold(params: ProblemParams) -> Fraction:
    beta = params.beta
    if beta is None:
        raise HypothesisViolated("an L^beta exponent is required", "beta given")
    return F(8, params.N) - 2 / beta


def classify_gwp(params: ProblemParams) -> GWPClass:
    t = gwp_threshold(params)
    if params.alpha < t:
        return GWPClass.GLOBAL_SUBCRITICAL
    if params.alpha == t:
        return GWPClass.GLOBAL_SMALL_DATA
    return GWPClass.LOCAL_ONLY


@dataclass(frozen=True)
class CKNExponents:
    e1: Fraction
    e2: Fraction
    e3: Fraction
    e4: Fraction

    def __iter__(self):
        return iter((self.e1, self.e2, self.e3, self.e4))

    @property
    def below_two(self) -> bool:
        """True when both powers of the Laplacian norm sit in (0, 2)."""
        return 0 < self.e1 < 2 and 0 < self.e3 < 2


def ckn_exponents(params: ProblemParams) -> CKNExponents:
    N, a, beta = params.N, params.alpha, params.beta
    if beta is None:
        raise HypothesisViolated("an L^beta exponent is required", "beta given")
    if not (N - 4) * a < 8 - 2 * F(N) / beta:
        raise HypothesisViolated(
            f"(N-4)alpha = {(N - 4) * a} not below 8-2N/beta = {8 - 2 * F(N) / beta}",
            "(N-4)alpha < 8-2N/beta")
    e1 = N * (beta * a + 2) / (4 * beta)
    e3 = N * a / 4
    out = CKNExponents(e1, a + 2 - e1, e3, a + 2 - e3)
    if not (e1 > 0 and e3 > 0):
        raise HypothesisViolated("CKN exponents must be positive", "exponents > 0")
    return out


def lwp_hypotheses(params: ProblemParams, s=None) -> list:
    """(hypothesis, holds) for the local existence theorem in H^s."""
    s = params.s if s is None else as_fraction(s)
    N, a = params.N, params.alpha
    A = (N - 2 * s) * a
    out = [("0 < s <= 2", 0 < s <= 2), ("alpha > 0", a > 0)]
    pot = params.potential
    if isinstance(pot, PowerLaw):
        out.append(("0 < b < min(N/2, 4)", 0 < pot.b < min(F(N, 2), F(4))))
        out.append(("(N-2s)alpha < 8-2b", A < 8 - 2 * pot.b))
    elif isinstance(pot, Constant) and pot.beta is None:
        out.append(("(N-2s)alpha < 8", A < 8))
    else:
        beta = params.beta
        out.append(("beta > max(2, N/4)", beta > max(F(2), F(N, 4))))
        out.append(("(N-2s)alpha < 8-2N/beta", A < 8 - 2 * F(N) / beta))
    return out
