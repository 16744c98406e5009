"""Reduction orders: Knuth-Bendix order and polynomial interpretations over N.

Both orders answer with an ``OrderDecision``: GT (strict decrease), GE
(weak decrease only) or NGE.
"""

from __future__ import annotations

import enum
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Union

from .terms import App, Term, Var, subterms

log = logging.getLogger(__name__)


class OrderDecision(enum.Enum):
    GT = "GT"
    GE = "GE"
    NGE = "NGE"

    @property
    def weak(self) -> bool:
        return self is not OrderDecision.NGE


class OrderError(ValueError):
    """Inadmissible order parameters."""


class UninterpretedSymbol(KeyError):
    def __init__(self, symbol: str):
        super().__init__(symbol)
        self.symbol = symbol

    def __str__(self) -> str:
        return f"no interpretation for symbol {self.symbol}"


# --- precedence ------------------------------------------------------------

@dataclass(frozen=True)
class Precedence:
    """Strict partial order on symbols, given by (greater, smaller) pairs."""

    pairs: tuple = ()
    _closure: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple((str(f), str(g)) for f, g in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        closure = set(pairs)
        while True:
            new = {(f, h) for f, g in closure for g2, h in closure if g == g2} - closure
            if not new:
                break
            closure |= new
        cyclic = sorted(f for f, g in closure if f == g)
        if cyclic:
            raise OrderError(f"precedence is cyclic through {cyclic[0]}")
        object.__setattr__(self, "_closure", frozenset(closure))

    @classmethod
    def chain(cls, *symbols: str) -> "Precedence":
        """Total precedence symbols[0] > symbols[1] > ..."""
        return cls(tuple(zip(symbols, symbols[1:])))

    def greater(self, f: str, g: str) -> bool:
        return (f, g) in self._closure

    def symbols(self) -> set[str]:
        return {s for p in self.pairs for s in p}


# --- Knuth-Bendix order ----------------------------------------------------

@dataclass(frozen=True)
class KboParams:
    w0: int
    weights: Mapping[str, int]
    precedence: Precedence
    arities: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        object.__setattr__(self, "arities", dict(self.arities))
        if self.w0 <= 0:
            raise OrderError("w0 must be positive")
        for f, w in self.weights.items():
            if w < 0:
                raise OrderError(f"negative weight for {f}")
        for f, n in self.arities.items():
            w = self.weight(f)
            if n == 0 and w < self.w0:
                raise OrderError(f"constant {f} has weight {w} < w0 = {self.w0}")
            if n == 1 and w == 0:
                others = (set(self.arities) | self.precedence.symbols()) - {f}
                if not all(self.precedence.greater(f, g) for g in others):
                    raise OrderError(f"unary symbol {f} of weight 0 is not maximal in the precedence")

    def weight(self, f: str) -> int:
        w = self.weights.get(f)
        if w is None:
            log.debug("KBO: symbol %s has no weight, defaulting to w0=%d", f, self.w0)
            return self.w0
        return w

    def term_weight(self, t: Term) -> int:
        return sum(self.w0 if isinstance(s, Var) else self.weight(s.fun) for s in subterms(t))


def _var_counts(t: Term) -> Counter:
    return Counter(s.name for s in subterms(t) if isinstance(s, Var))


def kbo_greater(p: KboParams, s: Term, t: Term) -> bool:
    if isinstance(t, Var):
        return s != t and any(u == t for u in subterms(s))
    if isinstance(s, Var):
        return False
    cs, ct = _var_counts(s), _var_counts(t)
    if any(cs[x] < n for x, n in ct.items()):
        return False
    ws, wt = p.term_weight(s), p.term_weight(t)
    if ws != wt:
        return ws > wt
    if s.fun != t.fun:
        return p.precedence.greater(s.fun, t.fun)
    for a, b in zip(s.args, t.args):
        if a != b:
            return kbo_greater(p, a, b)
    return False


def kbo_compare(p: KboParams, s: Term, t: Term) -> OrderDecision:
    if kbo_greater(p, s, t):
        return OrderDecision.GT
    if s == t:
        return OrderDecision.GE
    return OrderDecision.NGE


# --- polynomials -----------------------------------------------------------

# A monomial is a sorted tuple of (variable, exponent) pairs with exponent >= 1.
Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps = dict(a)
    for x, e in b:
        exps[x] = exps.get(x, 0) + e
    return tuple(sorted(exps.items()))


def _mono_str(m: Monomial) -> str:
    return "*".join(x if e == 1 else f"{x}^{e}" for x, e in m)


class Polynomial:
    """Multivariate polynomial with integer coefficients; zeros are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] = ()):
        self.terms = {m: c for m, c in dict(terms).items() if c != 0}

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def var(cls, x: str, exp: int = 1) -> "Polynomial":
        return cls({((x, exp),): 1})

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict = {}
        for (m1, c1), (m2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            m = _mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out)

    def __pow__(self, n: int) -> "Polynomial":
        out = Polynomial.const(1)
        for _ in range(n):
            out = out * self
        return out

    def variables(self) -> set[str]:
        return {x for m in self.terms for x, _ in m}

    def substitute(self, env: Mapping[str, "Polynomial"]) -> "Polynomial":
        out = Polynomial()
        for m, c in self.terms.items():
            term = Polynomial.const(c)
            for x, e in m:
                term = term * (env[x] ** e if x in env else Polynomial.var(x, e))
            out = out + term
        return out

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = 0
        for m, c in self.terms.items():
            v = c
            for x, e in m:
                v *= env[x] ** e
            total += v
        return total

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (-sum(e for _, e in m), m)):
            c = self.terms[m]
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(_mono_str(m))
            else:
                parts.append(f"{c}*{_mono_str(m)}")
        return " + ".join(parts).replace("+ -", "- ")


def formal_arg(i: int) -> str:
    """Name of the i-th (1-based) formal argument in an interpretation."""
    return f"x_{i}"


@dataclass(frozen=True)
class PolyInterpretation:
    interpretations: Mapping[str, Polynomial]
    arities: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "interpretations", dict(self.interpretations))
        object.__setattr__(self, "arities", dict(self.arities))
        for f, p in self.interpretations.items():
            if any(c < 0 for c in p.terms.values()):
                raise OrderError(f"interpretation of {f} has a negative coefficient")
            n = self.arities.get(f)
            if n is not None:
                allowed = {formal_arg(i) for i in range(1, n + 1)}
                extra = p.variables() - allowed
                if extra:
                    raise OrderError(f"interpretation of {f}/{n} mentions {sorted(extra)[0]}")


def poly_of_term(interp: PolyInterpretation, t: Term) -> Polynomial:
    match t:
        case Var(name):
            return Polynomial.var(name)
        case App(fun, args):
            p = interp.interpretations.get(fun)
            if p is None:
                raise UninterpretedSymbol(fun)
            env = {formal_arg(i): poly_of_term(interp, a) for i, a in enumerate(args, 1)}
            return p.substitute(env)


@dataclass(frozen=True)
class Absorption:
    """One move: ``amount`` of donor monomial covers a deficit monomial."""

    donor: Monomial
    deficit: Monomial
    amount: int


def _absorbs(donor: Monomial, deficit: Monomial) -> bool:
    # x^a >= x^b on N when b <= a componentwise and both have the same support
    d, b = dict(donor), dict(deficit)
    return d.keys() == b.keys() and all(b[x] <= d[x] for x in b)


def absorb(p: Polynomial) -> tuple[Polynomial, list[Absorption]]:
    """Cancel negative coefficients against dominating positive monomials.

    Returns the residual polynomial and the moves taken.  Every residual
    coefficient being non-negative certifies ``p >= 0`` on the naturals.
    """
    coeffs = dict(p.terms)
    moves = []
    for deficit in sorted(m for m, c in coeffs.items() if c < 0):
        donors = sorted(
            (m for m, c in coeffs.items() if c > 0 and _absorbs(m, deficit)),
            key=lambda m: (-sum(e for _, e in m), m),
        )
        for donor in donors:
            need = -coeffs[deficit]
            if need == 0:
                break
            k = min(need, coeffs[donor])
            coeffs[donor] -= k
            coeffs[deficit] += k
            moves.append(Absorption(donor, deficit, k))
    return Polynomial(coeffs), moves


def nonnegative(p: Polynomial) -> bool:
    residual, _ = absorb(p)
    return all(c >= 0 for c in residual.terms.values())


def poly_compare(pl: Polynomial, pr: Polynomial) -> OrderDecision:
    diff = pl - pr
    if nonnegative(diff - Polynomial.const(1)):
        return OrderDecision.GT
    if nonnegative(diff):
        return OrderDecision.GE
    return OrderDecision.NGE


ReductionOrder = Union[KboParams, PolyInterpretation]


def order_compare(order: ReductionOrder, s: Term, t: Term) -> OrderDecision:
    match order:
        case KboParams():
            return kbo_compare(order, s, t)
        case PolyInterpretation():
            return poly_compare(poly_of_term(order, s), poly_of_term(order, t))
    raise TypeError(f"not a reduction order: {order!r}")


def describe(order: ReductionOrder) -> str:
    """Short human-readable description of the order parameters."""
    match order:
        case KboParams():
            prec = ", ".join(f"{f} > {g}" for f, g in order.precedence.pairs) or "empty"
            weights = ", ".join(f"w({f}) = {w}" for f, w in sorted(order.weights.items()))
            return f"Knuth-Bendix order with w0 = {order.w0}, precedence {prec}, weights {weights}"
        case PolyInterpretation():
            parts = []
            for f, p in sorted(order.interpretations.items()):
                n = order.arities.get(f)
                args = "" if not n else "(" + ",".join(formal_arg(i) for i in range(1, n + 1)) + ")"
                parts.append(f"[{f}{args}] = {p}")
            return "polynomial interpretation over the naturals: " + "; ".join(parts)
    raise TypeError(f"not a reduction order: {order!r}")
