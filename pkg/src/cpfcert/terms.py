"""First-order terms, substitutions, matching, unification and rewriting.

Terms are immutable: ``Var(name)`` or ``App(fun, args)``.  Positions are
tuples of 1-based argument indices, the empty tuple being the root.
Substitutions are plain dicts from variable names to terms; functions
here never mutate the dicts they are given.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

DEFAULT_FUEL = 10_000


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    fun: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.fun
        return f"{self.fun}({','.join(str(a) for a in self.args)})"


Term = Union[Var, App]
Position = tuple
Substitution = dict


@dataclass(frozen=True, slots=True)
class Rule:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"

    def problems(self) -> list[str]:
        """Violations of the rule invariants (empty when well-formed)."""
        out = []
        if isinstance(self.lhs, Var):
            out.append("lhs is a variable")
        if not variables(self.rhs) <= variables(self.lhs):
            out.append("rhs variable not in lhs")
        return out


@dataclass(frozen=True, slots=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


class ArityError(ValueError):
    pass


def _signature_of(terms) -> dict[str, int]:
    sig: dict[str, int] = {}
    for t in terms:
        for s in subterms(t):
            if isinstance(s, App):
                n = sig.setdefault(s.fun, len(s.args))
                if n != len(s.args):
                    raise ArityError(f"symbol {s.fun} used with arities {n} and {len(s.args)}")
    clash = sorted(set(sig) & _var_names(terms))
    if clash:
        raise ArityError(f"{clash[0]} is used both as variable and function symbol")
    return sig


def _var_names(terms) -> set[str]:
    out: set[str] = set()
    for t in terms:
        out |= variables(t)
    return out


@dataclass(frozen=True)
class Trs:
    rules: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        _signature_of(self.terms())

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, i):
        return self.rules[i]

    def terms(self):
        for r in self.rules:
            yield r.lhs
            yield r.rhs

    def signature(self) -> dict[str, int]:
        return _signature_of(list(self.terms()))


@dataclass(frozen=True)
class EquationalSystem:
    equations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        _signature_of(self.terms())

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def __getitem__(self, i):
        return self.equations[i]

    def terms(self):
        for e in self.equations:
            yield e.lhs
            yield e.rhs


def signature(terms) -> dict[str, int]:
    """Symbol -> arity for a collection of terms; raises ArityError on clashes."""
    return _signature_of(list(terms))


# --- traversal -------------------------------------------------------------

def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def positions(t: Term) -> Iterator[Position]:
    """All positions of t in pre-order (which is lexicographic order)."""
    yield ()
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            for p in positions(a):
                yield (i,) + p


def fun_positions(t: Term) -> Iterator[Position]:
    for p in positions(t):
        if isinstance(subterm_at(t, p), App):
            yield p


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise IndexError(f"invalid position {format_position(pos)}")
        t = t.args[i - 1]
    return t


def is_position(t: Term, pos: Position) -> bool:
    try:
        subterm_at(t, pos)
    except IndexError:
        return False
    return True


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    if not isinstance(t, App) or not 1 <= pos[0] <= len(t.args):
        raise IndexError(f"invalid position {format_position(pos)}")
    i = pos[0] - 1
    args = t.args[:i] + (replace_at(t.args[i], pos[1:], new),) + t.args[i + 1:]
    return App(t.fun, args)


def format_position(pos: Position) -> str:
    return ".".join(map(str, pos)) if pos else "root"


def variables(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Var)}


def ordered_variables(t: Term) -> list[str]:
    """Variables in order of first occurrence (left to right)."""
    seen: dict[str, None] = {}
    for s in subterms(t):
        if isinstance(s, Var):
            seen.setdefault(s.name)
    return list(seen)


def is_linear(t: Term) -> bool:
    names = [s.name for s in subterms(t) if isinstance(s, Var)]
    return len(names) == len(set(names))


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


# --- substitutions ---------------------------------------------------------

def normalize_subst(sigma: Mapping[str, Term]) -> Substitution:
    return {x: t for x, t in sigma.items() if t != Var(x)}


def apply(sigma: Mapping[str, Term], t: Term) -> Term:
    match t:
        case Var(name):
            return sigma.get(name, t)
        case App(fun, args):
            if not args:
                return t
            return App(fun, tuple(apply(sigma, a) for a in args))


def compose(sigma: Mapping[str, Term], tau: Mapping[str, Term]) -> Substitution:
    """The substitution ``t -> apply(tau, apply(sigma, t))``."""
    out = {x: apply(tau, t) for x, t in sigma.items()}
    for x, t in tau.items():
        out.setdefault(x, t)
    return normalize_subst(out)


def rename(t: Term, mapping: Mapping[str, str]) -> Term:
    return apply({x: Var(y) for x, y in mapping.items()}, t)


# --- matching and unification ---------------------------------------------

def match_into(pattern: Term, subject: Term, sigma: Mapping[str, Term]) -> Optional[Substitution]:
    """Extend sigma so that pattern instantiates to subject, or None."""
    out = dict(sigma)
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = out.get(p.name)
            if bound is None:
                out[p.name] = s
            elif bound != s:
                return None
        elif isinstance(s, App) and p.fun == s.fun and len(p.args) == len(s.args):
            stack.extend(zip(p.args, s.args))
        else:
            return None
    return out


def match(pattern: Term, subject: Term) -> Optional[Substitution]:
    sigma = match_into(pattern, subject, {})
    return None if sigma is None else normalize_subst(sigma)


def _occurs(x: str, t: Term, sigma: Mapping[str, Term]) -> bool:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            if u.name == x:
                return True
            if u.name in sigma:
                stack.append(sigma[u.name])
        else:
            stack.extend(u.args)
    return False


def _walk(t: Term, sigma: Mapping[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in sigma:
        t = sigma[t.name]
    return t


def unify(s: Term, t: Term) -> Optional[Substitution]:
    """Most general unifier of s and t (idempotent), or None.

    When both sides are variables the right-hand one is bound, so callers
    control which names survive by argument order.
    """
    sigma: dict[str, Term] = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, sigma), _walk(b, sigma)
        if a == b:
            continue
        if isinstance(b, Var):
            if _occurs(b.name, a, sigma):
                return None
            sigma[b.name] = a
        elif isinstance(a, Var):
            if _occurs(a.name, b, sigma):
                return None
            sigma[a.name] = b
        elif a.fun == b.fun and len(a.args) == len(b.args):
            stack.extend(reversed(list(zip(a.args, b.args))))
        else:
            return None
    # triangular form -> idempotent
    solved: dict[str, Term] = {}
    for x in sigma:
        u = sigma[x]
        while True:
            v = apply(sigma, u)
            if v == u:
                break
            u = v
        solved[x] = u
    return normalize_subst(solved)


def is_variant(s: Term, t: Term) -> bool:
    """s and t are equal up to a bijective renaming of variables."""
    sigma = match(s, t)
    if sigma is None:
        return False
    targets = list(sigma.values())
    if not all(isinstance(v, Var) for v in targets) or len(set(targets)) != len(targets):
        return False
    return match(t, s) is not None


def rule_variant(a, b) -> bool:
    """Alpha-equivalence of rules (or equations): rename both sides at once."""
    return is_variant(App("->", (a.lhs, a.rhs)), App("->", (b.lhs, b.rhs)))


# --- rewriting -------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Reduct:
    term: Term
    rule: int
    position: Position


def rewrite_at(rule: Rule, t: Term, pos: Position) -> Optional[Term]:
    """Contract a redex of ``rule`` at ``pos``; None if it does not match."""
    sigma = match(rule.lhs, subterm_at(t, pos))
    if sigma is None:
        return None
    return replace_at(t, pos, apply(sigma, rule.rhs))


def rewrite_step(trs, t: Term) -> list[Reduct]:
    """All one-step reducts, ordered by position then rule index."""
    out = []
    for pos in fun_positions(t):
        for i, rule in enumerate(trs):
            u = rewrite_at(rule, t, pos)
            if u is not None:
                out.append(Reduct(u, i, pos))
    return out


def _innermost_step(trs, t: Term) -> Optional[Term]:
    if isinstance(t, Var):
        return None
    for k, a in enumerate(t.args):
        u = _innermost_step(trs, a)
        if u is not None:
            return App(t.fun, t.args[:k] + (u,) + t.args[k + 1:])
    for rule in trs:
        sigma = match(rule.lhs, t)
        if sigma is not None:
            return apply(sigma, rule.rhs)
    return None


def normal_form(trs, t: Term, fuel: int = DEFAULT_FUEL) -> Optional[Term]:
    """Leftmost-innermost normal form using at most ``fuel`` steps."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    for _ in range(fuel + 1):
        u = _innermost_step(trs, t)
        if u is None:
            return t
        t = u
    return None


def is_normal_form(trs, t: Term) -> bool:
    return _innermost_step(trs, t) is None


# --- critical pairs --------------------------------------------------------

@dataclass(frozen=True, slots=True)
class CriticalPair:
    peak: Term
    left: Term
    right: Term
    outer: int
    inner: int
    position: Position = field(default=())

    def __str__(self) -> str:
        return f"{self.left} <- {self.peak} -> {self.right}"


def rename_apart(rule: Rule, avoid: set[str]) -> Rule:
    """Prime every variable of rule until clear of ``avoid``."""
    mapping = {}
    for x in ordered_variables(rule.lhs):
        y = x + "'"
        while y in avoid:
            y += "'"
        mapping[x] = y
    return Rule(rename(rule.lhs, mapping), rename(rule.rhs, mapping))


def critical_pairs(trs) -> list[CriticalPair]:
    out = []
    for i, outer in enumerate(trs):
        for j, inner in enumerate(trs):
            inner2 = rename_apart(inner, variables(outer.lhs) | variables(outer.rhs))
            for pos in fun_positions(outer.lhs):
                if not pos and i == j:
                    continue
                sigma = unify(inner2.lhs, subterm_at(outer.lhs, pos))
                if sigma is None:
                    continue
                peak = apply(sigma, outer.lhs)
                left = replace_at(peak, pos, apply(sigma, inner2.rhs))
                out.append(CriticalPair(peak, left, apply(sigma, outer.rhs), i, j, pos))
    return out


# --- concrete syntax -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([(),])|([^\s(),]+))")
_VAR_NAME = re.compile(r"[u-z][0-9_]*'*$")


def parse_term(text: str, variables: Optional[set[str]] = None) -> Term:
    """Parse prefix notation such as ``*(inv(x),x)``.

    A bare identifier is a variable if it is in ``variables`` or, when that
    is not given, if it looks like u..z optionally followed by digits/primes.
    """
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot tokenize {text!r} at {pos}")
        toks.append(m.group(1) or m.group(2))
        pos = m.end()

    def is_var(name):
        return name in variables if variables is not None else bool(_VAR_NAME.match(name))

    def parse(k):
        name = toks[k]
        if name in "(),":
            raise ValueError(f"unexpected {name!r} in {text!r}")
        if k + 1 < len(toks) and toks[k + 1] == "(":
            args = []
            k += 2
            if toks[k] == ")":
                return App(name), k + 1
            while True:
                a, k = parse(k)
                args.append(a)
                if toks[k] == ")":
                    return App(name, tuple(args)), k + 1
                if toks[k] != ",":
                    raise ValueError(f"expected ',' in {text!r}")
                k += 1
        return (Var(name) if is_var(name) else App(name)), k + 1

    t, k = parse(0)
    if k != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    return t


def parse_rule(text: str, variables: Optional[set[str]] = None) -> Rule:
    lhs, rhs = text.split("->")
    return Rule(parse_term(lhs, variables), parse_term(rhs, variables))


def parse_trs(lines, variables: Optional[set[str]] = None) -> Trs:
    return Trs(tuple(parse_rule(s, variables) for s in lines))
