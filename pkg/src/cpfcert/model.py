"""In-memory certificates: the certification problem and its proof tree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .orders import ReductionOrder
from .terms import (
    ArityError,
    EquationalSystem,
    Position,
    Rule,
    Term,
    Trs,
    signature,
)

# --- input -----------------------------------------------------------------


@dataclass(frozen=True)
class TrsInput:
    trs: Trs


@dataclass(frozen=True)
class CompletionInput:
    equations: EquationalSystem
    trs: Trs


@dataclass(frozen=True)
class UnsupportedInput:
    """An input element this checker does not know (e.g. dependency pair problems)."""

    element: str


Input = Union[TrsInput, CompletionInput, UnsupportedInput]


@dataclass(frozen=True)
class Origin:
    tool_name: Optional[str] = None
    tool_version: Optional[str] = None
    notes: Optional[str] = None


# --- proof nodes -----------------------------------------------------------


@dataclass(frozen=True)
class CompletionProof:
    wcr: "ProofNode"
    termination: "ProofNode"
    equivalence: "ProofNode"


@dataclass(frozen=True)
class RuleRemoval:
    order: ReductionOrder
    remaining: Trs
    subproof: "ProofNode"


@dataclass(frozen=True)
class RIsEmpty:
    pass


@dataclass(frozen=True)
class WcrCriticalPairsJoinable:
    fuel: Optional[int] = None


@dataclass(frozen=True)
class OrthogonalityProof:
    pass


@dataclass(frozen=True)
class NewmanProof:
    termination: "ProofNode"
    wcr: "ProofNode"


EQUATION = "equation"
DERIVED = "rule"
LTR = "ltr"
RTL = "rtl"


@dataclass(frozen=True)
class ConversionStep:
    """One equational step; ``ref`` is (EQUATION, i) into E or (DERIVED, k)
    into the earlier rule subsumptions of the same equivalence proof."""

    source: Term
    target: Term
    ref: tuple
    position: Position = ()
    direction: str = LTR
    substitution: Optional[dict] = None


@dataclass(frozen=True)
class RuleSubsumption:
    rule: Rule
    conversion: tuple

    def __post_init__(self):
        object.__setattr__(self, "conversion", tuple(self.conversion))


@dataclass(frozen=True)
class EquivalenceProof:
    """Rules of R derived from E by conversions; equations of E joined in R
    by normal forms (implicit, nothing to store)."""

    subsumptions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "subsumptions", tuple(self.subsumptions))


@dataclass(frozen=True)
class LoopStep:
    rule: int
    position: Position
    substitution: dict
    result: Optional[Term] = None


@dataclass(frozen=True)
class LoopWitness:
    start: Term
    steps: tuple
    context: Position = ()
    substitution: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


@dataclass(frozen=True)
class LoopProof:
    witness: LoopWitness


@dataclass(frozen=True)
class Assumption:
    claim: str


@dataclass(frozen=True)
class UnknownProofStep:
    """An implication the checker cannot verify.  ``subgoals[i]``, when
    present and not None, is the TRS that subproof i is about; otherwise
    the subproof concerns the current TRS."""

    description: str
    subproofs: tuple = ()
    property: Optional[str] = None
    subgoals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "subproofs", tuple(self.subproofs))
        object.__setattr__(self, "subgoals", tuple(self.subgoals))

    def subgoal(self, i: int) -> Optional[Trs]:
        return self.subgoals[i] if i < len(self.subgoals) else None


ProofNode = Union[
    CompletionProof, RuleRemoval, RIsEmpty, WcrCriticalPairsJoinable, OrthogonalityProof,
    NewmanProof, EquivalenceProof, LoopProof, Assumption, UnknownProofStep,
]


@dataclass(frozen=True)
class CertificationProblem:
    input: Input
    cpf_version: str
    proof: ProofNode
    origin: Origin = Origin()


# --- tree navigation -------------------------------------------------------


def children(node) -> list:
    """Sub-proofs in checking/rendering order (numbered 1, 2, ... under the node)."""
    match node:
        case CompletionProof(wcr, termination, equivalence):
            return [termination, wcr, equivalence]
        case RuleRemoval(subproof=sub):
            return [sub]
        case NewmanProof(termination, wcr):
            return [termination, wcr]
        case UnknownProofStep(subproofs=subs):
            return list(subs)
    return []


def replace_child(node, k: int, new):
    """Copy of node with child number k (0-based, in ``children`` order) replaced."""
    match node:
        case CompletionProof(wcr, termination, equivalence):
            slots = [termination, wcr, equivalence]
            slots[k] = new
            return CompletionProof(wcr=slots[1], termination=slots[0], equivalence=slots[2])
        case RuleRemoval(order, remaining, _) if k == 0:
            return RuleRemoval(order, remaining, new)
        case NewmanProof(termination, wcr):
            slots = [termination, wcr]
            slots[k] = new
            return NewmanProof(*slots)
        case UnknownProofStep(desc, subs, prop, goals):
            subs = list(subs)
            subs[k] = new
            return UnknownProofStep(desc, tuple(subs), prop, goals)
    raise IndexError(f"{type(node).__name__} has no child {k}")


def walk(node, label: str = "1"):
    """Yield (section label, node) depth-first, left to right."""
    yield label, node
    for i, child in enumerate(children(node), 1):
        yield from walk(child, f"{label}.{i}")


def node_at(node, label: str):
    parts = [int(p) for p in label.split(".")][1:]
    for p in parts:
        node = children(node)[p - 1]
    return node


def replace_at_label(node, label: str, new):
    parts = [int(p) for p in label.split(".")][1:]
    if not parts:
        return new
    kids = children(node)
    sub = replace_at_label(kids[parts[0] - 1], ".".join(["1"] + [str(p) for p in parts[1:]]), new)
    return replace_child(node, parts[0] - 1, sub)


# --- verdicts --------------------------------------------------------------


@dataclass(frozen=True)
class Certified:
    kind = "CERTIFIED"


@dataclass(frozen=True)
class PartiallyCertified:
    obligations: tuple = ()
    kind = "PARTIALLY_CERTIFIED"

    def __post_init__(self):
        object.__setattr__(self, "obligations", tuple(self.obligations))


@dataclass(frozen=True)
class Rejected:
    path: str
    reason: str
    kind = "REJECTED"


@dataclass(frozen=True)
class Unsupported:
    element: str
    kind = "UNSUPPORTED"


Verdict = Union[Certified, PartiallyCertified, Rejected, Unsupported]


def collect_obligations(verdicts) -> Verdict:
    """Combine sub-verdicts: Rejected dominates, then Unsupported, then
    partial results accumulate their obligations in order."""
    verdicts = list(verdicts)
    for v in verdicts:
        if isinstance(v, Rejected):
            return v
    for v in verdicts:
        if isinstance(v, Unsupported):
            return v
    obligations = [o for v in verdicts if isinstance(v, PartiallyCertified) for o in v.obligations]
    if any(isinstance(v, PartiallyCertified) for v in verdicts):
        return PartiallyCertified(tuple(obligations))
    return Certified()


# --- structural validation -------------------------------------------------


@dataclass(frozen=True)
class Defect:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def _rule_defects(rule, path, out):
    for problem in rule.problems():
        out.append(Defect(path, f"{problem} in rule {rule}"))


def _trs_terms(trs):
    for r in trs:
        yield r.lhs
        yield r.rhs


def validate_structure(cp: CertificationProblem) -> list[Defect]:
    out: list[Defect] = []
    all_terms: list[Term] = []
    n_equations = 0
    match cp.input:
        case TrsInput(trs):
            for i, r in enumerate(trs, 1):
                _rule_defects(r, f"input/trs/rule[{i}]", out)
            all_terms += list(_trs_terms(trs))
        case CompletionInput(eqs, trs):
            n_equations = len(eqs)
            for i, r in enumerate(trs, 1):
                _rule_defects(r, f"input/trs/rule[{i}]", out)
            all_terms += list(_trs_terms(trs)) + [t for e in eqs for t in (e.lhs, e.rhs)]
        case UnsupportedInput():
            pass
        case _:
            out.append(Defect("input", f"unknown input {cp.input!r}"))

    for label, node in walk(cp.proof):
        path = f"proof/{label}"
        match node:
            case UnknownProofStep(subgoals=goals):
                for g in goals:
                    if g is not None:
                        all_terms += list(_trs_terms(g))
            case RuleRemoval(remaining=remaining):
                for i, r in enumerate(remaining, 1):
                    _rule_defects(r, f"{path}/trs/rule[{i}]", out)
                all_terms += list(_trs_terms(remaining))
            case EquivalenceProof(subsumptions):
                for k, sub in enumerate(subsumptions, 1):
                    spath = f"{path}/ruleSubsumptionProof[{k}]"
                    _rule_defects(sub.rule, spath, out)
                    all_terms += [sub.rule.lhs, sub.rule.rhs]
                    if not sub.conversion:
                        out.append(Defect(spath, "empty conversion"))
                        continue
                    if sub.conversion[0].source != sub.rule.lhs:
                        out.append(Defect(spath, "conversion does not start at the rule's lhs"))
                    if sub.conversion[-1].target != sub.rule.rhs:
                        out.append(Defect(spath, "conversion does not end at the rule's rhs"))
                    for j, step in enumerate(sub.conversion, 1):
                        cpath = f"{spath}/conversionStep[{j}]"
                        all_terms += [step.source, step.target]
                        if j > 1 and sub.conversion[j - 2].target != step.source:
                            out.append(Defect(cpath, "broken conversion chain"))
                        kind, idx = step.ref
                        if kind == EQUATION and not 0 <= idx < n_equations:
                            out.append(Defect(cpath, f"no equation {idx + 1}"))
                        elif kind == DERIVED and idx >= k - 1:
                            out.append(Defect(cpath, "forward reference in sharing"))
                        elif kind == DERIVED and idx < 0:
                            out.append(Defect(cpath, f"no derived rule {idx + 1}"))
                        elif kind not in (EQUATION, DERIVED):
                            out.append(Defect(cpath, f"unknown reference kind {kind!r}"))
                        if step.direction not in (LTR, RTL):
                            out.append(Defect(cpath, f"unknown direction {step.direction!r}"))
            case LoopProof(w):
                if not w.steps:
                    out.append(Defect(path, "empty rewrite sequence in loop"))
                all_terms.append(w.start)
            case UnknownProofStep(description=d):
                if not d.strip():
                    out.append(Defect(path, "unknown proof step without description"))
            case Assumption(claim):
                if not claim.strip():
                    out.append(Defect(path, "assumption without claim"))
    try:
        signature(all_terms)
    except ArityError as e:
        out.append(Defect("certificate", str(e)))
    return out

