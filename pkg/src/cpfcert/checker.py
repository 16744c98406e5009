"""Deterministic re-checking of proof trees.

Nodes are visited depth-first, left to right; the first failing node is
reported with its section path (``proof/1.1`` etc.).  Assumptions and
unknown proof steps become open obligations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .model import (
    DERIVED,
    EQUATION,
    RTL,
    Assumption,
    CertificationProblem,
    Certified,
    CompletionInput,
    CompletionProof,
    ConversionStep,
    EquivalenceProof,
    LoopProof,
    LoopWitness,
    NewmanProof,
    OrthogonalityProof,
    PartiallyCertified,
    Rejected,
    RIsEmpty,
    RuleRemoval,
    TrsInput,
    UnknownProofStep,
    Unsupported,
    UnsupportedInput,
    Verdict,
    WcrCriticalPairsJoinable,
    collect_obligations,
)
from .orders import OrderDecision, UninterpretedSymbol, order_compare
from .terms import (
    DEFAULT_FUEL,
    EquationalSystem,
    Trs,
    apply,
    critical_pairs,
    format_position,
    is_linear,
    is_position,
    match_into,
    normal_form,
    replace_at,
    rule_variant,
    subterm_at,
)


class Goal(enum.Enum):
    TERMINATION = "termination"
    NONTERMINATION = "nontermination"
    WCR = "local confluence"
    CONFLUENCE = "confluence"
    EQUIVALENCE = "equivalence of E and R"
    COMPLETION = "completion"


_GOAL_OF = {
    RuleRemoval: Goal.TERMINATION,
    RIsEmpty: Goal.TERMINATION,
    LoopProof: Goal.NONTERMINATION,
    WcrCriticalPairsJoinable: Goal.WCR,
    OrthogonalityProof: Goal.CONFLUENCE,
    NewmanProof: Goal.CONFLUENCE,
    EquivalenceProof: Goal.EQUIVALENCE,
    CompletionProof: Goal.COMPLETION,
}


def goal_of(node) -> Optional[Goal]:
    """The property a proof node establishes (None for open leaves)."""
    return _GOAL_OF.get(type(node))


@dataclass(frozen=True)
class _Ctx:
    trs: Trs
    equations: Optional[EquationalSystem]
    fuel: int


def check(cp: CertificationProblem, fuel: int = DEFAULT_FUEL) -> Verdict:
    match cp.input:
        case UnsupportedInput(element):
            return Unsupported(element)
        case CompletionInput(eqs, trs):
            return _check_node(Goal.COMPLETION, cp.proof, _Ctx(trs, eqs, fuel), "proof/1")
        case TrsInput(trs):
            goal = goal_of(cp.proof)
            if goal in (Goal.COMPLETION, Goal.EQUIVALENCE):
                return Rejected("proof/1", f"a {goal.value} proof needs a completion input")
            return _check_node(goal, cp.proof, _Ctx(trs, None, fuel), "proof/1")
    return Unsupported(type(cp.input).__name__)


def _check_node(goal: Optional[Goal], node, ctx: _Ctx, path: str) -> Verdict:
    match node:
        case Assumption(claim):
            return PartiallyCertified((claim,))
        case UnknownProofStep(description, subproofs):
            results = [PartiallyCertified((description,))]
            for i, sub in enumerate(subproofs, 1):
                trs = node.subgoal(i - 1)
                trs = ctx.trs if trs is None else trs
                sub_ctx = _Ctx(trs, ctx.equations, ctx.fuel)
                results.append(_check_node(goal_of(sub), sub, sub_ctx, f"{path}.{i}"))
                if isinstance(results[-1], Rejected):
                    break
            return collect_obligations(results)
    found = goal_of(node)
    if found is None:
        return Rejected(path, f"unknown proof node {type(node).__name__}")
    if goal is not None and found is not goal:
        return Rejected(path, f"expected a {goal.value} proof, found a {found.value} proof")
    match node:
        case CompletionProof():
            return _completion(ctx, node, path)
        case RuleRemoval(order, remaining, subproof):
            return check_rule_removal(ctx.trs, order, remaining, subproof, ctx.fuel, path=path)
        case RIsEmpty():
            return check_r_is_empty(ctx.trs, path=path)
        case WcrCriticalPairsJoinable(hint):
            return check_wcr(ctx.trs, ctx.fuel if hint is None else min(hint, ctx.fuel), path=path)
        case OrthogonalityProof():
            return check_orthogonal(ctx.trs, path=path)
        case NewmanProof(termination, wcr):
            return check_newman(ctx.trs, termination, wcr, ctx.fuel, path=path)
        case EquivalenceProof():
            if ctx.equations is None:
                return Rejected(path, "equivalence proof without equations")
            return check_equivalence(ctx.equations, ctx.trs, node, ctx.fuel, path=path)
        case LoopProof(witness):
            return check_loop(ctx.trs, witness, path=path)
    raise AssertionError(node)


def _sequence(parts, ctx: _Ctx, path: str) -> Verdict:
    """Check (goal, node, trs) parts as children 1, 2, ... stopping at the first rejection."""
    results = []
    for i, (goal, node, trs) in enumerate(parts, 1):
        v = _check_node(goal, node, _Ctx(trs, ctx.equations, ctx.fuel), f"{path}.{i}")
        if isinstance(v, Rejected):
            return v
        results.append(v)
    return collect_obligations(results)


# --- termination -----------------------------------------------------------


def _decide(order, rule):
    try:
        return order_compare(order, rule.lhs, rule.rhs), None
    except UninterpretedSymbol as e:
        return None, str(e)


def check_rule_removal(trs: Trs, order, remaining: Trs, subproof, fuel: int = DEFAULT_FUEL,
                       *, path: str = "proof/1") -> Verdict:
    kept: set[int] = set()
    for r in remaining:
        idx = next((i for i, s in enumerate(trs) if i not in kept and rule_variant(r, s)), None)
        if idx is None:
            return Rejected(path, f"remaining TRS is not a subset: rule {r} is not in the current TRS")
        kept.add(idx)
    for i, rule in enumerate(trs):
        decision, error = _decide(order, rule)
        if error:
            return Rejected(path, error)
        if i in kept and not decision.weak:
            return Rejected(path, f"rule {rule} not weakly decreasing")
        if i not in kept and decision is not OrderDecision.GT:
            return Rejected(path, f"rule {rule} not strictly decreasing")
    return _check_node(Goal.TERMINATION, subproof, _Ctx(remaining, None, fuel), f"{path}.1")


def check_r_is_empty(trs: Trs, *, path: str = "proof/1") -> Verdict:
    if len(trs) == 0:
        return Certified()
    return Rejected(path, "rules left, namely " + ", ".join(str(r) for r in trs))


# --- confluence ------------------------------------------------------------


def check_wcr(trs: Trs, fuel: int = DEFAULT_FUEL, *, path: str = "proof/1") -> Verdict:
    for cp in critical_pairs(trs):
        a = normal_form(trs, cp.left, fuel)
        b = normal_form(trs, cp.right, fuel)
        if a is None or b is None:
            return Rejected(path, f"fuel exhausted at critical pair {cp}")
        if a != b:
            return Rejected(path, f"critical pair {cp} not joinable: normal forms {a} and {b}")
    return Certified()


def check_orthogonal(trs: Trs, *, path: str = "proof/1") -> Verdict:
    for rule in trs:
        if not is_linear(rule.lhs):
            return Rejected(path, f"nonlinear lhs in rule {rule}")
    cps = critical_pairs(trs)
    if cps:
        return Rejected(path, f"not orthogonal, overlap gives critical pair {cps[0]}")
    return Certified()


def check_newman(trs: Trs, termination, wcr, fuel: int = DEFAULT_FUEL,
                 *, path: str = "proof/1") -> Verdict:
    ctx = _Ctx(trs, None, fuel)
    return _sequence([(Goal.TERMINATION, termination, trs), (Goal.WCR, wcr, trs)], ctx, path)


# --- completion and equivalence --------------------------------------------


def _completion(ctx: _Ctx, proof: CompletionProof, path: str) -> Verdict:
    return _sequence(
        [
            (Goal.TERMINATION, proof.termination, ctx.trs),
            (Goal.WCR, proof.wcr, ctx.trs),
            (Goal.EQUIVALENCE, proof.equivalence, ctx.trs),
        ],
        ctx,
        path,
    )


def check_completion(inp: CompletionInput, proof: CompletionProof, fuel: int = DEFAULT_FUEL,
                     *, path: str = "proof/1") -> Verdict:
    return _check_node(Goal.COMPLETION, proof, _Ctx(inp.trs, inp.equations, fuel), path)


def _step_error(step: ConversionStep, equations: EquationalSystem, derived) -> Optional[str]:
    kind, idx = step.ref
    if kind == EQUATION and 0 <= idx < len(equations):
        eq = equations[idx]
        used = f"equation {idx + 1}"
    elif kind == DERIVED and 0 <= idx < len(derived):
        eq = derived[idx]
        used = f"derived rule {idx + 1}"
    elif kind == DERIVED:
        return f"derived rule {idx + 1} is not available (forward reference in sharing)"
    else:
        return f"no {kind} {idx + 1}"
    lhs, rhs = (eq.rhs, eq.lhs) if step.direction == RTL else (eq.lhs, eq.rhs)
    where = format_position(step.position)
    if not is_position(step.source, step.position):
        return f"position {where} does not exist in {step.source}"
    sigma = match_into(lhs, subterm_at(step.source, step.position), step.substitution or {})
    if sigma is None:
        return f"{used} ({step.direction}) does not apply to {step.source} at {where}"
    if is_position(step.target, step.position):
        # variables only on the introduced side are fixed by the target
        completed = match_into(rhs, subterm_at(step.target, step.position), sigma)
        sigma = completed if completed is not None else sigma
    result = replace_at(step.source, step.position, apply(sigma, rhs))
    if result != step.target:
        return f"{used} ({step.direction}) at {where} turns {step.source} into {result}, not {step.target}"
    return None


def check_equivalence(equations: EquationalSystem, trs: Trs, proof: EquivalenceProof,
                      fuel: int = DEFAULT_FUEL, *, path: str = "proof/1") -> Verdict:
    # R simulated by E: replay every conversion
    derived = []
    for k, sub in enumerate(proof.subsumptions, 1):
        steps = sub.conversion
        if not steps:
            return Rejected(path, f"rule subsumption {k} ({sub.rule}) has an empty conversion")
        if steps[0].source != sub.rule.lhs or steps[-1].target != sub.rule.rhs:
            return Rejected(path, f"rule subsumption {k}: conversion does not connect {sub.rule.lhs} "
                                  f"and {sub.rule.rhs}")
        for j, step in enumerate(steps, 1):
            if j > 1 and steps[j - 2].target != step.source:
                return Rejected(path, f"rule subsumption {k}, step {j}: broken conversion chain")
            error = _step_error(step, equations, derived)
            if error:
                return Rejected(path, f"rule subsumption {k} ({sub.rule}), step {j}: {error}")
        derived.append(sub.rule)
    for rule in trs:
        if not any(rule_variant(rule, d) for d in derived):
            return Rejected(path, f"rule {rule} of R has no subsumption proof")
    # E simulated by R: both sides of each equation share their normal form
    for eq in equations:
        a = normal_form(trs, eq.lhs, fuel)
        b = normal_form(trs, eq.rhs, fuel)
        if a is None or b is None:
            return Rejected(path, f"fuel exhausted normalizing equation {eq}")
        if a != b:
            return Rejected(path, f"equation {eq} does not join in R: normal forms {a} and {b}")
    return Certified()


# --- nontermination --------------------------------------------------------


def check_loop(trs: Trs, w: LoopWitness, *, path: str = "proof/1") -> Verdict:
    if not w.steps:
        return Rejected(path, "loop has no rewrite steps")
    t = w.start
    for i, step in enumerate(w.steps, 1):
        if not 0 <= step.rule < len(trs):
            return Rejected(path, f"loop step {i}: no rule {step.rule + 1}")
        rule = trs[step.rule]
        where = format_position(step.position)
        if not is_position(t, step.position):
            return Rejected(path, f"loop step {i}: position {where} does not exist in {t}")
        if apply(step.substitution, rule.lhs) != subterm_at(t, step.position):
            return Rejected(path, f"loop step {i}: rule {rule} with the given substitution "
                                  f"does not match {t} at {where}")
        u = replace_at(t, step.position, apply(step.substitution, rule.rhs))
        if step.result is not None and step.result != u:
            return Rejected(path, f"loop step {i}: claimed reduct {step.result}, actual {u}")
        t = u
    if not is_position(t, w.context):
        return Rejected(path, f"context position {format_position(w.context)} does not exist in {t}")
    if subterm_at(t, w.context) != apply(w.substitution, w.start):
        return Rejected(path, f"loop does not close: {subterm_at(t, w.context)} is not an instance "
                              f"of {w.start} under the given substitution")
    return Certified()
