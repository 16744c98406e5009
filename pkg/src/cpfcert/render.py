"""HTML pretty-printing of certificates.

Section numbers follow the proof tree (1, 1.1, 1.2, ...), the same labels
the checker uses in failure paths.
"""

from __future__ import annotations

import re
from html import escape, unescape

from .checker import Goal, goal_of
from .model import (
    DERIVED,
    RTL,
    Assumption,
    CertificationProblem,
    CompletionInput,
    CompletionProof,
    EquivalenceProof,
    LoopProof,
    NewmanProof,
    OrthogonalityProof,
    RIsEmpty,
    RuleRemoval,
    TrsInput,
    UnknownProofStep,
    UnsupportedInput,
    WcrCriticalPairsJoinable,
    children,
)
from .orders import describe
from .terms import format_position

TITLES = {
    CompletionProof: "Completion Proof",
    RuleRemoval: "Rule Removal",
    RIsEmpty: "R is Empty",
    WcrCriticalPairsJoinable: "Local Confluence Proof",
    OrthogonalityProof: "Confluence Proof by Orthogonality",
    NewmanProof: "Confluence Proof by Newman's Lemma",
    EquivalenceProof: "Equivalence Proof of R and E",
    LoopProof: "Loop",
    Assumption: "Assumption",
    UnknownProofStep: "Unknown Proof Step",
}

_DOC_TITLES = {
    Goal.TERMINATION: "Termination Proof",
    Goal.NONTERMINATION: "Nontermination Proof",
    Goal.WCR: "Local Confluence Proof",
    Goal.CONFLUENCE: "Confluence Proof",
    Goal.COMPLETION: "Completion Proof",
}

_CSS = """body { font-family: sans-serif; max-width: 60em; margin: 2em auto; }
.term { font-family: monospace; }
.assumed { border: 2px solid #c60; background: #fff4e0; padding: 0.5em; }
.unknown { border: 2px dashed #888; padding: 0.5em; }"""


def _t(term) -> str:
    return f'<span class="term">{escape(str(term))}</span>'


def _rules(rules, arrow="&rarr;") -> str:
    if not len(rules):
        return "<p>(no rules)</p>"
    items = "".join(f"<li>{_t(r.lhs)} {arrow} {_t(r.rhs)}</li>" for r in rules)
    return f"<ol>{items}</ol>"


def document_title(cp: CertificationProblem) -> str:
    if isinstance(cp.input, CompletionInput):
        return "Completion Proof"
    goal = goal_of(cp.proof)
    return _DOC_TITLES.get(goal, "Proof")


def _body(node, label, out):
    """Append the content of one node; child sections are added by the caller."""
    match node:
        case CompletionProof():
            out.append("<p>Three obligations: termination and local confluence of R "
                       "(hence convergence), and equivalence of R and E.</p>")
        case RuleRemoval(order, remaining, subproof):
            out.append(f"<p>Order: {escape(describe(order))}.</p>")
            if not len(remaining) and isinstance(subproof, RIsEmpty):
                out.append("<p>Every rule is strictly decreasing, so all rules are removed.</p>")
            else:
                out.append("<p>Strictly decreasing rules are removed; the remaining TRS is</p>")
                out.append(_rules(remaining))
        case RIsEmpty():
            out.append("<p>No rules are left, so termination is trivial.</p>")
        case WcrCriticalPairsJoinable(fuel):
            extra = "" if fuel is None else f" (at most {fuel} steps per normal form)"
            out.append(f"<p>Each critical pair has a common normal form{extra}.</p>")
        case OrthogonalityProof():
            out.append("<p>The TRS is left-linear and has no critical pairs.</p>")
        case NewmanProof():
            out.append("<p>Termination plus local confluence gives confluence.</p>")
        case EquivalenceProof(subsumptions):
            out.append("<p>Direction R &sube; E: each rule below is obtained by a conversion using "
                       "the equations and rules derived before it.</p><ol>")
            for sub in subsumptions:
                chain = [_t(sub.rule.lhs)]
                for step in sub.conversion:
                    kind, idx = step.ref
                    ref = f"{'rule' if kind == DERIVED else 'eq'} {idx + 1}"
                    arrow = "&larr;" if step.direction == RTL else "&rarr;"
                    chain.append(f'<sub title="{escape(ref)} at {format_position(step.position)}">'
                                 f"{arrow}</sub> {_t(step.target)}")
                out.append(f"<li>{_t(sub.rule)}: {' '.join(chain)}</li>")
            out.append("</ol><p>Direction E &sube; R: both sides of every equation reduce to the "
                       "same R-normal form.</p>")
        case LoopProof(w):
            out.append(f"<p>Start term {_t(w.start)}, {len(w.steps)} rewrite step(s):</p><ol>")
            for step in w.steps:
                sigma = ", ".join(f"{x} &mapsto; {_t(t)}" for x, t in sorted(step.substitution.items()))
                out.append(f"<li>rule {step.rule + 1} at {format_position(step.position)}"
                           f" with {{{sigma}}}</li>")
            sigma = ", ".join(f"{x} &mapsto; {_t(t)}" for x, t in sorted(w.substitution.items()))
            out.append(f"</ol><p>The start term reappears at position {format_position(w.context)}, "
                       f"instantiated by {{{sigma}}}.</p>")
        case Assumption(claim):
            out.append(f'<p class="assumed"><strong>ASSUMED:</strong> {escape(claim)}</p>')
        case UnknownProofStep(description, _, prop):
            tag = "" if prop is None else f" (property: {escape(prop)})"
            out.append(f'<p class="unknown">{escape(description)}{tag}</p>')


def _section(node, label, out):
    level = min(label.count(".") + 3, 6)
    out.append(f"<h{level}>{label} {escape(TITLES.get(type(node), type(node).__name__))}</h{level}>")
    _body(node, label, out)
    for i, child in enumerate(children(node), 1):
        # an empty-TRS leaf is already told by its rule-removal parent
        if isinstance(node, RuleRemoval) and isinstance(child, RIsEmpty) and not len(node.remaining):
            continue
        _section(child, f"{label}.{i}", out)


def render_html(cp: CertificationProblem) -> str:
    title = document_title(cp)
    out = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8">',
        f"<title>{escape(title)}</title><style>{_CSS}</style></head><body>",
        f"<h1>{escape(title)}</h1>",
    ]
    o = cp.origin
    if o.tool_name:
        version = f" (version {escape(o.tool_version)})" if o.tool_version else ""
        out.append(f'<p class="origin">by {escape(o.tool_name)}{version}</p>')
    if o.notes:
        out.append(f"<p class=\"notes\">{escape(o.notes)}</p>")
    out.append("<h2>Input</h2>")
    match cp.input:
        case CompletionInput(eqs, trs):
            out.append("<p>Equations E:</p>" + _rules(eqs, "="))
            out.append("<p>TRS R:</p>" + _rules(trs))
            out.append("<p>Claim: E and R are equivalent and R is convergent.</p>")
        case TrsInput(trs):
            out.append("<p>TRS R:</p>" + _rules(trs))
            goal = goal_of(cp.proof)
            if goal is not None:
                out.append(f"<p>Claim: {escape(goal.value)} of R.</p>")
        case UnsupportedInput(element):
            out.append(f'<p class="unknown">Unsupported input {escape(element)}.</p>')
    out.append(f"<p>CPF version {escape(cp.cpf_version)}.</p>")
    out.append("<h2>Proof</h2>")
    _section(cp.proof, "1", out)
    out.append("</body></html>")
    return "\n".join(out) + "\n"


def section_heads(html: str) -> list[str]:
    """Text of every h1..h6 heading, in document order."""
    return [unescape(re.sub(r"<[^>]+>", "", m)) for m in re.findall(r"<h[1-6]>(.*?)</h[1-6]>", html)]
