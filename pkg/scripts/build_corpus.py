"""Regenerate the certificate corpus in corpus/.

The group certificate's rule subsumptions come from a small recording
Knuth-Bendix completion: every rule it creates is stored with the
conversion (a critical peak plus normalizations) that justifies it, so
later rules may refer to earlier ones.

    python scripts/build_corpus.py [outdir]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from cpfcert.cpf_io import STYLESHEET, serialize_certificate
from cpfcert.model import (
    DERIVED, EQUATION, LTR, RTL, Assumption, CertificationProblem, CompletionInput, CompletionProof,
    ConversionStep, EquivalenceProof, LoopProof, LoopStep, LoopWitness, NewmanProof, Origin,
    OrthogonalityProof, RIsEmpty, RuleRemoval, RuleSubsumption, TrsInput, UnknownProofStep,
    UnsupportedInput, WcrCriticalPairsJoinable,
)
from cpfcert.orders import KboParams, OrderDecision, PolyInterpretation, Polynomial, kbo_compare
from cpfcert.samples import GROUP_ARITIES, GROUP_EQUATIONS, GROUP_KBO, GROUP_RULES
from cpfcert.terms import (
    App, Rule, Trs, Var, apply, critical_pairs, match, parse_term, parse_trs,
    replace_at, rule_variant, subterm_at,
)

VERSION = "2.1"
x = Var("x")


def _flip(steps):
    return [ConversionStep(s.target, s.source, s.ref, s.position, RTL if s.direction == LTR else LTR)
            for s in reversed(steps)]


class Recorder:
    """Completion that remembers a conversion for every rule it creates."""

    def __init__(self, order: KboParams):
        self.order = order
        self.subsumptions: list[RuleSubsumption] = []
        self.active: list[int] = []

    def add(self, rule: Rule, conversion, active=True) -> int:
        self.subsumptions.append(RuleSubsumption(rule, tuple(conversion)))
        k = len(self.subsumptions) - 1
        if active:
            self.active.append(k)
        return k

    def trace(self, t):
        """Leftmost-innermost normalization with the active rules, as conversion steps."""
        steps = []
        while True:
            step = self._step(t, ())
            if step is None:
                return t, steps
            steps.append(step)
            t = step.target

    def _step(self, t, pos):
        u = subterm_at(t, pos)
        if isinstance(u, Var):
            return None
        for i in range(len(u.args)):
            s = self._step(t, pos + (i + 1,))
            if s is not None:
                return s
        for k in self.active:
            rule = self.subsumptions[k].rule
            sigma = match(rule.lhs, u)
            if sigma is not None:
                return ConversionStep(t, replace_at(t, pos, apply(sigma, rule.rhs)), (DERIVED, k), pos, LTR)
        return None

    def orient(self, s, t, chain):
        if kbo_compare(self.order, s, t) is OrderDecision.GT:
            return Rule(s, t), chain
        if kbo_compare(self.order, t, s) is OrderDecision.GT:
            return Rule(t, s), _flip(chain)
        raise RuntimeError(f"cannot orient {s} = {t}")

    def complete(self, max_rounds=200):
        for _ in range(max_rounds):
            trs = Trs(tuple(self.subsumptions[k].rule for k in self.active))
            new = None
            for cp in critical_pairs(trs):
                outer, inner = self.active[cp.outer], self.active[cp.inner]
                peak_to_left = ConversionStep(cp.peak, cp.left, (DERIVED, inner), cp.position, LTR)
                peak_to_right = ConversionStep(cp.peak, cp.right, (DERIVED, outer), (), LTR)
                l2, lsteps = self.trace(cp.left)
                r2, rsteps = self.trace(cp.right)
                if l2 == r2:
                    continue
                chain = _flip(lsteps) + _flip([peak_to_left]) + [peak_to_right] + rsteps
                cand = self.orient(l2, r2, chain)
                if new is None or _size(cand[0]) < _size(new[0]):
                    new = cand
            if new is None:
                return
            rule, chain = _canonical(*new)
            k = self.add(rule, chain)
            self._interreduce(k)
        raise RuntimeError("completion did not finish")

    def _interreduce(self, k):
        new_lhs = self.subsumptions[k].rule.lhs
        keep = []
        for j in self.active:
            lhs = self.subsumptions[j].rule.lhs
            if j != k and any(match(new_lhs, subterm_at(lhs, p)) is not None for p in _positions(lhs)):
                continue
            keep.append(j)
        self.active = keep

    def derive(self, rule: Rule) -> int:
        """Subsumption for rule: join both sides with the active system."""
        for k, sub in enumerate(self.subsumptions):
            if rule_variant(sub.rule, rule):
                return k
        l2, lsteps = self.trace(rule.lhs)
        r2, rsteps = self.trace(rule.rhs)
        assert l2 == r2, (rule, l2, r2)
        return self.add(rule, lsteps + _flip(rsteps), active=False)


def _positions(t):
    from cpfcert.terms import fun_positions
    return list(fun_positions(t))


def _size(rule):
    from cpfcert.terms import size
    return size(rule.lhs) + size(rule.rhs)


def _canonical(rule, chain):
    """Rename variables of a new rule (and its conversion) to x, y, z, ..."""
    from cpfcert.terms import ordered_variables, rename
    names = ordered_variables(rule.lhs)
    pool = iter(["x", "y", "z", "u", "v", "w"] + [f"x{i}" for i in range(1, 50)])
    mapping = {}
    for v in names:
        mapping[v] = next(pool)
    # variables occurring only inside the conversion keep a distinct name
    for step in chain:
        for t in (step.source, step.target):
            for v in ordered_variables(t):
                if v not in mapping:
                    mapping[v] = next(pool)
    ren = lambda t: rename(t, mapping)  # noqa: E731
    return Rule(ren(rule.lhs), ren(rule.rhs)), [
        ConversionStep(ren(s.source), ren(s.target), s.ref, s.position, s.direction) for s in chain]


def group_equivalence() -> EquivalenceProof:
    eq = GROUP_EQUATIONS
    rec = Recorder(GROUP_KBO)
    r = GROUP_RULES
    # rules 1-3 are the oriented equations
    for i in range(3):
        rec.add(r[i], [ConversionStep(eq[i].lhs, eq[i].rhs, (EQUATION, i), (), LTR)])
    # rule 4 from the peak *(*(inv(x),x),z)
    peak = parse_term("*(*(inv(x),x),z)")
    rec.add(r[3], [
        ConversionStep(r[3].lhs, peak, (EQUATION, 0), (), RTL),
        ConversionStep(peak, r[3].rhs, (EQUATION, 2), (1,), LTR),
    ])
    rec.complete()
    for rule in r:
        rec.derive(rule)
    return EquivalenceProof(tuple(rec.subsumptions))


def group_certificate() -> CertificationProblem:
    proof = CompletionProof(
        wcr=WcrCriticalPairsJoinable(),
        termination=RuleRemoval(GROUP_KBO, Trs(()), RIsEmpty()),
        equivalence=group_equivalence(),
    )
    return CertificationProblem(CompletionInput(GROUP_EQUATIONS, GROUP_RULES), VERSION, proof,
                                Origin("kbcv", "1.7", "group theory"))


def tampered_group(cp: CertificationProblem) -> CertificationProblem:
    """Claims the same removal with inv weighted 1, which does not orient the last rule."""
    bad = KboParams(1, {"e": 1, "*": 0, "inv": 1}, GROUP_KBO.precedence, GROUP_ARITIES)
    proof = cp.proof
    proof = CompletionProof(proof.wcr, RuleRemoval(bad, Trs(()), RIsEmpty()), proof.equivalence)
    return CertificationProblem(cp.input, cp.cpf_version, proof, Origin("kbcv", "1.7", "tampered"))


def partial_group(cp: CertificationProblem) -> CertificationProblem:
    proof = CompletionProof(cp.proof.wcr, Assumption("R terminates"), cp.proof.equivalence)
    return CertificationProblem(cp.input, cp.cpf_version, proof, Origin("kbcv", "1.7", "partial"))


# --- three-rule scenario with a buggy first removal step --------------------

ABC = parse_trs(["f(x) -> g(x)", "g(x) -> h(x)", "h(x) -> k(x)"])


def _linear(consts: dict) -> PolyInterpretation:
    """[f](x_1) = x_1 + c_f for each unary symbol."""
    return PolyInterpretation(
        {f: Polynomial.var("x_1") + Polynomial.const(c) for f, c in consts.items()},
        {f: 1 for f in consts})


# orients B strictly, A and C only weakly
ORDER_1 = _linear({"f": 1, "g": 1, "h": 0, "k": 0})
# orients A and C strictly
ORDER_2 = _linear({"f": 1, "g": 0, "h": 1, "k": 0})


def abc_certificate(buggy: bool) -> CertificationProblem:
    a, b, c = ABC
    if buggy:
        # first step claims A and B are gone
        termination = RuleRemoval(ORDER_1, Trs((c,)), RuleRemoval(ORDER_2, Trs(()), RIsEmpty()))
    else:
        termination = RuleRemoval(ORDER_1, Trs((a, c)), RuleRemoval(ORDER_2, Trs(()), RIsEmpty()))
    proof = NewmanProof(termination, WcrCriticalPairsJoinable())
    return CertificationProblem(TrsInput(ABC), VERSION, proof,
                                Origin("demo", "0", "buggy removal" if buggy else "corrected removal"))


def loop_certificate() -> CertificationProblem:
    trs = parse_trs(["f(x) -> f(s(x))"])
    start = parse_term("f(x)")
    witness = LoopWitness(start, (LoopStep(0, (), {}, parse_term("f(s(x))")),), (),
                          {"x": App("s", (x,))})
    return CertificationProblem(TrsInput(trs), VERSION, LoopProof(witness), Origin("demo", "0"))


def orthogonal_certificate() -> CertificationProblem:
    trs = parse_trs(["ap(ap(k,x),y) -> x"])
    return CertificationProblem(TrsInput(trs), VERSION, OrthogonalityProof(), Origin("demo", "0"))


def modular_confluence() -> CertificationProblem:
    """Confluence via an unsupported modularity step whose subproofs are still checked."""
    r1 = parse_trs(["ap(ap(k,x),y) -> x"])
    r2 = parse_trs(["f(x) -> g(x)", "g(x) -> h(x)"])
    r3 = parse_trs(["g(x) -> h(x)"])
    order_2 = _linear({"g": 1, "h": 0})
    termination = UnknownProofStep(
        "new reduction order removes f(x) -> g(x)",
        (RuleRemoval(order_2, Trs(()), RIsEmpty()),), None, (r3,))
    proof = UnknownProofStep(
        "modularity of confluence for signature-disjoint systems",
        (OrthogonalityProof(), NewmanProof(termination, WcrCriticalPairsJoinable())),
        None, (r1, r2))
    return CertificationProblem(TrsInput(Trs(r1.rules + r2.rules)), VERSION, proof,
                                Origin("demo", "0"))


def unsupported_input() -> CertificationProblem:
    return CertificationProblem(UnsupportedInput("dpInput"), VERSION, Assumption("finite"), Origin())


def main(argv=None):
    parser = argparse.ArgumentParser(description="Regenerate the certificate corpus.")
    parser.add_argument("out", nargs="?", type=Path,
                        default=Path(__file__).resolve().parent.parent / "corpus")
    out = parser.parse_args(argv).out
    out.mkdir(parents=True, exist_ok=True)
    group = group_certificate()
    files = {
        "group.proof.xml": group,
        "group_tampered.xml": tampered_group(group),
        "group_partial.xml": partial_group(group),
        "abc_buggy.xml": abc_certificate(True),
        "abc_fixed.xml": abc_certificate(False),
        "loop.xml": loop_certificate(),
        "orthogonal.xml": orthogonal_certificate(),
        "modular_confluence.xml": modular_confluence(),
        "unsupported_input.xml": unsupported_input(),
    }
    for name, cp in files.items():
        (out / name).write_bytes(serialize_certificate(cp, stylesheet=STYLESHEET))
        print(f"wrote {out / name}")
    # an out-of-scope technique inside <proof>, as a tool would emit it
    dp = serialize_certificate(CertificationProblem(
        TrsInput(parse_trs(["f(f(x)) -> f(x)"])), VERSION, RIsEmpty(), Origin("demo", "0")))
    dp = dp.replace(b"<rIsEmpty />", b"<dpProof>\n      <pIsEmpty />\n    </dpProof>")
    (out / "dp_unknown.xml").write_bytes(dp)
    print(f"wrote {out / 'dp_unknown.xml'}")


if __name__ == "__main__":
    main()
