"""Acceptance criteria, one test per criterion (summary printed at session end)."""

import itertools
import random
import time
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import replace

import pytest

from conftest import CORPUS, load
from cpfcert.checker import check
from cpfcert.cpf_io import parse_certificate, serialize_certificate
from cpfcert.model import (
    Assumption,
    Certified,
    LoopProof,
    PartiallyCertified,
    Rejected,
    RuleRemoval,
    UnknownProofStep,
    node_at,
    replace_at_label,
    validate_structure,
    walk,
)
from cpfcert.orders import (
    KboParams,
    OrderDecision,
    OrderError,
    Polynomial,
    Precedence,
    kbo_compare,
    order_compare,
    poly_compare,
)
from cpfcert.samples import GROUP_ARITIES, GROUP_EQUATIONS, GROUP_KBO, GROUP_RULES
from cpfcert.terms import App, Var, apply, critical_pairs, normal_form
from oracles import bf_critical_pairs, canon, eval_poly, kbo_witness_search
from test_cpf_io import _mutate
from test_orders import _rand_group_term, random_poly
from test_terms import random_trs

GT = OrderDecision.GT
CORPUS_FILES = sorted(p.name for p in CORPUS.glob("*.xml"))
GROUP_XML = (CORPUS / "group.proof.xml").read_bytes()


def test_criterion_1_group_end_to_end():
    start = time.perf_counter()
    cp = parse_certificate(GROUP_XML)
    assert validate_structure(cp) == []
    verdict = check(cp)
    elapsed = time.perf_counter() - start
    assert verdict == Certified()
    assert elapsed < 1.0, elapsed
    # input is the 3 equations and the 10 rules; the order comes from the search oracle
    assert cp.input.equations == GROUP_EQUATIONS and cp.input.trs == GROUP_RULES
    removal = node_at(cp.proof, "1.1")
    assert isinstance(removal, RuleRemoval) and removal.order.w0 == 1
    witnesses = kbo_witness_search([(r.lhs, r.rhs) for r in GROUP_RULES], GROUP_ARITIES)
    assert (dict(removal.order.weights), ("inv", "*", "e")) in witnesses
    assert removal.order == GROUP_KBO
    # "E simulated by R" by normal forms alone
    for eq in GROUP_EQUATIONS:
        assert normal_form(GROUP_RULES, eq.lhs) == normal_form(GROUP_RULES, eq.rhs) is not None


def test_criterion_2_critical_pair_oracle():
    rng = random.Random(20240501)
    discrepancies = 0
    for _ in range(200):
        trs = random_trs(rng, max_rules=4, depth=3)
        ours = Counter(canon(c.peak, c.left, c.right) for c in critical_pairs(trs))
        if ours != bf_critical_pairs([(r.lhs, r.rhs) for r in trs]):
            discrepancies += 1
    assert discrepancies == 0


def test_criterion_3_early_detection():
    buggy = [check(parse_certificate((CORPUS / "abc_buggy.xml").read_bytes())) for _ in range(10)]
    fixed = [check(parse_certificate((CORPUS / "abc_fixed.xml").read_bytes())) for _ in range(10)]
    assert len(set(buggy)) == 1 and len(set(fixed)) == 1
    assert buggy[0] == Rejected("proof/1.1", "rule f(x) -> g(x) not strictly decreasing")
    assert fixed[0] == Certified()
    # the first order orients only the middle rule strictly
    order = node_at(load("abc_buggy.xml").proof, "1.1").order
    a, b, c = load("abc_buggy.xml").input.trs
    assert [order_compare(order, r.lhs, r.rhs) for r in (a, b, c)] == \
        [OrderDecision.GE, GT, OrderDecision.GE]


def test_criterion_4_polynomial_approximation():
    x = Polynomial.var("x")
    assert poly_compare(x ** 2 + Polynomial.const(1), x) == GT
    rng = random.Random(44)
    contradictions = 0
    gts = 0
    for _ in range(500):
        pl, pr = random_poly(rng), random_poly(rng)
        if poly_compare(pl, pr) != GT:
            continue
        gts += 1
        for v in itertools.product(range(5), repeat=2):
            env = dict(zip("xy", v))
            if eval_poly(pl, env) <= eval_poly(pr, env):
                contradictions += 1
    assert gts > 0
    assert contradictions == 0


# element paths of each subproof position in the group file
_XML_SLOTS = {
    "1": ("proof", "completionProof"),
    "1.1": ("proof/completionProof/terminationProof", "ruleRemoval"),
    "1.1.1": ("proof/completionProof/terminationProof/ruleRemoval", "rIsEmpty"),
    "1.2": ("proof/completionProof/wcrProof", "criticalPairsJoinable"),
    "1.3": ("proof/completionProof/equivalenceProof", "equivalenceBySimulation"),
}


def test_criterion_5_partial_proof_contract(group_cp):
    labels = [label for label, _ in walk(group_cp.proof)]
    assert sorted(labels) == sorted(_XML_SLOTS)
    for label in labels:
        claim = f"claim at {label}"
        cp = replace(group_cp, proof=replace_at_label(group_cp.proof, label, Assumption(claim)))
        assert check(cp) == PartiallyCertified((claim,)), label

        root = ET.fromstring(GROUP_XML)
        parent_path, tag = _XML_SLOTS[label]
        parent = root.find(parent_path)
        old = parent.find(tag)
        i = list(parent).index(old)
        parent.remove(old)
        parent.insert(i, ET.Element("unheardOfTechnique"))
        cp = parse_certificate(ET.tostring(root))
        assert node_at(cp.proof, label) == UnknownProofStep("unheardOfTechnique")
        assert check(cp) == PartiallyCertified(("unheardOfTechnique",)), label


def _context(rng, t):
    for _ in range(rng.randint(1, 3)):
        other = _rand_group_term(rng, 2)
        t = rng.choice([App("inv", (t,)), App("*", (t, other)), App("*", (other, t))])
    return t


def test_criterion_6_kbo_properties():
    rng = random.Random(66)
    positives = 0
    for _ in range(1000):
        s, t = _rand_group_term(rng, 4), _rand_group_term(rng, 4)
        if kbo_compare(GROUP_KBO, t, s) == GT and kbo_compare(GROUP_KBO, s, t) != GT:
            s, t = t, s
        st_, ts = kbo_compare(GROUP_KBO, s, t), kbo_compare(GROUP_KBO, t, s)
        assert not (st_ == GT and ts == GT)
        assert kbo_compare(GROUP_KBO, s, s) != GT
        if st_ != GT:
            continue
        positives += 1
        for _ in range(50):
            sigma = {v: _rand_group_term(rng, 2) for v in "xyz"}
            assert kbo_compare(GROUP_KBO, apply(sigma, s), apply(sigma, t)) == GT
            hole = _context(rng, Var("__hole"))
            assert kbo_compare(GROUP_KBO, apply({"__hole": s}, hole), apply({"__hole": t}, hole)) == GT
    assert positives >= 100
    with pytest.raises(OrderError):
        KboParams(1, {"c": 0}, Precedence(()), {"c": 0})
    with pytest.raises(OrderError):
        KboParams(1, {"i": 0, "f": 1}, Precedence.chain("f", "i"), {"i": 1, "f": 2})


def test_criterion_7_loop_certification():
    cp = load("loop.xml")
    assert check(cp) == Certified()
    w = cp.proof.witness
    step = w.steps[0]
    corruptions = {
        "position": replace(w, steps=(replace(step, position=(1,), result=None),)),
        "rule": replace(w, steps=(replace(step, rule=1),)),
        "substitution": replace(w, substitution={"x": App("s", (App("s", (Var("x"),)),))}),
        "context": replace(w, context=(1,)),
        "result": replace(w, steps=(replace(step, result=App("f", (Var("x"),))),)),
    }
    for field, bad in corruptions.items():
        v = check(replace(cp, proof=LoopProof(bad)))
        assert isinstance(v, Rejected), field


def test_criterion_8_round_trip_and_totality():
    for name in CORPUS_FILES:
        cp = load(name)
        assert parse_certificate(serialize_certificate(cp)) == cp, name
    rng = random.Random(8888)
    names = [n for n in CORPUS_FILES if n != "unsupported_input.xml"]
    crashes = 0
    for _ in range(1000):
        root = ET.fromstring((CORPUS / rng.choice(names)).read_bytes())
        _mutate(rng, root)
        try:
            parse_certificate(ET.tostring(root))
        except Exception:
            crashes += 1
    assert crashes == 0
