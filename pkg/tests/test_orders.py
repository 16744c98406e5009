import itertools
import random

import pytest

from cpfcert.orders import (
    KboParams,
    OrderDecision,
    OrderError,
    PolyInterpretation,
    Polynomial,
    Precedence,
    UninterpretedSymbol,
    absorb,
    formal_arg,
    kbo_compare,
    kbo_greater,
    order_compare,
    poly_compare,
    poly_of_term,
)
from cpfcert.samples import GROUP_ARITIES, GROUP_KBO, GROUP_RULES
from cpfcert.terms import App, Var, parse_term, subterms
from oracles import bf_kbo_gt, eval_poly, kbo_witness_search

GT, GE, NGE = OrderDecision.GT, OrderDecision.GE, OrderDecision.NGE
T = parse_term
X, Y = Polynomial.var("x"), Polynomial.var("y")
ONE = Polynomial.const(1)


# --- KBO --------------------------------------------------------------------


def test_kbo_group_examples():
    assert kbo_compare(GROUP_KBO, T("inv(*(y,x))"), T("*(inv(x),inv(y))")) == GT
    assert kbo_compare(GROUP_KBO, T("*(x,e)"), T("*(x,e)")) == GE
    assert kbo_compare(GROUP_KBO, Var("x"), T("*(x,e)")) == NGE
    assert order_compare(GROUP_KBO, GROUP_RULES[0].lhs, GROUP_RULES[0].rhs) == GT


def test_every_group_rule_decreases():
    for r in GROUP_RULES:
        assert kbo_compare(GROUP_KBO, r.lhs, r.rhs) == GT, r


def test_witness_search_finds_the_sample_parameters():
    found = kbo_witness_search([(r.lhs, r.rhs) for r in GROUP_RULES], GROUP_ARITIES)
    # 10 admissible witnesses over weights {0,1,2}; all need w(inv)=0 with inv on top
    assert len(found) == 10
    assert all(w["inv"] == 0 and order[0] == "inv" for w, order in found)
    assert (dict(GROUP_KBO.weights), ("inv", "*", "e")) in found


def test_missing_weight_defaults_to_w0():
    p = KboParams(w0=2, weights={}, precedence=Precedence(()))
    assert p.weight("f") == 2


@pytest.mark.parametrize("weights,prec,arities", [
    ({"a": 0}, Precedence(()), {"a": 0}),
    ({"f": 0, "g": 1}, Precedence.chain("g", "f"), {"f": 1, "g": 1}),
    ({"f": 0, "g": 1}, Precedence(()), {"f": 1, "g": 1}),
])
def test_admissibility_violations_rejected(weights, prec, arities):
    with pytest.raises(OrderError):
        KboParams(w0=1, weights=weights, precedence=prec, arities=arities)


def test_precedence_cycle_rejected():
    with pytest.raises(OrderError):
        Precedence((("f", "g"), ("g", "f")))


def test_kbo_agrees_with_classic_formulation():
    rng = random.Random(1)
    gt = GROUP_KBO.precedence.greater
    for _ in range(2000):
        s, t = _rand_group_term(rng, 4), _rand_group_term(rng, 4)
        assert kbo_greater(GROUP_KBO, s, t) == bf_kbo_gt(1, GROUP_KBO.weight, gt, s, t)


def test_kbo_subterm_property():
    rng = random.Random(2)
    for _ in range(500):
        s = _rand_group_term(rng, 5)
        for u in subterms(s):
            if u != s:
                assert kbo_greater(GROUP_KBO, s, u)


def _rand_group_term(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return Var(rng.choice("xyz")) if rng.random() < 0.7 else App("e")
    if rng.random() < 0.5:
        return App("inv", (_rand_group_term(rng, depth - 1),))
    return App("*", (_rand_group_term(rng, depth - 1), _rand_group_term(rng, depth - 1)))


# --- polynomials --------------------------------------------------------------


def test_polynomial_arithmetic_drops_zero_coefficients():
    assert (X + ONE) - ONE == X
    assert (X - X).terms == {}
    assert (X + ONE) ** 2 == X * X + Polynomial.const(2) * X + ONE


def test_poly_of_term_examples():
    x1, x2 = Polynomial.var(formal_arg(1)), Polynomial.var(formal_arg(2))
    interp = PolyInterpretation({"*": x1 + x2 + ONE, "e": ONE}, {"*": 2, "e": 0})
    assert poly_of_term(interp, T("*(e,x)")) == X + Polynomial.const(2)
    assert poly_of_term(interp, Var("x")) == X
    f = PolyInterpretation({"f": x1 ** 2 + ONE}, {"f": 1})
    assert poly_of_term(f, T("f(x)")) == X ** 2 + ONE


def test_uninterpreted_symbol():
    with pytest.raises(UninterpretedSymbol) as exc:
        poly_of_term(PolyInterpretation({}), T("g(x)"))
    assert exc.value.symbol == "g"


def test_interpretation_validation():
    with pytest.raises(OrderError):
        PolyInterpretation({"f": -Polynomial.var(formal_arg(1))}, {"f": 1})
    with pytest.raises(OrderError):
        PolyInterpretation({"f": Polynomial.var(formal_arg(2))}, {"f": 1})


def test_poly_compare_examples():
    assert poly_compare(X ** 2 + ONE, X) == GT
    assert poly_compare(X, X) == GE
    assert poly_compare(X, Y) == NGE
    ident = PolyInterpretation({"f": Polynomial.var(formal_arg(1))}, {"f": 1})
    assert order_compare(ident, T("f(x)"), T("f(x)")) == GE


def test_absorb_moves_are_recorded():
    residual, moves = absorb(X ** 2 - X)
    assert residual.terms == {}
    assert [(m.donor, m.deficit, m.amount) for m in moves] == [((("x", 2),), (("x", 1),), 1)]


def random_poly(rng, variables=("x", "y"), max_deg=3, max_coef=3, signed=False):
    terms = {}
    for ex in itertools.product(range(max_deg + 1), repeat=len(variables)):
        if sum(ex) > max_deg or rng.random() < 0.6:
            continue
        mono = tuple((v, e) for v, e in zip(variables, ex) if e)
        lo = -max_coef if signed else 0
        terms[mono] = rng.randint(lo, max_coef)
    return Polynomial(terms)


def test_absorb_residual_is_pointwise_bound():
    rng = random.Random(9)
    for _ in range(500):
        p = random_poly(rng, signed=True)
        residual, _ = absorb(p)
        for v in itertools.product(range(5), repeat=2):
            env = dict(zip("xy", v))
            # absorption only moves value downwards: p >= residual everywhere
            assert eval_poly(p, env) >= eval_poly(residual, env)


def test_poly_compare_sound_on_small_domain():
    rng = random.Random(4)
    for _ in range(500):
        pl, pr = random_poly(rng), random_poly(rng)
        d = poly_compare(pl, pr)
        for v in itertools.product(range(5), repeat=2):
            env = dict(zip("xy", v))
            if d == GT:
                assert eval_poly(pl, env) > eval_poly(pr, env)
            elif d == GE:
                assert eval_poly(pl, env) >= eval_poly(pr, env)
