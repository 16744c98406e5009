"""Small standard systems used by the corpus, the scripts and the tests."""

from .orders import KboParams, Precedence
from .terms import Equation, EquationalSystem, parse_rule, parse_trs

# group theory in prefix notation; "*" is the group operation, e the unit
GROUP_EQUATIONS = EquationalSystem(tuple(
    Equation(r.lhs, r.rhs)
    for r in map(parse_rule, [
        "*(*(x,y),z) -> *(x,*(y,z))",
        "*(e,x) -> x",
        "*(inv(x),x) -> e",
    ])
))

GROUP_RULES = parse_trs([
    "*(*(x,y),z) -> *(x,*(y,z))",
    "*(e,x) -> x",
    "*(inv(x),x) -> e",
    "*(inv(x),*(x,z)) -> *(e,z)",
    "inv(e) -> e",
    "*(x,e) -> x",
    "inv(inv(x)) -> x",
    "*(x,inv(x)) -> e",
    "*(x,*(inv(x),z)) -> z",
    "inv(*(y,x)) -> *(inv(x),inv(y))",
])

GROUP_ARITIES = {"*": 2, "inv": 1, "e": 0}

# one admissible witness orienting every group rule (see scripts/kbo_witness_search.py)
GROUP_KBO = KboParams(
    w0=1,
    weights={"e": 1, "*": 0, "inv": 0},
    precedence=Precedence.chain("inv", "*", "e"),
    arities=GROUP_ARITIES,
)
