"""XML reading and writing of certificates.

The dialect (documented in README.md) keeps ``certificationProblem`` with
its four children input / cpfVersion / proof / origin.  Inside ``<proof>``
nothing is fatal: unknown or malformed proof elements become
``UnknownProofStep`` nodes so the rest of the proof can still be checked.
Outside ``<proof>`` vocabulary violations are ``SchemaError``s.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from typing import Optional

from .model import (
    DERIVED,
    EQUATION,
    LTR,
    RTL,
    Assumption,
    CertificationProblem,
    CompletionInput,
    CompletionProof,
    ConversionStep,
    EquivalenceProof,
    LoopProof,
    LoopStep,
    LoopWitness,
    NewmanProof,
    Origin,
    OrthogonalityProof,
    RIsEmpty,
    RuleRemoval,
    RuleSubsumption,
    TrsInput,
    UnknownProofStep,
    UnsupportedInput,
    WcrCriticalPairsJoinable,
)
from .orders import KboParams, OrderError, PolyInterpretation, Polynomial, Precedence, formal_arg
from .terms import App, ArityError, Equation, EquationalSystem, Rule, Trs, Var

STYLESHEET = "cpfHTML.xsl"
_VERSION = re.compile(r"2\.\d+(\.\d+)*$")


class ParseError(Exception):
    """The input is not well-formed XML."""

    def __init__(self, line: int, column: int, reason: str):
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line, self.column, self.reason = line, column, reason


class SchemaError(Exception):
    """Well-formed XML that does not follow the certificate vocabulary."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path, self.reason = path, reason


def _xml(data) -> ET.Element:
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        return ET.fromstring(data)
    except ET.ParseError as e:
        line, col = e.position
        raise ParseError(line, col, str(e).split(":")[0]) from None
    except (LookupError, ValueError) as e:
        # e.g. an unknown encoding in the XML declaration
        raise ParseError(1, 0, str(e)) from None


def _kids(el: ET.Element) -> list:
    return [c for c in el if isinstance(c.tag, str)]


def _text(el: ET.Element) -> str:
    return (el.text or "").strip()


def _int(value: Optional[str], path: str, what: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise SchemaError(path, f"{what} must be an integer, got {value!r}") from None


def _position(value: Optional[str], path: str) -> tuple:
    if not value or value in ("root", "ε"):
        return ()
    try:
        pos = tuple(int(p) for p in value.split("."))
    except ValueError:
        raise SchemaError(path, f"bad position {value!r}") from None
    if any(p < 1 for p in pos):
        raise SchemaError(path, f"bad position {value!r}")
    return pos


# --- reading ---------------------------------------------------------------


class _Reader:
    def __init__(self):
        self.errors: list = []

    # terms and rules raise SchemaError; callers decide whether to collect

    def term(self, el, path):
        if el.tag == "var":
            name = _text(el)
            if not name or _kids(el):
                raise SchemaError(path, "var needs a name and no children")
            return Var(name)
        if el.tag == "funapp":
            kids = _kids(el)
            if not kids or kids[0].tag != "name" or not _text(kids[0]):
                raise SchemaError(path, "funapp needs a name first")
            args = []
            for i, a in enumerate(kids[1:], 1):
                apath = f"{path}/arg[{i}]"
                if a.tag != "arg" or len(_kids(a)) != 1:
                    raise SchemaError(apath, "expected arg with exactly one term")
                args.append(self.term(_kids(a)[0], apath))
            return App(_text(kids[0]), tuple(args))
        raise SchemaError(path, f"expected var or funapp, got {el.tag}")

    def single_term(self, el, path):
        kids = _kids(el)
        if len(kids) != 1:
            raise SchemaError(path, f"{el.tag} must contain exactly one term")
        return self.term(kids[0], f"{path}/{kids[0].tag}")

    def rule(self, el, path, cls=Rule):
        kids = _kids(el)
        if el.tag != "rule" or [k.tag for k in kids] != ["lhs", "rhs"]:
            raise SchemaError(path, "expected rule with lhs and rhs")
        return cls(self.single_term(kids[0], f"{path}/lhs"), self.single_term(kids[1], f"{path}/rhs"))

    def rules(self, el, path, cls=Rule, collect=True):
        kids = _kids(el)
        if len(kids) != 1 or kids[0].tag != "rules":
            raise SchemaError(path, "expected a single rules element")
        out = []
        for i, r in enumerate(_kids(kids[0]), 1):
            try:
                out.append(self.rule(r, f"{path}/rules/rule[{i}]", cls))
            except SchemaError as e:
                if not collect:
                    raise
                self.errors.append(e)
        return out

    def trs(self, el, path, collect=True) -> Trs:
        rules = self.rules(el, path, collect=collect)
        try:
            return Trs(tuple(rules))
        except ArityError as e:
            raise SchemaError(path, str(e)) from None

    def substitution(self, el, path) -> dict:
        out = {}
        for i, b in enumerate(_kids(el), 1):
            bpath = f"{path}/binding[{i}]"
            if b.tag != "binding" or not b.get("var"):
                raise SchemaError(bpath, "expected binding with a var attribute")
            out[b.get("var")] = self.single_term(b, bpath)
        return {x: t for x, t in out.items() if t != Var(x)}

    # top level

    def certificate(self, root) -> Optional[CertificationProblem]:
        path = "/certificationProblem"
        if root.tag != "certificationProblem":
            self.errors.append(SchemaError("/" + root.tag, "root must be certificationProblem"))
            return None
        kids = _kids(root)
        if [k.tag for k in kids] != ["input", "cpfVersion", "proof", "origin"]:
            reason = "expected 4 children" if len(kids) != 4 else "expected input, cpfVersion, proof, origin"
            self.errors.append(SchemaError(path, reason))
            return None
        inp = self._guard(lambda: self.input(kids[0], f"{path}/input"))
        version = _text(kids[1])
        if not _VERSION.match(version):
            self.errors.append(SchemaError(f"{path}/cpfVersion", f"unsupported version {version!r}"))
        proof_kids = _kids(kids[2])
        if len(proof_kids) != 1:
            self.errors.append(SchemaError(f"{path}/proof", "proof must contain exactly one element"))
            proof = None
        else:
            proof = self.node(proof_kids[0])
        origin = self._guard(lambda: self.origin(kids[3], f"{path}/origin"))
        if self.errors:
            return None
        return CertificationProblem(inp, version, proof, origin)

    def _guard(self, fn):
        try:
            return fn()
        except SchemaError as e:
            self.errors.append(e)
        except RecursionError:
            self.errors.append(SchemaError("/certificationProblem", "nested too deeply"))
        return None

    def input(self, el, path):
        kids = _kids(el)
        if len(kids) != 1:
            raise SchemaError(path, "input must contain exactly one element")
        inp = kids[0]
        ipath = f"{path}/{inp.tag}"
        match inp.tag:
            case "trsInput":
                parts = _kids(inp)
                if [p.tag for p in parts] != ["trs"]:
                    raise SchemaError(ipath, "expected a trs")
                return TrsInput(self.trs(parts[0], f"{ipath}/trs"))
            case "completionInput":
                parts = _kids(inp)
                if [p.tag for p in parts] != ["equations", "trs"]:
                    raise SchemaError(ipath, "expected equations and trs")
                eqs = self.rules(parts[0], f"{ipath}/equations", Equation)
                try:
                    system = EquationalSystem(tuple(eqs))
                except ArityError as e:
                    raise SchemaError(f"{ipath}/equations", str(e)) from None
                return CompletionInput(system, self.trs(parts[1], f"{ipath}/trs"))
        return UnsupportedInput(inp.tag)

    def origin(self, el, path) -> Origin:
        name = version = notes = None
        for k in _kids(el):
            if k.tag == "tool":
                for t in _kids(k):
                    if t.tag == "name":
                        name = _text(t)
                    elif t.tag == "version":
                        version = _text(t)
                    else:
                        raise SchemaError(f"{path}/tool/{t.tag}", "unexpected element")
            elif k.tag == "notes":
                notes = _text(k)
            else:
                raise SchemaError(f"{path}/{k.tag}", "unexpected element")
        return Origin(name, version, notes)

    # proof nodes never raise

    def node(self, el):
        try:
            return self._node(el)
        except _Unknown:
            return UnknownProofStep(el.tag)
        except (SchemaError, OrderError, ArityError, ValueError) as e:
            return UnknownProofStep(f"malformed {el.tag}: {e}")
        except RecursionError:
            return UnknownProofStep(f"malformed {el.tag}: nested too deeply")

    def _slot(self, el, tag):
        if el.tag != tag:
            raise SchemaError(el.tag, f"expected {tag}")
        kids = _kids(el)
        if len(kids) != 1:
            raise SchemaError(tag, "expected exactly one proof element")
        return self.node(kids[0])

    def _node(self, el):
        kids = _kids(el)
        tags = [k.tag for k in kids]
        here = el.tag
        match el.tag:
            case "completionProof":
                if tags != ["wcrProof", "terminationProof", "equivalenceProof"]:
                    raise SchemaError(here, "expected wcrProof, terminationProof, equivalenceProof")
                wcr, term, eq = (self._slot(k, k.tag) for k in kids)
                return CompletionProof(wcr=wcr, termination=term, equivalence=eq)
            case "ruleRemoval":
                if tags[:2] != ["orderingConstraintProof", "trs"] or len(kids) != 3:
                    raise SchemaError(here, "expected orderingConstraintProof, trs and a subproof")
                return RuleRemoval(self.order(kids[0]), self.trs(kids[1], "trs", collect=False),
                                   self.node(kids[2]))
            case "rIsEmpty" if not kids:
                return RIsEmpty()
            case "orthogonality" if not kids:
                return OrthogonalityProof()
            case "criticalPairsJoinable" if not kids:
                fuel = el.get("fuel")
                return WcrCriticalPairsJoinable(None if fuel is None else _int(fuel, here, "fuel"))
            case "newman":
                if tags != ["terminationProof", "wcrProof"]:
                    raise SchemaError(here, "expected terminationProof and wcrProof")
                return NewmanProof(self._slot(kids[0], "terminationProof"), self._slot(kids[1], "wcrProof"))
            case "equivalenceBySimulation":
                subs = []
                for i, k in enumerate(kids, 1):
                    if k.tag == "equationsJoinByNormalForms" and i == len(kids):
                        continue
                    subs.append(self.subsumption(k, f"ruleSubsumptionProof[{i}]"))
                return EquivalenceProof(tuple(subs))
            case "loop":
                return LoopProof(self.loop(el))
            case "assumption" if not kids:
                return Assumption(_text(el))
            case "unknownProofStep":
                return self.unknown(el)
        raise _Unknown()

    def order(self, el):
        kids = _kids(el)
        if len(kids) != 1:
            raise SchemaError("orderingConstraintProof", "expected exactly one order")
        o = kids[0]
        if o.tag == "knuthBendixOrder":
            w0 = _int(o.get("w0"), o.tag, "w0")
            weights, arities, pairs = {}, {}, []
            for k in _kids(o):
                if k.tag == "symbol":
                    name = k.get("name")
                    if not name:
                        raise SchemaError(o.tag, "symbol without name")
                    arities[name] = _int(k.get("arity"), o.tag, "arity")
                    if k.get("weight") is not None:
                        weights[name] = _int(k.get("weight"), o.tag, "weight")
                elif k.tag == "greater":
                    if not k.get("name") or not k.get("than"):
                        raise SchemaError(o.tag, "greater needs name and than")
                    pairs.append((k.get("name"), k.get("than")))
                else:
                    raise SchemaError(o.tag, f"unexpected {k.tag}")
            return KboParams(w0, weights, Precedence(tuple(pairs)), arities)
        if o.tag == "polynomialInterpretation":
            interps, arities = {}, {}
            for k in _kids(o):
                if k.tag != "interpret" or not k.get("name"):
                    raise SchemaError(o.tag, "expected interpret elements")
                name = k.get("name")
                arities[name] = _int(k.get("arity"), o.tag, "arity")
                poly = Polynomial()
                for m in _kids(k):
                    if m.tag != "monomial":
                        raise SchemaError(o.tag, f"unexpected {m.tag}")
                    mono = Polynomial.const(_int(m.get("coefficient", "1"), o.tag, "coefficient"))
                    for pw in _kids(m):
                        idx = _int(pw.get("index"), o.tag, "index")
                        exp = _int(pw.get("exponent", "1"), o.tag, "exponent")
                        if pw.tag != "power" or exp < 1:
                            raise SchemaError(o.tag, "expected power with a positive exponent")
                        mono = mono * Polynomial.var(formal_arg(idx), exp)
                    poly = poly + mono
                interps[name] = poly
            return PolyInterpretation(interps, arities)
        raise SchemaError("orderingConstraintProof", f"unsupported order {o.tag}")

    def subsumption(self, el, path) -> RuleSubsumption:
        kids = _kids(el)
        if el.tag != "ruleSubsumptionProof" or [k.tag for k in kids] != ["rule", "conversion"]:
            raise SchemaError(path, "expected ruleSubsumptionProof with rule and conversion")
        rule = self.rule(kids[0], f"{path}/rule")
        steps = []
        for j, s in enumerate(_kids(kids[1]), 1):
            spath = f"{path}/conversion/conversionStep[{j}]"
            if s.tag != "conversionStep":
                raise SchemaError(spath, "expected conversionStep")
            parts = {k.tag: k for k in _kids(s)}
            if set(parts) - {"source", "target", "substitution"} or not {"source", "target"} <= set(parts):
                raise SchemaError(spath, "expected source, target and optional substitution")
            if (s.get("equation") is None) == (s.get("rule") is None):
                raise SchemaError(spath, "exactly one of equation/rule must be given")
            ref = (EQUATION, _int(s.get("equation"), spath, "equation") - 1) if s.get("equation") else \
                (DERIVED, _int(s.get("rule"), spath, "rule") - 1)
            direction = s.get("direction", LTR)
            if direction not in (LTR, RTL):
                raise SchemaError(spath, f"bad direction {direction!r}")
            sigma = self.substitution(parts["substitution"], spath) if "substitution" in parts else None
            steps.append(ConversionStep(
                self.single_term(parts["source"], f"{spath}/source"),
                self.single_term(parts["target"], f"{spath}/target"),
                ref, _position(s.get("position"), spath), direction, sigma))
        return RuleSubsumption(rule, tuple(steps))

    def loop(self, el) -> LoopWitness:
        parts = {k.tag: k for k in _kids(el)}
        if set(parts) != {"startTerm", "rewriteSequence", "substitution"}:
            raise SchemaError("loop", "expected startTerm, rewriteSequence, substitution")
        steps = []
        for i, s in enumerate(_kids(parts["rewriteSequence"]), 1):
            spath = f"loop/step[{i}]"
            if s.tag != "step":
                raise SchemaError(spath, "expected step")
            sp = {k.tag: k for k in _kids(s)}
            sigma = self.substitution(sp["substitution"], spath) if "substitution" in sp else {}
            result = self.single_term(sp["result"], spath) if "result" in sp else None
            steps.append(LoopStep(_int(s.get("rule"), spath, "rule") - 1,
                                  _position(s.get("position"), spath), sigma, result))
        return LoopWitness(self.single_term(parts["startTerm"], "loop/startTerm"), tuple(steps),
                           _position(el.get("context"), "loop"),
                           self.substitution(parts["substitution"], "loop/substitution"))

    def unknown(self, el) -> UnknownProofStep:
        desc = prop = None
        subs, goals = [], []
        for k in _kids(el):
            if k.tag == "description":
                desc = _text(k)
            elif k.tag == "property":
                prop = _text(k)
            elif k.tag == "subproof":
                parts = _kids(k)
                goal = None
                if parts and parts[0].tag == "trs":
                    goal = self.trs(parts[0], "subproof/trs", collect=False)
                    parts = parts[1:]
                if len(parts) != 1:
                    raise SchemaError("subproof", "expected exactly one proof element")
                subs.append(self.node(parts[0]))
                goals.append(goal)
            else:
                raise SchemaError(k.tag, "unexpected element in unknownProofStep")
        if not desc:
            raise SchemaError("unknownProofStep", "missing description")
        if all(g is None for g in goals):
            goals = []
        return UnknownProofStep(desc, tuple(subs), prop, tuple(goals))


class _Unknown(Exception):
    pass


def parse_certificate(data) -> CertificationProblem:
    """Parse bytes (or str) into a certificate.

    Raises ParseError for malformed XML and SchemaError for the first
    vocabulary violation outside ``<proof>``.
    """
    reader = _Reader()
    cp = reader.certificate(_xml(data))
    if reader.errors:
        raise reader.errors[0]
    return cp


def validate_schema(data) -> list:
    """All ParseError/SchemaError problems; empty iff parse_certificate succeeds."""
    try:
        root = _xml(data)
    except ParseError as e:
        return [e]
    reader = _Reader()
    reader.certificate(root)
    return reader.errors


# --- writing ---------------------------------------------------------------


def _sub(parent, tag, text=None, **attrs):
    el = ET.SubElement(parent, tag, {k: str(v) for k, v in attrs.items() if v is not None})
    if text is not None:
        el.text = text
    return el


def _fmt_pos(pos) -> Optional[str]:
    return ".".join(map(str, pos)) if pos else None


def _w_term(parent, t):
    if isinstance(t, Var):
        _sub(parent, "var", t.name)
        return
    f = _sub(parent, "funapp")
    _sub(f, "name", t.fun)
    for a in t.args:
        _w_term(_sub(f, "arg"), a)


def _w_rules(parent, rules):
    rs = _sub(parent, "rules")
    for r in rules:
        rule = _sub(rs, "rule")
        _w_term(_sub(rule, "lhs"), r.lhs)
        _w_term(_sub(rule, "rhs"), r.rhs)


def _w_subst(parent, sigma):
    s = _sub(parent, "substitution")
    for x in sorted(sigma):
        _w_term(_sub(s, "binding", var=x), sigma[x])


def _w_order(parent, order):
    if isinstance(order, KboParams):
        o = _sub(parent, "knuthBendixOrder", w0=order.w0)
        for f in sorted(set(order.arities) | set(order.weights)):
            _sub(o, "symbol", name=f, arity=order.arities.get(f), weight=order.weights.get(f))
        for f, g in order.precedence.pairs:
            _sub(o, "greater", name=f, than=g)
        return
    o = _sub(parent, "polynomialInterpretation")
    for f in sorted(order.interpretations):
        i = _sub(o, "interpret", name=f, arity=order.arities.get(f))
        for mono, c in sorted(order.interpretations[f].terms.items()):
            m = _sub(i, "monomial", coefficient=c)
            for x, e in mono:
                _sub(m, "power", index=x.removeprefix("x_"), exponent=e)


def _w_node(parent, node):
    match node:
        case CompletionProof(wcr, termination, equivalence):
            el = _sub(parent, "completionProof")
            _w_node(_sub(el, "wcrProof"), wcr)
            _w_node(_sub(el, "terminationProof"), termination)
            _w_node(_sub(el, "equivalenceProof"), equivalence)
        case RuleRemoval(order, remaining, subproof):
            el = _sub(parent, "ruleRemoval")
            _w_order(_sub(el, "orderingConstraintProof"), order)
            _w_rules(_sub(el, "trs"), remaining)
            _w_node(el, subproof)
        case RIsEmpty():
            _sub(parent, "rIsEmpty")
        case OrthogonalityProof():
            _sub(parent, "orthogonality")
        case WcrCriticalPairsJoinable(fuel):
            _sub(parent, "criticalPairsJoinable", fuel=fuel)
        case NewmanProof(termination, wcr):
            el = _sub(parent, "newman")
            _w_node(_sub(el, "terminationProof"), termination)
            _w_node(_sub(el, "wcrProof"), wcr)
        case EquivalenceProof(subsumptions):
            el = _sub(parent, "equivalenceBySimulation")
            for sub in subsumptions:
                s = _sub(el, "ruleSubsumptionProof")
                rule = _sub(s, "rule")
                _w_term(_sub(rule, "lhs"), sub.rule.lhs)
                _w_term(_sub(rule, "rhs"), sub.rule.rhs)
                conv = _sub(s, "conversion")
                for step in sub.conversion:
                    kind, idx = step.ref
                    c = _sub(conv, "conversionStep", **{kind: idx + 1},
                             position=_fmt_pos(step.position), direction=step.direction)
                    _w_term(_sub(c, "source"), step.source)
                    _w_term(_sub(c, "target"), step.target)
                    if step.substitution is not None:
                        _w_subst(c, step.substitution)
            _sub(el, "equationsJoinByNormalForms")
        case LoopProof(w):
            el = _sub(parent, "loop", context=_fmt_pos(w.context))
            _w_term(_sub(el, "startTerm"), w.start)
            seq = _sub(el, "rewriteSequence")
            for step in w.steps:
                s = _sub(seq, "step", rule=step.rule + 1, position=_fmt_pos(step.position))
                _w_subst(s, step.substitution)
                if step.result is not None:
                    _w_term(_sub(s, "result"), step.result)
            _w_subst(el, w.substitution)
        case Assumption(claim):
            _sub(parent, "assumption", claim)
        case UnknownProofStep(description, subproofs, prop):
            el = _sub(parent, "unknownProofStep")
            _sub(el, "description", description)
            if prop is not None:
                _sub(el, "property", prop)
            for i, sub in enumerate(subproofs):
                s = _sub(el, "subproof")
                goal = node.subgoal(i)
                if goal is not None:
                    _w_rules(_sub(s, "trs"), goal)
                _w_node(s, sub)
        case _:
            raise TypeError(f"cannot serialize {node!r}")


def to_element(cp: CertificationProblem) -> ET.Element:
    root = ET.Element("certificationProblem")
    inp = _sub(root, "input")
    match cp.input:
        case TrsInput(trs):
            _w_rules(_sub(_sub(inp, "trsInput"), "trs"), trs)
        case CompletionInput(eqs, trs):
            ci = _sub(inp, "completionInput")
            _w_rules(_sub(ci, "equations"), eqs)
            _w_rules(_sub(ci, "trs"), trs)
        case UnsupportedInput(element):
            _sub(inp, element)
    _sub(root, "cpfVersion", cp.cpf_version)
    _w_node(_sub(root, "proof"), cp.proof)
    origin = _sub(root, "origin")
    o = cp.origin
    if o.tool_name is not None or o.tool_version is not None:
        tool = _sub(origin, "tool")
        if o.tool_name is not None:
            _sub(tool, "name", o.tool_name)
        if o.tool_version is not None:
            _sub(tool, "version", o.tool_version)
    if o.notes is not None:
        _sub(origin, "notes", o.notes)
    return root


def serialize_certificate(cp: CertificationProblem, stylesheet: Optional[str] = None) -> bytes:
    """Canonical UTF-8 bytes with 2-space indentation.

    ``stylesheet`` adds an ``xml-stylesheet`` processing instruction so a
    browser can render the file through an external XSL sheet.
    """
    root = to_element(cp)
    ET.indent(root, space="  ")
    head = '<?xml version="1.0" encoding="UTF-8"?>\n'
    if stylesheet:
        head += f'<?xml-stylesheet type="text/xsl" href="{stylesheet}"?>\n'
    return (head + ET.tostring(root, encoding="unicode") + "\n").encode("utf-8")
