import copy
import random
import xml.etree.ElementTree as ET

import pytest

from conftest import CORPUS, load
from cpfcert.checker import check
from cpfcert.cpf_io import (
    STYLESHEET,
    ParseError,
    SchemaError,
    parse_certificate,
    serialize_certificate,
    validate_schema,
)
from cpfcert.model import (
    CertificationProblem,
    RIsEmpty,
    TrsInput,
    UnknownProofStep,
    node_at,
    validate_structure,
    walk,
)
from cpfcert.terms import Trs

CORPUS_FILES = sorted(p.name for p in CORPUS.glob("*.xml"))


@pytest.mark.parametrize("name", CORPUS_FILES)
def test_round_trip(name):
    cp = load(name)
    again = parse_certificate(serialize_certificate(cp))
    assert again == cp
    assert validate_structure(again) == validate_structure(cp)


def test_corpus_is_schema_valid():
    for name in CORPUS_FILES:
        assert validate_schema((CORPUS / name).read_bytes()) == [], name


def test_serializer_output_shape(group_cp):
    data = serialize_certificate(group_cp, stylesheet=STYLESHEET)
    text = data.decode("utf-8")
    assert text.startswith("<?xml")
    assert f'href="{STYLESHEET}"' in text
    assert "\n  <input>" in text


def test_empty_trs_serializes_with_empty_rules():
    cp = CertificationProblem(TrsInput(Trs(())), "2.1", RIsEmpty())
    assert b"<rules />" in serialize_certificate(cp) or b"<rules/>" in serialize_certificate(cp)
    assert parse_certificate(serialize_certificate(cp)) == cp


def _tree(name):
    return ET.fromstring((CORPUS / name).read_bytes())


def test_missing_version_reports_four_children():
    root = _tree("group.proof.xml")
    root.remove(root.find("cpfVersion"))
    with pytest.raises(SchemaError) as exc:
        parse_certificate(ET.tostring(root))
    assert exc.value.path == "/certificationProblem"
    assert exc.value.reason == "expected 4 children"


def test_unknown_proof_element_degrades(corpus):
    cp = load("dp_unknown.xml")
    assert cp.proof == UnknownProofStep("dpProof")


def test_truncated_file_gives_one_parse_error(corpus):
    data = (corpus / "group.proof.xml").read_bytes()
    errors = validate_schema(data[: len(data) // 2])
    assert len(errors) == 1 and isinstance(errors[0], ParseError)
    with pytest.raises(ParseError):
        parse_certificate(data[: len(data) // 2])


def test_rule_with_three_children():
    root = _tree("orthogonal.xml")
    rule = root.find("input/trsInput/trs/rules/rule")
    rule.append(copy.deepcopy(rule.find("rhs")))
    errors = validate_schema(ET.tostring(root))
    assert len(errors) == 1
    assert errors[0].path == "/certificationProblem/input/trsInput/trs/rules/rule[1]"


def test_bad_version_rejected():
    root = _tree("orthogonal.xml")
    root.find("cpfVersion").text = "1.0"
    assert [e.path for e in validate_schema(ET.tostring(root))] == ["/certificationProblem/cpfVersion"]


def test_malformed_known_element_degrades():
    root = _tree("group.proof.xml")
    removal = root.find("proof/completionProof/terminationProof/ruleRemoval")
    removal.remove(removal.find("trs"))
    cp = parse_certificate(ET.tostring(root))
    node = node_at(cp.proof, "1.1")
    assert isinstance(node, UnknownProofStep) and node.description.startswith("malformed ruleRemoval")


# --- random mutation --------------------------------------------------------


def _mutate(rng, root):
    proof_root = root.find("proof")[0]
    nodes = [e for e in proof_root.iter()]
    target = rng.choice(nodes)
    op = rng.randrange(7)
    kids = list(target)
    if op == 0 and kids:
        target.remove(rng.choice(kids))
    elif op == 1 and kids:
        target.append(copy.deepcopy(rng.choice(kids)))
    elif op == 2:
        target.tag = rng.choice(["foo", "var", "funapp", "rule", "ruleRemoval", "loop", "newman",
                                 "arg", "conversionStep", target.tag + "X"])
    elif op == 3:
        target.text = rng.choice(["", "x", "-1", "abc", "1.2", "é"])
    elif op == 4:
        attr = rng.choice(["w0", "weight", "position", "rule", "equation", "direction", "fuel",
                           "context", "index", "exponent", "coefficient", "arity", "name", "var"])
        target.set(attr, rng.choice(["0", "-3", "x", "", "1.0.2", "ltr", "9999", "1"]))
    elif op == 5 and len(kids) > 1:
        i, j = rng.sample(range(len(kids)), 2)
        kids[i], kids[j] = kids[j], kids[i]
        for k in list(target):
            target.remove(k)
        target.extend(kids)
    else:
        target.append(copy.deepcopy(rng.choice(nodes)))


def test_random_proof_mutations_never_crash():
    rng = random.Random(2024)
    names = [n for n in CORPUS_FILES if n != "unsupported_input.xml"]
    for _ in range(1000):
        root = _tree(rng.choice(names))
        for _ in range(rng.randint(1, 3)):
            _mutate(rng, root)
        cp = parse_certificate(ET.tostring(root))
        assert cp is not None
        if not validate_structure(cp):
            check(cp, fuel=500)


def test_random_mutations_anywhere_raise_only_documented_errors():
    rng = random.Random(99)
    for _ in range(300):
        data = bytearray((CORPUS / rng.choice(CORPUS_FILES)).read_bytes())
        for _ in range(rng.randint(1, 4)):
            i = rng.randrange(len(data))
            data[i] = rng.choice(b"<>/ax1\"=")
        errors = validate_schema(bytes(data))
        try:
            parse_certificate(bytes(data))
            assert errors == []
        except (ParseError, SchemaError) as e:
            assert errors and str(errors[0]) == str(e)


def test_walk_covers_unknown_subproofs():
    cp = load("modular_confluence.xml")
    labels = [label for label, _ in walk(cp.proof)]
    assert labels[0] == "1" and len(labels) > 1
