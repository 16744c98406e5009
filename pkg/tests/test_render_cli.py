import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CORPUS, load
from cpfcert.checker import check
from cpfcert.cli import (
    combine_exit_codes,
    exit_code,
    format_verdict,
    main,
    verdict_from_json,
    verdict_to_json,
)
from cpfcert.model import (
    Assumption,
    Certified,
    PartiallyCertified,
    Rejected,
    UnknownProofStep,
    Unsupported,
    replace_at_label,
    walk,
)
from cpfcert.render import render_html, section_heads

CORPUS_FILES = sorted(p.name for p in CORPUS.glob("*.xml"))


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# --- rendering ----------------------------------------------------------------


def test_group_headings(group_cp):
    assert section_heads(render_html(group_cp)) == [
        "Completion Proof",
        "Input",
        "Proof",
        "1 Completion Proof",
        "1.1 Rule Removal",
        "1.2 Local Confluence Proof",
        "1.3 Equivalence Proof of R and E",
    ]


def test_render_is_deterministic(group_cp):
    assert render_html(group_cp) == render_html(load("group.proof.xml"))


def test_origin_line(group_cp):
    html = render_html(group_cp)
    assert f"by {group_cp.origin.tool_name} (version {group_cp.origin.tool_version})" in html


def test_assumption_flagged(group_cp):
    cp = group_cp.__class__(group_cp.input, group_cp.cpf_version,
                            replace_at_label(group_cp.proof, "1.1", Assumption("R terminates")),
                            group_cp.origin)
    html = render_html(cp)
    assert "ASSUMED:" in html and "R terminates" in html


def test_unknown_step_description_rendered(group_cp):
    cp = group_cp.__class__(group_cp.input, group_cp.cpf_version,
                            replace_at_label(group_cp.proof, "1.3", UnknownProofStep("new <method>")),
                            group_cp.origin)
    html = render_html(cp)
    assert "new &lt;method&gt;" in html


def _shape(cp):
    return tuple((label, type(node).__name__) for label, node in walk(cp.proof))


def test_outline_injective_on_corpus():
    outlines = {}
    for name in CORPUS_FILES:
        cp = load(name)
        outlines.setdefault(_shape(cp), set()).add(tuple(section_heads(render_html(cp))))
    # one outline per tree shape, and distinct shapes give distinct outlines
    assert all(len(v) == 1 for v in outlines.values())
    flat = [next(iter(v)) for v in outlines.values()]
    assert len(flat) == len(set(flat))


# --- CLI ----------------------------------------------------------------------


@pytest.mark.parametrize("name,code", [
    ("group.proof.xml", 0),
    ("group_tampered.xml", 1),
    ("group_partial.xml", 2),
    ("unsupported_input.xml", 3),
])
def test_check_exit_codes(name, code):
    got, out, _ = run("check", str(CORPUS / name))
    assert got == code
    if code == 0:
        assert out.strip() == "CERTIFIED"
    if code == 1:
        assert "proof/1.1" in out
    if code == 2:
        assert "R terminates" in out


def test_missing_file_is_io_error(tmp_path):
    code, _, err = run("check", str(tmp_path / "nope.xml"))
    assert code == 4 and "error" in err


def test_truncated_file_is_error(tmp_path):
    data = (CORPUS / "group.proof.xml").read_bytes()
    p = tmp_path / "cut.xml"
    p.write_bytes(data[:200])
    assert run("check", str(p))[0] == 4
    assert run("validate", str(p))[0] == 4


def test_validate_and_render(tmp_path):
    assert run("validate", str(CORPUS / "group.proof.xml"))[0] == 0
    out = tmp_path / "g.html"
    assert run("render", str(CORPUS / "group.proof.xml"), "-o", str(out))[0] == 0
    assert "1.3 Equivalence Proof of R and E" in out.read_text()


def test_multiple_files_take_max_severity():
    code, out, _ = run("check", str(CORPUS / "group.proof.xml"), str(CORPUS / "group_partial.xml"),
                       str(CORPUS / "unsupported_input.xml"))
    assert code == 3
    assert out.count("\n") >= 3
    assert combine_exit_codes([0, 2, 3, 1]) == 1
    assert combine_exit_codes([1, 4]) == 4


def test_json_output_round_trips():
    for name in CORPUS_FILES:
        code, out, _ = run("check", "--format", "json", str(CORPUS / name))
        data = json.loads(out)
        assert set(data) == {"file", "verdict", "path", "obligations", "reason"}
        v = check(load(name))
        assert verdict_from_json(data) == v
        assert exit_code(v) == code


verdicts = st.one_of(
    st.just(Certified()),
    st.builds(PartiallyCertified, st.lists(st.text(min_size=1), max_size=3).map(tuple)),
    st.builds(Rejected, st.text(min_size=1), st.text(min_size=1)),
    st.builds(Unsupported, st.text(min_size=1)),
)


@given(verdicts)
def test_json_round_trip_property(v):
    assert verdict_from_json(json.loads(json.dumps(verdict_to_json(v)))) == v


@given(verdicts)
def test_exit_code_depends_only_on_kind(v):
    assert exit_code(v) == {"CERTIFIED": 0, "REJECTED": 1, "PARTIALLY_CERTIFIED": 2,
                            "UNSUPPORTED": 3}[v.kind]
    assert format_verdict(v)


def test_fuel_flag_and_env(monkeypatch):
    path = str(CORPUS / "group.proof.xml")
    assert run("check", "--fuel", "0", path)[0] == 1
    monkeypatch.setenv("CPFCERT_FUEL", "0")
    assert run("check", path)[0] == 1
    # flag wins over env
    assert run("check", "--fuel", "10000", path)[0] == 0
    monkeypatch.setenv("CPFCERT_FUEL", "junk")
    assert run("check", path)[0] == 0


def test_bad_arguments():
    assert run()[0] == 4
    assert run("check", "--fuel", "-1", str(CORPUS / "group.proof.xml"))[0] == 4
