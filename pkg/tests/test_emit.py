import json
import shutil
import subprocess

import jsonschema
import pytest

from arraywitness import (
    EmitConfig,
    classify_all,
    emit_report,
    emit_verifiable,
    parse,
    strip_scaffolding,
    transform_with_info,
)
from arraywitness.emit import EmitError, ND_STYLES, REPORT_SCHEMA

from conftest import load_fixture


@pytest.mark.parametrize("style", ND_STYLES)
@pytest.mark.parametrize("name", ["fig1.c", "fig5.c", "fig7.c"])
def test_strip_round_trip(style, name):
    result = transform_with_info(load_fixture(name))
    text = emit_verifiable(result.program, EmitConfig(style))
    assert parse(strip_scaffolding(text)) == result.program


def test_markers_and_style_calls(fig1):
    result = transform_with_info(fig1)
    cbmc = emit_verifiable(result.program, EmitConfig("cbmc"))
    assert "/* --- begin program --- */" in cbmc
    assert "nondet_int()" in cbmc and "__CPROVER_assume" in cbmc
    svcomp = emit_verifiable(result.program, EmitConfig("svcomp"))
    assert "__VERIFIER_nondet_int()" in svcomp and "__VERIFIER_assume" in svcomp


def test_emitted_c_has_no_arrays_or_loops(fig7):
    result = transform_with_info(fig7)
    text = emit_verifiable(result.program, EmitConfig("cbmc"))
    region = text.split("begin program")[1]
    assert "[" not in region
    assert "for (" not in region  # fig7 needs no single-trip loop


def test_emit_rejects_nonconformant_program(fig1):
    with pytest.raises(EmitError):
        emit_verifiable(fig1, EmitConfig("cbmc"))


@pytest.mark.skipif(shutil.which("gcc") is None, reason="gcc not available")
def test_stub_style_compiles_and_runs(tmp_path, fig1_small):
    result = transform_with_info(fig1_small)
    src = tmp_path / "t.c"
    src.write_text(emit_verifiable(result.program, EmitConfig("stub")))
    exe = tmp_path / "t"
    subprocess.run(["gcc", "-std=c99", "-o", str(exe), str(src)], check=True)
    # i_a = 0; every unranged nd() reads 0 as well.
    proc = subprocess.run(
        [str(exe)], env={"ND_CHOICES": "0,0,0,0,0,0,0,0"}, capture_output=True
    )
    assert proc.returncode == 0


def test_report_validates_against_schema(fig7):
    result = transform_with_info(fig7)
    fig7_src = load_fixture("fig7.c")
    doc = json.loads(
        emit_report(result.arrays, result.summaries, classify_all(fig7_src))
    )
    jsonschema.validate(doc, REPORT_SCHEMA)


def test_report_content(fig1):
    result = transform_with_info(fig1)
    doc = json.loads(emit_report(result.arrays, result.summaries, classify_all(fig1)))
    assert [a["name"] for a in doc["arrays"]] == ["a_p", "a_q"]
    assert all(a["size"] == 100000 for a in doc["arrays"])
    first_loop = doc["loops"][0]
    assert first_loop["full_access"] is True
    assert first_loop["defs"] == ["k"]
    assert first_loop["bound"] == {"kind": "known", "lo": 0, "hi": 99999}
    (assertion,) = doc["assertions"]
    assert assertion["precise"] is True


def test_report_is_deterministic(fig7):
    result = transform_with_info(fig7)
    verdicts = classify_all(fig7)
    a = emit_report(result.arrays, result.summaries, verdicts)
    b = emit_report(result.arrays, result.summaries, verdicts)
    assert a == b


def test_report_for_program_without_arrays():
    p = parse("int x;\nmain() { x = 1; }")
    result = transform_with_info(p)
    doc = json.loads(emit_report(result.arrays, result.summaries, classify_all(p)))
    assert doc == {"arrays": [], "loops": [], "assertions": []}
