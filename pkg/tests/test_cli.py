import itertools
import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2glue import cli
from g2glue.config import (
    FIXTURES,
    ParseError,
    ValidationError,
    config_to_dict,
    emit_config,
    fixture_text,
    load_fixture,
    parse_config,
    parse_text,
)
from g2glue.gluing import FlatConnectionRep
from g2glue.report import emit_report, run

IDENT = [[int(i == j) for j in range(7)] for i in range(7)]
PHI0_INDICES = [(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)]
# diagonal sign changes fixing phi0: every monomial keeps its sign
G2_SIGNS = [
    s
    for s in itertools.product((1, -1), repeat=7)
    if all(s[i - 1] * s[j - 1] * s[k - 1] == 1 for i, j, k in PHI0_INDICES)
]


def toml_matrix(m):
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in m) + "]"


def run_cli(capsysbinary, *argv):
    code = cli.main(list(argv))
    out = capsysbinary.readouterr().out
    return code, out


# --- config parsing ------------------------------------------------------------


def test_all_fixtures_parse():
    for name in FIXTURES:
        cfg = load_fixture(name)
        assert cfg.digest and len(cfg.digest) == 64


def test_example1_fixture_shape():
    cfg = load_fixture("example1")
    assert list(cfg.generators) == ["alpha", "beta", "gamma", "sigma2", "sigma3"]
    assert cfg.generators["beta"].translation[5] == Fraction(1, 2)
    assert cfg.representation.assignment["sigma3"].name() == "b"


def test_empty_generators_is_plain_torus():
    cfg = parse_text("[generators]\n")
    assert cfg.generators == {}
    assert cfg.presentation().group().order == 1
    assert cfg.presentation().singular_set().strata == []


def test_non_integral_linear_entry():
    m = [row[:] for row in IDENT]
    m[0][0] = '"1/2"'
    text = f"[generators.g]\nlinear = {toml_matrix(m)}\n"
    with pytest.raises(ValidationError) as err:
        parse_text(text)
    assert "generators.g.linear[0][0]" in str(err.value)


def test_non_orthogonal_linear_part():
    m = [row[:] for row in IDENT]
    m[0][1] = 1
    with pytest.raises(ValidationError):
        parse_text(f"[generators.g]\nlinear = {toml_matrix(m)}\n")


def test_float_rejected():
    text = f'[generators.g]\nlinear = {toml_matrix(IDENT)}\ntranslation = [0.5, 0, 0, 0, 0, 0, 0]\n'
    with pytest.raises(ValidationError) as err:
        parse_text(text)
    assert "exact rational" in str(err.value)


def test_parse_error_has_location():
    with pytest.raises(ParseError) as err:
        parse_text("[generators\nfoo = 1\n", "bad.toml")
    assert "bad.toml" in str(err.value) and "line 1" in str(err.value)


@pytest.mark.parametrize(
    "text,where",
    [
        ("[nonsense]\n", "<root>"),
        ("[options]\nbound = 0\n", "options.bound"),
        ("[options]\ncolour = 1\n", "options"),
        ("[generators.tau1]\nlinear = " + toml_matrix(IDENT) + "\n", "generators.tau1"),
        ("[generators.g]\nlinear = " + toml_matrix(IDENT) + "\n[representation]\ng = \"d\"\n", "representation.g"),
        ("[generators.g]\nlinear = " + toml_matrix(IDENT) + "\n[representation]\n", "representation"),
        ("[resolution]\ndefault = \"blowup\"\n", "resolution.default"),
    ],
)
def test_validation_errors_are_located(text, where):
    with pytest.raises(ValidationError) as err:
        parse_text(text)
    assert err.value.where == where


def test_matrix_representation_entries():
    text = (
        f"[generators.g]\nlinear = {toml_matrix(IDENT)}\n"
        "[representation]\ng = [[1, 0, 0], [0, -1, 0], [0, 0, -1]]\n"
    )
    cfg = parse_text(text)
    assert cfg.representation.assignment["g"].name() == "a"


@pytest.mark.parametrize("name", FIXTURES)
def test_emit_parse_roundtrip(name):
    cfg = load_fixture(name)
    again = parse_text(emit_config(cfg))
    assert config_to_dict(again) == config_to_dict(cfg)
    assert again.generators == cfg.generators


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(G2_SIGNS), st.lists(st.sampled_from(["0", "1/2", "1/4", "3/4"]), min_size=7, max_size=7))
def test_roundtrip_random_generator(signs, tr):
    m = [[s * int(i == j) for j in range(7)] for i, s in enumerate(signs)]
    text = f"[generators.g]\nlinear = {toml_matrix(m)}\ntranslation = {json.dumps(tr)}\n"
    cfg = parse_text(text)
    assert config_to_dict(parse_text(emit_config(cfg))) == config_to_dict(cfg)


def test_parse_config_from_file(tmp_path):
    p = tmp_path / "job.toml"
    p.write_text(fixture_text("example1"))
    assert parse_config(p).digest == load_fixture("example1").digest


# --- reports and exit codes -------------------------------------------------------


def test_g2check(capsysbinary):
    code, out = run_cli(capsysbinary, "g2check")
    assert code == 0
    js = json.loads(out)
    assert js["status"] == "Success"


def test_analyze_example1(capsysbinary, tmp_path):
    p = tmp_path / "e1.toml"
    p.write_text(fixture_text("example1"))
    code, out = run_cli(capsysbinary, "analyze", "--config", str(p))
    assert code == 0
    js = json.loads(out)
    assert js["status"] == "Success"
    counts = json.dumps(js["stages"])
    assert '"T3": 1' in counts and '"T3/Z2": 6' in counts


def test_gluing_example2_obstructed(capsysbinary, tmp_path):
    p = tmp_path / "e2.toml"
    p.write_text(fixture_text("example2"))
    code, out = run_cli(capsysbinary, "gluing", "--config", str(p))
    assert code == 2
    js = json.loads(out)
    assert js["status"] == "Obstructed"
    assert js["stages"]["gluing"]["obstructed_strata"] == ["S_2", "S_3"]


def test_not_regular_exit_code():
    cfg = load_fixture("example1")
    cfg.representation = FlatConnectionRep.trivial(list(cfg.generators))
    rep = run(cfg, "regularity")
    assert rep.exit_code == 2


def test_missing_file_is_error(capsysbinary, tmp_path):
    code, out = run_cli(capsysbinary, "analyze", "--config", str(tmp_path / "nope.toml"))
    assert code == 1
    assert json.loads(out)["status"] == "Error"


def test_bad_bound(capsysbinary, tmp_path):
    p = tmp_path / "e1.toml"
    p.write_text(fixture_text("example1"))
    code, _ = run_cli(capsysbinary, "analyze", "--config", str(p), "--bound", "0")
    assert code == 1
    code, out = run_cli(capsysbinary, "analyze", "--config", str(p), "--bound", "4")
    assert code == 1
    assert json.loads(out)["messages"] == ["group closure failed: more than 4 elements"]


def test_out_file_and_text_format(capsysbinary, tmp_path):
    p = tmp_path / "e3.toml"
    p.write_text(fixture_text("example3"))
    dest = tmp_path / "report.txt"
    code, out = run_cli(capsysbinary, "topology", "--config", str(p), "--format", "text", "--out", str(dest))
    assert code == 0 and out == b""
    text = dest.read_text()
    assert "Success" in text


def test_json_is_canonical():
    rep = run(load_fixture("example1"), "topology")
    data = emit_report(rep, "json")
    js = json.loads(data)
    assert data.decode() == json.dumps(js, sort_keys=True, indent=2) + "\n"
    assert js["stages"]["topology"]["p1_coefficients"]["S_1"] == "1/2"


def test_examples_subcommand(capsysbinary):
    code, out = run_cli(capsysbinary, "examples")
    js = json.loads(out)
    assert code == 0
    assert all(v["matches_golden"] for v in js["stages"]["examples"].values())
    assert js["stages"]["examples"]["example2"]["status"] == "Obstructed"


def test_thread_count_does_not_change_output():
    outs = []
    for n in ("1", "4"):
        env = dict(os.environ, G2GLUE_THREADS=n)
        proc = subprocess.run([sys.executable, "-m", "g2glue.cli", "examples"], capture_output=True, env=env, timeout=300)
        assert proc.returncode == 0, proc.stderr.decode()
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
