import json

import pytest

from valring import (
    BadIndex,
    EvenCharacteristic,
    EvenPrime,
    NonPrime,
    NotPrimePower,
    ParseError,
)
from valring.cli import RunConfig, build_parser, parse_ring, parse_set, run


def _cfg(argv):
    ns = build_parser().parse_args(argv)
    return RunConfig.from_args(ns)


# ---------------------------------------------------------------------------
# ring and set literals


def test_parse_ring_families():
    r = parse_ring("z:5:2")
    assert (r.p, r.s, r.r, r.size) == (5, 1, 2, 25)
    f = parse_ring("f:9:2")
    assert (f.p, f.s, f.r, f.size) == (3, 2, 2, 81)
    f25 = parse_ring("f:25:1")
    assert (f25.p, f25.s, f25.q) == (5, 2, 25)


@pytest.mark.parametrize(
    "text,err",
    [
        ("f:12:1", NotPrimePower),
        ("f:4:1", EvenCharacteristic),
        ("z:6:1", NonPrime),
        ("z:2:3", EvenPrime),
        ("z:5", ParseError),
        ("w:5:2", ParseError),
        ("z:a:2", ParseError),
        ("z:5:0", ParseError),
    ],
)
def test_parse_ring_rejects(text, err):
    with pytest.raises(err):
        parse_ring(text)


def test_parse_set_literals(z9):
    assert parse_set(z9, "units").card == 6
    assert parse_set(z9, "all").card == 9
    assert sorted(parse_set(z9, "1, 2,4")) == [1, 2, 4]
    rnd = parse_set(z9, "random:3:7")
    assert rnd.card == 3 and rnd.all_units()
    assert rnd == parse_set(z9, "random:3:7")


@pytest.mark.parametrize("text", ["random:3", "random:x:1", "1,a", ""])
def test_parse_set_rejects(text, z9):
    with pytest.raises(ParseError):
        parse_set(z9, text)


def test_parse_set_bad_index(z9):
    with pytest.raises(BadIndex):
        parse_set(z9, "9")


# ---------------------------------------------------------------------------
# config round-trips


@pytest.mark.parametrize(
    "argv",
    [
        ["ring", "info", "--ring", "z:3:2"],
        ["graph", "build", "--ring", "z:3:2", "--d", "3"],
        ["graph", "spectrum", "--ring", "f:9:1", "--d", "2", "--spectral-cap", "400"],
        ["graph", "mixing", "--ring", "z:3:2", "--d", "3", "--seed", "9", "--trials", "40"],
        ["verify", "thm1", "--ring", "z:5:2", "--set", "random:6:1", "--n", "2"],
        ["verify", "thm2", "--ring", "z:3:2", "--set", "1,2", "--n", "3"],
        ["verify", "hpv", "--ring", "z:3:2", "--set", "units", "--set", "units", "--set", "units"],
        ["scan", "ratios", "--ring", "z:5:2", "--sizes", "4,8", "--trials", "5", "--seed", "3"],
        ["classify", "--ring", "z:3:2", "--set", "units", "--constants", "1.5,1,1"],
        ["search", "extremal", "--ring", "z:5:2", "--sizes", "4", "--iters", "50", "--seed", "2"],
    ],
)
def test_config_roundtrip(argv):
    cfg = _cfg(argv)
    assert _cfg(cfg.to_argv()) == cfg
    assert cfg.canonical() == " ".join(cfg.to_argv())


def test_config_validation():
    with pytest.raises(ParseError):
        _cfg(["classify", "--ring", "z:3:2", "--set", "units", "--constants", "1,2"])
    with pytest.raises(ParseError):
        RunConfig(command="ring info", ring="z:3:2", seed=2**64)
    with pytest.raises(ParseError):
        RunConfig(command="ring info", ring="z:3:2", spectral_cap=0)


# ---------------------------------------------------------------------------
# end-to-end runs and exit codes


def test_run_ring_info(capsys):
    assert run(["ring", "info", "--ring", "f:9:2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == 1
    assert payload["size"] == 81
    assert payload["units"] == 72
    assert payload["ideal_sizes"] == [81, 9, 1]
    assert payload["modulus_coeffs"] == [1, 0, 1]


def test_run_verify_passes(capsys):
    code = run(["verify", "thm1", "--ring", "z:3:2", "--set", "1,2"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["hard_pass"] is True
    assert payload["counts"]["solutions"] == 8


def test_run_reports_typed_errors(capsys):
    code = run(["ring", "info", "--ring", "f:12:1"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1
    assert payload["error"]["type"] == "NotPrimePower"


def test_run_usage_errors(capsys):
    assert run([]) == 2
    capsys.readouterr()
    assert run(["graph", "paint", "--ring", "z:3:2"]) == 2
    capsys.readouterr()
    # config-level validation also exits 2, before any handler work
    assert run(["scan", "ratios", "--ring", "z:5:2", "--sizes", "4",
                "--seed", str(2**64)]) == 2
    err = capsys.readouterr().err
    assert "ParseError" in err


def test_run_spectrum_checks(capsys):
    code = run(["graph", "spectrum", "--ring", "z:3:2", "--d", "3"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["sigma1_matches_degree"] and payload["sigma2_within_bound"]
    assert payload["sigma1"] == pytest.approx(12.0)
    assert payload["sigma2"] == pytest.approx(27**0.5)


def test_run_mixing(capsys):
    code = run(["graph", "mixing", "--ring", "f:9:1", "--d", "2",
                "--trials", "60", "--seed", "4"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["violations"] == 0


def test_run_json_is_deterministic(capsys):
    argv = ["scan", "ratios", "--ring", "z:5:2", "--sizes", "4,8",
            "--trials", "4", "--seed", "11"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    assert json.loads(first)["sanity_ok"] is True


def test_run_csv_projections(capsys):
    run(["scan", "ratios", "--ring", "z:5:2", "--sizes", "4", "--trials", "3",
         "--seed", "0", "--format", "csv"])
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0].startswith("size,theorem,trials,lhs_min")
    assert len(lines) == 3  # header + one row per theorem

    run(["graph", "build", "--ring", "z:3:1", "--d", "2", "--format", "csv"])
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "left,right"
    assert len(out.splitlines()) == 1 + 4  # 4 classes, degree 1

    run(["ring", "info", "--ring", "z:3:2", "--format", "csv"])
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "key,value"


def test_run_writes_out_file(tmp_path, capsys):
    target = tmp_path / "info.json"
    assert run(["ring", "info", "--ring", "z:3:2", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    payload = json.loads(target.read_text())
    assert payload["size"] == 9


def test_run_classify(capsys):
    code = run(["classify", "--ring", "z:3:2", "--set", "units"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["regime"] == 2
    assert payload["empty_regimes"] == [3]


def test_run_search(capsys):
    code = run(["search", "extremal", "--ring", "z:5:2", "--sizes", "3,4",
                "--iters", "40", "--seed", "5"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert len(payload["runs"]) == 2
    for rec in payload["runs"]:
        assert rec["best_objective"] <= rec["start_objective"]


def test_run_hpv_set_count(capsys):
    code = run(["verify", "hpv", "--ring", "z:3:2", "--set", "units"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1
    assert payload["error"]["type"] == "ParseError"
