import json

import pytest

from selfdual.cli import main, parse_count
from selfdual.codes import is_self_dual
from selfdual.rings import Ring
from selfdual.specfile import (
    SpecBook,
    SpecError,
    build_from_spec,
    code_from_json,
    code_to_json,
    parse_spec,
    read_code,
    write_code,
)

C1_SPEC = """\
# the first [32,16,8] seed
[code C1]
ring = F4
construction = four_circulant
rA = (1,w,w,0)
rB = (w,W,W,w)
"""


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


# --------------------------------------------------------------------------
# spec files


def test_parse_spec_sections():
    specs = parse_spec(C1_SPEC, "c1.spec")
    assert [s.name for s in specs] == ["C1"]
    s = specs[0]
    assert s.construction == "four_circulant" and s.fields["rA"] == "(1,w,w,0)"
    assert s.line == 2


def test_build_from_spec_text(lib):
    C = build_from_spec(C1_SPEC, use_library=False)
    assert C.name == "C1" and C.ring is Ring.F4
    assert C.generator == lib.build("C1").generator


@pytest.mark.parametrize(
    "text,line,col,needle",
    [
        ("[code X]\nring = F4uF4\nconstruction = four_circulant\nrA = (a1,q1)\nrB = (z1,z1)\n", 4, 10,
         "invalid token 'q1' for ring F4uF4"),
        ("[code X]\nring = F4\nconstruction = four_circulant\nrA = (1)\n", 1, None, "rB"),
        ("[code X]\nring = F5\nconstruction = four_circulant\nrA = (1)\nrB = (0)\n", 2, None, "F5"),
        ("ring = F4\n", 1, None, "outside"),
        ("[code X]\nconstruction = spiral\n", 2, None, "spiral"),
        ("[code X]\nring = F2\nconstruction = matrix\nrows = 11\n[code X]\nring = F2\nconstruction = matrix\nrows = 11\n",
         5, None, "duplicate"),
        ("[code X]\nring = F2\nring = F2\n", 3, None, "duplicate"),
        ("[code X]\nring F2\n", 2, None, "="),
    ],
)
def test_spec_errors_carry_positions(text, line, col, needle):
    with pytest.raises(SpecError) as exc:
        build_from_spec(text, use_library=False)
    err = exc.value
    assert needle in str(err)
    assert err.line == line
    if col is not None:
        assert err.col == col
        assert f":{line}:{col}:" in str(err)


def test_spec_reference_errors():
    with pytest.raises(SpecError, match="unresolvable base"):
        build_from_spec("[code X]\nconstruction = projection\nbase = nowhere\n", use_library=False)
    cyc = "[code A]\nconstruction = projection\nbase = B\n[code B]\nconstruction = projection\nbase = A\n"
    with pytest.raises(SpecError, match="cyclic"):
        SpecBook.from_text(cyc).build("A")
    with pytest.raises(SpecError):
        build_from_spec("[code X]\nring = F2\nconstruction = projection\nbase = J1\n")


def test_spec_uses_library_bases():
    D = build_from_spec(
        "[code E]\nconstruction = extension\nbase = C64\ntheorem = B\nX = 3u3uu3310010u3u0\nc = 3\n"
    )
    assert D.ring is Ring.F2uF2 and D.length == 34 and is_self_dual(D)
    P = build_from_spec("[code P]\nconstruction = projection\nbase = J1\n")
    assert P.ring is Ring.F4


def test_matrix_construction():
    M = build_from_spec("[code M]\nring = F2\nconstruction = matrix\nrows = 1010; 0101\n", use_library=False)
    assert M.generator.data.tolist() == [[1, 0, 1, 0], [0, 1, 0, 1]]
    assert is_self_dual(M)


def test_json_roundtrip(tmp_path, lib):
    J1 = lib.build("J1")
    doc = code_to_json(J1)
    assert doc["ring"] == "F4uF4" and doc["length"] == 16
    back = code_from_json(json.loads(json.dumps(doc)))
    assert back.generator == J1.generator and back.name == "J1"
    path = tmp_path / "j1.json"
    write_code(J1, path)
    assert read_code(path).generator == J1.generator
    with pytest.raises(SpecError):
        code_from_json({"ring": "F4"})


def test_library_contents(lib):
    names = lib.names()
    for n in ["C1", "C5", "J1", "N1", "C64", "D7", "C88", "C96", "L80_14", "L88_10", "L96_10", "psi_M1"]:
        assert n in names
    assert lib.build("C88").generator.shape == (22, 44)


# --------------------------------------------------------------------------
# counts


@pytest.mark.parametrize("text,value", [("100", 100), ("10^5", 100000), ("1e5", 100000), ("1_000", 1000)])
def test_parse_count(text, value):
    assert parse_count(text) == value


# --------------------------------------------------------------------------
# CLI


def test_cli_build_then_analyze(tmp_path, capsys):
    spec = tmp_path / "c1.spec"
    spec.write_text(C1_SPEC)
    out = tmp_path / "c1.json"
    code, _, err = run(capsys, "build", spec, "-o", out)
    assert code == 0 and "built C1" in err
    code, doc, _ = run(capsys, "analyze", out, "--self-dual", "--type", "--mindist", "--expect-d", 8)
    assert code == 0 and doc["ok"]
    assert doc["schema_version"] == 1 and doc["command"] == "analyze"
    assert set(doc) == {"schema_version", "command", "inputs", "results", "anomalies", "timing", "ok"}
    checks = {r["check"]: r for r in doc["results"]}
    assert checks["mindist"]["d"] == 8
    assert checks["type"]["value"] == "TypeI"
    assert doc["timing"] is None


def test_cli_analyze_params_claims(capsys):
    code, doc, _ = run(capsys, "analyze", "J1", "--params", "--expect-beta", 48, "--expect-type", "TypeI")
    assert code == 0
    params = next(r for r in doc["results"] if r["check"] == "params")
    assert params["family"] == "W64_2" and params["beta"] == 48
    code, doc, err = run(capsys, "analyze", "J1", "--expect-beta", 49)
    assert code == 1 and not doc["ok"] and "CLAIM FAILED" in err


def test_cli_analyze_matrix_file(tmp_path, capsys):
    path = tmp_path / "h8.txt"
    path.write_text("11110000\n00111100\n00001111\n01010101\n")
    code, doc, _ = run(capsys, "analyze", path, "--type", "--census", 8, "--design", 3, 4, "--extremal", "--timing")
    assert code == 0
    checks = {r["check"]: r for r in doc["results"]}
    assert checks["type"]["value"] == "TypeII"
    assert checks["census"]["counts"] == {"0": 1, "4": 14, "8": 1}
    assert checks["design"]["is_design"] and checks["design"]["lambda"] == 1
    assert checks["extremal_bound"]["value"] == 4
    assert doc["timing"]["seconds"] >= 0


def test_cli_analyze_invariant(capsys):
    code, doc, _ = run(capsys, "analyze", "D1", "--invariant", "I8")
    assert code == 0
    assert next(r for r in doc["results"] if r["check"] == "invariant")["value"] == 2520


def test_cli_bad_token_exit_2(tmp_path, capsys):
    spec = tmp_path / "bad.spec"
    spec.write_text("[code X]\nring = F4uF4\nconstruction = four_circulant\nrA = (a1,q1)\nrB = (z1,z1)\n")
    code, doc, err = run(capsys, "build", spec)
    assert code == 2 and doc is None
    assert f"{spec}:4:10:" in err and "q1" in err


def test_cli_usage_errors(capsys, tmp_path):
    assert run(capsys, "analyze", "no_such_code", "--type")[0] == 2
    assert run(capsys, "analyze", "C1", "--invariant", "X9")[0] == 2
    assert run(capsys, "reproduce", "--table", 13)[0] == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{ nope")
    assert run(capsys, "analyze", broken, "--type")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["search", "--mode", "lifts", "--base", "C1", "--target-d", "12"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["search", "--mode", "lifts", "--base", "C1", "--seed", "1", "--budget", "0"])


def test_cli_extend(tmp_path, capsys):
    out = tmp_path / "e.json"
    code, _, _ = run(capsys, "extend", "C64", "--theorem", "B", "--x", "3u3uu3310010u3u0", "--c", "3",
                     "--new-name", "E1", "-o", out)
    assert code == 0
    e = read_code(out)
    assert e.name == "E1" and e.length == 34
    code, doc, _ = run(capsys, "analyze", out, "--params", "--expect-gamma", 0, "--expect-beta", 160)
    assert code == 0 and doc["ok"]
    code, _, err = run(capsys, "extend", "C64", "--theorem", "B", "--x", "3u3uu3310010u3u0", "--c", "u")
    assert code == 1 and "c is not a unit" in err
    code, _, _ = run(capsys, "extend", "C64", "--theorem", "B", "--x", "3u3uu33", "--c", "1")
    assert code == 1


def test_cli_reproduce(capsys):
    code, doc, _ = run(capsys, "reproduce", "--table", 1)
    assert code == 0 and doc["ok"]
    assert len(doc["results"]) == 5
    assert all(r["status"] == "pass" for r in doc["results"])
    code, doc, _ = run(capsys, "reproduce", "--table", "gamma2", "--rows", "L1_1,L2_2")
    assert code == 0 and [r["label"] for r in doc["results"]] == ["L1_1", "L2_2"]


def test_cli_reproduce_deep_gate(capsys):
    code, doc, err = run(capsys, "reproduce", "--table", "new80")
    assert code == 2 and doc is None
    assert "--deep" in err and "refused" in err


def test_cli_search_lifts(capsys):
    args = ["search", "--mode", "lifts", "--base", "C1", "--seed", 7, "--budget", 30, "--target-d", 12]
    code, doc, _ = run(capsys, *args)
    assert code == 0
    code2, doc2, _ = run(capsys, *args, "--jobs", 2)
    assert doc == doc2
    res = doc["results"][0]
    assert res["candidates_examined"] == 30 and res["seed"] == 7
    for hit in res["hits"]:
        assert hit["d"] == 12


def test_cli_search_infeasible_target(capsys):
    code, doc, _ = run(capsys, "search", "--mode", "lifts", "--base", "C2", "--seed", 1, "--target-d", 14)
    assert code == 0
    assert doc["results"][0]["hits"] == []
    assert any("infeasible" in a["text"] for a in doc["anomalies"])


def test_cli_search_extensions(capsys):
    args = ["search", "--mode", "extensions", "--base", "C64", "--theorem", "B", "--c", "1,3",
            "--seed", 3, "--budget", 5]
    code, doc, _ = run(capsys, *args)
    assert code == 0
    assert doc["results"][0]["candidates_examined"] == 5
    assert doc == run(capsys, *args)[1]


def test_cli_classify(capsys):
    code, doc, _ = run(capsys, "classify", "--n", 1, "--min-d", 1)
    assert code == 0
    pairs = {(r["rA"], r["rB"]) for r in doc["results"]}
    assert ("(1)", "(0)") in pairs and ("(0)", "(1)") in pairs


def test_cli_jobs_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "analyze", "C1", "--census", 10, "--jobs", 1, "-o", a)[0] == 0
    assert run(capsys, "analyze", "C1", "--census", 10, "--jobs", 3, "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
