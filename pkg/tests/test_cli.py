import json

import pytest

from ferrand.cli import main

NODE = """ring k = k[];
ring C = k[t];
ring K = k[t] / (t^2 - 1);
hom beta: k -> K {};
hom pi: C -> K {t -> t};
square S = pushout(beta, pi);
"""


def run_cli(tmp_path, text, *flags):
    src = tmp_path / "s.fer"
    src.write_text(text)
    out = tmp_path / "r.json"
    code = main(["--input", str(src), "--json", str(out), *flags])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_all_pass(tmp_path):
    code, rep = run_cli(tmp_path, NODE + "present S;\nconductor S;\n")
    assert code == 0
    assert rep["schema"] == 1
    assert rep["metadata"] == {"field": "QQ", "degree_bound": 64, "probe_degree": 8, "seed": 0}
    assert [r["operation"] for r in rep["records"]] == ["present_pushout", "conductor"]
    assert all(r["anchor"] for r in rep["records"])


def test_failure_exit_code_and_continuation(tmp_path):
    code, rep = run_cli(tmp_path, NODE + "member S t;\nconductor S;\n")
    assert code == 1
    assert [r["verdict"] for r in rep["records"]] == ["FAIL", "PASS"]


def test_fail_fast_gives_partial_report(tmp_path):
    code, rep = run_cli(tmp_path, NODE + "member S t;\nconductor S;\n", "--fail-fast")
    assert code == 1
    assert len(rep["records"]) == 1 and rep["complete"] is False


def test_parse_error_exit_code(tmp_path, capsys):
    code, rep = run_cli(tmp_path, "ring R = QQ[x];\nhom h: R -> ")
    assert code == 2 and rep is None
    assert "2:13" in capsys.readouterr().err


def test_usage_errors():
    assert main([]) == 2
    assert main(["--input", "x", "--field", "RR"]) == 2
    assert main(["--input", "/nonexistent/script.fer"]) == 2


def test_unexpected_bound_exit_code(tmp_path):
    laurent = """ring B = k[x];
ring K = k[x, xi] / (x*xi - 1);
ring C = k[x, xi, y] / (x*xi - 1);
hom beta: B -> K {x -> x};
hom pi: C -> K {x -> x, xi -> xi, y -> 0};
square L = pushout(beta, pi);
"""
    code, rep = run_cli(tmp_path, laurent + "present L bound 2;\n")
    assert code == 3 and rep["records"][0]["outcome"] == "bound"
    code, _ = run_cli(tmp_path, laurent + "present L bound 2 expect bound;\n")
    assert code == 0


def test_field_flag(tmp_path):
    code, rep = run_cli(tmp_path, NODE + "present S;\n", "--field", "Fp:5")
    assert code == 0 and rep["metadata"]["field"] == "Fp:5"
    assert rep["records"][0]["result"]["ring"] == "Fp:5[a1,a2] / (a1^3 + a1^2 + 4*a2^2)"


def test_parallel_matches_sequential(tmp_path):
    text = NODE + "present S;\nconductor S;\nmember S t^3 - t;\nlocalize S at (0, t^2 - 1);\n"
    _, a = run_cli(tmp_path, text)
    _, b = run_cli(tmp_path, text, "--parallel")
    assert a == b


@pytest.mark.parametrize("name", ["nodal", "etale", "valuations"])
def test_shipped_scripts(tmp_path, name):
    out = tmp_path / "r.json"
    assert main(["--input", f"corpus:{name}", "--json", str(out), "--quiet"]) == 0
    first = out.read_bytes()
    main(["--input", f"corpus:{name}", "--json", str(out), "--quiet"])
    assert out.read_bytes() == first


def test_stdin_and_human_lines(monkeypatch, capsys):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(NODE + "conductor S;\n"))
    assert main(["--input", "-"]) == 0
    out = capsys.readouterr().out
    assert "PASS line 7: conductor S;" in out
