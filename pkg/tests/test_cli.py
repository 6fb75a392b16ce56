import io
import subprocess
import sys

import pytest

from clusterhom.cli import parse_report, run

from conftest import DATA, MALFORMED


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_d2_s1():
    code, out, _ = call("check-d2", DATA / "s1.cx")
    assert code == 0 and parse_report(out)["ok"] == "true"


def test_maslov_scan_prints_required_set():
    code, out, _ = call("maslov-scan", "--n", 4)
    assert code == 0 and "{4,2}" in out
    assert set(parse_report(out)["required"].split(",")) == {"2", "4"}


def test_missing_file_is_input_error():
    code, out, err = call("homology", "missing.cx")
    assert code == 2 and "cannot read" in err
    assert parse_report(out)["status"] == "input-error"


def test_s1_pipeline_reports():
    code, out, _ = call("free-terms", DATA / "s1.cx")
    assert parse_report(out)["witnesses"] == "m|lam0|1"
    code, out, _ = call("certify", DATA / "s1.cx")
    rep = parse_report(out)
    assert code == 0 and rep["tau"] == "m * e[-lam0]" and rep["c"] == "1 - M"
    assert rep["d_c_tau"] == "1"
    code, out, _ = call("homology", DATA / "s1.cx")
    assert code == 0 and parse_report(out)["zero"] == "true"


def test_fine_commands():
    assert call("fine", "check-d2", DATA / "circle_line.fx")[0] == 0
    code, out, _ = call("fine", "check-d2", DATA / "circle_line_control.fx")
    assert code == 1 and parse_report(out)["offender"] == "a"
    code, out, _ = call("fine", "homology", DATA / "circle_line.fx")
    assert code == 0 and parse_report(out)["zero"] == "true"
    assert call("fine", "homology", DATA / "s1.cx")[0] == 2


def test_minimal_model_and_tilde():
    code, out, _ = call("minimal-model", DATA / "nb_s2_extra_pair.cx")
    rep = parse_report(out)
    assert code == 0 and rep["generators"] == "m,M" and rep["homology_match"] == "true"
    code, out, _ = call("tilde", DATA / "s1.cx")
    assert code == 0 and parse_report(out)["alpha_chain_ok"] == "true"
    code, out, _ = call("tilde-homology", DATA / "s1.cx")
    assert code == 0 and parse_report(out)["zero"] == "true"


def test_sseq_and_window_override():
    code, out, _ = call("sseq", DATA / "s1.cx", "--max-word-len", 3)
    rep = parse_report(out)
    assert code == 0 and rep["E0"] == rep["E1"] and rep["d0_zero"] == "true"
    assert call("homology", DATA / "s1.cx", "--box", "nope=0..1")[0] == 2


def test_chain_map_and_symmetrize(tmp_path):
    s1 = DATA / "s1.cx"
    assert call("chain-map", s1, s1, "--map", "m=m", "--map", "M=M")[0] == 0
    code, out, _ = call("chain-map", s1, s1, "--map", "M=M")
    assert code == 1 and parse_report(out)["offender"] == "m"
    pair = tmp_path / "pair.fx"
    pair.write_text("[config]\nepsilon_D = 1/1\nwindow.max_word_len = 3\nwindow.degrees = -4..2\n"
                    "[bar_classes]\n[cl0.generators]\nm index=0\n[cl1.generators]\nn index=0\n"
                    "[intersections]\na degree=0\n[fine_differential]\nd a = m*a - n*a\n")
    code, out, _ = call("symmetrize", pair, "--ident", "n=m")
    assert code == 0 and "d a = 0" in out
    assert call("fine", "homology", pair)[0] == 0


def test_trees_commands(tmp_path):
    good = tmp_path / "t.json"
    good.write_text('{"vertices": ["v0"], "root": "v0", "edges": [], "disk": ["v0"],'
                    ' "markers": {"0": "v0", "1": "v0"}, "n1": 1}')
    assert call("trees", "validate", good)[0] == 0
    bad = tmp_path / "b.json"
    bad.write_text('{"vertices": ["v0"], "root": "v0", "edges": [], "disk": ["v0"],'
                   ' "markers": {"0": "v0", "1": "v0"}, "n1": 1, "constant": ["v0"]}')
    code, out, _ = call("trees", "validate", bad)
    assert code == 1 and "stability" in parse_report(out)["kinds"]
    junk = tmp_path / "j.json"
    junk.write_text("{nope")
    assert call("trees", "validate", junk)[0] == 2
    code, out, _ = call("trees", "dim", DATA / "s1.cx", "--x", "m", "--lam", "lam0=1")
    assert code == 0 and parse_report(out)["dimension"] == "0"
    code, out, _ = call("trees", "splittings", DATA / "s1.cx", "--word", "M,M", "--lam", "lam0=1")
    assert parse_report(out)["count"] == "16"
    assert call("trees", "splittings", DATA / "s1.cx", "--check")[0] == 0


def test_examples_round_trip_through_files(tmp_path):
    for args in [("s1",), ("no-bubbling", "--pattern", "torus"), ("circle-line",)]:
        code, out, err = call("example", *args)
        assert code == 0 and parse_report(err)["status"] == "pass"
        assert "---report---" not in out
        f = tmp_path / ("x.fx" if args[0] == "circle-line" else "x.cx")
        f.write_text(out)
        assert call("check-d2", f)[0] == 0


def test_validate_exit_codes(tmp_path):
    assert call("validate", DATA / "s1.cx")[0] == 0
    bad = tmp_path / "bad.cx"
    bad.write_text("[generators]\nm index=0\nM index=1\n[differential]\nd m = M\n")
    code, out, _ = call("validate", bad)
    assert code == 2 and "degree" in parse_report(out)["kinds"]
    assert call("check-d2", bad)[0] == 2


def test_usage_errors():
    assert call()[0] == 2
    assert call("nonsense")[0] == 2
    assert call("maslov-scan", "--n", 1)[0] == 2


@pytest.mark.parametrize("path", sorted(MALFORMED.iterdir()), ids=lambda p: p.name)
def test_malformed_corpus_exits_2(path):
    expect = path.read_bytes().split(b"\n", 1)[0].decode().removeprefix("# expect: ")
    for cmd in (["check-d2"], ["homology"]):
        code, out, err = call(*cmd, path)
        assert code == 2, (cmd, out, err)
        assert expect in err
        assert parse_report(out)["status"] == "input-error"


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "clusterhom.cli", "maslov-scan", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and parse_report(proc.stdout)["required"] == "2,0"
