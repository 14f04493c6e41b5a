import json
import subprocess
import sys

import pytest

from torext.cli import main, parse_ring


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_resolve_n2_table(capsys):
    code, out, _ = run(["resolve", "--ring", "p=101,x1..x3", "--f", "x1^3,x2^3,x3^3",
                        "--module", "syzk:2", "--length", "11", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["betti"]["total"] == [6, 10, 15, 21, 28, 36, 45, 55, 66, 78, 91, 105]


def test_koszul_over_S(capsys):
    code, out, _ = run(["resolve", "--module", "syzk:0", "--ring-only-S", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["betti"] == {"rows": [{"slope": 0, "entries": [1, 3, 3, 1]}], "total": [1, 3, 3, 1]}


def test_parse_error_exit_code(capsys):
    code, _, err = run(["resolve", "--f", "x1^3+*x2", "--module", "syzk:0"], capsys)
    assert code == 2 and "position" in err


def test_unknown_module_kind(capsys):
    assert run(["resolve", "--module", "blob:1"], capsys)[0] == 2


def test_not_regular_sequence(capsys):
    code, _, err = run(["resolve", "--f", "x1^2,x1*x2", "--module", "syzk:0"], capsys)
    assert code == 3 and "NotRegularSequence" in err


def test_ext_of_k_is_not_a_high_syzygy(capsys):
    code, _, err = run(["ext", "--module", "syzk:0"], capsys)
    assert code == 3 and "NotHighSyzygy" in err


def test_tor_json_fields(capsys):
    code, out, _ = run(["tor", "--module", "syzk:2", "--json"], capsys)
    d = json.loads(out)
    assert code == 0
    assert set(d) >= {"dims", "operators", "Tprime_dims", "Tdoubleprime_dims", "betti_strands"}
    assert d["Tprime_dims"] == {"0": 6, "1": 3, "2": 1}
    assert d["betti_strands"]["0"] == [6, 15, 28, 45, 66, 91]


def test_ext_report(capsys):
    code, out, _ = run(["ext", "--module", "syzk:2", "--json"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["even"]["betti"]["total"] == [6, 3, 1]
    assert d["even"]["structure"]["free_rank"] == 3 and d["even"]["structure"]["skew_block"]
    assert d["even"]["regularity"] == 0 and d["odd"]["regularity"] == 1


def test_gk_hypersurface(capsys):
    code, out, _ = run(["gk", "--ring", "p=101 vars=x", "--f", "x^3", "--module", "cyclic:x^2", "--json"], capsys)
    d = json.loads(out)
    assert code == 0 and d["d_squared_zero"] and d["minimized_matches_direct"]
    assert d["exact_through"] == d["checked_through"]


def test_file_form_equals_flag_form(tmp_path, capsys):
    f = tmp_path / "job.txt"
    f.write_text("ring p=101 vars=a,b,c;\nf=a^3,b^3,c^3;\nmodule=coker:[[a,b,c]];\nlength=4;\n")
    c1, o1, _ = run(["resolve", "--input", str(f), "--json"], capsys)
    c2, o2, _ = run(["resolve", "--ring", "p=101,a,b,c", "--f", "a^3,b^3,c^3",
                     "--module", "coker:[[a,b,c]]", "--length", "4", "--json"], capsys)
    assert c1 == c2 == 0 and o1 == o2


def test_verify_paper_unknown_id(capsys):
    assert run(["verify-paper", "--only", "42"], capsys)[0] == 2


def test_verify_paper_mutation_is_caught(capsys):
    code, out, _ = run(["verify-paper", "--only", "6", "--mutate-sign", "--json"], capsys)
    assert code == 1 and json.loads(out)["passed"] is False


def test_ring_grammar():
    R = parse_ring("ring p=7 vars=y1..y4;")
    assert R.p == 7 and R.names == ("y1", "y2", "y3", "y4")


def test_output_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "torext", "tor", "--module", "syzk:1", "--json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True, env={"TOREXT_THREADS": "1", "PATH": ""}).stdout
    assert a == b
