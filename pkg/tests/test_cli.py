import json

import pytest

from padic_dga.cli import main


def run(args):
    return main(args)


def test_verify_paper_passes(capsys):
    assert run(["--prime", "3", "--precision", "4", "--window=-18:16",
                "verify-paper"]) == 0
    out = capsys.readouterr().out
    assert "verdict: PASS" in out


def test_precision_guard_exit_2(capsys):
    assert run(["--prime", "3", "--precision", "2", "--window=-40:40",
                "verify-paper"]) == 2
    err = capsys.readouterr().err
    assert "precision must be >= 4" in err


def test_even_prime_exit_2(capsys):
    assert run(["--prime", "4", "--precision", "4", "--window=-18:16",
                "verify-paper"]) == 2
    assert "odd prime" in capsys.readouterr().err


def test_homology_builtin_table(capsys):
    assert run(["--window=-18:16", "homology"]) == 0
    out = capsys.readouterr().out
    assert "   3 | Z/3" in out
    assert "  11 | Z/9" in out


def test_homology_machine_flag(capsys):
    assert run(["--window=-18:16", "--machine", "homology"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert {"degree": 11, "group": "Z/9"} in doc["table"]


def test_homology_axiom_failure_exit_3(tmp_path, capsys):
    from padic_dga.dga import DegreeWindow, build_test_dga_C
    from padic_dga.serialize import serialize_dga

    C = build_test_dga_C(3, 4, DegreeWindow(-18, 16))
    doc = json.loads(serialize_dga(C))
    for entry in doc["differential"]:
        if entry["degree"] == 8:
            entry["matrix"] = [[1]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run(["--window=-18:16", "--input", str(path), "homology"]) == 3


def test_massey_examples(capsys):
    assert run(["--window=-18:16", "massey", "1", "1"]) == 0
    out = capsys.readouterr().out
    assert "verdict: OK" in out
    assert run(["--window=-18:16", "massey", "2", "-1"]) == 0


def test_massey_guard_i_plus_j_zero(capsys):
    assert run(["--window=-18:16", "massey", "1", "-1"]) == 2
    assert "nonzero" in capsys.readouterr().err


def test_synthesize_builtin(capsys):
    assert run(["--window=-18:16", "synthesize"]) == 0
    assert "RESULT: SUCCESS" in capsys.readouterr().out


def test_synthesize_corrupted_exit_5(tmp_path, capsys):
    from padic_dga.dga import DegreeWindow, GeneratorSpec, build_free_cdga
    from padic_dga.serialize import serialize_dga

    gens = [GeneratorSpec("e", 3),
            GeneratorSpec("x", 4, invertible=True, differential="9*e")]
    D = build_free_cdga(gens, 3, 4, DegreeWindow(-18, 16))
    path = tmp_path / "nine.json"
    path.write_text(serialize_dga(D))
    assert run(["--window=-18:16", "--input", str(path), "synthesize"]) == 5
    assert "homology mismatch at degree 3" in capsys.readouterr().out


def test_perturb_deterministic_and_roundtrip(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    args = ["--window=-18:16", "--seed", "7", "--budget", "6"]
    assert run(args + ["--output", str(out1), "perturb"]) == 0
    assert run(args + ["--output", str(out2), "perturb"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text().startswith("# perturb seed=7 budget=6")
    # the emitted file round-trips through synthesize
    assert run(["--window=-18:16", "--input", str(out1), "synthesize"]) == 0


def test_perturb_budget_zero_matches_builtin(tmp_path):
    from padic_dga.dga import DegreeWindow, build_test_dga_C
    from padic_dga.serialize import serialize_dga

    out = tmp_path / "c.json"
    assert run(["--window=-18:16", "--seed", "0", "--budget", "0",
                "--output", str(out), "perturb"]) == 0
    C = build_test_dga_C(3, 4, DegreeWindow(-18, 16))
    assert out.read_text() == serialize_dga(C)


def test_bad_window_syntax(capsys):
    assert run(["--window=oops", "verify-paper"]) == 2
