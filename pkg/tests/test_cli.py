"""End-to-end tests for the command-line interface.

Everything runs in-process through ``main(argv)`` so exit codes and
stdout/stderr can be asserted without spawning subprocesses.
"""

import json

import numpy as np
import pytest

from gsep.cli import main
from gsep.gaussian import BipartiteCM, random_cm, random_separable_cm, tmss
from gsep.io import dump_cm, parse_certificate, parse_cm

EPS_STAR_R1 = 1.0 - np.exp(-2.0)


def write_cm(tmp_path, cm, name="state.json"):
    path = tmp_path / name
    path.write_text(dump_cm(cm), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCheck:
    def test_separable_verdict(self, tmp_path, capsys):
        cm = random_separable_cm(1, 1, seed=0)[0]
        code, out, err = run(capsys, "check", "--input", write_cm(tmp_path, cm))
        assert code == 0 and err == ""
        doc = json.loads(out)
        assert doc["verdict"] == "separable"
        assert len(doc["c_opnorm_history"]) == doc["step"]

    def test_entangled_verdict(self, tmp_path, capsys):
        code, out, _ = run(capsys, "check", "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "entangled"
        assert doc["step"] == 1
        assert doc["margin"] == pytest.approx(-1.0, abs=1e-9)

    def test_robust_mode(self, tmp_path, capsys):
        cm = random_separable_cm(1, 1, seed=0)[0]
        code, out, _ = run(capsys, "check", "--eps", "1e-6",
                           "--input", write_cm(tmp_path, cm))
        assert code == 0
        assert json.loads(out)["verdict"] == "separable"

    def test_undecided_at_low_iteration_cap(self, tmp_path, capsys):
        cm = random_cm(2, 2, "mixed", seed=37)
        code, out, _ = run(capsys, "check", "--max-iter", "2",
                           "--input", write_cm(tmp_path, cm))
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "undecided"
        assert doc["reason"] == "iteration limit reached"

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "verdict.json"
        code, out, _ = run(capsys, "check", "--output", str(path),
                           "--input", write_cm(tmp_path, tmss(0.3)))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["verdict"] == "entangled"


class TestCheckFailures:
    def test_malformed_document(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 1}', encoding="utf-8")
        code, out, err = run(capsys, "check", "--input", str(path))
        assert code == 2 and out == ""
        assert err.startswith("error:") and "missing keys" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "check", "--input", str(tmp_path / "nope.json"))
        assert code == 2
        assert err.startswith("error:")

    def test_non_state_input(self, tmp_path, capsys):
        cm = BipartiteCM.from_gamma(0.5 * np.eye(4), 1, 1)
        code, _, err = run(capsys, "check", "--input", write_cm(tmp_path, cm))
        assert code == 2
        assert "refusing to classify" in err


class TestCertify:
    def test_separable_emits_certificate(self, tmp_path, capsys):
        cm = random_separable_cm(2, 1, seed=3)[0]
        code, out, _ = run(capsys, "certify", "--input", write_cm(tmp_path, cm))
        assert code == 0
        cert, margins = parse_certificate(out)
        assert cert.gamma_A.shape == (4, 4)
        assert cert.gamma_B.shape == (2, 2)
        assert all(x >= -1e-8 for x in margins)

    def test_entangled_emits_witness(self, tmp_path, capsys):
        code, out, _ = run(capsys, "certify", "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "entangled"
        assert doc["lambda_min"] == pytest.approx(-1.0, abs=1e-9)
        assert len(doc["witness_real"]) == 2 and len(doc["witness_imag"]) == 2

    def test_undecided_reports_margin(self, tmp_path, capsys):
        cm = random_cm(2, 2, "mixed", seed=37)
        code, out, _ = run(capsys, "certify", "--max-iter", "2",
                           "--input", write_cm(tmp_path, cm))
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "undecided"
        assert "margin" in doc


class TestSweep:
    def test_explicit_eps_values(self, tmp_path, capsys):
        code, out, _ = run(capsys, "sweep", "--eps", "1.0", "--eps", "0.5",
                           "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "eps,verdict,steps"
        assert lines[1].startswith("0.5,entangled,")
        assert lines[2].startswith("1.0,separable,")

    def test_linear_grid(self, tmp_path, capsys):
        code, out, _ = run(capsys, "sweep", "--eps-grid", "0.5:1.0:3",
                           "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 3
        assert [r.split(",")[1] for r in rows] == ["entangled", "entangled", "separable"]

    def test_log_grid(self, tmp_path, capsys):
        code, out, _ = run(capsys, "sweep", "--eps-grid", "0.25:1.0:3:log",
                           "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 0
        rows = out.strip().splitlines()[1:]
        eps = [float(r.split(",")[0]) for r in rows]
        assert eps == pytest.approx([0.25, 0.5, 1.0])

    def test_stop_after_separable(self, tmp_path, capsys):
        code, out, _ = run(capsys, "sweep", "--eps-grid", "0.5:2.0:16",
                           "--stop-after-separable",
                           "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) < 16
        assert rows[-1].split(",")[1] == "separable"
        assert all(r.split(",")[1] == "entangled" for r in rows[:-1])

    @pytest.mark.parametrize("spec", ["1.0:0.5:3", "0.5:1.0:1", "0:1:3:log", "a:b:c"])
    def test_bad_grid_spec(self, tmp_path, capsys, spec):
        code, _, err = run(capsys, "sweep", "--eps-grid", spec,
                           "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 2
        assert err.startswith("error:")

    def test_missing_eps_arguments(self, tmp_path, capsys):
        code, _, err = run(capsys, "sweep", "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 2
        assert "sweep needs" in err


class TestThreshold:
    def test_tmss_identity_threshold(self, tmp_path, capsys):
        code, out, _ = run(capsys, "threshold",
                           "--input", write_cm(tmp_path, tmss(1.0)))
        assert code == 0
        assert json.loads(out)["threshold"] == pytest.approx(EPS_STAR_R1, abs=1e-6)

    def test_already_separable_is_zero(self, tmp_path, capsys):
        cm = random_separable_cm(1, 1, seed=0)[0]
        code, out, _ = run(capsys, "threshold", "--input", write_cm(tmp_path, cm))
        assert code == 0
        assert json.loads(out)["threshold"] == 0.0

    def test_useless_perturbation_is_numerical_failure(self, tmp_path, capsys):
        zero = BipartiteCM.from_gamma(np.zeros((4, 4)), 1, 1)
        code, _, err = run(capsys, "threshold",
                           "--input", write_cm(tmp_path, tmss(1.0)),
                           "--perturbation", write_cm(tmp_path, zero, "pert.json"),
                           "--eps-max", "1e3")
        assert code == 3
        assert err.startswith("numerical failure:")


class TestGen:
    def test_tmss_round_trip(self, tmp_path, capsys):
        code, out, _ = run(capsys, "gen", "tmss", "--r", "0.8")
        assert code == 0
        np.testing.assert_allclose(parse_cm(out).gamma, tmss(0.8).gamma, atol=0)

    def test_seed_determinism(self, capsys):
        code1, out1, _ = run(capsys, "gen", "random", "--n", "2", "--seed", "5")
        code2, out2, _ = run(capsys, "gen", "random", "--n", "2", "--seed", "5")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_separable_kind_decides_separable(self, tmp_path, capsys):
        code, out, _ = run(capsys, "gen", "separable", "--seed", "2",
                           "--output", str(tmp_path / "sep.json"))
        assert code == 0 and out == ""
        code, out, _ = run(capsys, "check", "--input", str(tmp_path / "sep.json"))
        assert code == 0
        assert json.loads(out)["verdict"] == "separable"


class TestTopLevel:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert capsys.readouterr().out.startswith("gsep ")
