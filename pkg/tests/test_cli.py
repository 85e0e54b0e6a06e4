"""JSON interchange and the command-line front end."""

import json
import subprocess
import sys

import numpy as np
import pytest

from curvequad import io
from curvequad.cli import RunConfig, main
from curvequad.curves import PlaneCurve, RationalCurve
from curvequad.gauss import QuadratureRule
from curvequad.moments import MeasureSpec


@pytest.fixture
def files(tmp_path):
    paths = {
        "uniform": tmp_path / "uniform.json",
        "unit": tmp_path / "unit.json",
        "cubic": tmp_path / "cubic.json",
        "circle": tmp_path / "circle.json",
        "broken": tmp_path / "broken.json",
    }
    io.dump(MeasureSpec.uniform(-1, 1), paths["uniform"])
    io.dump(MeasureSpec.uniform(0, 1), paths["unit"])
    io.dump(RationalCurve.monomial(1, 2, 3), paths["cubic"])
    io.dump(PlaneCurve.circle(), paths["circle"])
    paths["broken"].write_text('{"kind": "density", ')
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestIO:
    def test_floats_use_17_digits(self):
        assert io.dumps([0.1]).strip() == "[0.10000000000000001]"
        assert io.dumps({"x": 2.0}).splitlines()[1].strip() == '"x": 2.0'

    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        rule = QuadratureRule(rng.standard_normal((5, 2)), rng.uniform(0.1, 1, 5), 3, "pruned")
        io.dump(rule, tmp_path / "r.json")
        back = io.load_rule(tmp_path / "r.json")
        np.testing.assert_array_equal(back.nodes, rule.nodes)
        np.testing.assert_array_equal(back.weights, rule.weights)

    def test_byte_identical(self):
        rule = QuadratureRule(np.array([[1 / 3], [2 / 3]]), [0.5, 0.5], 1, "gauss")
        assert io.dumps(rule) == io.dumps(QuadratureRule.from_json(json.loads(io.dumps(rule))))

    def test_missing_file(self, tmp_path):
        with pytest.raises(io.InputError) as exc:
            io.load_measure(tmp_path / "nope.json")
        assert "nope.json" in exc.value.path

    def test_csv(self):
        rule = QuadratureRule(np.array([[0.5, 0.25]]), [2.0], 2, "pruned", [0.5])
        lines = io.rule_csv(rule).splitlines()
        assert lines[0] == "t,x1,x2,weight"
        assert lines[1] == "0.5,0.5,0.25,2.0"


class TestRunConfig:
    def test_env_seed_overrides(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text('{"seed": 5}')
        assert RunConfig.load(cfg_path, env={}).seed == 5
        assert RunConfig.load(cfg_path, env={"CURVEQUAD_SEED": "11"}).seed == 11


class TestCommands:
    def test_gauss_two_nodes(self, capsys, files):
        code, out, _ = run(capsys, "gauss", "--measure", files["uniform"], "--strength", 3)
        data = json.loads(out)
        assert code == 0 and data["nodes"] == 2
        np.testing.assert_allclose(sorted(data["rule"]["t"]), [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-14)

    def test_repeat_runs_byte_identical(self, capsys, files, tmp_path):
        outs = []
        for i in range(2):
            target = tmp_path / f"rule{i}.json"
            code, _, _ = run(capsys, "synthesize", "--curve", files["cubic"], "--measure", files["unit"],
                             "--strength", 5, "--out", target)
            assert code == 0
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]

    def test_synthesize_then_verify(self, capsys, files, tmp_path):
        rule_path = tmp_path / "rule.json"
        run(capsys, "synthesize", "--curve", files["cubic"], "--measure", files["unit"], "--strength", 5,
            "--out", rule_path)
        code, _, err = run(capsys, "verify", "--rule", rule_path, "--curve", files["cubic"],
                           "--measure", files["unit"])
        assert code == 0 and "verdict: pass" in err

        data = json.loads(rule_path.read_text())
        data["rule"]["weights"][0] *= 1.01
        rule_path.write_text(json.dumps(data))
        code, out, _ = run(capsys, "verify", "--rule", rule_path, "--curve", files["cubic"],
                           "--measure", files["unit"])
        assert code == 1 and json.loads(out)["verdict"] == "fail"

    def test_malformed_input_exit_2(self, capsys, files):
        code, _, err = run(capsys, "gauss", "--measure", files["broken"], "--strength", 3)
        rec = json.loads(err.strip().splitlines()[-1])
        assert code == 2 and rec["file"].endswith("broken.json")

    def test_bounds_table(self, capsys):
        code, out, _ = run(capsys, "bounds", "--setting", "xd", "--d", 3, "--s", 3)
        assert code == 0 and "xd-curve" in out

    def test_bounds_json(self, capsys):
        code, out, _ = run(capsys, "bounds", "--setting", "lower", "--d", 3, "--s", 5, "--format", "json")
        rows = json.loads(out)
        assert code == 0 and rows[0]["value"] == 8

    def test_psi_rank_and_places(self, capsys, files):
        code, out, _ = run(capsys, "psi-rank", "--curve", files["cubic"], "--s", 3)
        assert code == 0 and json.loads(out)["surjective"]
        code, out, _ = run(capsys, "places-at-infinity", "--curve", files["circle"])
        assert code == 0 and json.loads(out)["places_at_infinity"] == 0

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "curvequad", "exponent-coverage", "--d", "3", "--s", "3"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout)["complete"]
