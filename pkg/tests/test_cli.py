import json

import numpy as np
import pytest

from alexot import cli
from alexot.serialization import dump_json, instance_from_json, load_json

CONE_SPACE = '{"kind":"cone","total_angle":4.71238898038469}'
ANNULUS = '{"kind":"annulus","r_min":1.0,"r_max":2.0}'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def make_instance(capsys, tmp_path, n=30, m=4, seed=5):
    path = tmp_path / "inst.json"
    code, _, err = run(
        capsys,
        "generate",
        "--space", CONE_SPACE,
        "--cost", '{"kind":"quadratic"}',
        "--source", ANNULUS,
        "--target", ANNULUS,
        "--n-source", str(n),
        "--n-target", str(m),
        "--seed", str(seed),
        "--out", str(path),
    )
    assert code == 0, err
    return path


class TestGenerate:
    def test_round_trip_and_determinism(self, capsys, tmp_path):
        p1 = make_instance(capsys, tmp_path)
        text1 = p1.read_text()
        inst = instance_from_json(json.loads(text1))
        assert inst.source.n_atoms == 30
        assert inst.target.n_atoms == 4
        # byte-identical regeneration under the same seed
        p2 = tmp_path / "again.json"
        run(
            capsys, "generate", "--space", CONE_SPACE, "--cost", '{"kind":"quadratic"}',
            "--source", ANNULUS, "--target", ANNULUS,
            "--n-source", "30", "--n-target", "4", "--seed", "5", "--out", str(p2),
        )
        assert p2.read_text() == text1

    def test_grid_preset(self, capsys, tmp_path):
        path = tmp_path / "grid.json"
        code, _, _ = run(
            capsys, "generate",
            "--space", '{"kind":"plane"}',
            "--cost", '{"kind":"quadratic"}',
            "--source", '{"kind":"grid","nx":20,"ny":20}',
            "--translate", "2,0",
            "--out", str(path),
        )
        assert code == 0
        inst = instance_from_json(load_json(str(path)))
        assert inst.source.n_atoms == 400
        assert np.allclose(inst.target.points, inst.source.points + [2.0, 0.0])

    def test_empty_measure_is_input_error(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "generate", "--space", '{"kind":"plane"}',
            "--cost", '{"kind":"quadratic"}',
            "--source", '{"kind":"rect","xmin":0,"xmax":1,"ymin":0,"ymax":1}',
            "--target", '{"kind":"rect","xmin":0,"xmax":1,"ymin":0,"ymax":1}',
            "--n-source", "0", "--n-target", "3",
        )
        assert code == 2
        assert "error" in err


class TestSolve:
    def test_identity_instance(self, capsys, tmp_path):
        pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        atoms = [{"point": p, "weight": 1 / 3} for p in pts]
        inst = {
            "space": {"kind": "plane"},
            "cost": {"kind": "quadratic"},
            "source": {"atoms": atoms},
            "target": {"atoms": atoms},
        }
        path = tmp_path / "id.json"
        dump_json(inst, str(path))
        code, out, _ = run(capsys, "solve", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["cost"] == 0.0
        assert abs(payload["gap"]) <= 1e-9
        assert sorted(e[:2] for e in payload["plan"]) == [[0, 0], [1, 1], [2, 2]]

    def test_line_instance_cost(self, capsys, tmp_path):
        inst = {
            "space": {"kind": "plane"},
            "cost": {"kind": "quadratic"},
            "source": {"atoms": [{"point": [0, 0], "weight": 0.5},
                                 {"point": [1, 0], "weight": 0.5}]},
            "target": {"atoms": [{"point": [1, 0], "weight": 0.5},
                                 {"point": [2, 0], "weight": 0.5}]},
        }
        path = tmp_path / "line.json"
        dump_json(inst, str(path))
        code, out, _ = run(capsys, "solve", str(path), "--oracle")
        assert code == 0
        payload = json.loads(out)
        assert payload["cost"] == pytest.approx(0.5, abs=1e-12)
        assert payload["oracle_value"] == pytest.approx(0.5, abs=1e-12)

    def test_malformed_json_is_input_error(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"space": {"kind": "plane",}}')
        code, _, err = run(capsys, "solve", str(path))
        assert code == 2
        assert "broken.json:1:" in err

    def test_oracle_size_limit_is_capability_error(self, capsys, tmp_path):
        path = make_instance(capsys, tmp_path, n=30, m=4)
        code, _, err = run(capsys, "solve", str(path), "--oracle")
        assert code == 3
        assert "oracle" in err


class TestVerify:
    def test_curvature_pass_and_fail(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "verify", "curvature", "--space", CONE_SPACE,
            "--k", "0", "--samples", "5000", "--seed", "1",
        )
        assert code == 0
        assert json.loads(out)["passed"] is True
        code, out, _ = run(
            capsys, "verify", "curvature",
            "--space", '{"kind":"cone","total_angle":9.42477796076938}',
            "--k", "0", "--samples", "5000", "--seed", "1",
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["min_slack"] < -1e-3
        assert payload["witness"] is not None

    def test_duality(self, capsys, tmp_path):
        path = make_instance(capsys, tmp_path)
        code, out, _ = run(capsys, "verify", "duality", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["passed"] is True
        assert payload["checks"]["idempotence_ok"] is True

    def test_map_with_refine_and_csv(self, capsys, tmp_path):
        path = make_instance(capsys, tmp_path, n=30, m=4, seed=8)
        csv_path = tmp_path / "atoms.csv"
        out_path = tmp_path / "map.json"
        code, _, err = run(
            capsys, "verify", "map", str(path),
            "--refine", "50,100", "--csv", str(csv_path), "--out", str(out_path),
        )
        assert code == 0, err
        payload = json.loads(out_path.read_text())
        assert payload["passed"] is True
        assert payload["monotone"] is True
        assert payload["sizes"] == [50, 100]
        lines = csv_path.read_text().splitlines()
        header = lines[0].split(",")
        assert header[:4] == ["index", "status", "assigned", "argmin"]
        assert "x0" in header and "y1" in header and "grad_norm" in header
        assert len(lines) == 101
        # verified rows carry the atom and target coordinates
        first = lines[1].split(",")
        assert first[1] == "verified"
        assert all(first[4:8])

    def test_map_refine_without_region_is_capability_error(self, capsys, tmp_path):
        pts = [[0.0, 0.0], [1.0, 0.0]]
        inst = {
            "space": {"kind": "plane"},
            "cost": {"kind": "quadratic"},
            "source": {"atoms": [{"point": p, "weight": 0.5} for p in pts]},
            "target": {"atoms": [{"point": [0.5, 0.5], "weight": 1.0}]},
        }
        path = tmp_path / "noregion.json"
        dump_json(inst, str(path))
        code, _, _ = run(capsys, "verify", "map", str(path), "--refine", "10,20")
        assert code == 3

    def test_uniqueness(self, capsys, tmp_path):
        path = make_instance(capsys, tmp_path, seed=12)
        code, out, _ = run(capsys, "verify", "uniqueness", str(path))
        assert code == 0
        assert json.loads(out)["agreed"] is True

    def test_first_variation(self, capsys):
        code, out, _ = run(
            capsys, "verify", "first-variation",
            "--space", '{"kind":"plane"}', "--configs", "30", "--seed", "3",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["n_failed"] == 0
        assert payload["n_configs"] == 30


def test_reports_embed_config_for_reproduction(capsys, tmp_path):
    path = make_instance(capsys, tmp_path, seed=21)
    code, out, _ = run(capsys, "verify", "uniqueness", str(path), "--seed", "21")
    payload = json.loads(out)
    assert payload["config"]["seed"] == 21
    assert payload["config"]["space"]["kind"] == "cone"
