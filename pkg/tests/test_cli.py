import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import FIXTURES, load_fixture
from prambig import liftnd
from prambig.cli import main
from prambig.grid_fft import read_field


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def compact_dir(tmp_path):
    raw = load_fixture("scene_compact.json")
    pair = write_json(tmp_path / "pair.json", raw["pair"])
    comps = write_json(tmp_path / "comps.json", {k: raw["scene"][k] for k in
                                                 ("components", "separation", "kernel_radius", "grid")})
    out = tmp_path / "scene"
    assert main(["scene", "--pair", pair, "--components", comps, "--out", str(out)]) == 0
    return out


class TestGenerate:
    def test_deterministic_and_valid(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            assert main(["generate", "--dim", "2", "--factors", "2", "--atoms", "3", "--seed", "7",
                         "--grid", "64", "--out", str(p)]) == 0
        assert a.read_bytes() == b.read_bytes()
        spec = liftnd.PairSpec.from_json(json.loads(a.read_text()))
        assert spec.dim == 2 and len(spec.factors) == 2 and spec.grid.samples_per_axis >= 64
        assert liftnd.check_pair_spec(spec) == []

    def test_zero_factors_is_a_usage_error(self, tmp_path, capsys):
        assert main(["generate", "--dim", "2", "--factors", "0", "--out", str(tmp_path / "x.json")]) == 2
        assert "--factors" in capsys.readouterr().err

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["generate", "--dim", "2"])
        assert exc.value.code == 2


class TestVerify:
    def test_fixture_passes(self, tmp_path):
        out = tmp_path / "cert.json"
        assert main(["verify", str(FIXTURES / "pair_d2_axes.json"), "--out", str(out)]) == 0
        cert = json.loads(out.read_text())
        assert cert["overall_pass"] and cert["kind"] == "pair"
        names = {c["name"] for c in cert["checks"]}
        assert {"modulus.max_rel_deviation", "support.outside_energy", "association.not_associated"} <= names
        assert any(c["name"].startswith("l2.") for c in cert["not_applicable"])

    def test_certificate_is_byte_identical(self, tmp_path):
        outs = [tmp_path / f"c{k}.json" for k in range(2)]
        for o in outs:
            main(["verify", str(FIXTURES / "pair_d2_axes_q2.json"), "--out", str(o)])
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_empty_selection_fails_with_named_violation(self, capsys):
        assert main(["verify", str(FIXTURES / "pair_empty_selection.json")]) == 1
        captured = capsys.readouterr()
        assert "selection_admissible" in captured.err
        assert "I' nonempty" in captured.out

    def test_empty_selection_certificate_names_clause(self, tmp_path):
        out = tmp_path / "c.json"
        main(["verify", str(FIXTURES / "pair_empty_selection.json"), "--out", str(out)])
        assert "I' nonempty" in out.read_text()

    def test_separation_at_twice_kernel_radius_is_rejected(self, capsys):
        assert main(["verify", str(FIXTURES / "scene_r_equals_2delta.json")]) == 2
        assert "requires r > 2δ" in capsys.readouterr().err

    def test_scene_fixture(self, tmp_path):
        out = tmp_path / "cert.json"
        assert main(["verify", str(FIXTURES / "scene_compact.json"), "--out", str(out)]) == 0
        cert = json.loads(out.read_text())
        assert cert["kind"] == "scene" and cert["overall_pass"]

    def test_malformed_json_reports_location(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n "dim": 2,\n "factors": [\n}\n')
        assert main(["verify", str(bad)]) == 2
        assert "bad.json:4:" in capsys.readouterr().err

    def test_schema_violation_reports_path(self, tmp_path, capsys):
        obj = load_fixture("pair_d2_axes.json")
        obj["factors"][0]["omega"] = "north"
        assert main(["verify", write_json(tmp_path / "s.json", obj)]) == 2
        assert "factors/0/omega" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert main(["verify", "/nonexistent/spec.json"]) == 2


class TestSceneAndBench:
    def test_scene_outputs(self, compact_dir):
        manifest = json.loads((compact_dir / "manifest.json").read_text())
        for key in ("v", "v_f", "v_g", "v_f_hat_modulus", "v_g_hat_modulus", "problem", "certificate"):
            assert (compact_dir / manifest[key]).exists()
        assert json.loads((compact_dir / "certificate.json").read_text())["overall_pass"]
        a = read_field(compact_dir / "v_f_hat_modulus.bin").values
        b = read_field(compact_dir / "v_g_hat_modulus.bin").values
        assert np.max(np.abs(a - b)) <= 1e-10 * a.max()

    def test_random_components(self, tmp_path):
        pair = write_json(tmp_path / "pair.json", load_fixture("scene_compact.json")["pair"])
        out = tmp_path / "rs"
        assert main(["scene", "--pair", pair, "--random-components", "2", "--seed", "3", "--out", str(out)]) == 0
        assert len(json.loads((out / "scene.json").read_text())["scene"]["components"]) == 2

    def test_scene_needs_components(self, tmp_path):
        pair = write_json(tmp_path / "pair.json", load_fixture("scene_compact.json")["pair"])
        assert main(["scene", "--pair", pair, "--out", str(tmp_path / "o")]) == 2

    def test_bench_report(self, compact_dir):
        args = ["bench", "--problem", str(compact_dir), "--runs", "3", "--iters", "25", "--seed", "4"]
        assert main(args) == 0
        first = (compact_dir / "report.json").read_bytes()
        rep = json.loads(first)
        assert len(rep["records"]) == 3 and [r["seed"] for r in rep["records"]] == [4, 5, 6]
        assert rep["summary"]["residual_v_f"] <= 1e-10 and rep["summary"]["residual_v_g"] <= 1e-9
        assert (compact_dir / "report.csv").exists()
        assert main(args) == 0
        assert (compact_dir / "report.json").read_bytes() == first


class TestExport:
    def test_export(self, tmp_path):
        out = tmp_path / "exp"
        assert main(["export", str(FIXTURES / "pair_d2_axes.json"), "--grid", "128", "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["grid"]["samples_per_axis"] == 128
        f_hat = read_field(out / "f_hat.bin")
        g_hat = read_field(out / "g_hat.bin")
        assert np.allclose(np.abs(f_hat.values), np.abs(g_hat.values), rtol=0, atol=1e-10 * np.abs(f_hat.values).max())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "prambig.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
