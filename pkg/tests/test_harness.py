"""Config validation, fits, persistence, and the experiment surfaces."""

import json
import math

import numpy as np
import pytest

from hybdyn.cli import main as cli_main
from hybdyn.errors import ConfigError
from hybdyn.harness import (cmd_circle_demo, fit_slope,
                            load_config, load_record, run, write_record)

CIRCLE_INI = """
[experiment]
kind = circle-demo
label = unit
r = 0.5

[series]
f = t
j_max = 12
"""

SLOPE_INI = """
[experiment]
kind = lyap-slope
label = square
family = z^2
r = 0.5

[tgrid]
moduli = 1e-1, 1e-2, 1e-3
phases = 2

[sampler]
seed = 23
n_burn = 40
n_keep = 800
"""

CONVERGE_INI = """
[experiment]
kind = hybrid-converge
label = conv
family = z^2
r = 0.5

[tgrid]
moduli = 1e-2, 1e-4, 1e-6
phases = 2

[sampler]
seed = 23
n_burn = 40
n_keep = 500

[datum]
sections = w0 + w1; w1
"""


class TestConfig:
    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown config section"):
            load_config("[experiment]\nkind = circle-demo\n[mystery]\nx = 1\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key"):
            load_config("[experiment]\nkind = circle-demo\nturbo = on\n")

    def test_bad_radius(self):
        with pytest.raises(ConfigError, match="lie in"):
            load_config("[experiment]\nkind = circle-demo\nr = 1.5\n"
                        "[series]\nf = t\n")

    def test_modulus_outside_disk(self):
        with pytest.raises(ConfigError, match="outside the punctured disk"):
            load_config("[experiment]\nkind = lyap-slope\nfamily = z^2\nr = 0.5\n"
                        "[tgrid]\nmoduli = 0.7\n")

    def test_kind_mismatch(self):
        with pytest.raises(ConfigError, match="does not match"):
            load_config(CIRCLE_INI, kind="lyap-slope")

    def test_slope_fit_needs_three_moduli(self):
        with pytest.raises(ConfigError, match="degenerate with fewer"):
            load_config("[experiment]\nkind = lyap-slope\nfamily = z^2\nr = 0.5\n"
                        "[tgrid]\nmoduli = 1e-2, 1e-3\n")

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="family is required"):
            load_config("[experiment]\nkind = na-measure\n")

    def test_hash_depends_on_seed(self):
        a = load_config(SLOPE_INI)
        b = load_config(SLOPE_INI)
        b.seed = 99
        assert a.config_hash() != b.config_hash()


class TestFit:
    def test_synthetic_exact(self):
        xs = np.linspace(1.0, 9.0, 7)
        ys = 0.5 * xs + 3.0
        slope, intercept, stderr = fit_slope(xs, ys)
        assert abs(slope - 0.5) < 1e-12
        assert abs(intercept - 3.0) < 1e-12
        assert stderr < 1e-12

    def test_noise_gives_stderr(self):
        rng = np.random.default_rng(0)
        xs = np.linspace(0, 10, 40)
        ys = 2.0 * xs + rng.normal(scale=0.5, size=40)
        slope, _, stderr = fit_slope(xs, ys)
        assert abs(slope - 2.0) < 4 * stderr

    def test_degenerate_fit(self):
        with pytest.raises(ConfigError):
            fit_slope([1.0], [2.0])


class TestCircleDemo:
    def test_t_column_constant(self):
        rec = cmd_circle_demo(load_config(CIRCLE_INI))
        values = [row[2] for row in rec.rows]
        assert all(v == pytest.approx(0.5, abs=1e-12) for v in values)

    def test_inverse_t_column(self):
        # monomials evaluate exactly to r**ord at every point of the circle
        cfg = load_config(CIRCLE_INI.replace("f = t", "f = t^-1"))
        rec = cmd_circle_demo(cfg)
        assert rec.summary["limit"] == pytest.approx(2.0)
        assert all(row[4] < 1e-12 for row in rec.rows)

    def test_nonmonomial_error_decreases(self):
        cfg = load_config(CIRCLE_INI.replace("f = t", "f = t^-1 + 1"))
        rec = cmd_circle_demo(cfg)
        assert rec.summary["limit"] == pytest.approx(2.0)
        assert rec.rows[-1][4] < rec.rows[0][4]

    def test_one_plus_t_tends_to_one(self):
        cfg = load_config(CIRCLE_INI.replace("f = t", "f = 1 + t"))
        rec = cmd_circle_demo(cfg)
        assert rec.summary["limit"] == 1.0
        assert rec.rows[-1][2] == pytest.approx(1.0, abs=1e-3)


class TestPersistence:
    def test_byte_identical_reruns(self, tmp_path):
        cfg = load_config(SLOPE_INI)
        rec1 = run(cfg, out_dir=str(tmp_path))
        body1 = (tmp_path / "square.csv").read_bytes()
        rec2 = run(cfg, out_dir=str(tmp_path))
        body2 = (tmp_path / "square.csv").read_bytes()
        assert body1 == body2
        assert rec1.rows == rec2.rows

    def test_hash_mismatch_refused(self, tmp_path):
        cfg = load_config(SLOPE_INI)
        run(cfg, out_dir=str(tmp_path))
        other = load_config(SLOPE_INI)
        other.seed = 99
        with pytest.raises(ConfigError, match="refusing to overwrite"):
            write_record(run(other), str(tmp_path))

    def test_load_record_checks_hash(self, tmp_path):
        cfg = load_config(SLOPE_INI)
        run(cfg, out_dir=str(tmp_path))
        assert load_record(str(tmp_path), cfg)["config_hash"] == cfg.config_hash()
        other = load_config(SLOPE_INI)
        other.seed = 99
        with pytest.raises(ConfigError, match="config hash"):
            load_record(str(tmp_path), other)

    def test_no_timestamps_in_csv(self, tmp_path):
        cfg = load_config(CIRCLE_INI)
        run(cfg, out_dir=str(tmp_path))
        text = (tmp_path / "unit.csv").read_text()
        assert "20" not in text.splitlines()[1] or "created" not in text


class TestExperiments:
    def test_lyap_slope_constant_family(self):
        rec = run(load_config(SLOPE_INI))
        s = rec.summary
        assert abs(s["slope"]) < 3 * s["slope_stderr"] + 1e-9
        assert s["na_ratio"] == 0.0
        for pm in s["per_modulus"]:
            assert pm["lyapunov"] == pytest.approx(math.log(2), abs=1e-9)
        assert s["briend_duval_ok"]

    def test_jobs_deterministic(self):
        cfg = load_config(SLOPE_INI)
        rec1 = run(cfg, jobs=1)
        rec2 = run(cfg, jobs=3)
        assert rec1.rows == rec2.rows

    def test_hybrid_converge_decreasing(self):
        rec = run(load_config(CONVERGE_INI))
        s = rec.summary
        assert s["na_integral"] == 0.0
        errs = [pm["abs_error"] for pm in s["per_modulus"]]
        assert errs[-1] < 0.05
        assert s["monotone_within_stderr"]
        assert errs[0] > errs[-1]  # genuinely nontrivial integrand

    def test_na_measure_summary(self):
        cfg = load_config("[experiment]\nkind = na-measure\nlabel = m\n"
                          "family = z^2 + 1/t\nr = 0.5\n[green]\nn_max = 16\n")
        rec = run(cfg)
        s = rec.summary
        assert s["total_mass"] == pytest.approx(1.0, abs=1e-9)
        assert s["na_ratio"] == pytest.approx(0.5, abs=1e-12)
        assert 0.0 <= s["leaf_mass_fraction"] <= 1.0
        assert s["good_reduction_exponent"] == "4/1"


class TestCli:
    def test_end_to_end(self, tmp_path):
        ini = tmp_path / "c.ini"
        ini.write_text(CIRCLE_INI)
        code = cli_main(["circle-demo", "--config", str(ini),
                         "--out", str(tmp_path / "res")])
        assert code == 0
        assert (tmp_path / "res" / "unit.csv").exists()
        payload = json.loads((tmp_path / "res" / "unit.json").read_text())
        assert payload["kind"] == "circle-demo"

    def test_config_error_exit_code(self, tmp_path):
        ini = tmp_path / "bad.ini"
        ini.write_text("[experiment]\nkind = circle-demo\nbogus = 1\n")
        assert cli_main(["circle-demo", "--config", str(ini)]) == 2

    def test_numerical_error_exit_code(self, tmp_path):
        ini = tmp_path / "degenerate.ini"
        ini.write_text("[experiment]\nkind = na-measure\nlabel = d\n"
                       "family = (z^2 + z)/(z^2 + z)\nr = 0.5\n")
        assert cli_main(["na-measure", "--config", str(ini)]) == 3

    def test_seed_override_changes_hash(self, tmp_path):
        ini = tmp_path / "s.ini"
        ini.write_text(SLOPE_INI)
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        assert cli_main(["lyap-slope", "--config", str(ini), "--out", out1]) == 0
        assert cli_main(["lyap-slope", "--config", str(ini), "--out", out2,
                         "--seed", "99"]) == 0
        h1 = json.loads((tmp_path / "a" / "square.json").read_text())["config_hash"]
        h2 = json.loads((tmp_path / "b" / "square.json").read_text())["config_hash"]
        assert h1 != h2
