import json
import subprocess
import sys

import pytest

from subreg import Schedule, emit_report, parse_config, run_config
from subreg.report import ConfigError, build_problem, report_payload

FULL_HS_CONFIG = {
    "problem": "half-square",
    "q": 0.5,
    "gamma": 0.5,
    "schedule": {"sample_budget": 1024, "steps": 8, "seed": 7},
    "checks": ["slopes", "moduli", "criteria", "theorem-7T1", "lm-constants"],
}

EXPECTED_ENTRY_NAMES = [
    "uniform_strict_q_slope",
    "strict_q_slope",
    "modified_strict_q_slope",
    "subdiff_strict_q_slope_plain",
    "subdiff_strict_q_slope_approx",
    "subdiff_strict_q_slope_modified",
    "subdiff_strict_q_slope_modified_approx",
    "limiting_coderivative_min_norm",
    "lm_alpha",
    "lm_beta",
    "sr_q",
]


class TestConfigValidation:
    def test_q_out_of_range_rejected(self):
        with pytest.raises(ConfigError):
            parse_config({"problem": "half-square", "q": 1.5})

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError):
            parse_config({"problem": "half-square", "q": 0.5, "extra": 1})
        with pytest.raises(ConfigError):
            parse_config(
                {"problem": "half-square", "q": 0.5, "schedule": {"rho_zero": 1}}
            )

    def test_unknown_check_rejected(self):
        with pytest.raises(ConfigError):
            parse_config({"problem": "half-square", "q": 0.5, "checks": ["nope"]})

    def test_unknown_catalog_name_rejected(self):
        cfg = parse_config({"problem": "nosuch", "q": 0.5})
        with pytest.raises(ConfigError):
            build_problem(cfg)

    def test_inline_piecewise_problem(self):
        cfg = parse_config(
            {
                "problem": {
                    "pieces": [{"domain": [-1.0, 1.0], "coeffs": [0.0, 1.0]}],
                    "xbar": 0.0,
                    "ybar": 0.0,
                    "flags": {"convex": True, "smooth": True},
                },
                "q": 1.0,
            }
        )
        problem = build_problem(cfg)
        assert problem.convex
        assert problem.graph_membership([0.5], [0.5])

    def test_defaults(self):
        cfg = parse_config({"problem": "identity", "q": 1.0})
        assert cfg.schedule == Schedule()
        assert set(cfg.checks) == {
            "slopes",
            "moduli",
            "criteria",
            "invariants",
            "theorem-7T1",
            "lm-constants",
        }


@pytest.fixture(scope="module")
def hs_report():
    return run_config(parse_config(FULL_HS_CONFIG))


class TestRunAndEmit:
    def test_entry_names_present(self, hs_report):
        for name in EXPECTED_ENTRY_NAMES:
            assert name in hs_report.constants, name

    def test_half_square_values_near_one(self, hs_report):
        for name in EXPECTED_ENTRY_NAMES:
            if name == "lm_alpha":
                continue  # enlargement constant sits at 1/sqrt(2) here
            value = hs_report.constants[name].value
            assert value == pytest.approx(1.0, abs=0.05), name

    def test_all_passed(self, hs_report):
        assert hs_report.all_passed

    def test_json_is_parseable_and_17_digits(self, hs_report):
        text = emit_report(hs_report, "json")
        data = json.loads(text)
        assert data["problem"] == "half-square"
        assert data["constants"]["sr_q"]["value"] == 1.0
        assert "e-" in format(1 / 3, ".17g") or len(format(1 / 3, ".17g")) >= 17

    def test_table_format_lists_constants(self, hs_report):
        text = emit_report(hs_report, "table")
        for name in EXPECTED_ENTRY_NAMES:
            assert name in text
        assert "criteria at gamma=0.5" in text

    def test_byte_determinism_in_process(self):
        a = emit_report(run_config(parse_config(FULL_HS_CONFIG)), "json")
        b = emit_report(run_config(parse_config(FULL_HS_CONFIG)), "json")
        assert a == b

    def test_provenance_changes_with_seed(self):
        cfg1 = parse_config(FULL_HS_CONFIG)
        data = dict(FULL_HS_CONFIG)
        data["schedule"] = dict(data["schedule"], seed=8)
        cfg2 = parse_config(data)
        assert cfg1.config_hash() != cfg2.config_hash()


def test_infinite_values_serialized_as_literal_inf():
    cfg = parse_config(
        {
            "problem": "constant",
            "q": 1.0,
            "schedule": {"sample_budget": 512, "steps": 6},
            "checks": ["slopes"],
        }
    )
    report = run_config(cfg)
    text = emit_report(report, "json")
    data = json.loads(text)
    assert data["constants"]["uniform_strict_q_slope"]["value"] == "inf"
    assert data["constants"]["uniform_strict_q_slope"]["status"] == "inconclusive"


def test_empty_checks_report_has_provenance_only():
    cfg = parse_config({"problem": "identity", "q": 1.0, "checks": []})
    report = run_config(cfg)
    payload = report_payload(report)
    assert payload["constants"] == {}
    assert payload["criteria"] is None
    assert payload["invariant_results"] == []
    assert "config_sha256" in payload["provenance"]


class TestCLI:
    def _run(self, args, tmp_path):
        return subprocess.run(
            [sys.executable, "-m", "subreg.cli"] + args,
            capture_output=True,
            text=True,
            cwd=str(tmp_path),
        )

    def test_invalid_q_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"problem": "half-square", "q": 1.5}))
        res = self._run(["--config", str(cfg)], tmp_path)
        assert res.returncode == 2
        assert "invalid configuration" in res.stderr

    def test_missing_config_exits_2(self, tmp_path):
        res = self._run(["--config", str(tmp_path / "absent.json")], tmp_path)
        assert res.returncode == 2

    def test_verify_run_passes(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "problem": "identity",
                    "q": 1.0,
                    "schedule": {"sample_budget": 512, "steps": 6},
                }
            )
        )
        out = tmp_path / "report.json"
        res = self._run(
            ["--config", str(cfg), "--verify", "--out", str(out)], tmp_path
        )
        assert res.returncode == 0, res.stderr
        data = json.loads(out.read_text())
        assert data["all_passed"] is True
        assert all(r["passed"] for r in data["invariant_results"])

    def test_seed_override_changes_provenance(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "problem": "identity",
                    "q": 1.0,
                    "schedule": {"sample_budget": 256, "steps": 4},
                    "checks": ["slopes"],
                }
            )
        )
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        r1 = self._run(["--config", str(cfg), "--out", str(out1)], tmp_path)
        r2 = self._run(
            ["--config", str(cfg), "--seed-override", "99", "--out", str(out2)],
            tmp_path,
        )
        assert r1.returncode == 0 and r2.returncode == 0
        d1, d2 = json.loads(out1.read_text()), json.loads(out2.read_text())
        assert d1["provenance"]["seed"] == 0
        assert d2["provenance"]["seed"] == 99
        assert d1["provenance"]["config_sha256"] != d2["provenance"]["config_sha256"]
