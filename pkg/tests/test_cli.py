import struct
import subprocess
import sys

import pytest

from ebv.cli import run_cli
from ebv.frameio import HEADER_SIZE


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def kv(out):
    pairs = {}
    for line in out.strip().splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            pairs[key] = value
    return pairs


class TestBounds:
    def test_reference_values(self, capsys):
        code, out, _ = run(capsys, "bounds", "--dim", "50", "--num", "99", "--alpha", "0.1")
        assert code == 0
        fields = kv(out)
        assert float(fields["welch_lower_bound"]) == pytest.approx(0.1, abs=1e-12)
        assert fields["max_num_upper_bound"] == "99"
        assert fields["grassmannian_feasibility"] == "true"
        assert fields["sqrt2n_dim_suggestion"] == "15"

    def test_unbounded_formula(self, capsys):
        code, out, _ = run(capsys, "bounds", "--dim", "100", "--num", "1000", "--alpha", "0.1")
        assert code == 0
        assert kv(out)["max_num_upper_bound"] == "none"

    def test_parameter_count_report(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--dim", "100", "--num", "1000", "--embed-dim", "512"
        )
        assert code == 0
        fields = kv(out)
        assert fields["head_params_ebv"] == "51200"
        assert fields["head_params_fc"] == "512000"
        assert float(fields["head_params_ratio"]) == pytest.approx(10.0)


class TestGenerateAndStats:
    def test_generate_then_stats(self, capsys, tmp_path):
        path = str(tmp_path / "f.ebv")
        code, out, _ = run(
            capsys, "generate", "--dim", "8", "--num", "8", "--alpha", "0.001",
            "--tol", "0.001", "--out", path, "--quiet",
        )
        assert code == 0
        assert kv(out)["converged"] == "true"
        code, out, _ = run(capsys, "stats", "--in", path)
        assert code == 0
        fields = kv(out)
        assert float(fields["min_angle_deg"]) >= 89.88
        assert fields["satisfies_alpha"] == "true"
        assert fields["dim"] == "8" and fields["num"] == "8"

    def test_stats_json_is_flat(self, capsys, tmp_path):
        import json

        path = str(tmp_path / "f.ebv")
        run(capsys, "generate", "--dim", "4", "--num", "4", "--alpha", "0.01",
            "--out", path, "--quiet")
        code, out, _ = run(capsys, "stats", "--in", path, "--json")
        assert code == 0
        doc = json.loads(out)
        assert isinstance(doc, dict)
        assert not any(isinstance(v, (dict, list)) for v in doc.values())
        assert doc["satisfies_alpha"] is True

    def test_infeasible_alpha_exits_3(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "generate", "--dim", "4", "--num", "8", "--alpha", "0.1",
            "--out", str(tmp_path / "x.ebv"), "--quiet",
        )
        assert code == 3
        assert "Welch" in err

    def test_non_convergence_exits_2_but_writes(self, capsys, tmp_path):
        path = tmp_path / "partial.ebv"
        code, out, err = run(
            capsys, "generate", "--dim", "16", "--num", "32", "--alpha", "0.181",
            "--max-iters", "5", "--out", str(path), "--quiet",
        )
        assert code == 2
        assert path.exists()
        assert kv(out)["converged"] == "false"
        assert "warning" in err

    def test_deterministic_repeat(self, capsys, tmp_path):
        a, b = tmp_path / "a.ebv", tmp_path / "b.ebv"
        argv = ["generate", "--dim", "6", "--num", "12", "--alpha", "0.35",
                "--seed", "5", "--deterministic", "--quiet"]
        code_a, out_a, _ = run(capsys, *argv, "--out", str(a))
        code_b, out_b, _ = run(capsys, *argv, "--out", str(b))
        assert code_a == code_b == 0
        assert a.read_bytes() == b.read_bytes()
        assert out_a.replace(str(a), "X") == out_b.replace(str(b), "X")

    def test_stats_on_corrupted_file(self, capsys, tmp_path):
        path = tmp_path / "c.ebv"
        run(capsys, "generate", "--dim", "4", "--num", "4", "--alpha", "0.01",
            "--out", str(path), "--quiet")
        blob = bytearray(path.read_bytes())
        struct.pack_into("<d", blob, HEADER_SIZE, 9.0)
        path.write_bytes(bytes(blob))
        code, _, err = run(capsys, "stats", "--in", str(path))
        assert code == 1
        assert "norm" in err

    def test_stats_on_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "stats", "--in", str(tmp_path / "nope.ebv"))
        assert code == 1
        assert "error" in err


class TestCapacityCommand:
    def test_probe_trace_is_tab_separated(self, capsys):
        code, out, err = run(capsys, "capacity", "--dim", "4", "--alpha", "0.0")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "num\tsucceeded"
        for line in lines[1:]:
            num, ok = line.split("\t")
            assert num.isdigit() and ok in ("true", "false")
        assert "max_num_found=4" in err


class TestDemoTrain:
    def test_table_and_summary(self, capsys):
        code, out, _ = run(
            capsys, "demo-train", "--classes", "4", "--per-class", "20",
            "--input-dim", "8", "--epochs", "2", "--generate-frame", "--baseline",
            "--seed", "1",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "arm\tepoch\ttrain_loss\ttrain_acc\ttest_acc"
        arms = {line.split("\t")[0] for line in lines[1:] if "\t" in line}
        assert {"ebv", "fc"} <= arms
        fields = kv(out)
        assert "final_test_acc_ebv" in fields
        assert "final_test_acc_fc" in fields
        assert fields["head_trainable_params_ebv"] == "0"

    def test_requires_frame_source(self, capsys):
        code, _, err = run(capsys, "demo-train", "--classes", "4")
        assert code == 1
        assert "frame" in err.lower()

    def test_loads_frame_from_file(self, capsys, tmp_path):
        path = str(tmp_path / "head.ebv")
        run(capsys, "generate", "--dim", "4", "--num", "4", "--alpha", "0.01",
            "--out", path, "--quiet")
        code, out, _ = run(
            capsys, "demo-train", "--classes", "4", "--per-class", "10",
            "--input-dim", "8", "--epochs", "1", "--frame", path,
        )
        assert code == 0
        assert "final_test_acc_ebv" in kv(out)


class TestUsageErrors:
    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "bounds", "--dim", "4", "--num", "8", "--bogus")
        assert code == 64
        assert "usage" in err

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 64

    def test_bad_numeric_parse(self, capsys):
        code, _, err = run(capsys, "bounds", "--dim", "four", "--num", "8")
        assert code == 64
        assert "invalid" in err

    def test_missing_required(self, capsys):
        assert run(capsys, "generate", "--dim", "4")[0] == 64


class TestModuleEntryPoint:
    def test_python_dash_m(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ebv", "bounds", "--dim", "50", "--num", "99"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "welch_lower_bound=0.1" in proc.stdout
