import json
import os

import pytest

from rvvprobe.cli import main
from rvvprobe.fixtures import campaign_fixture_path, fixture_path

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CAL = str(fixture_path("x60_counter_validation.json"))


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenPredictSim:
    def test_round_trip(self, capsys, tmp_path):
        out = tmp_path / "kernels"
        code, stdout, _ = run_cli(capsys, "gen", "--suite", "memory",
                                  "--vlen", "256", "--out", str(out))
        assert code == 0 and "generated 8 kernels" in stdout
        asm = out / "vle32_m1_unit_load.s"
        assert asm.exists() and (out / "vle32_m1_unit_load.json").exists()

        code, stdout, _ = run_cli(capsys, "predict", "--kernel", str(asm),
                                  "--iterations", "1000", "--format", "json")
        assert code == 0
        payload = json.loads(stdout)
        assert payload["counts"]["vec_ld"] == 128 * 1000
        assert payload["target_inst_count"] == 128 * 1000

        code, stdout, _ = run_cli(capsys, "sim", "--kernel", str(asm),
                                  "--iterations", "10", "--vlen", "256",
                                  "--format", "json")
        assert code == 0
        simmed = json.loads(stdout)
        assert simmed["counts"]["vec_ld"] == 128 * 10

    def test_gen_respects_lmul(self, capsys, tmp_path):
        out = tmp_path / "k8"
        code, _, _ = run_cli(capsys, "gen", "--suite", "memory", "--lmul", "8",
                             "--out", str(out))
        assert code == 0
        text = (out / "vle32_m8_unit_load.s").read_text()
        assert "e32, m8" in text

    def test_sim_dump_state(self, capsys, tmp_path):
        out = tmp_path / "k"
        run_cli(capsys, "gen", "--suite", "memory", "--out", str(out))
        code, stdout, _ = run_cli(capsys, "sim", "--kernel",
                                  str(out / "vle8_m1_unit_load.s"),
                                  "--iterations", "1", "--dump-state")
        assert code == 0 and "vtype: e8 m1" in stdout

    def test_missing_kernel_is_user_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "predict", "--kernel",
                               str(tmp_path / "nope.s"), "--iterations", "5")
        assert code == 1 and "error" in err

    def test_unsupported_instruction_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "bad.s"
        bad.write_text("f:\n    vluxei32.v v1, (a0), v2\n    ret\n")
        code, _, err = run_cli(capsys, "predict", "--kernel", str(bad),
                               "--iterations", "5")
        assert code == 1 and "vluxei32.v" in err


class TestCalibrateVerb:
    def test_table_report(self, capsys):
        code, stdout, _ = run_cli(capsys, "calibrate", "--results", CAL)
        assert code == 0
        assert "usable events" in stdout and "unreliable" in stdout

    def test_json_report(self, capsys):
        code, stdout, _ = run_cli(capsys, "calibrate", "--results", CAL,
                                  "--report", "json")
        assert code == 0
        payload = json.loads(stdout)
        assert payload["verdicts"]["vec"] == "unreliable"
        assert sorted(payload["usable_events"]) == [
            "fp_ld", "fp_st", "retired", "vec_ld", "vec_st",
        ]

    def test_from_replayed_store(self, capsys, tmp_path):
        results = tmp_path / "results"
        code, _, _ = run_cli(capsys, "run", "--replay", CAL,
                             "--results", str(results))
        assert code == 0
        code, stdout, _ = run_cli(capsys, "calibrate", "--results", str(results))
        assert code == 0 and "usable events" in stdout


class TestAnalyzeVerb:
    def test_throughput_csv(self, capsys):
        code, stdout, _ = run_cli(capsys, "analyze", "throughput", "--in",
                                  str(fixture_path("stride_compare_jupiter.json")),
                                  "--format", "csv")
        assert code == 0 and stdout.startswith("kernel,")

    def test_overhead_json_out(self, capsys, tmp_path):
        out = tmp_path / "tail.json"
        code, stdout, _ = run_cli(capsys, "analyze", "overhead", "--in",
                                  str(fixture_path("tail_overhead_jupiter.json")),
                                  "--format", "json", "--out", str(out))
        assert code == 0
        rows = json.loads(out.read_text())
        assert len(rows) == 32

    def test_sweep(self, capsys):
        code, stdout, _ = run_cli(capsys, "analyze", "sweep", "--in",
                                  str(campaign_fixture_path()), "--format", "csv")
        assert code == 0 and "best_beats_default" in stdout


class TestCampaignVerb:
    def test_replay_campaign_and_report(self, capsys, tmp_path):
        manifest = tmp_path / "apps.json"
        manifest.write_text(json.dumps({"apps": [
            {"app": name, "build": "{CC} {CFLAGS} -o {OUT} x.c", "run": "{BIN}",
             "validate_substring": "ok"}
            for name in ("stream", "spmv", "dgemm", "sgemm", "yolov3", "alexnet")
        ]}))
        results = tmp_path / "results"
        code, stdout, _ = run_cli(
            capsys, "campaign", "run",
            "--manifest", str(manifest),
            "--compilers", os.path.join(REPO, "configs", "compilers_gcc15_clang21.json"),
            "--lmul", "1,2,4,8",
            "--baseline", "gcc15:nonvec",
            "--results", str(results),
            "--replay", str(campaign_fixture_path()),
        )
        assert code == 0 and "72 jobs" in stdout
        assert (results / "campaign.jsonl").exists()

        code, stdout, _ = run_cli(capsys, "campaign", "report",
                                  "--results", str(results))
        assert code == 0
        assert "# speedup-bars" in stdout and "# lmul-sweep" in stdout

    def test_campaign_without_manifest_fails_cleanly(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "campaign", "run",
                               "--manifest", str(tmp_path / "missing.json"),
                               "--compilers", str(tmp_path / "missing2.json"),
                               "--results", str(tmp_path / "r"))
        assert code == 1


class TestRunVerb:
    def test_hardware_run_without_rvv_is_capability_error(self, capsys, tmp_path):
        # this host has no vector unit, so the hardware path must exit 2
        code, _, err = run_cli(capsys, "run", "--kernel-dir", str(tmp_path),
                               "--results", str(tmp_path / "r"))
        assert code == 2 and "replay" in err


class TestReportVerb:
    def test_report_kind_dispatch(self, capsys):
        code, stdout, _ = run_cli(capsys, "report", "--kind", "calibration-table",
                                  "--in", CAL)
        assert code == 0 and "bench" in stdout

    def test_bad_kind_rejected_by_argparse(self, capsys):
        with pytest.raises(SystemExit):
            main(["report", "--kind", "nope", "--in", CAL])
