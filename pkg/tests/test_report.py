import csv
import io

import pytest

from rvvprobe.errors import ConfigError
from rvvprobe.fixtures import campaign_fixture_path, fixture_path
from rvvprobe.report import NO_RECORDS, ReportRequest, render

CAL = str(fixture_path("x60_counter_validation.json"))
TAIL = str(fixture_path("tail_overhead_jupiter.json"))
TAIL_BPI = str(fixture_path("tail_overhead_bpif3.json"))
STRIDE = str(fixture_path("stride_compare_jupiter.json"))
CAMPAIGN = str(campaign_fixture_path())


class TestCalibrationTable:
    def test_ten_rows_eight_numeric_columns(self):
        text = render(ReportRequest("calibration-table", (CAL,)))
        lines = text.splitlines()
        header = lines[0].split()
        assert header[0] == "bench"
        assert len(header) == 9  # bench + ref + 7 events
        data_rows = [ln for ln in lines[2:] if ln and not ln.startswith(("verdict", "usable"))]
        assert len(data_rows) == 10
        assert "usable events: fp-ld-ins, fp-st-ins, retired-ins, vec-ld-ins, vec-st-ins" in text

    def test_recorded_values_present(self):
        text = render(ReportRequest("calibration-table", (CAL,)))
        assert "1.2800e+10" in text and "1.3100e+10" in text
        assert "unreliable" in text

    def test_csv_has_provenance(self):
        text = render(ReportRequest("calibration-table", (CAL,), fmt="csv"))
        rows = list(csv.DictReader(io.StringIO(text)))
        assert all(row["record_id"] for row in rows)
        flw_retired = next(r for r in rows
                           if r["kernel"] == "flw" and r["event"] == "retired-ins")
        assert float(flw_retired["relative_error"]) == pytest.approx(0.0234375)


class TestDeterminism:
    @pytest.mark.parametrize("kind,inputs", [
        ("calibration-table", (CAL,)),
        ("throughput-table", (CAL,)),
        ("tail-overhead-curve", (TAIL,)),
        ("stride-compare", (STRIDE,)),
        ("speedup-bars", (CAMPAIGN,)),
        ("reduction-bars", (CAMPAIGN,)),
        ("mix-stacks", (CAMPAIGN, CAL)),
        ("lmul-sweep", (CAMPAIGN,)),
    ])
    def test_byte_identical_rerender(self, kind, inputs):
        for fmt in ("table", "csv"):
            once = render(ReportRequest(kind, inputs, fmt=fmt))
            again = render(ReportRequest(kind, inputs, fmt=fmt))
            assert once == again and once.strip()


class TestTailCurve:
    def test_per_active_element_pairs(self):
        text = render(ReportRequest("tail-overhead-curve", (TAIL,), fmt="csv"))
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 32
        full = next(r for r in rows if r["active_elems"] == "32")
        assert float(full["setvl_gops"]) == pytest.approx(28.4, abs=0.01)
        assert float(full["mask_gops"]) == pytest.approx(18.5, abs=0.01)
        assert float(full["mask_overhead_fraction"]) == pytest.approx(0.3486, abs=1e-3)

    def test_overhead_constant_across_active_counts(self):
        text = render(ReportRequest("tail-overhead-curve", (TAIL_BPI,), fmt="csv"))
        rows = list(csv.DictReader(io.StringIO(text)))
        fracs = {float(r["mask_overhead_fraction"]) for r in rows}
        assert max(fracs) - min(fracs) < 0.002
        assert min(fracs) == pytest.approx(0.3492, abs=1e-3)


class TestStrideCompare:
    def test_strided_and_scalar_flat(self):
        text = render(ReportRequest("stride-compare", (STRIDE,), fmt="csv"))
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 4
        for row in rows:
            assert float(row["strided_gops"]) == pytest.approx(1.78, abs=0.01)
            assert float(row["scalar_gops"]) == pytest.approx(1.78, abs=0.01)
        e8 = next(r for r in rows if r["sew"] == "8")
        assert float(e8["masked_gops"]) == pytest.approx(9.2, abs=0.05)


class TestCampaignReports:
    def test_speedup_bars_values(self):
        text = render(ReportRequest("speedup-bars", (CAMPAIGN,), fmt="csv"))
        rows = list(csv.DictReader(io.StringIO(text)))
        sgemm = {(r["compiler"], r["mode"]): float(r["speedup"])
                 for r in rows if r["app"] == "sgemm"}
        assert sgemm[("clang21", "autovec")] == pytest.approx(2.4, abs=1e-6)
        assert sgemm[("gcc15", "autovec")] == pytest.approx(1.85, abs=1e-6)
        assert sgemm[("gcc15", "nonvec")] == 1.0

    def test_lmul_sweep_best_flags(self):
        text = render(ReportRequest("lmul-sweep", (CAMPAIGN,), fmt="csv"))
        rows = list(csv.DictReader(io.StringIO(text)))
        sgemm_clang = [r for r in rows
                       if r["app"] == "sgemm" and r["compiler"] == "clang21"]
        best = next(r for r in sgemm_clang if r["is_best"] == "True")
        assert best["lmul"] == "2"

    def test_mix_stacks_respects_calibration(self):
        text = render(ReportRequest("mix-stacks", (CAMPAIGN, CAL), fmt="csv"))
        rows = list(csv.DictReader(io.StringIO(text)))
        assert rows
        for row in rows[:5]:
            assert int(row["other"]) >= 0


class TestRequestValidation:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            ReportRequest("pie-chart", (CAL,))

    def test_needs_inputs(self):
        with pytest.raises(ConfigError):
            ReportRequest("calibration-table", ())

    def test_bad_format(self):
        with pytest.raises(ConfigError):
            ReportRequest("calibration-table", (CAL,), fmt="xml")

    def test_empty_store_renders_no_records(self, tmp_path):
        store = tmp_path / "campaign.jsonl"
        store.write_text("")
        text = render(ReportRequest("speedup-bars", (str(store),)))
        assert text == NO_RECORDS

    def test_mixed_platform_store_rejected(self, tmp_path):
        from rvvprobe.core import EventKind
        from rvvprobe.runner import RawSample, append_samples

        store = tmp_path / "samples.jsonl"
        echo128 = {"name": "a", "target_inst": "vle8.v", "sew_bits": 8, "lmul": 1,
                   "pattern": "unit-load", "vlen_bits": 128}
        echo256 = dict(echo128, name="b", vlen_bits=256)
        append_samples(store, [
            RawSample("a", 1, 10, {EventKind.RETIRED: 1}, spec_echo=echo128),
            RawSample("b", 1, 10, {EventKind.RETIRED: 1}, spec_echo=echo256),
        ])
        with pytest.raises(ConfigError, match="mixed vector widths"):
            render(ReportRequest("throughput-table", (str(store),)))
