"""Deterministic report rendering: human tables and tidy CSV.

Every report kind is a pure function of its input files; rendering the
same inputs twice yields byte-identical output. CSV mode is tidy (one
row per kernel/config/metric) and carries a provenance column tracing
each number back to the record it came from. Plotting is out of scope:
the CSV is the contract for external plotting tools.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .analytics import (
    MIX_COMPONENTS,
    instruction_mix,
    lmul_sweep_summary,
    overhead_fraction,
    throughput,
)
from .calibrate import calibrate_suite, references_from_specs
from .campaign import CampaignRecord, load_campaign_fixture, normalize_records, read_records
from .core import EVENT_ORDER, EventKind, VectorConfig
from .errors import ConfigError
from .kernelgen import KernelSpec
from .runner import ReplayBundle, load_replay_bundle

REPORT_KINDS = (
    "calibration-table",
    "throughput-table",
    "stride-compare",
    "tail-overhead-curve",
    "speedup-bars",
    "reduction-bars",
    "mix-stacks",
    "lmul-sweep",
)

NO_RECORDS = "no records\n"


@dataclass(frozen=True)
class ReportRequest:
    kind: str
    inputs: tuple[str, ...]
    fmt: str = "table"  # table | csv
    tolerance: float = 0.05
    floor: float = 1_000_000.0
    baseline_key: str = "gcc15:nonvec"

    def __post_init__(self):
        if self.kind not in REPORT_KINDS:
            raise ConfigError(f"unknown report kind {self.kind!r}; expected {REPORT_KINDS}")
        if self.fmt not in ("table", "csv"):
            raise ConfigError(f"report format must be table or csv, got {self.fmt!r}")
        if not self.inputs:
            raise ConfigError(f"report kind {self.kind!r} needs at least one input file")


def _num(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        if value == 0:
            return "0"
        if abs(value) >= 1e6:
            return f"{value:.4e}"
        return f"{value:.4g}"
    if isinstance(value, int) and abs(value) >= 1_000_000:
        return f"{value:.4e}"
    return str(value)


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [[_num(c) if not isinstance(c, str) else c for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, c in enumerate(row):
            widths[i] = max(widths[i], len(c))
    out = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()]
    out.append("  ".join("-" * w for w in widths))
    for row in cells:
        out.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(out) + "\n"


def _csv(headers: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow(["" if c is None else c for c in row])
    return buf.getvalue()


def _emit(req: ReportRequest, headers: list[str], rows: list[list]) -> str:
    if not rows:
        return NO_RECORDS
    return _csv(headers, rows) if req.fmt == "csv" else _table(headers, rows)


def _bundle_with_specs(path) -> tuple[ReplayBundle, dict[str, KernelSpec]]:
    """Load samples+specs from a replay fixture, results dir, or samples store."""
    import os

    from .runner import PlatformInfo, read_samples

    path = str(path)
    if os.path.isdir(path):
        path = os.path.join(path, "samples.jsonl")
    if path.endswith(".jsonl"):
        samples = read_samples(path)
        specs = {
            s.kernel_name: KernelSpec.from_dict(s.spec_echo)
            for s in samples if s.spec_echo
        }
        vlens = {s.spec_echo.get("vlen_bits") for s in samples if s.spec_echo}
        vlens.discard(None)
        if len(vlens) > 1:
            raise ConfigError(
                f"mixed vector widths {sorted(vlens)} in {path}; split the store per platform"
            )
        platform = PlatformInfo(
            name="store", vlen_bits=next(iter(vlens), 256), rvv_supported=True,
        )
        bundle = ReplayBundle(platform=platform, samples=tuple(samples), specs=specs)
    else:
        bundle = load_replay_bundle(path)
    if not bundle.specs:
        raise ConfigError(f"{path} carries no spec_echo; cannot derive references")
    return bundle, dict(bundle.specs)


def _mean_elapsed(samples) -> dict[str, int]:
    grouped: dict[str, list[int]] = {}
    for s in samples:
        grouped.setdefault(s.kernel_name, []).append(s.elapsed_ns)
    return {k: round(sum(v) / len(v)) for k, v in grouped.items()}


def _render_calibration(req: ReportRequest) -> str:
    bundle, specs = _bundle_with_specs(req.inputs[0])
    refs = references_from_specs(specs)
    report = calibrate_suite(bundle.samples, refs, tolerance=req.tolerance, floor=req.floor)

    if req.fmt == "csv":
        rows = []
        for event in EVENT_ORDER:
            verdict = report.verdicts[event]
            for chk in verdict.per_kernel:
                rows.append([
                    chk.kernel, event.label, chk.reference, f"{chk.observed_mean:.6g}",
                    f"{chk.relative_error:.6g}", chk.passed, verdict.verdict,
                    f"{bundle.platform.name}:{chk.kernel}",
                ])
        return _emit(req, ["kernel", "event", "reference", "observed_mean",
                           "relative_error", "passed", "event_verdict", "record_id"], rows)

    headers = ["bench", "ref_ins"] + [e.label for e in EVENT_ORDER]
    by_event = {
        e: {chk.kernel: chk for chk in report.verdicts[e].per_kernel}
        for e in EVENT_ORDER
    }
    rows = []
    for name in specs:  # fixture order
        spec = specs[name]
        row: list = [name, float(spec.iterations * spec.unroll)]
        for event in EVENT_ORDER:
            chk = by_event[event].get(name)
            mark = "" if chk is None or chk.passed else " !"
            row.append((_num(chk.observed_mean) + mark) if chk else "-")
        rows.append(row)
    verdict_row = ["verdict", ""] + [report.verdicts[e].verdict for e in EVENT_ORDER]
    usable = ", ".join(sorted(e.label for e in report.usable_events))
    body = _table(headers, rows + [verdict_row])
    return body + f"usable events: {usable}\n"


def _render_throughput(req: ReportRequest) -> str:
    bundle, specs = _bundle_with_specs(req.inputs[0])
    cfg = VectorConfig(bundle.platform.vlen_bits)
    elapsed = _mean_elapsed(bundle.samples)
    rows = []
    for name in specs:
        spec = specs[name]
        sample = next(s for s in bundle.samples if s.kernel_name == name)
        tp = throughput(spec, cfg, sample)
        rows.append([
            name, spec.pattern, spec.sew_bits, spec.lmul, tp.elements_per_inst,
            float(elapsed[name]), round(tp.element_ops_total / elapsed[name], 4),
            f"{bundle.platform.name}:{name}",
        ])
    return _emit(req, ["kernel", "pattern", "sew", "lmul", "elems_per_inst",
                       "elapsed_ns", "gops_per_sec", "record_id"], rows)


def _render_stride_compare(req: ReportRequest) -> str:
    bundle, specs = _bundle_with_specs(req.inputs[0])
    cfg = VectorConfig(bundle.platform.vlen_bits)
    gops: dict[tuple[int, str], float] = {}
    for name, spec in specs.items():
        sample = next(s for s in bundle.samples if s.kernel_name == name)
        gops[(spec.sew_bits, spec.pattern)] = throughput(spec, cfg, sample).gops_per_sec
    rows = []
    for sew in (8, 16, 32, 64):
        strided = gops.get((sew, "strided-load"))
        masked = gops.get((sew, "masked-unit-load"))
        scalar = gops.get((sew, "scalar-ref"))
        if strided is None and masked is None and scalar is None:
            continue
        ratio = round(masked / strided, 3) if (masked and strided) else None
        rows.append([sew, round(strided, 3), round(masked, 3), round(scalar, 3),
                     ratio, f"{bundle.platform.name}:e{sew}"])
    return _emit(req, ["sew", "strided_gops", "masked_gops", "scalar_gops",
                       "masked_over_strided", "record_id"], rows)


def _render_tail_overhead(req: ReportRequest) -> str:
    bundle, specs = _bundle_with_specs(req.inputs[0])
    cfg = VectorConfig(bundle.platform.vlen_bits)
    setvl: dict[int, float] = {}
    mask: dict[int, float] = {}
    for name, spec in specs.items():
        sample = next(s for s in bundle.samples if s.kernel_name == name)
        tp = throughput(spec, cfg, sample).gops_per_sec
        (setvl if spec.pattern == "tail-vl-load" else mask)[spec.active_elems] = tp
    rows = []
    for active in sorted(set(setvl) | set(mask)):
        a, b = setvl.get(active), mask.get(active)
        frac = round(overhead_fraction(a, b), 4) if (a and b is not None) else None
        rows.append([active,
                     round(a, 3) if a is not None else None,
                     round(b, 3) if b is not None else None,
                     frac, f"{bundle.platform.name}:a{active}"])
    return _emit(req, ["active_elems", "setvl_gops", "mask_gops",
                       "mask_overhead_fraction", "record_id"], rows)


def _load_campaign_records(path, baseline_key: str) -> list[CampaignRecord]:
    import json

    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        return []
    try:
        first = json.loads(text.strip().splitlines()[0])
    except json.JSONDecodeError:
        first = None
    if isinstance(first, dict) and first.get("type") == "campaign":
        return read_records(path)  # line-delimited results store
    _, measurements = load_campaign_fixture(path)
    return normalize_records(measurements, baseline_key=baseline_key)


def _render_campaign_metric(req: ReportRequest, metric: str) -> str:
    records = _load_campaign_records(req.inputs[0], req.baseline_key)
    rows = []
    for rec in sorted(records, key=lambda r: (r.app, r.compiler, r.mode, r.lmul or 0)):
        if rec.lmul is not None:
            continue  # the bar charts show default-LMUL configurations
        value = rec.speedup if metric == "speedup" else rec.reduction
        rows.append([
            rec.app, rec.compiler, rec.mode,
            round(value, 4) if value is not None else None,
            rec.valid, rec.record_id,
        ])
    return _emit(req, ["app", "compiler", "mode", metric, "valid", "record_id"], rows)


def _render_mix(req: ReportRequest) -> str:
    records = _load_campaign_records(req.inputs[0], req.baseline_key)
    if len(req.inputs) > 1:
        bundle, specs = _bundle_with_specs(req.inputs[1])
        refs = references_from_specs(specs)
        usable = calibrate_suite(bundle.samples, refs,
                                 tolerance=req.tolerance, floor=req.floor).usable_events
    else:
        # without a calibration input, accept only the containment-safe set
        usable = frozenset({EventKind.RETIRED, *MIX_COMPONENTS})
    rows = []
    for rec in sorted(records, key=lambda r: (r.app, r.compiler, r.mode, r.lmul or 0)):
        if EventKind.RETIRED not in rec.counts:
            continue
        mix = instruction_mix(rec.counts, usable)
        rows.append([
            rec.app, rec.compiler, rec.mode, rec.lmul,
            mix.vec_ld, mix.vec_st, mix.fp_ld, mix.fp_st, mix.other,
            mix.clamped, rec.record_id,
        ])
    return _emit(req, ["app", "compiler", "mode", "lmul", "vec_ld", "vec_st",
                       "fp_ld", "fp_st", "other", "clamped", "record_id"], rows)


def _render_lmul_sweep(req: ReportRequest) -> str:
    records = _load_campaign_records(req.inputs[0], req.baseline_key)
    groups: dict[tuple[str, str], list[CampaignRecord]] = {}
    for rec in records:
        if rec.mode == "autovec":
            groups.setdefault((rec.app, rec.compiler), []).append(rec)
    rows = []
    for (app, compiler) in sorted(groups):
        recs = groups[(app, compiler)]
        if not any(r.lmul is not None for r in recs):
            continue
        summary = lmul_sweep_summary(recs)
        for row in summary.rows:
            rows.append([
                app, compiler, row.lmul,
                round(row.speedup, 4) if row.speedup is not None else None,
                round(row.reduction, 4) if row.reduction is not None else None,
                row.lmul == summary.best_lmul,
                summary.best_beats_default,
                f"{app}:{compiler}:autovec:m{row.lmul}",
            ])
    return _emit(req, ["app", "compiler", "lmul", "speedup", "reduction",
                       "is_best", "best_beats_default", "record_id"], rows)


def render(req: ReportRequest) -> str:
    """Render one report; output is byte-identical across runs for the same inputs."""
    kind = req.kind
    if kind == "calibration-table":
        return _render_calibration(req)
    if kind == "throughput-table":
        return _render_throughput(req)
    if kind == "stride-compare":
        return _render_stride_compare(req)
    if kind == "tail-overhead-curve":
        return _render_tail_overhead(req)
    if kind == "speedup-bars":
        return _render_campaign_metric(req, "speedup")
    if kind == "reduction-bars":
        return _render_campaign_metric(req, "reduction")
    if kind == "mix-stacks":
        return _render_mix(req)
    return _render_lmul_sweep(req)
