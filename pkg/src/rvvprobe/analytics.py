"""Derived metrics: throughput, overheads, speedups, instruction mixes.

Throughput is reported in Gops/s where one "op" is one element operation
(a load, store, or arithmetic op on a single element); a fused
multiply-add counts as one op. element_ops_total/elapsed_ns gives the
figure directly since ns and Gops cancel. Masked stride-equivalent
kernels count only gathered (active) elements, so their two-instruction
cost shows up in the number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import EventCounts, EventKind, VectorConfig, compute_vlmax
from .errors import ConfigError, UncalibratedEventError
from .kernelgen import KernelSpec
from .runner import RawSample

MIX_COMPONENTS = (EventKind.VEC_LD, EventKind.VEC_ST, EventKind.FP_LD, EventKind.FP_ST)


@dataclass(frozen=True)
class ThroughputResult:
    kernel: str
    element_ops_total: int
    elapsed_ns: int
    gops_per_sec: float
    elements_per_inst: int


def elements_per_instruction(spec: KernelSpec, cfg: VectorConfig) -> int:
    """Element ops one target instruction performs under this spec."""
    p = spec.pattern
    if p in ("arith", "scalar-ref"):
        if not spec.target_inst.startswith("v"):
            return 1
        return compute_vlmax(cfg, spec.sew_bits, spec.lmul)
    if p == "masked-unit-load":
        # each load covers vlmax contiguous slots but gathers every other one
        return compute_vlmax(cfg, spec.sew_bits, spec.lmul) // 2
    if p in ("tail-vl-load", "tail-mask-load"):
        return int(spec.active_elems)
    return compute_vlmax(cfg, spec.sew_bits, spec.lmul)


def throughput(spec: KernelSpec, cfg: VectorConfig, sample: RawSample) -> ThroughputResult:
    if sample.elapsed_ns <= 0:
        raise ConfigError(f"sample for {spec.name!r} has no positive elapsed time")
    epi = elements_per_instruction(spec, cfg)
    ops = spec.iterations * spec.unroll * epi
    return ThroughputResult(
        kernel=spec.name,
        element_ops_total=ops,
        elapsed_ns=sample.elapsed_ns,
        gops_per_sec=ops / sample.elapsed_ns,
        elements_per_inst=epi,
    )


def _gops(value) -> float:
    return value.gops_per_sec if isinstance(value, ThroughputResult) else float(value)


def overhead_fraction(reference, variant) -> float:
    """Throughput lost by the variant: 1 - variant/reference. 0 at identity."""
    ref = _gops(reference)
    var = _gops(variant)
    if ref <= 0:
        raise ConfigError("reference throughput must be positive")
    if isinstance(reference, ThroughputResult) and isinstance(variant, ThroughputResult):
        if reference.elements_per_inst != variant.elements_per_inst:
            raise ConfigError(
                "overhead comparison needs matching element width and active-element "
                f"semantics ({reference.kernel} vs {variant.kernel})"
            )
    return 1.0 - var / ref


def speedup(baseline_runtime: float, variant_runtime: float) -> float:
    """baseline/variant; above 1 means the variant is faster."""
    if baseline_runtime <= 0 or variant_runtime <= 0:
        raise ConfigError("runtimes must be positive")
    return baseline_runtime / variant_runtime


def instruction_reduction(baseline_retired: float, variant_retired: float) -> float:
    """baseline/variant; above 1 means the variant retires fewer instructions."""
    if baseline_retired <= 0 or variant_retired <= 0:
        raise ConfigError("retired counts must be positive")
    return baseline_retired / variant_retired


@dataclass(frozen=True)
class MixBreakdown:
    vec_ld: int
    vec_st: int
    fp_ld: int
    fp_st: int
    other: int
    clamped: bool = False

    def as_dict(self) -> dict[str, int]:
        return {
            "vec_ld": self.vec_ld, "vec_st": self.vec_st,
            "fp_ld": self.fp_ld, "fp_st": self.fp_st, "other": self.other,
        }

    @property
    def total(self) -> int:
        return self.vec_ld + self.vec_st + self.fp_ld + self.fp_st + self.other


def instruction_mix(
    counts: Mapping[EventKind, int] | EventCounts,
    usable_events: frozenset[EventKind] | set[EventKind],
    components: Sequence[EventKind] = MIX_COMPONENTS,
) -> MixBreakdown:
    """Decompose retired instructions into ld/st components plus 'other'.

    Only calibrated-usable events may be requested; asking for an
    unreliable one is refused with a pointer back to the calibration
    report. A slightly negative remainder (hardware overcount) clamps to
    zero with a flag instead of failing.
    """
    if isinstance(counts, EventCounts):
        counts = {k: counts.get(k) for k in (EventKind.RETIRED, *components)}
    needed = (EventKind.RETIRED, *components)
    for event in needed:
        if event not in usable_events:
            raise UncalibratedEventError(
                f"event {event.label} is outside the calibrated usable set; "
                "see the CalibrationReport verdicts before profiling with it"
            )
        if event not in counts:
            raise ConfigError(f"counts are missing {event.label}")
    parts = {e: int(counts[e]) for e in components}
    other = int(counts[EventKind.RETIRED]) - sum(parts.values())
    clamped = other < 0
    if clamped:
        other = 0
    by_name = {e.value: v for e, v in parts.items()}
    return MixBreakdown(
        vec_ld=by_name.get("vec_ld", 0),
        vec_st=by_name.get("vec_st", 0),
        fp_ld=by_name.get("fp_ld", 0),
        fp_st=by_name.get("fp_st", 0),
        other=other,
        clamped=clamped,
    )


@dataclass(frozen=True)
class LmulSweepRow:
    lmul: int
    speedup: float | None
    reduction: float | None


@dataclass(frozen=True)
class LmulSweepSummary:
    app: str
    compiler: str
    rows: tuple[LmulSweepRow, ...]
    best_lmul: int | None
    best_speedup: float | None
    default_speedup: float | None
    best_beats_default: bool | None
    missing_levels: tuple[int, ...]


def lmul_sweep_summary(records, levels: Sequence[int] = (1, 2, 4, 8)) -> LmulSweepSummary:
    """Per-LMUL speedup/reduction table for one (app, compiler) group.

    Records must share app and compiler and differ only in register-group
    width; the compiler-default record (no explicit LMUL) anchors the
    beats-default comparison. Missing levels appear as gap rows.
    """
    records = list(records)
    if not records:
        raise ConfigError("no records to summarize")
    apps = {r.app for r in records}
    compilers = {r.compiler for r in records}
    if len(apps) != 1 or len(compilers) != 1:
        raise ConfigError(
            f"sweep records must share app and compiler, got {sorted(apps)} x {sorted(compilers)}"
        )
    by_lmul = {r.lmul: r for r in records if r.lmul is not None}
    default = next((r for r in records if r.lmul is None and r.mode == "autovec"), None)

    rows = []
    missing = []
    best_lmul = None
    best_speedup = None
    for level in levels:
        rec = by_lmul.get(level)
        if rec is None:
            rows.append(LmulSweepRow(level, None, None))
            missing.append(level)
            continue
        rows.append(LmulSweepRow(level, rec.speedup, rec.reduction))
        if rec.speedup is not None and (best_speedup is None or rec.speedup > best_speedup):
            best_speedup = rec.speedup
            best_lmul = level
    default_speedup = default.speedup if default else None
    beats = None
    if best_speedup is not None and default_speedup is not None:
        beats = best_speedup > default_speedup
    return LmulSweepSummary(
        app=records[0].app,
        compiler=records[0].compiler,
        rows=tuple(rows),
        best_lmul=best_lmul,
        best_speedup=best_speedup,
        default_speedup=default_speedup,
        best_beats_default=beats,
        missing_levels=tuple(missing),
    )
