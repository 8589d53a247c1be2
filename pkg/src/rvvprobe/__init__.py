"""rvvprobe: RVV 1.0 microbenchmark toolkit.

Generates precisely controlled vector assembly kernels, predicts their
hardware-event counts with a static reference model validated against a
functional interpreter, calibrates performance-counter reliability on
real hardware (or replayed recordings), and orchestrates compiler/LMUL
benchmarking campaigns with throughput and instruction-mix analytics.
"""

from .core import (
    EventCounts,
    EventKind,
    InstClass,
    Policy,
    VectorConfig,
    VtypeState,
    attribute_events,
    classify,
    compute_vlmax,
    resolve_vl,
)
from .kernelgen import AssemblyModule, KernelSpec, generate_kernel, generate_suite
from .refmodel import ParsedKernel, ReferenceCounts, parse_kernel, predict_counts
from .sim import MachineState, execute
from .runner import (
    PlatformInfo,
    RawSample,
    load_replay,
    load_replay_bundle,
    parse_perf_output,
    probe_platform,
    run_benchmark,
)
from .calibrate import (
    CalibrationReport,
    CalibrationVerdict,
    calibrate_suite,
    classify_event,
    references_from_specs,
    relative_error,
    target_reference_counts,
)
from .analytics import (
    MixBreakdown,
    ThroughputResult,
    instruction_mix,
    instruction_reduction,
    lmul_sweep_summary,
    overhead_fraction,
    speedup,
    throughput,
)
from .campaign import (
    AppManifest,
    CampaignRecord,
    CompilerConfig,
    Job,
    build_app,
    expand_matrix,
    normalize_records,
    run_campaign,
)
from .report import ReportRequest, render

__version__ = "0.1.0"

__all__ = [
    "AppManifest", "AssemblyModule", "CalibrationReport", "CalibrationVerdict",
    "CampaignRecord", "CompilerConfig", "EventCounts", "EventKind", "InstClass",
    "Job", "KernelSpec", "MachineState", "MixBreakdown", "ParsedKernel",
    "PlatformInfo", "Policy", "RawSample", "ReferenceCounts", "ReportRequest",
    "ThroughputResult", "VectorConfig", "VtypeState",
    "attribute_events", "build_app", "calibrate_suite", "classify",
    "classify_event", "compute_vlmax", "execute", "expand_matrix",
    "generate_kernel", "generate_suite", "instruction_mix",
    "instruction_reduction", "lmul_sweep_summary", "load_replay",
    "load_replay_bundle", "normalize_records", "overhead_fraction",
    "parse_kernel", "parse_perf_output", "predict_counts", "probe_platform",
    "references_from_specs", "relative_error", "render", "resolve_vl",
    "run_benchmark", "run_campaign", "speedup", "target_reference_counts",
    "throughput",
]
