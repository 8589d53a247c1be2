"""Shipped measurement fixtures and their kernel catalogs.

The counter-validation fixture carries recorded SpacemiT X60 counter
values for ten single-instruction kernels at 1.28e10 issued target
instructions each; it is the canonical input for counter calibration.
The tail/stride fixtures hold throughput recordings for the
tail-handling and stride-access comparisons, and the campaign fixture
holds recorded runtimes/counts for the autovectorization study across
six proxy applications plus a quantum-simulator workload.
"""

from __future__ import annotations

from importlib import resources

from .kernelgen import KernelSpec
from .runner import ReplayBundle, load_replay_bundle

COUNTER_VALIDATION = "x60_counter_validation.json"
TAIL_OVERHEAD = {"jupiter": "tail_overhead_jupiter.json", "bpif3": "tail_overhead_bpif3.json"}
STRIDE_COMPARE = "stride_compare_jupiter.json"
CAMPAIGN = "autovec_campaign_x60.json"


def fixture_path(name: str):
    return resources.files("rvvprobe") / "fixtures" / name


def counter_validation_specs(iterations: int = 10**8, unroll: int = 128) -> dict[str, KernelSpec]:
    """The ten calibration kernels, keyed by their recorded bench names.

    The vmacc.vv bench keeps its recorded label but maps to the FP
    multiply-add variant: its recorded fp-ins overcount (2.56e10 on a
    near-zero reference) identifies the measured kernel as vector-FP.
    """
    mk = lambda name, inst, pattern: KernelSpec(  # noqa: E731
        name=name, target_inst=inst, sew_bits=32, lmul=1, pattern=pattern,
        iterations=iterations, unroll=unroll,
    )
    return {
        "flw": mk("flw", "flw", "scalar-ref"),
        "lw": mk("lw", "lw", "scalar-ref"),
        "vle.vv": mk("vle.vv", "vle32.v", "unit-load"),
        "fsw": mk("fsw", "fsw", "scalar-ref"),
        "sw": mk("sw", "sw", "scalar-ref"),
        "vse.vv": mk("vse.vv", "vse32.v", "unit-store"),
        "vfadd.vv": mk("vfadd.vv", "vfadd.vv", "arith"),
        "vmacc.vv": mk("vmacc.vv", "vfmacc.vv", "arith"),
        "fadd": mk("fadd", "fadd.s", "arith"),
        "fmadd": mk("fmadd", "fmadd.s", "arith"),
    }


def load_counter_validation() -> ReplayBundle:
    return load_replay_bundle(fixture_path(COUNTER_VALIDATION))


def load_tail_overhead(platform: str = "jupiter") -> ReplayBundle:
    try:
        name = TAIL_OVERHEAD[platform]
    except KeyError:
        raise ValueError(f"no tail-overhead fixture for platform {platform!r}") from None
    return load_replay_bundle(fixture_path(name))


def load_stride_compare() -> ReplayBundle:
    return load_replay_bundle(fixture_path(STRIDE_COMPARE))


def campaign_fixture_path():
    return fixture_path(CAMPAIGN)
