"""Benchmark execution and sample normalization.

Two per-sample sources feed the rest of the toolkit: running real
binaries under the OS perf tool on RVV hardware, or replaying recorded
fixtures. Both produce structurally identical RawSample streams, so
downstream analysis cannot tell them apart.

Measurement discipline: runs are sequential and core-pinned (counters and
in-order pipelines are perturbed by co-runners), and a failed run
invalidates the whole batch.
"""

from __future__ import annotations

import json
import os
import platform as _platform
import re
import shutil
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .core import EventKind
from .errors import CapabilityError, ConfigError, SchemaError
from .kernelgen import KernelSpec

DEFAULT_RUNS = 5
DEFAULT_ITERATIONS = 10**8

# Only the architecturally mandated counter has a portable selector; every
# vector/FP event is implementation-defined and must come from a platform map.
BUILTIN_EVENT_MAP: Mapping[EventKind, str] = {EventKind.RETIRED: "instructions"}

_SHIM_ELAPSED_RE = re.compile(r"^elapsed_ns=(\d+)$", re.M)
_SHIM_ITER_RE = re.compile(r"^iterations=(\d+)$", re.M)


@dataclass(frozen=True)
class PlatformInfo:
    """Target description: probed vector width, clock, and the event map."""

    name: str = "unknown"
    vlen_bits: int | None = None
    core_count: int = 1
    clock_hz: float | None = None
    event_map: Mapping[EventKind, str] = field(default_factory=dict)
    rvv_supported: bool = False

    def selector(self, event: EventKind) -> str:
        sel = self.event_map.get(event) or BUILTIN_EVENT_MAP.get(event)
        if sel is None:
            raise ConfigError(
                f"no raw perf selector configured for event {event.label!r}; "
                "vector/FP events are implementation-defined and need a platform map"
            )
        return sel


@dataclass(frozen=True)
class RawSample:
    """One observed run: elapsed time plus counter values.

    counts may have holes (events the platform could not map); multiplexed
    lists events whose counter was shared and therefore suspect.
    """

    kernel_name: str
    run_index: int
    elapsed_ns: int
    counts: Mapping[EventKind, int]
    exit_status: int = 0
    multiplexed: frozenset[EventKind] = frozenset()
    iterations: int | None = None
    spec_echo: dict | None = None

    def __post_init__(self):
        if self.run_index < 1:
            raise ConfigError(f"run_index must be >= 1, got {self.run_index}")
        if self.exit_status == 0 and self.elapsed_ns <= 0:
            raise ConfigError("successful runs must report positive elapsed_ns")


@dataclass(frozen=True)
class ReplayBundle:
    platform: PlatformInfo
    samples: tuple[RawSample, ...]
    specs: Mapping[str, KernelSpec]


def load_platform(path) -> PlatformInfo:
    """Read a platform config file (JSON) into PlatformInfo."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        event_map = {
            EventKind(k): str(v) for k, v in data.get("event_map", {}).items()
        }
    except ValueError as exc:
        raise SchemaError(f"unknown event key: {exc}", "event_map") from None
    return PlatformInfo(
        name=str(data.get("name", "unknown")),
        vlen_bits=data.get("vlen_bits"),
        core_count=int(data.get("core_count", 1)),
        clock_hz=data.get("clock_hz"),
        event_map=event_map,
        rvv_supported=bool(data.get("rvv_supported", data.get("vlen_bits") is not None)),
    )


def probe_platform(
    configured: PlatformInfo | None = None,
    cpuinfo_text: str | None = None,
    vlmax_prober: Callable[[], int] | None = None,
) -> PlatformInfo:
    """Detect RVV support and the vector register width.

    The width comes from executing a one-shot vsetvli probe (vlmax at
    SEW=8/LMUL=1 equals VLEN in bytes) supplied as `vlmax_prober`; the
    result is never guessed silently. On hosts without a vector unit the
    returned info has rvv_supported=False, which signals replay-only mode.
    A configured width that disagrees with the probe is an error.
    """
    if cpuinfo_text is None:
        try:
            with open("/proc/cpuinfo") as fh:
                cpuinfo_text = fh.read()
        except OSError:
            cpuinfo_text = ""

    machine = _platform.machine()
    has_rvv = False
    if machine.startswith("riscv"):
        for line in cpuinfo_text.splitlines():
            if line.lower().startswith("isa"):
                isa = line.split(":", 1)[-1].strip().lower()
                base = isa.split("_")[0]
                has_rvv = "v" in base.replace("rv64", "").replace("rv32", "")
                break

    base_info = configured or PlatformInfo()
    if not has_rvv:
        return PlatformInfo(
            name=base_info.name,
            vlen_bits=None,
            core_count=os.cpu_count() or 1,
            clock_hz=base_info.clock_hz,
            event_map=base_info.event_map,
            rvv_supported=False,
        )

    probed = None
    if vlmax_prober is not None:
        probed = int(vlmax_prober()) * 8  # vlmax at e8/m1 times SEW bits
    if configured and configured.vlen_bits and probed and configured.vlen_bits != probed:
        raise ConfigError(
            f"configured vlen_bits={configured.vlen_bits} but probe reports {probed}"
        )
    return PlatformInfo(
        name=base_info.name,
        vlen_bits=probed or (configured.vlen_bits if configured else None),
        core_count=os.cpu_count() or 1,
        clock_hz=base_info.clock_hz,
        event_map=base_info.event_map,
        rvv_supported=True,
    )


def parse_shim_stdout(text: str) -> tuple[int, int]:
    """Extract the bit-exact driver protocol lines elapsed_ns= and iterations=."""
    m_el = _SHIM_ELAPSED_RE.search(text)
    m_it = _SHIM_ITER_RE.search(text)
    if not m_el or not m_it:
        raise SchemaError("driver stdout missing elapsed_ns=/iterations= protocol lines")
    return int(m_el.group(1)), int(m_it.group(1))


def parse_perf_output(
    text: str,
    selector_to_event: Mapping[str, EventKind],
) -> tuple[dict[EventKind, int], frozenset[EventKind]]:
    """Parse the perf tool's field-separated (-x,) output.

    Returns (counts, multiplexed). "<not counted>" rows become holes and
    are flagged as multiplexed rather than silently accepted. Malformed
    rows raise with their line number.
    """
    if not text.strip():
        raise SchemaError("empty perf output")
    counts: dict[EventKind, int] = {}
    flagged: set[EventKind] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) < 3:
            raise SchemaError(f"malformed perf line {lineno}: {line!r}")
        value, _unit, selector = parts[0], parts[1], parts[2]
        selector = selector.strip()
        event = selector_to_event.get(selector)
        if event is None:  # tools may echo the selector with :u/:k modifiers
            event = selector_to_event.get(selector.split(":")[0])
        if event is None:
            continue  # events we did not request (e.g. task-clock) pass through
        if value.startswith("<"):  # <not counted> / <not supported>
            flagged.add(event)
            continue
        try:
            counts[event] = int(float(value.replace(",", "")))
        except ValueError:
            raise SchemaError(f"bad counter value on perf line {lineno}: {value!r}") from None
        if len(parts) >= 5 and parts[4]:
            try:
                pct = float(parts[4])
            except ValueError:
                pct = 100.0
            if pct < 100.0:
                flagged.add(event)
    return counts, frozenset(flagged)


def run_benchmark(
    binary_path,
    events: Sequence[EventKind],
    runs: int = DEFAULT_RUNS,
    core_pin: int | None = None,
    iterations: int = DEFAULT_ITERATIONS,
    platform_info: PlatformInfo | None = None,
    perf_cmd: str = "perf",
    taskset_cmd: str = "taskset",
    timeout_s: float | None = None,
) -> list[RawSample]:
    """Measure one benchmark binary: `runs` sequential, core-pinned launches.

    Each launch wraps the binary in `perf stat -x,` with one -e flag per
    requested event; elapsed time comes from the in-process driver's
    stdout protocol, so process startup is excluded while counters cover
    the whole process. Any failed run fails the whole batch.
    """
    binary_path = str(binary_path)
    if runs < 1:
        raise ConfigError("runs must be positive")
    if not os.path.isfile(binary_path) or not os.access(binary_path, os.X_OK):
        raise ConfigError(f"benchmark binary not executable: {binary_path}")
    info = platform_info or PlatformInfo()
    selectors = {event: info.selector(event) for event in events}
    if shutil.which(perf_cmd) is None:
        raise CapabilityError(f"perf tool {perf_cmd!r} not found")

    cmd: list[str] = []
    if core_pin is not None:
        if shutil.which(taskset_cmd) is None:
            raise CapabilityError(f"affinity tool {taskset_cmd!r} not found")
        cmd += [taskset_cmd, "-c", str(core_pin)]
    cmd += [perf_cmd, "stat", "-x", ","]
    for event in events:
        cmd += ["-e", selectors[event]]
    cmd += ["--", binary_path, str(iterations)]

    sel_to_event = {sel: ev for ev, sel in selectors.items()}
    name = os.path.splitext(os.path.basename(binary_path))[0]
    samples: list[RawSample] = []
    for run_index in range(1, runs + 1):  # strictly sequential: exclusive core use
        proc = subprocess.run(
            cmd, capture_output=True, text=True, timeout=timeout_s, check=False
        )
        if proc.returncode != 0:
            raise CapabilityError(
                f"run {run_index}/{runs} of {name} failed (exit {proc.returncode}); "
                f"batch discarded:\n{proc.stderr.strip()}"
            )
        elapsed_ns, reported_iters = parse_shim_stdout(proc.stdout)
        counts, flagged = parse_perf_output(proc.stderr, sel_to_event)
        samples.append(RawSample(
            kernel_name=name,
            run_index=run_index,
            elapsed_ns=elapsed_ns,
            counts=counts,
            exit_status=proc.returncode,
            multiplexed=flagged,
            iterations=reported_iters,
        ))
    return samples


# ---------------------------------------------------------------------------
# Replay fixtures
# ---------------------------------------------------------------------------

def _want(mapping, key, kind, path):
    if key not in mapping:
        raise SchemaError(f"missing field {key!r}", path)
    value = mapping[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise SchemaError(f"field {key!r} must be {kind.__name__}", f"{path}.{key}")
    return value


def load_replay_bundle(fixture_path) -> ReplayBundle:
    """Load a replay fixture; samples come back exactly as recorded, in order."""
    with open(fixture_path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"fixture is not valid JSON: {exc}") from None

    if not isinstance(data, dict):
        raise SchemaError("fixture root must be an object", "$")
    pdata = _want(data, "platform", dict, "$")
    platform_info = PlatformInfo(
        name=str(pdata.get("name", "recorded")),
        vlen_bits=_want(pdata, "vlen", int, "$.platform"),
        clock_hz=pdata.get("clock_hz"),
        core_count=int(pdata.get("core_count", 1)),
        event_map={EventKind(k): str(v) for k, v in pdata.get("event_map", {}).items()},
        rvv_supported=True,
    )
    kernels = _want(data, "kernels", list, "$")
    samples: list[RawSample] = []
    specs: dict[str, KernelSpec] = {}
    for ki, kdata in enumerate(kernels):
        kpath = f"$.kernels[{ki}]"
        if not isinstance(kdata, dict):
            raise SchemaError("kernel entry must be an object", kpath)
        name = str(_want(kdata, "name", str, kpath))
        echo = kdata.get("spec_echo")
        if echo is not None:
            try:
                specs[name] = KernelSpec.from_dict(dict(echo, name=echo.get("name", name)))
            except (ConfigError, TypeError) as exc:
                raise SchemaError(f"bad spec_echo: {exc}", f"{kpath}.spec_echo") from None
        runs = _want(kdata, "runs", list, kpath)
        for ri, run in enumerate(runs):
            rpath = f"{kpath}.runs[{ri}]"
            if not isinstance(run, dict):
                raise SchemaError("run entry must be an object", rpath)
            elapsed = _want(run, "elapsed_ns", int, rpath)
            counts_raw = _want(run, "counts", dict, rpath)
            counts: dict[EventKind, int] = {}
            for key, value in counts_raw.items():
                try:
                    event = EventKind(key)
                except ValueError:
                    raise SchemaError(f"unknown event {key!r}", f"{rpath}.counts") from None
                if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                    raise SchemaError(
                        f"count for {key} must be a non-negative integer",
                        f"{rpath}.counts.{key}",
                    )
                counts[event] = value
            try:
                samples.append(RawSample(
                    kernel_name=name,
                    run_index=ri + 1,
                    elapsed_ns=elapsed,
                    counts=counts,
                    spec_echo=echo,
                ))
            except ConfigError as exc:
                raise SchemaError(str(exc), rpath) from None
    return ReplayBundle(platform=platform_info, samples=tuple(samples), specs=specs)


def load_replay(fixture_path) -> list[RawSample]:
    return list(load_replay_bundle(fixture_path).samples)


# ---------------------------------------------------------------------------
# Results store (one JSON record per line, append-only)
# ---------------------------------------------------------------------------

STORE_SCHEMA = 1


def append_samples(store_path, samples: Iterable[RawSample], platform_name: str = "") -> None:
    with open(store_path, "a") as fh:
        for s in samples:
            rec = {
                "schema": STORE_SCHEMA,
                "type": "sample",
                "platform": platform_name,
                "kernel": s.kernel_name,
                "run_index": s.run_index,
                "elapsed_ns": s.elapsed_ns,
                "counts": {k.value: v for k, v in s.counts.items()},
                "multiplexed": sorted(k.value for k in s.multiplexed),
                "exit_status": s.exit_status,
                "iterations": s.iterations,
                "spec_echo": s.spec_echo,
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()


def read_samples(store_path) -> list[RawSample]:
    samples = []
    with open(store_path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"bad store line {lineno}: {exc}") from None
            if rec.get("type") != "sample":
                continue
            samples.append(RawSample(
                kernel_name=rec["kernel"],
                run_index=rec["run_index"],
                elapsed_ns=rec["elapsed_ns"],
                counts={EventKind(k): v for k, v in rec.get("counts", {}).items()},
                exit_status=rec.get("exit_status", 0),
                multiplexed=frozenset(EventKind(k) for k in rec.get("multiplexed", [])),
                iterations=rec.get("iterations"),
                spec_echo=rec.get("spec_echo"),
            ))
    return samples
