"""Compiler x vectorization-mode x LMUL benchmarking campaigns.

Applications are external artifacts described by manifests; this module
expands the job matrix, drives builds through user-supplied toolchains
(or the fake compiler for desk-scale tests), collects measurements
through a sample source (hardware runner or replay fixture), and
persists normalized records to an append-only line-delimited store.

Builds may run concurrently; measurements are strictly serialized by the
runner contract. Records carry no timestamps, so replaying an unchanged
matrix reproduces the store bit-identically.
"""

from __future__ import annotations

import json
import os
import re
import shlex
import shutil
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .core import EventKind
from .errors import BuildError, CapabilityError, ConfigError, SchemaError
from .runner import RawSample

STORE_SCHEMA = 1
MODES = ("nonvec", "autovec", "intrinsics")

_SHELL_META = re.compile(r"[;&|`$<>]")


def _check_template(template: str, what: str) -> str:
    if _SHELL_META.search(template):
        raise ConfigError(f"{what} template contains shell metacharacters: {template!r}")
    return template


@dataclass(frozen=True)
class AppManifest:
    """One external application: how to build it, run it, and trust its output."""

    app: str
    build: str  # placeholders: {CC} {CFLAGS} {OUT}
    run: str    # placeholders: {BIN}
    validate_substring: str | None = None
    validate_exit_code: int = 0
    tags: tuple[str, ...] = ()
    env: Mapping[str, str] = field(default_factory=dict)
    base_dir: str = "."

    def __post_init__(self):
        _check_template(self.build, f"{self.app} build")
        _check_template(self.run, f"{self.app} run")


@dataclass(frozen=True)
class CompilerConfig:
    """One toolchain plus its flag vocabulary for the vectorization modes."""

    compiler: str  # short id used in record keys
    cc: str        # executable name or path
    base_flags: str = ""
    nonvec_flags: str = ""
    autovec_flags: str = ""
    lmul_flag_template: str = ""  # placeholder: {L}

    def flags_for(self, mode: str, lmul: int | None) -> str:
        if mode == "nonvec":
            if lmul is not None:
                raise ConfigError("an explicit LMUL applies to autovectorized builds only")
            parts = [self.base_flags, self.nonvec_flags]
        elif mode == "autovec":
            parts = [self.base_flags, self.autovec_flags]
            if lmul is not None:
                if not self.lmul_flag_template:
                    raise ConfigError(f"compiler {self.compiler} has no LMUL flag template")
                parts.append(self.lmul_flag_template.format(L=lmul))
        else:
            raise ConfigError(f"cannot build mode {mode!r} from the flag matrix")
        return " ".join(p for p in parts if p)


@dataclass(frozen=True)
class Job:
    app: AppManifest
    compiler: CompilerConfig
    mode: str
    lmul: int | None = None

    @property
    def key(self) -> str:
        suffix = f":m{self.lmul}" if self.lmul is not None else ""
        return f"{self.app.app}:{self.compiler.compiler}:{self.mode}{suffix}"

    @property
    def cflags(self) -> str:
        return self.compiler.flags_for(self.mode, self.lmul)


@dataclass(frozen=True)
class CampaignRecord:
    app: str
    compiler: str
    mode: str
    lmul: int | None
    runtime_ns: float
    counts: Mapping[EventKind, int]
    speedup: float | None
    reduction: float | None
    valid: bool
    baseline: bool
    record_id: str
    schema: int = STORE_SCHEMA

    def as_dict(self) -> dict:
        return {
            "schema": self.schema,
            "type": "campaign",
            "record_id": self.record_id,
            "app": self.app,
            "compiler": self.compiler,
            "mode": self.mode,
            "lmul": self.lmul,
            "runtime_ns": self.runtime_ns,
            "counts": {k.value: v for k, v in sorted(self.counts.items())},
            "speedup": self.speedup,
            "reduction": self.reduction,
            "valid": self.valid,
            "baseline": self.baseline,
        }


# ---------------------------------------------------------------------------
# Manifest / compiler-config files
# ---------------------------------------------------------------------------

def load_manifests(path) -> list[AppManifest]:
    base_dir = os.path.dirname(os.path.abspath(str(path)))
    with open(path) as fh:
        data = json.load(fh)
    apps = data.get("apps")
    if not isinstance(apps, list) or not apps:
        raise SchemaError("manifest file needs a non-empty 'apps' list", "$.apps")
    out = []
    for i, entry in enumerate(apps):
        try:
            out.append(AppManifest(
                app=entry["app"],
                build=entry["build"],
                run=entry["run"],
                validate_substring=entry.get("validate_substring"),
                validate_exit_code=int(entry.get("validate_exit_code", 0)),
                tags=tuple(entry.get("tags", ())),
                env=dict(entry.get("env", {})),
                base_dir=base_dir,
            ))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad app entry: {exc}", f"$.apps[{i}]") from None
    return out


def load_compiler_configs(path) -> list[CompilerConfig]:
    with open(path) as fh:
        data = json.load(fh)
    compilers = data.get("compilers")
    if not isinstance(compilers, list) or not compilers:
        raise SchemaError("compiler file needs a non-empty 'compilers' list", "$.compilers")
    out = []
    for i, entry in enumerate(compilers):
        try:
            out.append(CompilerConfig(
                compiler=entry["compiler"],
                cc=entry["cc"],
                base_flags=entry.get("base_flags", ""),
                nonvec_flags=entry.get("nonvec_flags", ""),
                autovec_flags=entry.get("autovec_flags", ""),
                lmul_flag_template=entry.get("lmul_flag_template", ""),
            ))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad compiler entry: {exc}", f"$.compilers[{i}]") from None
    return out


# ---------------------------------------------------------------------------
# Matrix expansion and builds
# ---------------------------------------------------------------------------

def expand_matrix(
    manifests: Sequence[AppManifest],
    compiler_configs: Sequence[CompilerConfig],
    lmul_levels: Sequence[int] = (),
) -> list[Job]:
    """apps x compilers x (nonvec + autovec-default + one autovec job per LMUL)."""
    if not manifests:
        raise ConfigError("no applications in the matrix")
    if not compiler_configs:
        raise ConfigError("no compilers in the matrix")
    jobs: list[Job] = []
    for app in manifests:
        for compiler in compiler_configs:
            jobs.append(Job(app, compiler, "nonvec"))
            jobs.append(Job(app, compiler, "autovec"))
            for level in lmul_levels:
                jobs.append(Job(app, compiler, "autovec", int(level)))
    keys = [j.key for j in jobs]
    dupes = {k for k in keys if keys.count(k) > 1}
    if dupes:
        raise ConfigError(f"duplicate job keys in matrix: {sorted(dupes)}")
    return jobs


@dataclass(frozen=True)
class BuildResult:
    binary: str
    log_path: str
    vectorization_report: str
    command: tuple[str, ...]


def build_app(job: Job, workdir) -> BuildResult:
    """Invoke the external compiler with the fully substituted flag set.

    The build log (and any vectorization report the compiler prints) is
    persisted verbatim next to the binary.
    """
    cc_path = shutil.which(job.compiler.cc)
    if cc_path is None:
        raise CapabilityError(f"compiler executable {job.compiler.cc!r} not found")
    job_dir = os.path.join(str(workdir), job.key.replace(":", "_"))
    os.makedirs(job_dir, exist_ok=True)
    binary = os.path.join(job_dir, f"{job.app.app}.bin")
    cmd_str = job.app.build.format(CC=cc_path, CFLAGS=job.cflags, OUT=binary)
    argv = shlex.split(cmd_str)
    proc = subprocess.run(
        argv, capture_output=True, text=True, cwd=job.app.base_dir, check=False,
        env={**os.environ, **job.app.env},
    )
    log = f"$ {' '.join(argv)}\n{proc.stdout}{proc.stderr}"
    log_path = os.path.join(job_dir, "build.log")
    with open(log_path, "w") as fh:
        fh.write(log)
    if proc.returncode != 0:
        raise BuildError(f"build failed for {job.key} (exit {proc.returncode})", log=log)
    return BuildResult(
        binary=binary,
        log_path=log_path,
        vectorization_report=proc.stdout + proc.stderr,
        command=tuple(argv),
    )


def validate_app_run(job: Job, binary: str, extra_args: str = "") -> tuple[bool, str]:
    """Run the app once per its manifest and apply the output validator."""
    cmd_str = job.app.run.format(BIN=binary)
    if extra_args:
        cmd_str += f" {extra_args}"
    argv = shlex.split(cmd_str)
    proc = subprocess.run(
        argv, capture_output=True, text=True, cwd=job.app.base_dir, check=False,
        env={**os.environ, **job.app.env},
    )
    output = proc.stdout + proc.stderr
    ok = proc.returncode == job.app.validate_exit_code
    if ok and job.app.validate_substring is not None:
        ok = job.app.validate_substring in output
    return ok, output


# ---------------------------------------------------------------------------
# Measurement sources and normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Measurement:
    """Raw per-job outcome before normalization against the baseline."""

    key: str
    app: str
    compiler: str
    mode: str
    lmul: int | None
    runtime_ns: float
    counts: Mapping[EventKind, int]
    valid: bool = True


def summarize_samples(job_key: str, app: str, compiler: str, mode: str,
                      lmul: int | None, samples: Sequence[RawSample],
                      valid: bool = True) -> Measurement:
    """Mean-of-runs runtime and counts for one job."""
    if not samples:
        raise ConfigError(f"no samples for job {job_key}")
    runtime = sum(s.elapsed_ns for s in samples) / len(samples)
    events = set()
    for s in samples:
        events.update(s.counts)
    counts = {
        e: round(sum(s.counts[e] for s in samples if e in s.counts)
                 / max(1, sum(1 for s in samples if e in s.counts)))
        for e in sorted(events)
    }
    return Measurement(job_key, app, compiler, mode, lmul, runtime, counts, valid)


def load_campaign_fixture(path) -> tuple[dict, list[Measurement]]:
    """Recorded campaign results: (platform description, measurements)."""
    with open(path) as fh:
        data = json.load(fh)
    platform = data.get("platform", {})
    raw = data.get("records")
    if not isinstance(raw, list):
        raise SchemaError("campaign fixture needs a 'records' list", "$.records")
    measurements = []
    for i, rec in enumerate(raw):
        rpath = f"$.records[{i}]"
        try:
            app, compiler, mode = rec["app"], rec["compiler"], rec["mode"]
            lmul = rec.get("lmul")
            runs = rec["runs"]
            samples = [
                RawSample(
                    kernel_name=app,
                    run_index=j + 1,
                    elapsed_ns=int(r["elapsed_ns"]),
                    counts={EventKind(k): int(v) for k, v in r.get("counts", {}).items()},
                )
                for j, r in enumerate(runs)
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad campaign record: {exc}", rpath) from None
        suffix = f":m{lmul}" if lmul is not None else ""
        key = f"{app}:{compiler}:{mode}{suffix}"
        measurements.append(summarize_samples(
            key, app, compiler, mode, lmul, samples, valid=bool(rec.get("valid", True)),
        ))
    return platform, measurements


def replay_measure(fixture_path) -> Callable[[Job], Measurement]:
    """Sample source backed by a recorded fixture, keyed by job key."""
    _, measurements = load_campaign_fixture(fixture_path)
    index = {m.key: m for m in measurements}

    def measure(job: Job) -> Measurement:
        m = index.get(job.key)
        if m is None:
            raise ConfigError(f"replay fixture has no record for job {job.key}")
        return m

    return measure


def normalize_records(
    measurements: Sequence[Measurement],
    baseline_key: str = "gcc:nonvec",
) -> list[CampaignRecord]:
    """Attach per-app speedup and instruction reduction vs the baseline.

    baseline_key is `compiler:mode`; every app must contain exactly one
    matching valid record, which gets speedup exactly 1.0. Invalid
    records keep their measurements but are excluded from normalization.
    """
    try:
        base_compiler, base_mode = baseline_key.split(":")
    except ValueError:
        raise ConfigError(f"baseline key must be compiler:mode, got {baseline_key!r}") from None

    by_app: dict[str, list[Measurement]] = {}
    for m in measurements:
        by_app.setdefault(m.app, []).append(m)

    records: list[CampaignRecord] = []
    for app in sorted(by_app):
        group = by_app[app]
        base = [
            m for m in group
            if m.compiler == base_compiler and m.mode == base_mode and m.lmul is None
        ]
        if not base:
            raise ConfigError(f"app {app!r} has no baseline record {baseline_key!r}")
        if len(base) > 1:
            raise ConfigError(f"app {app!r} has {len(base)} baseline records")
        baseline = base[0]
        if not baseline.valid:
            raise ConfigError(f"baseline record for app {app!r} failed validation")
        base_retired = baseline.counts.get(EventKind.RETIRED)
        for m in group:
            is_base = m is baseline
            if not m.valid:
                spd = red = None
            else:
                spd = 1.0 if is_base else baseline.runtime_ns / m.runtime_ns
                retired = m.counts.get(EventKind.RETIRED)
                if base_retired and retired:
                    red = 1.0 if is_base else base_retired / retired
                else:
                    red = None
            records.append(CampaignRecord(
                app=m.app, compiler=m.compiler, mode=m.mode, lmul=m.lmul,
                runtime_ns=m.runtime_ns, counts=dict(m.counts),
                speedup=spd, reduction=red, valid=m.valid,
                baseline=is_base, record_id=m.key,
            ))
    return records


def run_campaign(
    jobs: Sequence[Job],
    measure: Callable[[Job], Measurement],
    calibration=None,
    baseline_key: str = "gcc:nonvec",
    store_path=None,
) -> list[CampaignRecord]:
    """Measure every job, normalize against the baseline, persist records.

    When a calibration report is supplied, only calibrated-usable events
    survive into the stored counts; reduction then requires the retired
    counter to be in the usable set.
    """
    measurements = []
    for job in jobs:  # measurement order is the deterministic matrix order
        m = measure(job)
        if calibration is not None:
            usable = calibration.usable_events
            m = Measurement(
                key=m.key, app=m.app, compiler=m.compiler, mode=m.mode, lmul=m.lmul,
                runtime_ns=m.runtime_ns,
                counts={k: v for k, v in m.counts.items() if k in usable},
                valid=m.valid,
            )
        measurements.append(m)
    records = normalize_records(measurements, baseline_key=baseline_key)
    if store_path is not None:
        append_records(store_path, records)
    return records


# ---------------------------------------------------------------------------
# Campaign results store
# ---------------------------------------------------------------------------

def append_records(store_path, records: Iterable[CampaignRecord]) -> None:
    with open(store_path, "a") as fh:
        for rec in records:
            fh.write(json.dumps(rec.as_dict(), sort_keys=True) + "\n")
            fh.flush()


def read_records(store_path) -> list[CampaignRecord]:
    out = []
    with open(store_path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"bad store line {lineno}: {exc}") from None
            if rec.get("type") != "campaign":
                continue
            out.append(CampaignRecord(
                app=rec["app"], compiler=rec["compiler"], mode=rec["mode"],
                lmul=rec.get("lmul"),
                runtime_ns=rec["runtime_ns"],
                counts={EventKind(k): v for k, v in rec.get("counts", {}).items()},
                speedup=rec.get("speedup"), reduction=rec.get("reduction"),
                valid=rec.get("valid", True), baseline=rec.get("baseline", False),
                record_id=rec.get("record_id", ""),
                schema=rec.get("schema", STORE_SCHEMA),
            ))
    return out
