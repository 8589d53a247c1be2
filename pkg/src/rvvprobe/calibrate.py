"""Performance-counter reliability classification.

Each of the seven events is compared, kernel by kernel, against the
known-by-construction reference (issued target-instruction count times
that instruction's event attribution). An event is reliable only when
every run of every kernel lands within tolerance of its reference;
near-zero references are guarded by an absolute floor so that stray
background counts (interrupts, context switches) never fail a counter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import EVENT_ORDER, EventCounts, EventKind, attribute_events, classify
from .errors import ConfigError
from .kernelgen import KernelSpec
from .runner import RawSample

DEFAULT_TOLERANCE = 0.05
DEFAULT_FLOOR = 1_000_000  # absolute counts; ~0.01% of a default-scale run

RELIABLE = "reliable"
UNRELIABLE = "unreliable"
INDETERMINATE = "indeterminate"


def relative_error(observed: float, reference: float, floor: float = DEFAULT_FLOOR) -> float:
    """|observed - reference| / max(reference, floor)."""
    if observed < 0 or reference < 0:
        raise ConfigError("counts must be non-negative")
    if floor <= 0:
        raise ConfigError("floor must be positive")
    return abs(observed - reference) / max(reference, floor)


def target_reference_counts(spec: KernelSpec) -> EventCounts:
    """Reference semantics of one kernel: issued target count x its attribution.

    Loop control and prologue are deliberately excluded; they sit inside
    the calibration tolerance, exactly as the retired counter is judged
    against the issued-instruction total.
    """
    issued = spec.iterations * spec.unroll
    return attribute_events(classify(spec.target_inst)).scaled(issued)


def references_from_specs(specs: Mapping[str, KernelSpec]) -> dict[str, EventCounts]:
    return {name: target_reference_counts(spec) for name, spec in specs.items()}


@dataclass(frozen=True)
class KernelCheck:
    kernel: str
    reference: int
    observed_mean: float
    relative_error: float  # of the mean
    max_run_error: float
    passed: bool  # every run within tolerance


@dataclass(frozen=True)
class CalibrationVerdict:
    event: EventKind
    per_kernel: tuple[KernelCheck, ...]
    verdict: str
    diagnostics: tuple[str, ...] = ()


@dataclass(frozen=True)
class CalibrationReport:
    verdicts: Mapping[EventKind, CalibrationVerdict]
    usable_events: frozenset[EventKind]
    tolerance: float
    floor: float

    def verdict(self, event: EventKind) -> str:
        return self.verdicts[event].verdict


def _group_samples(samples: Iterable[RawSample]) -> dict[str, list[RawSample]]:
    grouped: dict[str, list[RawSample]] = {}
    for s in samples:
        grouped.setdefault(s.kernel_name, []).append(s)
    return grouped


def classify_event(
    event: EventKind,
    samples_by_kernel: Mapping[str, Sequence[RawSample]],
    references: Mapping[str, EventCounts],
    tolerance: float = DEFAULT_TOLERANCE,
    floor: float = DEFAULT_FLOOR,
) -> CalibrationVerdict:
    """Verdict for one event across the whole kernel sweep.

    reliable: every run of every kernel within tolerance, and at least one
    kernel actually exercises the event (reference at or above the floor).
    unreliable: any run out of tolerance. indeterminate: nothing
    exercised the event, or samples are missing for a kernel that does.
    """
    checks: list[KernelCheck] = []
    diagnostics: list[str] = []
    any_failed = False
    missing_exercising = False
    exercised = any(ref.get(event) >= floor for ref in references.values())

    for kernel in sorted(references):
        ref = references[kernel].get(event)
        runs = [s for s in samples_by_kernel.get(kernel, ()) if event in s.counts]
        if not runs:
            if ref >= floor:
                missing_exercising = True
                diagnostics.append(f"no samples carry {event.label} for kernel {kernel!r}")
            continue
        errors = [relative_error(s.counts[event], ref, floor) for s in runs]
        mean = sum(s.counts[event] for s in runs) / len(runs)
        passed = all(e <= tolerance for e in errors)
        any_failed |= not passed
        checks.append(KernelCheck(
            kernel=kernel,
            reference=ref,
            observed_mean=mean,
            relative_error=relative_error(mean, ref, floor),
            max_run_error=max(errors),
            passed=passed,
        ))

    if any_failed:
        verdict = UNRELIABLE
    elif missing_exercising or not exercised:
        verdict = INDETERMINATE
        if not exercised:
            diagnostics.append(f"no kernel in the sweep exercises {event.label}")
    else:
        verdict = RELIABLE
    return CalibrationVerdict(
        event=event,
        per_kernel=tuple(checks),
        verdict=verdict,
        diagnostics=tuple(diagnostics),
    )


def calibrate_suite(
    samples: Iterable[RawSample],
    references: Mapping[str, EventCounts],
    tolerance: float = DEFAULT_TOLERANCE,
    floor: float = DEFAULT_FLOOR,
) -> CalibrationReport:
    """All seven verdicts plus the recommended usable-event set.

    Events out of tolerance are excluded from the usable set and should
    not feed profiling analysis downstream.
    """
    grouped = _group_samples(samples)
    verdicts = {
        event: classify_event(event, grouped, references, tolerance, floor)
        for event in EVENT_ORDER
    }
    usable = frozenset(e for e, v in verdicts.items() if v.verdict == RELIABLE)
    return CalibrationReport(
        verdicts=verdicts,
        usable_events=usable,
        tolerance=tolerance,
        floor=floor,
    )
