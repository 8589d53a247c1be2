#!/usr/bin/env python3
# Counter calibration on the shipped SpacemiT X60 recording: each event
# is judged against the issued-instruction reference across ten
# single-instruction kernels; anything out of tolerance is excluded
# from later profiling.

from rvvprobe import calibrate_suite, references_from_specs
from rvvprobe.core import EVENT_ORDER, EventKind
from rvvprobe.fixtures import counter_validation_specs, load_counter_validation

bundle = load_counter_validation()
print(f"recording: {bundle.platform.name}, VLEN={bundle.platform.vlen_bits}, "
      f"{len(bundle.samples)} samples\n")

refs = references_from_specs(counter_validation_specs())
report = calibrate_suite(bundle.samples, refs, tolerance=0.05, floor=1e6)

for event in EVENT_ORDER:
    verdict = report.verdicts[event]
    worst = max((c.max_run_error for c in verdict.per_kernel), default=0.0)
    print(f"{event.label:>12}: {verdict.verdict:<12} worst run error {worst:.3g}")

print("\nusable for profiling:", ", ".join(sorted(e.label for e in report.usable_events)))

print("\nWhy the two exclusions:")
for event, kernels in ((EventKind.VEC, ("fadd", "fmadd")),
                       (EventKind.FP, ("vfadd.vv", "vmacc.vv"))):
    for check in report.verdicts[event].per_kernel:
        if check.kernel in kernels:
            print(f"  {event.label} on {check.kernel:>8}: observed {check.observed_mean:.3g} "
                  f"against a near-zero reference")
