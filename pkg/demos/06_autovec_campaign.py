#!/usr/bin/env python3
# The autovectorization campaign, replayed from the recorded X60 study:
# per-app speedups against the scalar gcc15 baseline, instruction
# reductions, register-grouping sweeps, and an intrinsics-ported
# quantum-simulator workload.

from rvvprobe import lmul_sweep_summary, normalize_records, speedup
from rvvprobe.campaign import load_campaign_fixture
from rvvprobe.fixtures import campaign_fixture_path

_, measurements = load_campaign_fixture(campaign_fixture_path())
records = normalize_records(measurements, baseline_key="gcc15:nonvec")
by_id = {r.record_id: r for r in records}

apps = ("stream", "spmv", "dgemm", "sgemm", "yolov3", "alexnet")
print("Default-LMUL autovectorization, normalized to gcc15 nonvec:")
print(f"{'app':>8} {'gcc15 spd':>10} {'clang21 spd':>12} {'gcc15 red':>10} {'clang21 red':>12}")
for app in apps:
    g = by_id[f"{app}:gcc15:autovec"]
    c = by_id[f"{app}:clang21:autovec"]
    print(f"{app:>8} {g.speedup:>10.2f} {c.speedup:>12.2f} "
          f"{g.reduction:>10.2f} {c.reduction:>12.2f}")
print("memory-bound stream/spmv keep their instruction savings unrealized\n")

print("Register-group (LMUL) sweeps:")
for app, compiler in (("sgemm", "clang21"), ("sgemm", "gcc15"), ("yolov3", "gcc15")):
    group = [r for r in records
             if r.app == app and r.compiler == compiler and r.mode == "autovec"]
    summary = lmul_sweep_summary(group)
    cells = "  ".join(
        f"m{row.lmul}:{row.speedup:.2f}x/{row.reduction:.1f}x" for row in summary.rows
    )
    marker = "beats default" if summary.best_beats_default else "default already best"
    print(f"  {app}/{compiler}: {cells}")
    print(f"      best m{summary.best_lmul} ({marker}); speedup/reduction per level")
print()

from rvvprobe import instruction_reduction
from rvvprobe.core import EventKind

qn = by_id["qsim:clang21:nonvec"]
qi = by_id["qsim:clang21:intrinsics"]
gn = by_id["qsim:gcc15:nonvec"]
ga = by_id["qsim:gcc15:autovec"]
own_reduction = instruction_reduction(
    qn.counts[EventKind.RETIRED], qi.counts[EventKind.RETIRED]
)
print("Quantum simulator (interleaved complex layout defeats autovectorization):")
print(f"  gcc15 autovec vs nonvec: {speedup(gn.runtime_ns, ga.runtime_ns):.2f}x (no gain)")
print(f"  clang21 intrinsics vs its own nonvec: "
      f"{speedup(qn.runtime_ns, qi.runtime_ns):.2f}x faster, "
      f"{own_reduction:.2f}x fewer instructions")
