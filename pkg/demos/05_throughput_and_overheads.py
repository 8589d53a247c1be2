#!/usr/bin/env python3
# Throughput analytics over the recorded stride and tail fixtures: the
# element-width ladder, the strided-vs-masked-vs-scalar comparison, and
# the constant penalty of mask-based tail handling.

from rvvprobe import VectorConfig, overhead_fraction, throughput
from rvvprobe.fixtures import load_stride_compare, load_tail_overhead

stride = load_stride_compare()
cfg = VectorConfig(stride.platform.vlen_bits)

print("Stride-2 gather, three ways (Gops/s, elements actually gathered):")
gops = {}
for name, spec in stride.specs.items():
    sample = next(s for s in stride.samples if s.kernel_name == name)
    gops[(spec.sew_bits, spec.pattern)] = throughput(spec, cfg, sample).gops_per_sec
print(f"{'sew':>4} {'strided':>9} {'masked':>9} {'scalar':>9}")
for sew in (8, 16, 32, 64):
    print(f"{sew:>4} {gops[(sew, 'strided-load')]:>9.2f} "
          f"{gops[(sew, 'masked-unit-load')]:>9.2f} {gops[(sew, 'scalar-ref')]:>9.2f}")
print("strided gathers element-by-element; the masked pair wins at narrow widths\n")

for platform in ("jupiter", "bpif3"):
    tail = load_tail_overhead(platform)
    tcfg = VectorConfig(tail.platform.vlen_bits)
    setvl = {}
    mask = {}
    for name, spec in tail.specs.items():
        sample = next(s for s in tail.samples if s.kernel_name == name)
        target = setvl if spec.pattern == "tail-vl-load" else mask
        target[spec.active_elems] = throughput(spec, tcfg, sample).gops_per_sec
    full = max(setvl)
    frac = overhead_fraction(setvl[full], mask[full])
    print(f"{tail.platform.name}: at {full} active elements, "
          f"vl-based {setvl[full]:.1f} vs masked {mask[full]:.1f} Gops/s "
          f"-> {frac:.1%} masked-execution penalty")
    spread = [overhead_fraction(setvl[k], mask[k]) for k in sorted(setvl)]
    print(f"  penalty across active counts 1..{full}: "
          f"min {min(spread):.3f}, max {max(spread):.3f} (constant)")
