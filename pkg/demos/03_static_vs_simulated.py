#!/usr/bin/env python3
# The two count models: static prediction (prologue + N*body + epilogue)
# against the functional interpreter that actually executes the kernel.
# They must agree event for event, exactly.

import numpy as np

from rvvprobe import (
    KernelSpec,
    VectorConfig,
    execute,
    generate_kernel,
    parse_kernel,
    predict_counts,
)

cfg = VectorConfig(256)
spec = KernelSpec(name="vlse16_m1_s2_strided_load", target_inst="vlse16.v",
                  sew_bits=16, lmul=1, pattern="strided-load", stride_elems=2,
                  unroll=96)
kernel = parse_kernel(generate_kernel(spec, cfg).text)

print(f"{'iterations':>10} {'model retired':>14} {'sim retired':>12} {'vec_ld':>12} equal")
for iterations in (1, 10, 1000):
    ref = predict_counts(kernel, iterations)
    got, state = execute(kernel, iterations, cfg)
    print(f"{iterations:>10} {ref.counts.retired:>14} {got.retired:>12} "
          f"{got.vec_ld:>12} {got == ref.counts}")

# the interpreter also gives functional results: a stride-2 gather pulls
# every other element of the buffer
buf = bytes(range(64))
_, state = execute(kernel, 1, cfg, buffer_init=buf)
lanes = state.v[31].view(np.uint16)
print("\nbuffer head:   ", list(buf[:8]))
print("gathered lanes:", lanes[:4].tolist(), "(stride 2 over 16-bit elements)")

# with vl below VLMAX the destination tail is visible: the agnostic
# policy deterministically writes all-ones there
short = KernelSpec(name="vle16_m1_tail_vl_a4", target_inst="vle16.v", sew_bits=16,
                   lmul=1, pattern="tail-vl-load", active_elems=4, unroll=96)
_, state = execute(parse_kernel(generate_kernel(short, cfg).text), 1, cfg,
                   buffer_init=buf)
lanes = state.v[0].view(np.uint16)
print("vl=4 load:     ", lanes[:4].tolist(), "+ tail", lanes[4:6].tolist())
