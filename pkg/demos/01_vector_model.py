#!/usr/bin/env python3
# The vector configuration model: how many elements one instruction
# touches, how the active length resolves, and which hardware events
# each instruction class is expected to bump.

from rvvprobe import VectorConfig, attribute_events, classify, compute_vlmax, resolve_vl

cfg = VectorConfig(vlen_bits=256)

print("Elements per instruction (VLMAX = LMUL*VLEN/SEW) at VLEN=256:")
print(f"{'':>6}", *[f"m{l:<4}" for l in (1, 2, 4, 8)])
for sew in (8, 16, 32, 64):
    row = [compute_vlmax(cfg, sew, lmul) for lmul in (1, 2, 4, 8)]
    print(f"e{sew:<5}", *[f"{v:<5}" for v in row])

print("\nActive length requests clamp to VLMAX:")
for avl in (7, 32, 100):
    print(f"  request {avl:>3} elements at e8/m1 -> vl={resolve_vl(avl, compute_vlmax(cfg, 8, 1))}")

print("\nPer-retirement event attribution:")
for mnemonic in ("vle32.v", "vse32.v", "vfadd.vv", "vmacc.vv", "vsetvli",
                 "flw", "fsw", "fadd.s", "lw", "bnez"):
    bumps = attribute_events(classify(mnemonic)).as_dict()
    fired = [k for k, v in bumps.items() if v]
    print(f"  {mnemonic:<10} -> {', '.join(fired)}")

print("\nNote: vector FP arithmetic does not bump the scalar fp event;")
print("on the measured hardware that counter tracks scalar FP only.")
