#!/usr/bin/env python3
# Kernel generation: a dependency-free unrolled loop per target
# instruction, operands pre-staged in registers, destinations rotating
# through the whole register file.

from rvvprobe import KernelSpec, VectorConfig, generate_kernel, generate_suite

cfg = VectorConfig(256)

spec = KernelSpec(
    name="vfadd_e32_m1_arith",
    target_inst="vfadd.vv",
    sew_bits=32,
    lmul=1,
    pattern="arith",
    iterations=10**8,
    unroll=128,
)
module = generate_kernel(spec, cfg)

lines = module.text.splitlines()
print("\n".join(lines[:16]))
print(f"    ... ({len(lines)} lines total, buffer {module.buffer_bytes} bytes)")
print("\n".join(lines[-6:]))

print("\nSuite catalogs:")
for kind in ("memory", "stride-compare", "tail-compare", "arith", "scalar-baseline"):
    suite = generate_suite(kind, cfg)
    sample = ", ".join(s.name for s in suite[:3])
    print(f"  {kind:<16} {len(suite):>3} kernels   e.g. {sample}")

# the stride comparison keeps gather parity: two masked unit loads
# replace one strided load, so the masked kernel unrolls twice as far
triple = [s for s in generate_suite("stride-compare", cfg) if s.sew_bits == 8]
for s in triple:
    print(f"  stride-2 @ e8: {s.pattern:<18} {s.target_inst:<8} unroll={s.unroll}")
