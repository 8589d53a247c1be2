"""Deterministic RVV assembly microbenchmark generator.

Each kernel is a leaf function `rvvprobe_kernel(iterations, buffer)` built
as: a prologue that stages operands and configures vsetvli, a loop body of
exactly `unroll` copies of the target instruction with destination
registers rotating so no instruction depends on its predecessor's result,
and minimal loop control (counter decrement + branch). Generation is a
pure function of (KernelSpec, VectorConfig): the same inputs always yield
byte-identical text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from .core import (
    Category,
    ElementType,
    INTEGER_LMULS,
    Policy,
    SEW_VALUES,
    VectorConfig,
    classify,
    compute_vlmax,
)
from .errors import ConfigError

ENTRY_SYMBOL = "rvvprobe_kernel"
ARCH_STRING = "rv64gcv_zfh_zvfh"
META_TAG = "rvvprobe-kernel-meta:"

DEFAULT_ITERATIONS = 10**8
DEFAULT_UNROLL = 128
# Unroll used by the comparison suites: divisible by every rotation pool
# size that occurs (32/LMUL unmasked, 24/LMUL masked, 8 scalar).
COMPARE_UNROLL = 96

DEFAULT_BUFFER_BYTES = 16 * 1024  # fits a 32 KiB L1 D-cache with headroom

PATTERNS = (
    "unit-load",
    "unit-store",
    "strided-load",
    "strided-store",
    "masked-unit-load",
    "tail-vl-load",
    "tail-mask-load",
    "arith",
    "scalar-ref",
)

_VECTOR_PATTERNS = {
    "unit-load", "unit-store", "strided-load", "strided-store",
    "masked-unit-load", "tail-vl-load", "tail-mask-load",
}
_MASKED_PATTERNS = {"masked-unit-load", "tail-mask-load"}

# Scalar register conventions. a0 = iteration counter, a1 = buffer base,
# t0-t5 are prologue staging temps, a2/a3 (int) and fa0-fa3 (fp) hold
# staged operands that must survive the loop body.
_SCALAR_INT_DESTS = ("t0", "t1", "t2", "t3", "t4", "t5", "t6", "a7")
_SCALAR_FP_DESTS = ("ft0", "ft1", "ft2", "ft3", "ft4", "ft5", "ft6", "ft7")

_SCALAR_LOADS = {8: "lb", 16: "lh", 32: "lw", 64: "ld"}
_SCALAR_STORES = {8: "sb", 16: "sh", 32: "sw", 64: "sd"}

# Element bit patterns staged as operands: integer 1 / floating-point 1.0,
# replicated into a little-endian dword.
_INT_ONE = {
    8: 0x0101010101010101,
    16: 0x0001000100010001,
    32: 0x0000000100000001,
    64: 0x0000000000000001,
}
_FP_ONE = {
    16: 0x3C003C003C003C00,
    32: 0x3F8000003F800000,
    64: 0x3FF0000000000000,
}
_ALTERNATING_MASK_DWORD = 0x5555555555555555  # element 0 active, LSB-first


@dataclass(frozen=True)
class KernelSpec:
    """Full parameterization of one microbenchmark kernel."""

    name: str
    target_inst: str
    sew_bits: int = 32
    lmul: int = 1
    pattern: str = "arith"
    stride_elems: int = 1
    active_elems: int | None = None
    iterations: int = DEFAULT_ITERATIONS
    unroll: int = DEFAULT_UNROLL
    tail_policy: Policy = Policy.AGNOSTIC
    mask_policy: Policy = Policy.AGNOSTIC

    def __post_init__(self):
        if not self.name or not self.name.replace("_", "").replace(".", "").isalnum():
            raise ConfigError(f"kernel name must be a simple identifier, got {self.name!r}")
        if self.pattern not in PATTERNS:
            raise ConfigError(f"unknown pattern {self.pattern!r}")
        if self.sew_bits not in SEW_VALUES:
            raise ConfigError(f"sew_bits must be one of {SEW_VALUES}")
        if self.lmul not in INTEGER_LMULS:
            # fractional LMUL is representable in the vtype model but the
            # generator only emits integer-LMUL kernels
            raise ConfigError(f"generator emits integer LMUL only, got {self.lmul!r}")
        if self.stride_elems < 1:
            raise ConfigError("stride_elems must be a positive element count")
        if self.iterations < 1:
            raise ConfigError("iterations must be positive")
        if self.unroll < 1:
            raise ConfigError("unroll must be positive")
        if self.iterations * self.unroll >= 2**63:
            raise ConfigError("iterations*unroll must fit comfortably in 64 bits")
        object.__setattr__(self, "tail_policy", Policy(self.tail_policy))
        object.__setattr__(self, "mask_policy", Policy(self.mask_policy))
        if self.pattern in ("tail-vl-load", "tail-mask-load"):
            if self.active_elems is None or self.active_elems < 1:
                raise ConfigError(f"{self.pattern} requires active_elems >= 1")
        if self.pattern == "masked-unit-load":
            if self.stride_elems != 2:
                raise ConfigError("masked-unit-load models the stride-2 gather only")
            if self.unroll % 2:
                raise ConfigError("masked-unit-load issues loads in pairs; unroll must be even")

    @property
    def elem_bytes(self) -> int:
        return self.sew_bits // 8

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tail_policy"] = self.tail_policy.value
        d["mask_policy"] = self.mask_policy.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "KernelSpec":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class AssemblyModule:
    """Generated assembler source plus the metadata needed to run it."""

    text: str
    entry_symbol: str
    buffer_bytes: int
    metadata: dict = field(hash=False)

    def write(self, directory, basename: str | None = None) -> tuple[str, str]:
        """Write `<name>.s` and its metadata sidecar `<name>.json`; returns both paths."""
        import os

        name = basename or self.metadata["name"]
        asm_path = os.path.join(str(directory), name + ".s")
        meta_path = os.path.join(str(directory), name + ".json")
        with open(asm_path, "w") as fh:
            fh.write(self.text)
        with open(meta_path, "w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return asm_path, meta_path


def rotation_pool(spec: KernelSpec) -> tuple[str, ...]:
    """Destination (or store-source) register rotation pool for a kernel.

    Vector kernels rotate over every LMUL-aligned register group; masked
    kernels start at v8 so v0 stays a live mask for any LMUL. Scalar
    kernels rotate over a fixed 8-register caller-saved pool.
    """
    ic = classify(spec.target_inst)
    if ic.category in (Category.VECTOR_LOAD, Category.VECTOR_STORE, Category.VECTOR_ARITH):
        start = 8 if spec.pattern in _MASKED_PATTERNS else 0
        return tuple(f"v{r}" for r in range(start, 32, spec.lmul))
    if ic.category == Category.SCALAR_FP_ARITH or ic.category == Category.SCALAR_FP_LOAD:
        return _SCALAR_FP_DESTS
    return _SCALAR_INT_DESTS


def _mask_bytes(vlmax: int) -> int:
    return (vlmax + 7) // 8


def _scalar_offsets(spec: KernelSpec) -> list[int]:
    """Constant byte offsets for scalar-ref bodies, within the 12-bit immediate."""
    sb = spec.stride_elems * spec.elem_bytes
    n_off = min(spec.unroll, (2047 - spec.elem_bytes) // sb + 1)
    return [(i % n_off) * sb for i in range(spec.unroll)]


def data_footprint(spec: KernelSpec, cfg: VectorConfig) -> int:
    """Bytes of the buffer the loop body itself can touch, from offset 0."""
    if spec.pattern in ("unit-load", "unit-store", "tail-vl-load", "tail-mask-load"):
        return compute_vlmax(cfg, spec.sew_bits, spec.lmul) * spec.elem_bytes
    if spec.pattern in ("strided-load", "strided-store"):
        vlmax = compute_vlmax(cfg, spec.sew_bits, spec.lmul)
        return (vlmax - 1) * spec.stride_elems * spec.elem_bytes + spec.elem_bytes
    if spec.pattern == "masked-unit-load":
        return 2 * compute_vlmax(cfg, spec.sew_bits, spec.lmul) * spec.elem_bytes
    if spec.pattern == "scalar-ref":
        return max(_scalar_offsets(spec)) + spec.elem_bytes
    return 0  # arith


def _scratch_bytes(spec: KernelSpec, cfg: VectorConfig) -> int:
    need = 8  # staged operand dword
    if spec.pattern in _MASKED_PATTERNS:
        need = max(need, _mask_bytes(compute_vlmax(cfg, spec.sew_bits, spec.lmul)))
    return max(512, (need + 63) // 64 * 64 + 64)


def buffer_size(spec: KernelSpec, cfg: VectorConfig) -> int:
    """Required data-buffer size: 16 KiB unless the access footprint is larger."""
    total = data_footprint(spec, cfg) + _scratch_bytes(spec, cfg)
    return max(DEFAULT_BUFFER_BYTES, (total + 63) // 64 * 64)


def _check_compat(spec: KernelSpec, cfg: VectorConfig) -> None:
    ic = classify(spec.target_inst)
    p = spec.pattern
    want = {
        "unit-load": f"vle{spec.sew_bits}.v",
        "unit-store": f"vse{spec.sew_bits}.v",
        "strided-load": f"vlse{spec.sew_bits}.v",
        "strided-store": f"vsse{spec.sew_bits}.v",
        "masked-unit-load": f"vle{spec.sew_bits}.v",
        "tail-vl-load": f"vle{spec.sew_bits}.v",
        "tail-mask-load": f"vle{spec.sew_bits}.v",
    }
    if p in want:
        if spec.target_inst != want[p]:
            raise ConfigError(
                f"pattern {p!r} at SEW={spec.sew_bits} requires {want[p]}, "
                f"got {spec.target_inst!r}"
            )
    elif p == "arith":
        if ic.category == Category.VECTOR_ARITH:
            if ic.element_type is ElementType.FP and spec.sew_bits == 8:
                raise ConfigError("vector FP arithmetic supports e16/e32/e64 only")
        elif ic.category == Category.SCALAR_FP_ARITH:
            width = 32 if spec.target_inst.endswith(".s") else 64
            if spec.sew_bits != width:
                raise ConfigError(f"{spec.target_inst} operates on {width}-bit elements")
        elif not (ic.category == Category.SCALAR_INT and spec.target_inst in ("add", "mul", "div")):
            raise ConfigError(f"{spec.target_inst!r} is not an arithmetic target")
    elif p == "scalar-ref":
        scalar_mems = set(_SCALAR_LOADS.values()) | set(_SCALAR_STORES.values()) | {
            "flw", "fld", "fsw", "fsd",
        }
        if spec.target_inst not in scalar_mems:
            raise ConfigError(f"scalar-ref requires a scalar load/store, got {spec.target_inst!r}")
        widths = {"lb": 8, "lh": 16, "lw": 32, "ld": 64, "sb": 8, "sh": 16, "sw": 32,
                  "sd": 64, "flw": 32, "fld": 64, "fsw": 32, "fsd": 64}
        if widths[spec.target_inst] != spec.sew_bits:
            raise ConfigError(
                f"{spec.target_inst} moves {widths[spec.target_inst]}-bit elements, "
                f"spec says {spec.sew_bits}"
            )

    if ic.category in (Category.VECTOR_LOAD, Category.VECTOR_STORE, Category.VECTOR_ARITH):
        vlmax = compute_vlmax(cfg, spec.sew_bits, spec.lmul)
        if spec.active_elems is not None and spec.active_elems > vlmax:
            raise ConfigError(f"active_elems={spec.active_elems} exceeds vlmax={vlmax}")
    elif spec.lmul != 1:
        raise ConfigError("scalar kernels take lmul=1")

    pool = rotation_pool(spec)
    if spec.unroll % len(pool):
        raise ConfigError(
            f"unroll={spec.unroll} is not a multiple of the {len(pool)}-register "
            f"rotation cycle for {spec.pattern}/LMUL={spec.lmul}"
        )


def _vsetvli(spec: KernelSpec, avl_reg: str = "x0") -> str:
    return (
        f"vsetvli t2, {avl_reg}, e{spec.sew_bits}, m{spec.lmul}, "
        f"t{spec.tail_policy.asm}, m{spec.mask_policy.asm}"
    )


def _operand_dword(spec: KernelSpec) -> int:
    ic = classify(spec.target_inst)
    if ic.element_type is ElementType.FP or spec.target_inst.startswith(("vf", "f")):
        return _FP_ONE[spec.sew_bits]
    return _INT_ONE[spec.sew_bits]


def _stage_scratch_base(lines: list[str], scratch_off: int) -> None:
    lines.append(f"    li      t0, {scratch_off}")
    lines.append("    add     t0, a1, t0")


def _stage_vector_operands(lines: list[str], spec: KernelSpec, pool: tuple[str, ...]) -> None:
    """Splat the staged operand into every rotation group via a stride-0 load."""
    lines.append(f"    li      t3, {hex(_operand_dword(spec))}")
    lines.append("    sd      t3, 0(t0)")
    lines.append(f"    {_vsetvli(spec)}")
    for reg in pool:
        lines.append(f"    vlse{spec.sew_bits}.v {reg}, (t0), x0")


def _stage_mask(lines: list[str], spec: KernelSpec, vlmax: int) -> None:
    """Materialize the mask in v0: scalar bit pattern stored then mask-loaded."""
    nbytes = _mask_bytes(vlmax)
    if spec.pattern == "masked-unit-load":
        lines.append(f"    li      t3, {hex(_ALTERNATING_MASK_DWORD)}")
        lines.append("    sd      t3, 0(t0)")
        lines.append(f"    li      t4, {nbytes}")
        lines.append("    vsetvli t2, t4, e8, m1, ta, ma")
        lines.append("    vlse8.v v0, (t0), x0")
    else:  # leading-ones tail mask
        ones = (1 << spec.active_elems) - 1
        for i in range((nbytes + 7) // 8):
            chunk = (ones >> (64 * i)) & 0xFFFFFFFFFFFFFFFF
            lines.append(f"    li      t3, {hex(chunk)}")
            lines.append(f"    sd      t3, {8 * i}(t0)")
        lines.append(f"    li      t4, {nbytes}")
        lines.append("    vsetvli t2, t4, e8, m1, ta, ma")
        lines.append("    vle8.v  v0, (t0)")


def _prologue(spec: KernelSpec, cfg: VectorConfig, pool: tuple[str, ...]) -> list[str]:
    lines: list[str] = []
    ic = classify(spec.target_inst)
    scratch_off = buffer_size(spec, cfg) - _scratch_bytes(spec, cfg)
    p = spec.pattern

    if p == "unit-load":
        lines.append(f"    {_vsetvli(spec)}")
    elif p in ("unit-store", "strided-store"):
        _stage_scratch_base(lines, scratch_off)
        _stage_vector_operands(lines, spec, pool)
        if p == "strided-store":
            lines.append(f"    li      t1, {spec.stride_elems * spec.elem_bytes}")
    elif p == "strided-load":
        lines.append(f"    li      t1, {spec.stride_elems * spec.elem_bytes}")
        lines.append(f"    {_vsetvli(spec)}")
    elif p == "masked-unit-load":
        vlmax = compute_vlmax(cfg, spec.sew_bits, spec.lmul)
        _stage_scratch_base(lines, scratch_off)
        _stage_mask(lines, spec, vlmax)
        lines.append(f"    li      t1, {vlmax * spec.elem_bytes}")
        lines.append("    add     t1, a1, t1")
        lines.append(f"    {_vsetvli(spec)}")
    elif p == "tail-vl-load":
        lines.append(f"    li      t4, {spec.active_elems}")
        lines.append(f"    {_vsetvli(spec, avl_reg='t4')}")
    elif p == "tail-mask-load":
        vlmax = compute_vlmax(cfg, spec.sew_bits, spec.lmul)
        _stage_scratch_base(lines, scratch_off)
        _stage_mask(lines, spec, vlmax)
        lines.append(f"    {_vsetvli(spec)}")
    elif p == "arith" and ic.category == Category.VECTOR_ARITH:
        _stage_scratch_base(lines, scratch_off)
        _stage_vector_operands(lines, spec, pool)
    elif p == "arith" and ic.category == Category.SCALAR_FP_ARITH:
        _stage_scratch_base(lines, scratch_off)
        lines.append(f"    li      t3, {hex(_FP_ONE[spec.sew_bits])}")
        store, load = ("sw", "flw") if spec.sew_bits == 32 else ("sd", "fld")
        lines.append(f"    {store}      t3, 0(t0)")
        nsrc = 3 if spec.target_inst.startswith("fmadd") else 2
        for reg in ("fa0", "fa1", "fa2")[:nsrc]:
            lines.append(f"    {load}     {reg}, 0(t0)")
    elif p == "arith":  # scalar integer
        lines.append("    li      a2, 3")
        lines.append("    li      a3, 1")
    elif p == "scalar-ref":
        if ic.category == Category.SCALAR_FP_STORE:
            _stage_scratch_base(lines, scratch_off)
            lines.append(f"    li      t3, {hex(_FP_ONE[spec.sew_bits])}")
            store, load = ("sw", "flw") if spec.sew_bits == 32 else ("sd", "fld")
            lines.append(f"    {store}      t3, 0(t0)")
            lines.append(f"    {load}     fa3, 0(t0)")
        elif spec.target_inst in _SCALAR_STORES.values():
            lines.append(f"    li      a2, {hex(_INT_ONE[spec.sew_bits] & ((1 << spec.sew_bits) - 1))}")
        # scalar loads need no staging
    return lines


def _body(spec: KernelSpec, pool: tuple[str, ...]) -> list[str]:
    ic = classify(spec.target_inst)
    n = len(pool)
    m = spec.target_inst
    lines = []
    for i in range(spec.unroll):
        if spec.pattern in ("unit-load",):
            lines.append(f"    {m} {pool[i % n]}, (a1)")
        elif spec.pattern == "unit-store":
            lines.append(f"    {m} {pool[i % n]}, (a1)")
        elif spec.pattern == "strided-load":
            lines.append(f"    {m} {pool[i % n]}, (a1), t1")
        elif spec.pattern == "strided-store":
            lines.append(f"    {m} {pool[i % n]}, (a1), t1")
        elif spec.pattern == "masked-unit-load":
            base = "a1" if i % 2 == 0 else "t1"
            lines.append(f"    {m} {pool[i % n]}, ({base}), v0.t")
        elif spec.pattern == "tail-vl-load":
            lines.append(f"    {m} {pool[i % n]}, (a1)")
        elif spec.pattern == "tail-mask-load":
            lines.append(f"    {m} {pool[i % n]}, (a1), v0.t")
        elif spec.pattern == "arith" and ic.category == Category.VECTOR_ARITH:
            d = pool[i % n]
            s1 = pool[(i + 2) % n]
            s2 = pool[(i + 4) % n]
            lines.append(f"    {m} {d}, {s1}, {s2}")
        elif spec.pattern == "arith" and ic.category == Category.SCALAR_FP_ARITH:
            if m.startswith("fmadd"):
                lines.append(f"    {m} {pool[i % n]}, fa0, fa1, fa2")
            else:
                lines.append(f"    {m} {pool[i % n]}, fa0, fa1")
        elif spec.pattern == "arith":
            lines.append(f"    {m} {pool[i % n]}, a2, a3")
        elif spec.pattern == "scalar-ref":
            off = _scalar_offsets(spec)[i]
            if ic.category in (Category.SCALAR_FP_LOAD,) or m in _SCALAR_LOADS.values():
                lines.append(f"    {m} {pool[i % n]}, {off}(a1)")
            elif ic.category == Category.SCALAR_FP_STORE:
                lines.append(f"    {m} fa3, {off}(a1)")
            else:
                lines.append(f"    {m} a2, {off}(a1)")
    return lines


def generate_kernel(spec: KernelSpec, cfg: VectorConfig) -> AssemblyModule:
    """Emit one microbenchmark kernel. Pure: same inputs, identical text."""
    _check_compat(spec, cfg)
    pool = rotation_pool(spec)
    bufsize = buffer_size(spec, cfg)

    meta = spec.to_dict()
    meta["buffer_bytes"] = bufsize
    meta["vlen_bits"] = cfg.vlen_bits
    meta["entry_symbol"] = ENTRY_SYMBOL

    lines = [
        f"# rvvprobe kernel: {spec.name}",
        f"# {META_TAG} {json.dumps(meta, sort_keys=True)}",
        f"    .option arch, {ARCH_STRING}",
        "    .text",
        "    .align  2",
        f"    .globl  {ENTRY_SYMBOL}",
        f"    .type   {ENTRY_SYMBOL}, @function",
        f"{ENTRY_SYMBOL}:",
    ]
    lines += _prologue(spec, cfg, pool)
    lines.append("    beqz    a0, .Lend")
    lines.append(".Lloop:")
    lines += _body(spec, pool)
    lines.append("    addi    a0, a0, -1")
    lines.append("    bnez    a0, .Lloop")
    lines.append(".Lend:")
    lines.append("    ret")
    lines.append(f"    .size   {ENTRY_SYMBOL}, .-{ENTRY_SYMBOL}")

    return AssemblyModule(
        text="\n".join(lines) + "\n",
        entry_symbol=ENTRY_SYMBOL,
        buffer_bytes=bufsize,
        metadata=meta,
    )


SUITE_KINDS = ("memory", "stride-compare", "tail-compare", "arith", "scalar-baseline")


def generate_suite(
    kind: str,
    cfg: VectorConfig,
    lmul: int = 1,
    iterations: int = DEFAULT_ITERATIONS,
) -> list[KernelSpec]:
    """The complete kernel catalog for one benchmark family."""
    if kind not in SUITE_KINDS:
        raise ConfigError(f"unknown suite {kind!r}; expected one of {SUITE_KINDS}")
    specs: list[KernelSpec] = []

    if kind == "memory":
        for sew in SEW_VALUES:
            for pat, root in (("unit-load", "vle"), ("unit-store", "vse")):
                specs.append(KernelSpec(
                    name=f"{root}{sew}_m{lmul}_{pat.replace('-', '_')}",
                    target_inst=f"{root}{sew}.v",
                    sew_bits=sew, lmul=lmul, pattern=pat, iterations=iterations,
                ))

    elif kind == "stride-compare":
        stride = 2
        for sew in SEW_VALUES:
            specs.append(KernelSpec(
                name=f"vlse{sew}_m{lmul}_s{stride}_strided_load",
                target_inst=f"vlse{sew}.v", sew_bits=sew, lmul=lmul,
                pattern="strided-load", stride_elems=stride,
                iterations=iterations, unroll=COMPARE_UNROLL,
            ))
            specs.append(KernelSpec(
                name=f"vle{sew}_m{lmul}_s{stride}_masked_load",
                target_inst=f"vle{sew}.v", sew_bits=sew, lmul=lmul,
                pattern="masked-unit-load", stride_elems=stride,
                iterations=iterations, unroll=2 * COMPARE_UNROLL,
            ))
            specs.append(KernelSpec(
                name=f"{_SCALAR_LOADS[sew]}_s{stride}_scalar_load",
                target_inst=_SCALAR_LOADS[sew], sew_bits=sew, lmul=1,
                pattern="scalar-ref", stride_elems=stride,
                iterations=iterations, unroll=COMPARE_UNROLL,
            ))

    elif kind == "tail-compare":
        sew = 8
        vlmax = compute_vlmax(cfg, sew, 1)
        for active in range(1, vlmax + 1):
            specs.append(KernelSpec(
                name=f"vle{sew}_m1_tail_vl_a{active}",
                target_inst=f"vle{sew}.v", sew_bits=sew, lmul=1,
                pattern="tail-vl-load", active_elems=active,
                iterations=iterations, unroll=COMPARE_UNROLL,
            ))
            specs.append(KernelSpec(
                name=f"vle{sew}_m1_tail_mask_a{active}",
                target_inst=f"vle{sew}.v", sew_bits=sew, lmul=1,
                pattern="tail-mask-load", active_elems=active,
                iterations=iterations, unroll=COMPARE_UNROLL,
            ))

    elif kind == "arith":
        for op in ("vfadd", "vfmul", "vfmacc", "vfdiv"):
            for sew in (16, 32, 64):
                specs.append(KernelSpec(
                    name=f"{op}_e{sew}_m{lmul}_arith", target_inst=f"{op}.vv",
                    sew_bits=sew, lmul=lmul, pattern="arith", iterations=iterations,
                ))
        for op in ("vadd", "vmul", "vmacc", "vdiv"):
            for sew in SEW_VALUES:
                specs.append(KernelSpec(
                    name=f"{op}_e{sew}_m{lmul}_arith", target_inst=f"{op}.vv",
                    sew_bits=sew, lmul=lmul, pattern="arith", iterations=iterations,
                ))
        for op in ("fadd.s", "fmul.s", "fmadd.s"):
            specs.append(KernelSpec(
                name=f"{op.replace('.', '_')}_scalar_arith", target_inst=op,
                sew_bits=32, lmul=1, pattern="arith", iterations=iterations,
            ))
        for op in ("add", "mul", "div"):
            specs.append(KernelSpec(
                name=f"{op}_scalar_arith", target_inst=op,
                sew_bits=64, lmul=1, pattern="arith", iterations=iterations,
            ))

    elif kind == "scalar-baseline":
        for inst, sew in (("flw", 32), ("lw", 32), ("fsw", 32), ("sw", 32)):
            specs.append(KernelSpec(
                name=f"{inst}_scalar_ref", target_inst=inst, sew_bits=sew,
                lmul=1, pattern="scalar-ref", stride_elems=1, iterations=iterations,
            ))

    for spec in specs:  # every suite member must actually generate
        _check_compat(spec, cfg)
    return specs
