"""Functional interpreter for the supported assembly subset.

Executes parsed kernels at small iteration counts with RVV 1.0 semantics
for the modeled subset, producing exact dynamic event counts and the
final architectural state. This is the brute-force oracle the static
reference model is checked against: both must agree event-for-event.

Fixed semantic choices, for deterministic golden tests:
  - agnostic tail/mask fill writes all-ones bit patterns (a legal choice);
  - FP arithmetic rounds to nearest-even; fused multiply-add is computed
    in the next wider precision where one exists (f16 via f32, f32 via
    f64) and as multiply-then-add at f64, so results can differ from a
    true fused rounding in rare tie cases;
  - memory outside the declared buffer is unmapped and faults, which
    catches generator addressing bugs.

One MachineState per execution; instances are independent and a single
instance is strictly single-threaded.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .core import (
    Category,
    EventCounts,
    Policy,
    VectorConfig,
    VtypeState,
    attribute_events,
    compute_vlmax,
    resolve_vl,
    retired_weight,
)
from .errors import (
    ConfigError,
    IllegalInstructionError,
    MemoryAccessError,
    SimulationLimitError,
)
from .refmodel import Instruction, ParsedKernel

BUFFER_BASE = 0x100000
RETURN_SENTINEL = 0xDEAD0000
MAX_ORACLE_ITERATIONS = 10**6

_M64 = (1 << 64) - 1

_UINT_DTYPES = {8: np.uint8, 16: np.uint16, 32: np.uint32, 64: np.uint64}
_INT_DTYPES = {8: np.int8, 16: np.int16, 32: np.int32, 64: np.int64}
_FP_DTYPES = {16: np.float16, 32: np.float32, 64: np.float64}
_ONES = {w: _UINT_DTYPES[w]((1 << w) - 1) for w in (8, 16, 32, 64)}


def _s64(value: int) -> int:
    value &= _M64
    return value - (1 << 64) if value >> 63 else value


def _div_trunc(a: int, b: int) -> int:
    """Architected signed division: truncating, -1 on zero, wrap on overflow."""
    if b == 0:
        return -1
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


@dataclass
class MachineState:
    """Architectural state: scalar/fp/vector register files, vtype, memory.

    x0 always reads as zero; vector register group operations check LMUL
    alignment. Memory is one flat buffer at BUFFER_BASE; anything outside
    it is unmapped.
    """

    cfg: VectorConfig
    buffer_bytes: int
    x: list[int] = field(default_factory=lambda: [0] * 32)
    f: list[int] = field(default_factory=lambda: [0] * 32)
    v: np.ndarray | None = None  # (32, vlenb) uint8
    mem: np.ndarray | None = None
    vtype: VtypeState | None = None
    event_counters: EventCounts = field(default_factory=EventCounts.zero)

    def __post_init__(self):
        if self.v is None:
            self.v = np.zeros((32, self.cfg.vlenb), dtype=np.uint8)
        if self.mem is None:
            self.mem = np.zeros(self.buffer_bytes, dtype=np.uint8)
        self._vflat = self.v.reshape(-1)
        self._views: dict[tuple[int, int, int], np.ndarray] = {}
        self._mask_cache: tuple[int, int, np.ndarray] | None = None
        self._v0_gen = 0

    @property
    def vl(self) -> int:
        return self.vtype.vl if self.vtype else 0

    def write_x(self, reg: int, value: int) -> None:
        if reg:
            self.x[reg] = value & _M64

    def mem_index(self, addr: int, nbytes: int, line: int) -> int:
        idx = addr - BUFFER_BASE
        if idx < 0 or idx + nbytes > self.buffer_bytes:
            raise MemoryAccessError(
                f"access of {nbytes} bytes at {hex(addr)} outside the declared "
                f"{self.buffer_bytes}-byte buffer (line {line})"
            )
        return idx

    def vgroup(self, reg: int, span: int, width: int) -> np.ndarray:
        """Unsigned element view over the register group [reg, reg+span)."""
        key = (reg, span, width)
        view = self._views.get(key)
        if view is None:
            flat = self._vflat[reg * self.cfg.vlenb : (reg + span) * self.cfg.vlenb]
            view = flat.view(_UINT_DTYPES[width])
            self._views[key] = view
        return view

    def vgroup_bytes(self, reg: int, span: int) -> np.ndarray:
        return self._vflat[reg * self.cfg.vlenb : (reg + span) * self.cfg.vlenb]

    def mask_bits(self, vl: int) -> np.ndarray:
        cached = self._mask_cache
        if cached is not None and cached[0] == self._v0_gen and cached[1] == vl:
            return cached[2]
        bits = np.unpackbits(self.v[0], bitorder="little")[:vl].astype(bool)
        self._mask_cache = (self._v0_gen, vl, bits)
        return bits

    def touched_v0(self) -> None:
        self._v0_gen += 1

    def dump(self) -> str:
        """Structured text dump of registers, vtype, and counters."""
        lines = []
        for i in range(0, 32, 4):
            lines.append("  ".join(f"x{j:<2}={self.x[j]:#018x}" for j in range(i, i + 4)))
        for i in range(0, 32, 4):
            lines.append("  ".join(f"f{j:<2}={self.f[j]:#018x}" for j in range(i, i + 4)))
        if self.vtype:
            t = self.vtype
            lines.append(f"vtype: e{t.sew_bits} m{t.lmul} t{t.vta.asm} m{t.vma.asm} vl={t.vl}")
        else:
            lines.append("vtype: unset")
        for i in range(32):
            lines.append(f"v{i:<2} = {bytes(self.v[i]).hex()}")
        lines.append(f"events: {self.event_counters.as_dict()}")
        return "\n".join(lines)


def _reg_num(name: str) -> int:
    return int(name[1:])


def _f32(bits: int) -> float:
    return struct.unpack("<f", struct.pack("<I", bits & 0xFFFFFFFF))[0]


def _f32_bits(value: float) -> int:
    return struct.unpack("<I", struct.pack("<f", value))[0]


def _f64(bits: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", bits & _M64))[0]


def _f64_bits(value: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", value))[0]


def _compile_scalar_fp(ins: Instruction, nxt: int) -> Callable:
    m = ins.mnemonic
    single = m.endswith(".s")
    unpack, pack = (_f32, _f32_bits) if single else (_f64, _f64_bits)
    wdtype = np.float32 if single else np.float64
    fd = _reg_num(ins.writes[0])
    srcs = tuple(_reg_num(r) for r in ins.reads)
    op_name = m.split(".")[0]

    def op(st: MachineState):
        vals = [wdtype(unpack(st.f[s])) for s in srcs]
        if op_name == "fadd":
            r = vals[0] + vals[1]
        elif op_name == "fmul":
            r = vals[0] * vals[1]
        elif op_name == "fdiv":
            r = vals[0] / vals[1]
        else:  # fmadd: widen, single final rounding where a wider type exists
            wide = np.float64(vals[0]) * np.float64(vals[1]) + np.float64(vals[2])
            r = wdtype(wide)
        st.f[fd] = pack(float(r))
        return nxt

    return op


def _emul_span(eew: int, vtype: VtypeState, line: int) -> int:
    emul = Fraction(eew, vtype.sew_bits) * vtype.lmul
    if emul > 8 or emul < Fraction(1, 8):
        raise IllegalInstructionError(f"effective EMUL {emul} out of range (line {line})")
    return max(1, int(emul))


def _check_alignment(reg: int, span: int, line: int) -> None:
    if reg % span:
        raise IllegalInstructionError(
            f"v{reg} is not aligned to its {span}-register group (line {line})"
        )


def _compile_vector_mem(ins: Instruction, nxt: int) -> Callable:
    m = ins.mnemonic
    line = ins.line
    is_load = ins.klass.category is Category.VECTOR_LOAD
    masked = ins.masked
    eew = ins.eew
    ebytes = eew // 8
    dtype = _UINT_DTYPES[eew]
    vreg_n = _reg_num(ins.writes[0] if is_load else ins.operands[0])
    base = _reg_num(ins.mem_base)
    stride_reg = _reg_num(ins.stride_reg) if ins.stride_reg else None
    strided = ins.stride_reg is not None
    col = np.arange(ebytes, dtype=np.int64)

    # per-vtype compiled state, recomputed only when vtype changes
    cache: dict = {"vt": None}

    def _prepare(st: MachineState, vt: VtypeState):
        span = _emul_span(eew, vt, line)
        _check_alignment(vreg_n, span, line)
        cache["vt"] = vt
        cache["span"] = span
        cache["vl"] = vt.vl
        cache["nbytes"] = vt.vl * ebytes
        cache["grp_bytes"] = st.vgroup_bytes(vreg_n, span)
        cache["grp"] = st.vgroup(vreg_n, span, eew)
        cache["fill"] = vt.vta is Policy.AGNOSTIC
        cache["undisturbed"] = vt.vma is Policy.UNDISTURBED
        cache["idxkey"] = None

    def op(st: MachineState):
        vt = st.vtype
        if vt is None:
            raise IllegalInstructionError(f"vector access before vsetvli (line {line})")
        if vt is not cache["vt"]:
            _prepare(st, vt)
        vl = cache["vl"]
        nbytes = cache["nbytes"]
        addr = st.x[base]

        idxmat = None
        idx = 0
        stride = 0
        if vl:
            if strided:
                stride = _s64(st.x[stride_reg]) if stride_reg else 0
                if cache["idxkey"] == (addr, stride):
                    idxmat = cache["idxmat"]
                else:
                    lo = min(0, (vl - 1) * stride)
                    hi = max(0, (vl - 1) * stride) + ebytes
                    st.mem_index(addr + lo, hi - lo, line)  # footprint bounds check
                    first = st.mem_index(addr, ebytes, line)
                    idxmat = (first + np.arange(vl, dtype=np.int64) * stride)[:, None] + col
                    cache["idxkey"] = (addr, stride)
                    cache["idxmat"] = idxmat
            else:
                idx = st.mem_index(addr, nbytes, line)

        mem = st.mem
        if is_load:
            if vl:
                if masked:
                    if strided:
                        data = mem[idxmat].reshape(-1).view(dtype)
                    else:
                        data = mem[idx : idx + nbytes].copy().view(dtype)
                    grp = cache["grp"]
                    bits = st.mask_bits(vl)
                    keep = grp[:vl] if cache["undisturbed"] else _ONES[eew]
                    grp[:vl] = np.where(bits, data, keep)
                elif strided:
                    cache["grp_bytes"][:nbytes] = mem[idxmat].reshape(-1)
                else:
                    cache["grp_bytes"][:nbytes] = mem[idx : idx + nbytes]
            if cache["fill"]:
                cache["grp_bytes"][nbytes:] = 0xFF
            if vreg_n == 0:
                st.touched_v0()
        elif vl:
            rows = st.mask_bits(vl) if masked else None
            if strided:
                buf = cache["grp_bytes"][:nbytes].reshape(vl, ebytes)
                if abs(stride) < ebytes:
                    # overlapping destinations: honor element order explicitly
                    active = range(vl) if rows is None else np.flatnonzero(rows)
                    for j in active:
                        mem[idxmat[j]] = buf[j]
                elif rows is None:
                    mem[idxmat] = buf
                else:
                    mem[idxmat[rows]] = buf[rows]
            else:
                window = mem[idx : idx + nbytes]
                if rows is None:
                    window[:] = cache["grp_bytes"][:nbytes]
                else:
                    window.reshape(vl, ebytes)[rows] = (
                        cache["grp_bytes"][:nbytes].reshape(vl, ebytes)[rows]
                    )
        return nxt

    return op


def _compile_vector_arith(ins: Instruction, nxt: int) -> Callable:
    m = ins.mnemonic
    line = ins.line
    masked = ins.masked
    is_fp = m.startswith("vf")
    op_root = m[2:-3] if is_fp else m[1:-3]  # add / mul / macc / div
    vd = _reg_num(ins.operands[0])
    sa = _reg_num(ins.operands[1])
    sb = _reg_num(ins.operands[2])

    cache: dict = {"vt": None}

    def _prepare(st: MachineState, vt: VtypeState):
        sew = vt.sew_bits
        if is_fp and sew == 8:
            raise IllegalInstructionError(f"no 8-bit FP element type (line {line})")
        span = max(1, int(vt.lmul))
        for r in (vd, sa, sb):
            _check_alignment(r, span, line)
        vl = vt.vl
        udtype = _UINT_DTYPES[sew]
        dtype = _FP_DTYPES[sew] if is_fp else (_INT_DTYPES[sew] if op_root == "div" else udtype)
        cache.update(
            vt=vt, sew=sew, vl=vl, udtype=udtype, dtype=dtype,
            a=st.vgroup(sa, span, sew)[:vl].view(dtype),
            b=st.vgroup(sb, span, sew)[:vl].view(dtype),
            d=st.vgroup(vd, span, sew)[:vl].view(dtype),
            dbytes=st.vgroup_bytes(vd, span),
            active_bytes=vl * (sew // 8),
            fill=vt.vta is Policy.AGNOSTIC,
            undisturbed=vt.vma is Policy.UNDISTURBED,
        )

    def op(st: MachineState):
        vt = st.vtype
        if vt is None:
            raise IllegalInstructionError(f"vector arithmetic before vsetvli (line {line})")
        if vt is not cache["vt"]:
            _prepare(st, vt)
        a = cache["a"]
        b = cache["b"]
        d = cache["d"]
        dtype = cache["dtype"]
        if op_root == "add":
            result = a + b
        elif op_root == "mul":
            result = a * b
        elif op_root == "macc":
            if is_fp and cache["sew"] == 16:
                result = (a.astype(np.float32) * b.astype(np.float32)
                          + d.astype(np.float32)).astype(dtype)
            elif is_fp and cache["sew"] == 32:
                result = (a.astype(np.float64) * b.astype(np.float64)
                          + d.astype(np.float64)).astype(dtype)
            else:
                result = a * b + d
        elif is_fp:  # fdiv
            result = a / b
        elif cache["sew"] == 64:
            # 64-bit lanes divide in exact Python integers: |INT64_MIN|
            # overflows every fixed-width intermediate
            result = np.fromiter(
                ((_div_trunc(int(x), int(y)) & _M64) for x, y in zip(a, b)),
                dtype=np.uint64, count=len(a),
            ).view(dtype)
        else:  # signed integer divide: divide-by-zero yields all ones
            wa = a.astype(np.int64)
            zero = b == 0
            wb = np.where(zero, 1, b).astype(np.int64)
            q = np.abs(wa) // np.abs(wb)
            q = np.where((wa < 0) != (wb < 0), -q, q).astype(dtype)
            result = np.where(zero, dtype(-1), q)  # int dtype: -1 is all ones
        if cache["vl"]:
            if masked:
                bits = st.mask_bits(cache["vl"])
                udtype = cache["udtype"]
                du = d.view(udtype)
                if cache["undisturbed"]:
                    du[bits] = result.view(udtype)[bits]
                else:
                    du[:] = np.where(bits, result.view(udtype), _ONES[cache["sew"]])
            else:
                d[:] = result
        if cache["fill"]:
            cache["dbytes"][cache["active_bytes"]:] = 0xFF
        if vd == 0:
            st.touched_v0()
        return nxt

    return op


def _compile(ins: Instruction, cfg: VectorConfig, branch_targets: dict[int, int],
             index: int) -> Callable[[MachineState], int | None]:
    """Build the execution closure for one instruction; closures return next pc."""
    m = ins.mnemonic
    nxt = index + 1
    line = ins.line

    if ins.vset is not None:
        vs = ins.vset
        rd = _reg_num(vs.rd)
        avl_reg = _reg_num(vs.avl_reg) if vs.avl_reg else None
        avl_imm = vs.avl_imm
        sew, lmul, vta, vma = vs.sew_bits, vs.lmul, vs.vta, vs.vma
        try:
            vlmax = compute_vlmax(cfg, sew, lmul)
        except ConfigError as exc:
            raise IllegalInstructionError(f"{exc} (line {line})") from None

        def op(st: MachineState):
            if avl_imm is not None:
                avl = avl_imm
            elif avl_reg == 0:
                avl = vlmax if rd != 0 else (st.vtype.vl if st.vtype else 0)
            else:
                avl = st.x[avl_reg]
            vl = resolve_vl(min(avl, _M64), vlmax)
            st.vtype = VtypeState(sew, lmul, vta, vma, vl)
            st.write_x(rd, vl)
            return nxt

        return op

    cat = ins.klass.category
    if cat in (Category.VECTOR_LOAD, Category.VECTOR_STORE):
        return _compile_vector_mem(ins, nxt)
    if cat is Category.VECTOR_ARITH:
        return _compile_vector_arith(ins, nxt)
    if cat is Category.SCALAR_FP_ARITH:
        return _compile_scalar_fp(ins, nxt)

    if m == "li":
        rd = _reg_num(ins.writes[0]) if ins.writes else 0
        val = (ins.imm or 0) & _M64

        def op(st):
            st.write_x(rd, val)
            return nxt
        return op

    if m == "mv":
        rd = _reg_num(ins.writes[0]) if ins.writes else 0
        rs = _reg_num(ins.reads[0])

        def op(st):
            st.write_x(rd, st.x[rs])
            return nxt
        return op

    if m == "la":
        def op(st):
            raise IllegalInstructionError(
                f"la needs a data symbol table; kernels receive buffers via a1 (line {line})"
            )
        return op

    if m in ("add", "mul"):
        rd = _reg_num(ins.writes[0]) if ins.writes else 0
        rs1, rs2 = (_reg_num(r) for r in ins.reads)
        if m == "add":
            def op(st):
                st.write_x(rd, st.x[rs1] + st.x[rs2])
                return nxt
        else:
            def op(st):
                st.write_x(rd, st.x[rs1] * st.x[rs2])
                return nxt
        return op

    if m == "div":
        rd = _reg_num(ins.writes[0]) if ins.writes else 0
        rs1, rs2 = (_reg_num(r) for r in ins.reads)

        def op(st):
            st.write_x(rd, _div_trunc(_s64(st.x[rs1]), _s64(st.x[rs2])))
            return nxt
        return op

    if m in ("addi", "slli"):
        rd = _reg_num(ins.writes[0]) if ins.writes else 0
        rs1 = _reg_num(ins.reads[0])
        imm = ins.imm or 0
        if m == "addi":
            def op(st):
                st.write_x(rd, st.x[rs1] + imm)
                return nxt
        else:
            def op(st):
                st.write_x(rd, st.x[rs1] << (imm & 63))
                return nxt
        return op

    if m in ("lb", "lh", "lw", "ld"):
        size = {"lb": 1, "lh": 2, "lw": 4, "ld": 8}[m]
        rd = _reg_num(ins.writes[0]) if ins.writes else 0
        base = _reg_num(ins.reads[0])
        off = ins.mem_offset

        def op(st):
            idx = st.mem_index(st.x[base] + off, size, line)
            val = int.from_bytes(st.mem[idx : idx + size].tobytes(), "little", signed=True)
            st.write_x(rd, val)
            return nxt
        return op

    if m in ("sb", "sh", "sw", "sd"):
        size = {"sb": 1, "sh": 2, "sw": 4, "sd": 8}[m]
        rs2, base = (_reg_num(r) for r in ins.reads)
        off = ins.mem_offset

        def op(st):
            idx = st.mem_index(st.x[base] + off, size, line)
            payload = (st.x[rs2] & ((1 << (8 * size)) - 1)).to_bytes(size, "little")
            st.mem[idx : idx + size] = np.frombuffer(payload, dtype=np.uint8)
            return nxt
        return op

    if m in ("flw", "fld"):
        size = 4 if m == "flw" else 8
        fd = _reg_num(ins.writes[0])
        base = _reg_num(ins.reads[0])
        off = ins.mem_offset

        def op(st):
            idx = st.mem_index(st.x[base] + off, size, line)
            st.f[fd] = int.from_bytes(st.mem[idx : idx + size].tobytes(), "little")
            return nxt
        return op

    if m in ("fsw", "fsd"):
        size = 4 if m == "fsw" else 8
        fs, base = _reg_num(ins.reads[0]), _reg_num(ins.reads[1])
        off = ins.mem_offset

        def op(st):
            idx = st.mem_index(st.x[base] + off, size, line)
            payload = (st.f[fs] & ((1 << (8 * size)) - 1)).to_bytes(size, "little")
            st.mem[idx : idx + size] = np.frombuffer(payload, dtype=np.uint8)
            return nxt
        return op

    if m in ("beq", "bne", "blt", "bge", "bltu", "bgeu", "beqz", "bnez"):
        target = branch_targets[index]
        if m in ("beqz", "bnez"):
            rs1, rs2 = _reg_num(ins.reads[0]), 0
            signed = False
            cond = (lambda a, b: a == b) if m == "beqz" else (lambda a, b: a != b)
        else:
            rs1, rs2 = (_reg_num(r) for r in ins.reads)
            signed = m in ("blt", "bge")
            cond = {
                "beq": lambda a, b: a == b,
                "bne": lambda a, b: a != b,
                "blt": lambda a, b: a < b,
                "bge": lambda a, b: a >= b,
                "bltu": lambda a, b: a < b,
                "bgeu": lambda a, b: a >= b,
            }[m]

        def op(st):
            a, b = st.x[rs1], st.x[rs2]
            if signed:
                a, b = _s64(a), _s64(b)
            return target if cond(a, b) else nxt
        return op

    if m == "ret":
        def op(st):
            if st.x[1] != RETURN_SENTINEL:
                raise IllegalInstructionError("ret through a clobbered return address")
            return None
        return op

    raise IllegalInstructionError(f"no execution semantics for {m!r} (line {line})")


def execute(
    kernel: ParsedKernel,
    iterations: int,
    cfg: VectorConfig,
    buffer_init: bytes | None = None,
    buffer_bytes: int | None = None,
) -> tuple[EventCounts, MachineState]:
    """Run a parsed kernel and return (dynamic event counts, final state).

    Entry convention mirrors the generated kernels: argument register 1 is
    the iteration count, argument register 2 the buffer base. Oracle scale
    is capped at 1e6 iterations.
    """
    if iterations < 0 or iterations > MAX_ORACLE_ITERATIONS:
        raise SimulationLimitError(
            f"iterations must be within [0, {MAX_ORACLE_ITERATIONS}] at oracle scale"
        )
    if buffer_bytes is None:
        meta = kernel.metadata or {}
        buffer_bytes = int(meta.get("buffer_bytes", 16 * 1024))

    st = MachineState(cfg=cfg, buffer_bytes=buffer_bytes)
    pattern = buffer_init if buffer_init is not None else bytes(range(256))
    if pattern:
        reps = -(-buffer_bytes // len(pattern))
        st.mem[:] = np.frombuffer((pattern * reps)[:buffer_bytes], dtype=np.uint8)
    st.x[1] = RETURN_SENTINEL  # return address
    st.x[10] = iterations      # argument 1
    st.x[11] = BUFFER_BASE     # argument 2

    insts = kernel.instructions
    branch_targets = {
        i: kernel.labels[ins.target_label]
        for i, ins in enumerate(insts)
        if ins.target_label is not None and ins.mnemonic != "la"
    }
    program = [_compile(ins, cfg, branch_targets, i) for i, ins in enumerate(insts)]
    exec_counts = [0] * len(insts)

    pc: int | None = 0
    body_len = kernel.loop_end - kernel.loop_start + 1
    limit = (iterations + 2) * (body_len + 2) + len(insts) + 16
    steps = 0
    with np.errstate(all="ignore"):
        while pc is not None:
            exec_counts[pc] += 1
            steps += 1
            if steps > limit:
                raise SimulationLimitError("kernel exceeded its expected dynamic length")
            pc = program[pc](st)

    total = EventCounts.zero()
    for i, ins in enumerate(insts):
        n = exec_counts[i]
        if not n:
            continue
        attr = attribute_events(ins.klass)
        extra = retired_weight(ins.mnemonic) - 1
        if extra:
            attr = attr + EventCounts(retired=extra)
        total = total + attr.scaled(n)
    st.event_counters = total
    return total, st
