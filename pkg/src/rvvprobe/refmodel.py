"""Assembly parser and static event-count prediction.

Parses the supported RV64 + RVV subset into a single-loop kernel
structure and predicts exact per-event counts for a given iteration
count: counts = prologue + iterations * loop_body + epilogue, with each
instruction attributed through the core taxonomy. This is the
known-by-construction reference that hardware counters are judged
against, and the pure-affine mirror of what the interpreter executes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core import (
    Category,
    EventCounts,
    InstClass,
    Policy,
    VectorConfig,
    VtypeState,
    as_lmul,
    attribute_events,
    classify,
    compute_vlmax,
    is_supported,
    resolve_vl,
    retired_weight,
)
from .errors import AsmSyntaxError, KernelShapeError, UnsupportedInstructionError
from .kernelgen import META_TAG

# ---------------------------------------------------------------------------
# Register name canonicalization
# ---------------------------------------------------------------------------

_X_ABI = {
    "zero": 0, "ra": 1, "sp": 2, "gp": 3, "tp": 4,
    "t0": 5, "t1": 6, "t2": 7, "s0": 8, "fp": 8, "s1": 9,
    "a0": 10, "a1": 11, "a2": 12, "a3": 13, "a4": 14, "a5": 15, "a6": 16, "a7": 17,
    "s2": 18, "s3": 19, "s4": 20, "s5": 21, "s6": 22, "s7": 23, "s8": 24, "s9": 25,
    "s10": 26, "s11": 27, "t3": 28, "t4": 29, "t5": 30, "t6": 31,
}
_F_ABI = {
    "ft0": 0, "ft1": 1, "ft2": 2, "ft3": 3, "ft4": 4, "ft5": 5, "ft6": 6, "ft7": 7,
    "fs0": 8, "fs1": 9,
    "fa0": 10, "fa1": 11, "fa2": 12, "fa3": 13, "fa4": 14, "fa5": 15, "fa6": 16, "fa7": 17,
    "fs2": 18, "fs3": 19, "fs4": 20, "fs5": 21, "fs6": 22, "fs7": 23, "fs8": 24, "fs9": 25,
    "fs10": 26, "fs11": 27, "ft8": 28, "ft9": 29, "ft10": 30, "ft11": 31,
}


def xreg(name: str, line: int) -> str:
    if name in _X_ABI:
        return f"x{_X_ABI[name]}"
    m = re.fullmatch(r"x([0-9]|[12][0-9]|3[01])", name)
    if m:
        return name
    raise AsmSyntaxError(f"expected integer register, got {name!r}", line)


def freg(name: str, line: int) -> str:
    if name in _F_ABI:
        return f"f{_F_ABI[name]}"
    m = re.fullmatch(r"f([0-9]|[12][0-9]|3[01])", name)
    if m:
        return name
    raise AsmSyntaxError(f"expected FP register, got {name!r}", line)


def vreg(name: str, line: int) -> str:
    if re.fullmatch(r"v([0-9]|[12][0-9]|3[01])", name):
        return name
    raise AsmSyntaxError(f"expected vector register, got {name!r}", line)


def _imm(text: str, line: int) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise AsmSyntaxError(f"expected immediate, got {text!r}", line) from None


_MEM_RE = re.compile(r"^(-?(?:0x[0-9a-fA-F]+|\d+))?\((\w+)\)$")
_EEW_RE = re.compile(r"^v[ls]s?e(\d+)\.v$")


@dataclass(frozen=True)
class VsetArgs:
    """Decoded vsetvli/vsetivli configuration operands."""

    rd: str
    avl_reg: str | None  # None for vsetivli
    avl_imm: int | None
    sew_bits: int
    lmul: Fraction
    vta: Policy
    vma: Policy


@dataclass(frozen=True)
class Instruction:
    """One parsed instruction with resolved class and register effects."""

    mnemonic: str
    klass: InstClass
    operands: tuple[str, ...]
    reads: tuple[str, ...]
    writes: tuple[str, ...]
    imm: int | None = None
    mem_base: str | None = None
    mem_offset: int = 0
    stride_reg: str | None = None
    target_label: str | None = None
    vset: VsetArgs | None = None
    masked: bool = False
    line: int = 0

    @property
    def eew(self) -> int | None:
        m = _EEW_RE.match(self.mnemonic)
        return int(m.group(1)) if m else None


@dataclass(frozen=True)
class LoopVtype:
    """Vtype established by the last prologue vsetvli; vl resolves per machine."""

    sew_bits: int
    lmul: Fraction
    vta: Policy
    vma: Policy
    avl: int | None  # None: vlmax requested

    def resolve(self, cfg: VectorConfig) -> VtypeState:
        vlmax = compute_vlmax(cfg, self.sew_bits, self.lmul)
        vl = vlmax if self.avl is None else resolve_vl(self.avl, vlmax)
        return VtypeState(self.sew_bits, self.lmul, self.vta, self.vma, vl)


@dataclass(frozen=True)
class ParsedKernel:
    """Single-entry, single-back-edge kernel split into its three sections."""

    instructions: tuple[Instruction, ...]
    labels: Mapping[str, int]
    loop_start: int
    loop_end: int  # index of the back branch, inclusive in the body
    trip_reg: str
    vtype_at_loop_entry: LoopVtype | None
    metadata: dict | None
    text: str

    @property
    def prologue(self) -> tuple[Instruction, ...]:
        return self.instructions[: self.loop_start]

    @property
    def loop_body(self) -> tuple[Instruction, ...]:
        return self.instructions[self.loop_start : self.loop_end + 1]

    @property
    def epilogue(self) -> tuple[Instruction, ...]:
        return self.instructions[self.loop_end + 1 :]

    @property
    def target_inst(self) -> str:
        """Target mnemonic: from embedded metadata, else the dominant body mnemonic."""
        if self.metadata and "target_inst" in self.metadata:
            return str(self.metadata["target_inst"])
        freq: dict[str, int] = {}
        for ins in self.loop_body:
            if ins.klass.category is not Category.CONTROL:
                freq[ins.mnemonic] = freq.get(ins.mnemonic, 0) + 1
        if not freq:
            raise KernelShapeError("loop body contains no candidate target instruction")
        return max(sorted(freq), key=lambda m: freq[m])


@dataclass(frozen=True)
class ReferenceCounts:
    """Exact expected counter values plus the issued-target count."""

    counts: EventCounts
    target_inst_count: int

    def __post_init__(self):
        c = self.counts
        if c.vec_ld + c.vec_st > c.vec or c.fp_ld + c.fp_st > c.fp:
            raise KernelShapeError("reference counts violate event containment")
        for v in (c.vec, c.vec_ld, c.vec_st, c.fp, c.fp_ld, c.fp_st):
            if v > c.retired:
                raise KernelShapeError("reference counts exceed retired total")


# ---------------------------------------------------------------------------
# Instruction parsing
# ---------------------------------------------------------------------------

def _split_operands(rest: str) -> list[str]:
    return [p.strip() for p in rest.split(",")] if rest.strip() else []


def _parse_mem(op: str, line: int) -> tuple[int, str]:
    m = _MEM_RE.match(op.replace(" ", ""))
    if not m:
        raise AsmSyntaxError(f"expected mem operand off(reg), got {op!r}", line)
    off = int(m.group(1), 0) if m.group(1) else 0
    return off, xreg(m.group(2), line)


def _parse_vset(mnemonic: str, ops: list[str], line: int) -> VsetArgs:
    if len(ops) != 6:
        raise AsmSyntaxError(f"{mnemonic} expects 6 operands", line)
    rd = xreg(ops[0], line)
    if mnemonic == "vsetvli":
        avl_reg, avl_imm = xreg(ops[1], line), None
    else:
        avl_reg, avl_imm = None, _imm(ops[1], line)
    m_sew = re.fullmatch(r"e(8|16|32|64)", ops[2])
    m_lmul = re.fullmatch(r"m(f?)([1248])", ops[3])
    if not m_sew or not m_lmul:
        raise AsmSyntaxError(f"bad vtype operands {ops[2]!r}, {ops[3]!r}", line)
    lmul = as_lmul(Fraction(1, int(m_lmul.group(2))) if m_lmul.group(1) else int(m_lmul.group(2)))
    if ops[4] not in ("ta", "tu") or ops[5] not in ("ma", "mu"):
        raise AsmSyntaxError(f"bad policy operands {ops[4]!r}, {ops[5]!r}", line)
    vta = Policy.AGNOSTIC if ops[4] == "ta" else Policy.UNDISTURBED
    vma = Policy.AGNOSTIC if ops[5] == "ma" else Policy.UNDISTURBED
    return VsetArgs(rd, avl_reg, avl_imm, int(m_sew.group(1)), lmul, vta, vma)


def _strip_mask(ops: list[str]) -> tuple[list[str], bool]:
    if ops and ops[-1] == "v0.t":
        return ops[:-1], True
    return ops, False


def parse_instruction(mnemonic: str, rest: str, line: int) -> Instruction:
    if not is_supported(mnemonic):
        raise UnsupportedInstructionError(
            f"unsupported instruction {mnemonic!r} at line {line}"
        )
    ops = _split_operands(rest)
    ops, masked = _strip_mask(ops)
    klass = classify(mnemonic, masked=masked)
    raw = tuple(ops) + (("v0.t",) if masked else ())

    def ins(**kw) -> Instruction:
        return Instruction(mnemonic=mnemonic, klass=klass, operands=raw,
                           masked=masked, line=line, **kw)

    def arity(n):
        if len(ops) != n:
            raise AsmSyntaxError(f"{mnemonic} expects {n} operands, got {len(ops)}", line)

    cat = klass.category
    if mnemonic in ("vsetvli", "vsetivli"):
        vs = _parse_vset(mnemonic, ops, line)
        reads = (vs.avl_reg,) if vs.avl_reg and vs.avl_reg != "x0" else ()
        return ins(reads=reads, writes=(vs.rd,) if vs.rd != "x0" else (), vset=vs)

    if cat is Category.VECTOR_LOAD:
        strided = mnemonic.startswith("vls")
        arity(3 if strided else 2)
        vd = vreg(ops[0], line)
        off, base = _parse_mem(ops[1], line)
        if off:
            raise AsmSyntaxError("vector memory operands take no offset", line)
        stride = xreg(ops[2], line) if strided else None
        reads = (base,) + ((stride,) if strided and stride != "x0" else ())
        if masked:
            reads += ("v0",)
        return ins(reads=reads, writes=(vd,), mem_base=base, stride_reg=stride)

    if cat is Category.VECTOR_STORE:
        strided = mnemonic.startswith("vss")
        arity(3 if strided else 2)
        vs3 = vreg(ops[0], line)
        off, base = _parse_mem(ops[1], line)
        if off:
            raise AsmSyntaxError("vector memory operands take no offset", line)
        stride = xreg(ops[2], line) if strided else None
        reads = (vs3, base) + ((stride,) if strided and stride != "x0" else ())
        if masked:
            reads += ("v0",)
        return ins(reads=reads, writes=(), mem_base=base, stride_reg=stride)

    if cat is Category.VECTOR_ARITH:
        arity(3)
        vd = vreg(ops[0], line)
        s1 = vreg(ops[1], line)
        s2 = vreg(ops[2], line)
        reads = (s1, s2) + (("v0",) if masked else ())
        if "macc" in mnemonic:  # multiply-add accumulates into vd
            reads = (vd,) + reads
        return ins(reads=reads, writes=(vd,))

    if cat is Category.SCALAR_FP_LOAD:
        arity(2)
        fd = freg(ops[0], line)
        off, base = _parse_mem(ops[1], line)
        return ins(reads=(base,), writes=(fd,), mem_base=base, mem_offset=off)

    if cat is Category.SCALAR_FP_STORE:
        arity(2)
        fs = freg(ops[0], line)
        off, base = _parse_mem(ops[1], line)
        return ins(reads=(fs, base), writes=(), mem_base=base, mem_offset=off)

    if cat is Category.SCALAR_FP_ARITH:
        n = 4 if mnemonic.startswith("fmadd") else 3
        arity(n)
        regs = [freg(o, line) for o in ops]
        return ins(reads=tuple(regs[1:]), writes=(regs[0],))

    if mnemonic in ("lb", "lh", "lw", "ld"):
        arity(2)
        rd = xreg(ops[0], line)
        off, base = _parse_mem(ops[1], line)
        return ins(reads=(base,), writes=(rd,) if rd != "x0" else (),
                   mem_base=base, mem_offset=off)

    if mnemonic in ("sb", "sh", "sw", "sd"):
        arity(2)
        rs2 = xreg(ops[0], line)
        off, base = _parse_mem(ops[1], line)
        return ins(reads=(rs2, base), writes=(), mem_base=base, mem_offset=off)

    if mnemonic in ("add", "mul", "div"):
        arity(3)
        rd, rs1, rs2 = (xreg(o, line) for o in ops)
        return ins(reads=(rs1, rs2), writes=(rd,) if rd != "x0" else ())

    if mnemonic in ("addi", "slli"):
        arity(3)
        rd, rs1 = xreg(ops[0], line), xreg(ops[1], line)
        return ins(reads=(rs1,), writes=(rd,) if rd != "x0" else (), imm=_imm(ops[2], line))

    if mnemonic == "li":
        arity(2)
        rd = xreg(ops[0], line)
        return ins(reads=(), writes=(rd,) if rd != "x0" else (), imm=_imm(ops[1], line))

    if mnemonic == "mv":
        arity(2)
        rd, rs = xreg(ops[0], line), xreg(ops[1], line)
        return ins(reads=(rs,), writes=(rd,) if rd != "x0" else ())

    if mnemonic == "la":
        arity(2)
        rd = xreg(ops[0], line)
        return ins(reads=(), writes=(rd,) if rd != "x0" else (), target_label=ops[1])

    if mnemonic in ("beqz", "bnez"):
        arity(2)
        rs = xreg(ops[0], line)
        return ins(reads=(rs,), writes=(), target_label=ops[1])

    if mnemonic in ("beq", "bne", "blt", "bge", "bltu", "bgeu"):
        arity(3)
        rs1, rs2 = xreg(ops[0], line), xreg(ops[1], line)
        return ins(reads=(rs1, rs2), writes=(), target_label=ops[2])

    if mnemonic == "ret":
        arity(0)
        return ins(reads=("x1",), writes=())

    raise UnsupportedInstructionError(f"unsupported instruction {mnemonic!r} at line {line}")


# ---------------------------------------------------------------------------
# Kernel-level parsing
# ---------------------------------------------------------------------------

_LABEL_RE = re.compile(r"^([A-Za-z_.$][\w.$]*):\s*(.*)$")


def parse_kernel(text: str) -> ParsedKernel:
    """Parse assembler text into the single-loop kernel structure.

    Rejects unknown mnemonics with position information, multiple or
    missing loops, and control flow that does not match the
    prologue/loop/epilogue shape.
    """
    metadata: dict | None = None
    instructions: list[Instruction] = []
    labels: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            comment = stripped.lstrip("#").strip()
            if comment.startswith(META_TAG):
                try:
                    metadata = json.loads(comment[len(META_TAG):].strip())
                except json.JSONDecodeError as exc:
                    raise AsmSyntaxError(f"bad metadata block: {exc}", lineno) from None
            continue
        if "#" in stripped:
            stripped = stripped.split("#", 1)[0].strip()
        if not stripped:
            continue

        m = _LABEL_RE.match(stripped)
        if m:
            name, rest = m.group(1), m.group(2).strip()
            if name in labels:
                raise AsmSyntaxError(f"duplicate label {name!r}", lineno)
            labels[name] = len(instructions)
            if not rest:
                continue
            stripped = rest

        if stripped.startswith("."):
            continue  # assembler directive

        parts = stripped.split(None, 1)
        mnemonic = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        instructions.append(parse_instruction(mnemonic, rest, lineno))

    if not instructions:
        raise AsmSyntaxError("no instructions found; no loop to analyze", 1)

    # Resolve branch targets and find the unique back edge.
    back_edges: list[int] = []
    for idx, ins in enumerate(instructions):
        if ins.target_label is None or ins.mnemonic == "la":
            continue
        if ins.target_label not in labels:
            raise AsmSyntaxError(f"undefined label {ins.target_label!r}", ins.line)
        if labels[ins.target_label] <= idx:
            back_edges.append(idx)

    if not back_edges:
        raise KernelShapeError("no loop found: kernel has no backward branch")
    if len(back_edges) > 1:
        raise KernelShapeError(
            f"irreducible control flow: {len(back_edges)} backward branches"
        )

    loop_end = back_edges[0]
    loop_start = labels[instructions[loop_end].target_label]

    for idx, ins in enumerate(instructions):
        if ins.target_label is None or ins.mnemonic == "la" or idx == loop_end:
            continue
        target = labels[ins.target_label]
        if idx < loop_start and target > loop_end:
            continue  # prologue guard jumping over the loop
        raise KernelShapeError(
            f"branch at line {ins.line} does not fit the single-loop shape"
        )

    trip_reg = instructions[loop_end].reads[0]

    loop_vtype: LoopVtype | None = None
    consts: dict[str, int] = {}
    for ins in instructions[:loop_start]:
        if ins.mnemonic == "li" and ins.writes:
            consts[ins.writes[0]] = ins.imm or 0
        elif ins.vset is not None:
            vs = ins.vset
            if vs.avl_imm is not None:
                avl: int | None = vs.avl_imm
            elif vs.avl_reg == "x0":
                avl = None  # vlmax request
            else:
                avl = consts.get(vs.avl_reg)
            loop_vtype = LoopVtype(vs.sew_bits, vs.lmul, vs.vta, vs.vma, avl)
        elif ins.writes:
            for reg in ins.writes:
                consts.pop(reg, None)

    return ParsedKernel(
        instructions=tuple(instructions),
        labels=labels,
        loop_start=loop_start,
        loop_end=loop_end,
        trip_reg=trip_reg,
        vtype_at_loop_entry=loop_vtype,
        metadata=metadata,
        text=text,
    )


# ---------------------------------------------------------------------------
# Static prediction
# ---------------------------------------------------------------------------

def _section_counts(section: Iterable[Instruction]) -> EventCounts:
    total = EventCounts.zero()
    for ins in section:
        attr = attribute_events(ins.klass)
        extra = retired_weight(ins.mnemonic) - 1
        if extra:
            attr = attr + EventCounts(retired=extra)
        total = total + attr
    return total


def predict_counts(kernel: ParsedKernel, iterations: int) -> ReferenceCounts:
    """Exact expected counts: prologue + iterations * body + epilogue."""
    if iterations < 0:
        raise KernelShapeError("iterations must be non-negative")
    body = _section_counts(kernel.loop_body)
    counts = (
        _section_counts(kernel.prologue)
        + body.scaled(iterations)
        + _section_counts(kernel.epilogue)
    )
    target = kernel.target_inst
    per_iter = sum(1 for ins in kernel.loop_body if ins.mnemonic == target)
    return ReferenceCounts(counts=counts, target_inst_count=iterations * per_iter)


def _covered_vregs(reg: str, span: int) -> tuple[str, ...]:
    base = int(reg[1:])
    return tuple(f"v{r}" for r in range(base, min(base + span, 32)))


def _expand_group(regs: tuple[str, ...], lmul: Fraction) -> set[str]:
    """Registers covered by each operand, expanding vector groups by LMUL.

    Generated kernels keep EEW equal to SEW, so the group span of memory
    operands is the plain LMUL span; the mask register stays a single one.
    """
    out: set[str] = set()
    span = max(1, int(lmul))
    for reg in regs:
        if reg.startswith("v") and reg != "v0":
            out.update(_covered_vregs(reg, span))
        else:
            out.add(reg)
    return out


def min_target_defuse_distance(kernel: ParsedKernel, lmul=1) -> int | None:
    """Cyclic minimum def-use distance among the body's target instructions.

    Distance 1 means a target instruction reads a register written by the
    immediately preceding target instruction; independent kernels keep
    this at 2 or more. None when no dependence exists at all.
    """
    frac = as_lmul(lmul)
    target = kernel.target_inst
    targets = [ins for ins in kernel.loop_body if ins.mnemonic == target]
    if not targets:
        return None
    best: int | None = None
    last_write: dict[str, int] = {}
    # two passes over the sequence to capture wraparound into the next iteration
    for pos, ins in enumerate(targets + targets):
        for reg in _expand_group(ins.reads, frac):
            if reg in last_write:
                dist = pos - last_write[reg]
                if best is None or dist < best:
                    best = dist
        for reg in _expand_group(ins.writes, frac):
            last_write[reg] = pos
    return best
