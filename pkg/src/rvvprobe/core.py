"""Core RVV 1.0 domain model.

Holds the vector configuration state machine (VLEN, SEW, LMUL, VL, tail
and mask policies), the supported instruction taxonomy, and the rules
attributing each instruction class to the seven hardware performance
events used throughout the toolkit.

All types here are immutable values; they are safe to copy and share
between concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .errors import ConfigError, UnsupportedInstructionError

SEW_VALUES = (8, 16, 32, 64)

LMUL_VALUES = (
    Fraction(1, 8),
    Fraction(1, 4),
    Fraction(1, 2),
    Fraction(1),
    Fraction(2),
    Fraction(4),
    Fraction(8),
)

INTEGER_LMULS = (1, 2, 4, 8)

VLEN_MIN = 128
VLEN_MAX = 16384

U64_MAX = 2**64 - 1


def as_lmul(value) -> Fraction:
    """Normalize an LMUL given as int, Fraction, float, or a string like '1/2'."""
    if isinstance(value, str):
        if "/" in value:
            num, den = value.split("/", 1)
            frac = Fraction(int(num), int(den))
        else:
            frac = Fraction(int(value))
    elif isinstance(value, float):
        frac = Fraction(value).limit_denominator(8)
    else:
        frac = Fraction(value)
    if frac not in LMUL_VALUES:
        raise ConfigError(f"invalid LMUL {value!r}; must be one of 1/8..8")
    return frac


class Policy(str, Enum):
    """Destination policy for tail elements (vta) and masked-off elements (vma)."""

    AGNOSTIC = "agnostic"
    UNDISTURBED = "undisturbed"

    @property
    def asm(self) -> str:
        # vsetvli spelling: ta/ma vs tu/mu
        return "a" if self is Policy.AGNOSTIC else "u"


class EventKind(str, Enum):
    """The seven counted performance events. Closed set."""

    RETIRED = "retired"
    VEC = "vec"
    VEC_LD = "vec_ld"
    VEC_ST = "vec_st"
    FP = "fp"
    FP_LD = "fp_ld"
    FP_ST = "fp_st"

    @property
    def label(self) -> str:
        """Human-readable name used in rendered tables."""
        return _EVENT_LABELS[self]


_EVENT_LABELS = {
    EventKind.RETIRED: "retired-ins",
    EventKind.VEC: "vec-ins",
    EventKind.VEC_LD: "vec-ld-ins",
    EventKind.VEC_ST: "vec-st-ins",
    EventKind.FP: "fp-ins",
    EventKind.FP_LD: "fp-ld-ins",
    EventKind.FP_ST: "fp-st-ins",
}

EVENT_ORDER = (
    EventKind.RETIRED,
    EventKind.VEC,
    EventKind.VEC_LD,
    EventKind.VEC_ST,
    EventKind.FP,
    EventKind.FP_LD,
    EventKind.FP_ST,
)


class Category(str, Enum):
    VECTOR_LOAD = "vector-load"
    VECTOR_STORE = "vector-store"
    VECTOR_ARITH = "vector-arith"
    VECTOR_CONFIG = "vector-config"
    SCALAR_FP_LOAD = "scalar-fp-load"
    SCALAR_FP_STORE = "scalar-fp-store"
    SCALAR_FP_ARITH = "scalar-fp-arith"
    SCALAR_INT = "scalar-int"
    CONTROL = "control"


class ElementType(str, Enum):
    INT = "int"
    FP = "fp"
    NONE = "none"


class Addressing(str, Enum):
    UNIT_STRIDE = "unit-stride"
    STRIDED = "strided"
    MASKED_UNIT_STRIDE = "masked-unit-stride"
    NONE = "none"


@dataclass(frozen=True)
class InstClass:
    """Classification of one supported mnemonic for event attribution."""

    mnemonic: str
    category: Category
    element_type: ElementType = ElementType.NONE
    addressing: Addressing = Addressing.NONE


def _build_taxonomy() -> dict[str, InstClass]:
    table: dict[str, InstClass] = {}

    def put(mnemonic, category, element_type=ElementType.NONE, addressing=Addressing.NONE):
        table[mnemonic] = InstClass(mnemonic, category, element_type, addressing)

    for size in SEW_VALUES:
        put(f"vle{size}.v", Category.VECTOR_LOAD, ElementType.NONE, Addressing.UNIT_STRIDE)
        put(f"vse{size}.v", Category.VECTOR_STORE, ElementType.NONE, Addressing.UNIT_STRIDE)
        put(f"vlse{size}.v", Category.VECTOR_LOAD, ElementType.NONE, Addressing.STRIDED)
        put(f"vsse{size}.v", Category.VECTOR_STORE, ElementType.NONE, Addressing.STRIDED)

    for op in ("add", "mul", "macc", "div"):
        put(f"v{op}.vv", Category.VECTOR_ARITH, ElementType.INT)
        put(f"vf{op}.vv", Category.VECTOR_ARITH, ElementType.FP)

    put("vsetvli", Category.VECTOR_CONFIG)
    put("vsetivli", Category.VECTOR_CONFIG)

    put("flw", Category.SCALAR_FP_LOAD, ElementType.FP)
    put("fld", Category.SCALAR_FP_LOAD, ElementType.FP)
    put("fsw", Category.SCALAR_FP_STORE, ElementType.FP)
    put("fsd", Category.SCALAR_FP_STORE, ElementType.FP)

    for op in ("fadd", "fmul", "fmadd", "fdiv"):
        for sfx in ("s", "d"):
            put(f"{op}.{sfx}", Category.SCALAR_FP_ARITH, ElementType.FP)

    for m in ("lb", "lh", "lw", "ld", "sb", "sh", "sw", "sd",
              "add", "addi", "mul", "div", "li", "la", "mv", "slli"):
        put(m, Category.SCALAR_INT, ElementType.INT)

    for m in ("beq", "bne", "blt", "bge", "bltu", "bgeu", "beqz", "bnez", "ret"):
        put(m, Category.CONTROL)

    return table


TAXONOMY: Mapping[str, InstClass] = _build_taxonomy()

# Pseudo-instructions counted as a fixed number of retired instructions:
# li and mv count as 1, la as 2 (auipc+addi). Documented constant so the
# static model and the interpreter always agree.
_RETIRED_WEIGHTS = {"la": 2}


def retired_weight(mnemonic: str) -> int:
    return _RETIRED_WEIGHTS.get(mnemonic, 1)


def classify(mnemonic: str, masked: bool = False) -> InstClass:
    """Resolve a mnemonic to its InstClass.

    A masked unit-stride access is reported with masked-unit-stride
    addressing; masking never changes event attribution.
    """
    try:
        ic = TAXONOMY[mnemonic]
    except KeyError:
        raise UnsupportedInstructionError(
            f"unsupported instruction {mnemonic!r}: outside the modeled subset"
        ) from None
    if masked and ic.addressing is Addressing.UNIT_STRIDE:
        return InstClass(ic.mnemonic, ic.category, ic.element_type, Addressing.MASKED_UNIT_STRIDE)
    return ic


def is_supported(mnemonic: str) -> bool:
    return mnemonic in TAXONOMY


@dataclass(frozen=True)
class EventCounts:
    """One non-negative 64-bit counter value per event.

    Hardware counters are independent and possibly broken, so no cross-event
    relation is asserted here; only reference-model outputs obey the
    containment relations (vec_ld + vec_st <= vec, etc.).
    """

    retired: int = 0
    vec: int = 0
    vec_ld: int = 0
    vec_st: int = 0
    fp: int = 0
    fp_ld: int = 0
    fp_st: int = 0

    def __post_init__(self):
        for kind in EVENT_ORDER:
            value = getattr(self, kind.value)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{kind.value} count must be an integer, got {value!r}")
            if value < 0 or value > U64_MAX:
                raise ConfigError(f"{kind.value} count {value} outside the u64 range")

    def get(self, kind: EventKind) -> int:
        return getattr(self, kind.value)

    def __add__(self, other: "EventCounts") -> "EventCounts":
        return EventCounts(**{k.value: self.get(k) + other.get(k) for k in EVENT_ORDER})

    def scaled(self, n: int) -> "EventCounts":
        if n < 0:
            raise ConfigError("scale factor must be non-negative")
        return EventCounts(**{k.value: self.get(k) * n for k in EVENT_ORDER})

    def as_dict(self) -> dict[str, int]:
        return {k.value: self.get(k) for k in EVENT_ORDER}

    @classmethod
    def from_dict(cls, data: Mapping[str, int]) -> "EventCounts":
        unknown = set(data) - {k.value for k in EVENT_ORDER}
        if unknown:
            raise ConfigError(f"unknown event keys: {sorted(unknown)}")
        return cls(**{str(k): int(v) for k, v in data.items()})

    @classmethod
    def zero(cls) -> "EventCounts":
        return cls()


_ATTRIBUTION: Mapping[Category, tuple[EventKind, ...]] = {
    Category.VECTOR_LOAD: (EventKind.VEC, EventKind.VEC_LD),
    Category.VECTOR_STORE: (EventKind.VEC, EventKind.VEC_ST),
    Category.VECTOR_ARITH: (EventKind.VEC,),
    # vsetvli and friends count as vector instructions: the static model and
    # the interpreter must simply agree, and at 1e10 scale the distinction is
    # unobservable in hardware counters.
    Category.VECTOR_CONFIG: (EventKind.VEC,),
    Category.SCALAR_FP_LOAD: (EventKind.FP, EventKind.FP_LD),
    Category.SCALAR_FP_STORE: (EventKind.FP, EventKind.FP_ST),
    Category.SCALAR_FP_ARITH: (EventKind.FP,),
    Category.SCALAR_INT: (),
    Category.CONTROL: (),
}


def attribute_events(inst: InstClass) -> EventCounts:
    """Per-retirement event increments (0 or 1 each) for one instruction.

    Every instruction bumps retired. Vector FP arithmetic does NOT bump
    the scalar fp event: on the modeled hardware that counter tracks
    scalar FP operations, and its expected value on vector-FP kernels
    is near zero.
    """
    bumps = {EventKind.RETIRED.value: 1}
    for kind in _ATTRIBUTION[inst.category]:
        bumps[kind.value] = 1
    return EventCounts(**bumps)


@dataclass(frozen=True)
class VectorConfig:
    """Static machine vector configuration: register width and optional clock."""

    vlen_bits: int
    clock_hz: float | None = None

    def __post_init__(self):
        v = self.vlen_bits
        if not isinstance(v, int) or v < VLEN_MIN or v > VLEN_MAX or v & (v - 1):
            raise ConfigError(
                f"vlen_bits must be a power of two in [{VLEN_MIN}, {VLEN_MAX}], got {v!r}"
            )
        if self.clock_hz is not None and not self.clock_hz > 0:
            raise ConfigError(f"clock_hz must be positive, got {self.clock_hz!r}")

    @property
    def vlenb(self) -> int:
        """Bytes per vector register."""
        return self.vlen_bits // 8


def compute_vlmax(cfg: VectorConfig, sew_bits: int, lmul) -> int:
    """Maximum elements one instruction can operate on: LMUL*VLEN/SEW, floored.

    Rejects combinations yielding zero elements (e.g. LMUL=1/8 with SEW=64
    on a 256-bit register), which are unsupported fractional configurations.
    """
    if sew_bits not in SEW_VALUES:
        raise ConfigError(f"sew_bits must be one of {SEW_VALUES}, got {sew_bits!r}")
    frac = as_lmul(lmul)
    vlmax = (frac * cfg.vlen_bits) // sew_bits
    if vlmax < 1:
        raise ConfigError(
            f"unsupported fractional configuration: LMUL={frac} SEW={sew_bits} "
            f"VLEN={cfg.vlen_bits} holds no whole element"
        )
    return int(vlmax)


def resolve_vl(avl: int, vlmax: int) -> int:
    """Active vector length for a requested element count: min(avl, vlmax)."""
    if avl < 0:
        raise ConfigError(f"avl must be non-negative, got {avl}")
    return min(avl, vlmax)


@dataclass(frozen=True)
class VtypeState:
    """Dynamic register-typing state established by vsetvli.

    vl is the number of active elements; it never exceeds
    compute_vlmax(cfg, sew_bits, lmul) for the machine the state belongs to.
    """

    sew_bits: int
    lmul: Fraction
    vta: Policy = Policy.AGNOSTIC
    vma: Policy = Policy.AGNOSTIC
    vl: int = 0

    def __post_init__(self):
        if self.sew_bits not in SEW_VALUES:
            raise ConfigError(f"sew_bits must be one of {SEW_VALUES}, got {self.sew_bits!r}")
        object.__setattr__(self, "lmul", as_lmul(self.lmul))
        if not isinstance(self.vta, Policy) or not isinstance(self.vma, Policy):
            raise ConfigError("vta/vma must be Policy values")
        if self.vl < 0:
            raise ConfigError(f"vl must be non-negative, got {self.vl}")

    def vlmax(self, cfg: VectorConfig) -> int:
        return compute_vlmax(cfg, self.sew_bits, self.lmul)

    def validate_for(self, cfg: VectorConfig) -> None:
        """Check the cross-field invariants that need a machine configuration."""
        if self.lmul * cfg.vlen_bits < self.sew_bits:
            raise ConfigError(
                f"LMUL={self.lmul} VLEN={cfg.vlen_bits} holds no SEW={self.sew_bits} element"
            )
        if self.vl > self.vlmax(cfg):
            raise ConfigError(f"vl={self.vl} exceeds vlmax={self.vlmax(cfg)}")


def group_registers(reg: int, lmul) -> tuple[int, ...]:
    """Vector register numbers covered by the group starting at `reg`.

    The base register number must be aligned to the group size.
    """
    frac = as_lmul(lmul)
    span = max(1, int(frac))
    if reg % span:
        raise ConfigError(f"v{reg} is not aligned to an LMUL={frac} register group")
    return tuple(range(reg, reg + span))
