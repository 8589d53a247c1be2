"""Exception hierarchy shared across the toolkit.

CLI exit-code mapping: user/input errors exit 1, missing host
capabilities exit 2, internal invariant violations exit 3.
"""


class RvvProbeError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(RvvProbeError):
    """Invalid configuration value or domain violation."""


class UnsupportedInstructionError(RvvProbeError):
    """Mnemonic outside the supported RVV/scalar subset."""


class AsmSyntaxError(RvvProbeError):
    """Malformed assembly text; carries position information."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {column})" if column is not None else ")")
        super().__init__(message + where)


class KernelShapeError(RvvProbeError):
    """Kernel control flow violates the single-loop contract."""


class IllegalInstructionError(RvvProbeError):
    """Architecturally illegal operation (misaligned register group, bad vtype)."""


class MemoryAccessError(RvvProbeError):
    """Access outside the declared data buffer."""


class SimulationLimitError(RvvProbeError):
    """Interpreter asked to run beyond oracle scale or past its dynamic bound."""


class CapabilityError(RvvProbeError):
    """Missing host capability: no RVV unit, perf tool absent, no compiler."""


class SchemaError(RvvProbeError):
    """Structured input violates its schema; carries the offending field path."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


class BuildError(RvvProbeError):
    """External compiler invocation failed; carries the build log."""

    def __init__(self, message: str, log: str = ""):
        self.log = log
        super().__init__(message)


class UncalibratedEventError(RvvProbeError):
    """A derived metric requested an event outside the calibrated usable set."""


class InternalInvariantError(RvvProbeError):
    """A condition the toolkit guarantees internally was violated."""
