"""Exception hierarchy shared across the package."""


class SumcastError(Exception):
    """Base class; the CLI turns these into machine-readable error JSON."""

    kind = "error"

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class FieldError(SumcastError, ValueError):
    kind = "field"


class NetworkError(SumcastError, ValueError):
    kind = "network"


class CycleError(NetworkError):
    kind = "cycle"


class InsufficientFlow(SumcastError):
    kind = "insufficient-flow"


class PreconditionError(SumcastError):
    """Connectivity (or structure) hypothesis of a construction does not hold."""

    kind = "precondition"

    def __init__(self, message: str, pair: tuple | None = None):
        super().__init__(message)
        self.pair = pair

    def to_json(self) -> dict:
        out = super().to_json()
        if self.pair is not None:
            out["pair"] = list(self.pair)
        return out


class DispatchError(SumcastError):
    """A case-analysis precondition or one of its structural checks failed."""

    kind = "dispatch"


class CodeError(SumcastError, ValueError):
    kind = "code"


class ExtractionError(SumcastError):
    kind = "extraction"


class RetriesExhausted(SumcastError):
    kind = "retries-exhausted"

    def __init__(self, message: str, attempts: int, witness: dict | None = None):
        super().__init__(message)
        self.attempts = attempts
        self.witness = witness or {}

    def to_json(self) -> dict:
        out = super().to_json()
        out["attempts"] = self.attempts
        out["witness"] = self.witness
        return out


class InstanceTooLarge(SumcastError):
    kind = "too-large"


class UnsupportedRegime(SumcastError):
    kind = "unsupported"
