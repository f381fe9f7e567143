"""Exception taxonomy shared across the toolkit."""


class WrfrftError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(WrfrftError):
    """A parameter set violates an invariant (bad bounds, empty axis, ...)."""


class DwellError(ValidationError):
    """A slow-time instant falls outside the target's dwell interval."""


class OutOfWindowError(ValidationError):
    """A trajectory leaves the sampled range window."""


class MinDwellError(ValidationError):
    """A search window is shorter than the configured minimum dwell."""


class DegenerateAngleError(ValidationError):
    """Rotation angle within tolerance of a multiple of pi; the kernel is a
    permutation there and must be handled by the identity/reversal branch."""


class BudgetError(WrfrftError):
    """A search grid exceeds the configured hypothesis budget."""

    def __init__(self, count, budget, counts_per_axis=None):
        self.count = count
        self.budget = budget
        self.counts_per_axis = counts_per_axis or {}
        axes = ", ".join(f"{k}={v}" for k, v in self.counts_per_axis.items())
        super().__init__(
            f"search grid holds {count} hypotheses (budget {budget})"
            + (f"; per-axis counts: {axes}" if axes else "")
        )


class EchoFileError(WrfrftError):
    """Base class for echo/matrix container format problems."""


class MalformedHeaderError(EchoFileError):
    """Header is missing, wrongly delimited, or has unparsable fields."""


class PayloadSizeError(EchoFileError):
    """Binary payload does not match the size promised by the header."""

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"payload holds {actual} bytes, header promises {expected}")


class DtypeMismatchError(EchoFileError):
    """Header declares an unsupported payload dtype."""
