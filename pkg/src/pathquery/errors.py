"""Exception types shared across the package."""

from __future__ import annotations


class PromiseViolation(RuntimeError):
    """The hidden graph does not satisfy the structural promise a learner relies on."""


class GenerationInfeasible(ValueError):
    """No instance with the requested shape exists for the given parameters."""


class AlmostTreeRejected(ValueError):
    """Raised by ``validate_almost_tree``; ``reason`` is a stable machine-readable tag."""

    REASONS = (
        "not-rooted",
        "cycle-created",
        "transitive-extra-edge",
        "more-than-one-extra-edge",
    )

    def __init__(self, reason: str, detail: str = "") -> None:
        if reason not in self.REASONS:
            raise ValueError(f"unknown rejection reason {reason!r}")
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)
