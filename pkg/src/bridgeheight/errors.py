"""Exception hierarchy.

Every error raised for a mathematically invalid input derives from
:class:`BridgeError`; the CLI maps those to exit code 1.
"""


class BridgeError(Exception):
    """Base class for domain errors."""


class ParseError(BridgeError, ValueError):
    """Malformed jump-weight text."""


class NotReducedError(BridgeError):
    """The gcd of the jumps is larger than one."""


class RepeatedFactorError(BridgeError):
    """P' and P'' vanish simultaneously (double saddle point)."""


class NotCenteredError(BridgeError):
    """An operation needs P(1) = 1 and P'(1) = 0."""


class NotLukasiewiczError(BridgeError):
    """An operation needs the only negative jump to be -1."""


class IrrationalCenterError(BridgeError):
    """Exact-rational centering requested but tau is irrational."""


class PrecisionError(BridgeError):
    """An iteration did not reach the requested accuracy."""


class RootFindingError(BridgeError):
    """Root polishing did not converge."""


class DegenerateSplitError(BridgeError):
    """Small and large kernel roots cannot be separated by modulus."""


class BranchCollisionError(BridgeError):
    """Two roots came too close while tracking a branch."""


class BranchPointError(BridgeError):
    """P'(u) vanishes at a root (z is a branch point)."""


class MemoryGuardError(BridgeError):
    """A dynamic-programming table would exceed the configured size."""


class ParityError(BridgeError, ValueError):
    """Reflection formula called with an odd length or a bad height."""
