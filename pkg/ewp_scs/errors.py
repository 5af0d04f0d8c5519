# ============================================================================
# EWP-SCS - ERROR HIERARCHY
# ============================================================================
"""
Exception hierarchy for EWP-SCS.

No silent failure: every module raises its own error class, and every
error class knows the process exit code the CLI reports for it.

    0  success
    2  input error (bad file, bad flag, bad parameter)
    3  numerical degeneracy (nothing left to screen)
    4  internal invariant violation
"""


class ScsError(RuntimeError):
    """Base class for all EWP-SCS errors."""
    exit_code = 1


class InputError(ScsError):
    """Raised when user-supplied input cannot be used."""
    exit_code = 2


class DegeneracyError(ScsError):
    """Raised when the data leave no usable numerical information."""
    exit_code = 3


class InvariantError(ScsError):
    """Raised when an internal invariant is violated - execution MUST halt."""
    exit_code = 4
