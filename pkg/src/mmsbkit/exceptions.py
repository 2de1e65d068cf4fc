"""Shared exception types.

The CLI maps these onto process exit codes: usage problems (plain
``ValueError``) exit 1, :class:`DataFormatError` exits 2, and
:class:`NumericalError` exits 3.
"""


class MmsbkitError(Exception):
    """Base class for package-specific failures."""


class DataFormatError(MmsbkitError):
    """A file or configuration payload violates its documented format."""


class NumericalError(MmsbkitError):
    """A numerical procedure failed: singular systems, non-convergence,
    degenerate geometry, or rank deficiency detected at run time."""
