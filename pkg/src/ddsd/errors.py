"""Error taxonomy shared across the toolkit.

The CLI maps these onto exit codes: usage problems exit 2 (argparse),
DataError exits 3, NumericError exits 4.
"""


class DdsdError(Exception):
    """Base class for toolkit errors."""

    category = "internal"


class DataError(DdsdError):
    """Malformed or inconsistent input data (files, manifests, shapes)."""

    category = "data"


class ShapeError(DataError):
    """Tensor shape does not match a layer or record contract."""


class NumericError(DdsdError):
    """Non-finite values or numeric breakdown during computation."""

    category = "numeric"
