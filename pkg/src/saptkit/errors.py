"""Exception types shared across the package."""


class SaptError(Exception):
    """Base class for all package errors."""


class ShapeError(SaptError, ValueError):
    """Array dimensions inconsistent with the dimer basis."""


class SymmetryError(SaptError, ValueError):
    """Tensor violates a required permutational symmetry beyond tolerance."""


class PartitionError(SaptError, ValueError):
    """Core/active orbital partition is inconsistent."""


class DomainError(SaptError, ValueError):
    """Scalar argument outside its mathematical domain."""


class ArchiveError(SaptError, ValueError):
    """Tensor archive failed validation.

    `code` is one of 'schema', 'shape', 'checksum', 'io'.
    """

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"[{code}] {message}")
