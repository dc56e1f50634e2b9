"""Exception types shared across the package."""


class BudgetExceeded(Exception):
    """An enumeration or search outgrew its configured coset/node budget."""


class CertificationFailure(Exception):
    """A search-accepted subgroup failed a face/edge-identification check.

    Search acceptance is supposed to imply certification, so this signals a
    bug upstream (or a deliberately corrupted table in the tests).
    """


class OverflowSlotError(Exception):
    """A homology string needed more than four torsion slots."""
