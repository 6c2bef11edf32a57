"""Random walks on surface groups: shortlex normal forms, cone-type automata,
renewal times and central-limit estimators.

The heavy lifting happens in the C++ extension ``conewalk._core``; this
package re-exports its surface.
"""

from conewalk._core import (
    AssumptionFailure,
    Group,
    PreconditionFailure,
    estimate,
    oracle_check,
    preset,
)

__all__ = [
    "AssumptionFailure",
    "Group",
    "PreconditionFailure",
    "estimate",
    "oracle_check",
    "preset",
]
