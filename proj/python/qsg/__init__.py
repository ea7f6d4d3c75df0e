"""Numerical checks for quasi-symplectic groupoids (Python front end of the C++ engine)."""

from ._qsg import (
    checks,
    coadjoint,
    dressing,
    emap,
    expm,
    fixtures,
    run,
    su_basis,
    suite_names,
    unit_kernel_dims,
)

__all__ = [
    "checks",
    "coadjoint",
    "dressing",
    "emap",
    "expm",
    "fixtures",
    "run",
    "su_basis",
    "suite_names",
    "unit_kernel_dims",
]
