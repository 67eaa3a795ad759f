"""Laboratory for sparse random linear systems over finite fields.

Modules by theme:

- :mod:`xorlab.field` -- exact GF(q) arithmetic
- :mod:`xorlab.sparsemat` -- row-sparse matrices, elimination, kernels,
  frozen variables, relations
- :mod:`xorlab.ensemble` -- random instance generators (base, pinned,
  interpolated, XORSAT view)
- :mod:`xorlab.peel` -- 2-core pruning and the rank-deficiency witness
- :mod:`xorlab.wp` -- warning propagation on the Tanner graph
- :mod:`xorlab.theory` -- closed-form threshold machinery
- :mod:`xorlab.harness` -- seeded Monte Carlo experiment runner
"""

from xorlab.field import Field, build_field
from xorlab.sparsemat import (
    SparseMatrix,
    kernel_basis,
    frozen_set,
    nullity,
    rank,
    rref,
)

__all__ = [
    "Field",
    "build_field",
    "SparseMatrix",
    "rref",
    "rank",
    "nullity",
    "kernel_basis",
    "frozen_set",
]

__version__ = "0.1.0"
