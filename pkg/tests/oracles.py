"""Independent brute-force oracles used across the test suite.

Everything here is written against the definitions, not against the
library's elimination path: kernels by exhaustive enumeration, relations
by enumerating row combinations, echelon forms by textbook dense
elimination.  Deliberately slow and only usable on tiny instances.
"""

from __future__ import annotations

import itertools

import numpy as np


def enumerate_kernel(A) -> list[tuple[int, ...]]:
    """All sigma with A sigma = 0, by trying every vector in F_q^n."""
    f, n = A.field, A.n_cols
    out = []
    for sigma in itertools.product(range(f.q), repeat=n):
        if not any(A.matvec(np.array(sigma, dtype=np.int64))):
            out.append(sigma)
    return out


def enumerate_kernel_from_basis(A) -> list[tuple[int, ...]]:
    """All kernel vectors as combinations of the library basis."""
    from xorlab.sparsemat import kernel_basis

    f = A.field
    kb = kernel_basis(A)
    out = []
    for coeffs in itertools.product(range(f.q), repeat=kb.dimension):
        sigma = np.zeros(A.n_cols, dtype=np.int64)
        for c, vec in zip(coeffs, kb.basis):
            sigma = f.add_arrays(sigma, f.mul_scalar_array(c, vec))
        out.append(tuple(int(x) for x in sigma))
    return out


def brute_frozen_set(A) -> frozenset[int]:
    kernel = enumerate_kernel(A)
    return frozenset(
        j for j in range(A.n_cols) if all(sigma[j] == 0 for sigma in kernel)
    )


def brute_is_relation(A, J) -> bool:
    """Enumerate every left combination y and test supp(y^T A) subset J."""
    f = A.field
    J = set(J)
    dense = A.to_dense()
    for y in itertools.product(range(f.q), repeat=A.n_rows):
        comb = np.zeros(A.n_cols, dtype=np.int64)
        for yi, row in zip(y, dense):
            comb = f.add_arrays(comb, f.mul_scalar_array(yi, row))
        supp = {int(j) for j in np.flatnonzero(comb)}
        if supp and supp <= J:
            return True
    return False


def brute_proper_relation_counts(A, ell: int) -> dict[int, int]:
    frozen = brute_frozen_set(A)
    counts = {}
    for h in range(2, ell + 1):
        c = 0
        for J in itertools.combinations(range(A.n_cols), h):
            rest = set(J) - frozen
            if rest and brute_is_relation(A, rest):
                c += 1
        counts[h] = c
    return counts


def reference_rref(A) -> tuple[np.ndarray, int, list[int]]:
    """Textbook dense Gauss-Jordan; returns (matrix, rank, pivot cols)."""
    f = A.field
    M = [[int(v) for v in row] for row in A.to_dense()]
    n_rows, n_cols = A.n_rows, A.n_cols
    r = 0
    pivots = []
    for j in range(n_cols):
        sel = next((i for i in range(r, n_rows) if M[i][j]), None)
        if sel is None:
            continue
        M[r], M[sel] = M[sel], M[r]
        inv = f.inv(M[r][j])
        M[r] = [f.mul(inv, x) for x in M[r]]
        for i in range(n_rows):
            if i != r and M[i][j]:
                c = f.neg(M[i][j])
                M[i] = [f.add(x, f.mul(c, y)) for x, y in zip(M[i], M[r])]
        pivots.append(j)
        r += 1
        if r == n_rows:
            break
    return np.array(M, dtype=np.int64).reshape(n_rows, n_cols), r, pivots


def random_sparse(field, n_rows, n_cols, rng, density=0.4):
    from xorlab.sparsemat import SparseMatrix

    rows = []
    for _ in range(n_rows):
        row = [
            (j, int(rng.integers(1, field.q)))
            for j in range(n_cols)
            if rng.random() < density
        ]
        rows.append(row)
    return SparseMatrix.from_rows(field, n_cols, rows)


def random_acyclic_pinned(field, n, k, m, n_pins, rng, max_attempts=500):
    """A pinned instance whose Tanner graph is a forest.

    Weight-k rows are rejection-sampled so that no row closes a cycle
    (union-find on the variables); unary pinning rows are leaf checks
    and never create cycles.
    """
    from xorlab.sparsemat import SparseMatrix

    parent = None

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _ in range(max_attempts):
        parent = list(range(n))
        rows = []
        ok = True
        for _ in range(m):
            support = sorted(rng.choice(n, size=k, replace=False))
            roots = [find(v) for v in support]
            if len(set(roots)) < k:
                ok = False
                break
            for r in roots[1:]:
                parent[r] = roots[0]
            rows.append([(int(v), int(rng.integers(1, field.q))) for v in support])
        if not ok:
            continue
        for _ in range(n_pins):
            rows.append([(int(rng.integers(0, n)), 1)])
        return SparseMatrix.from_rows(field, n, rows)
    raise RuntimeError("no acyclic instance found; lower m")
