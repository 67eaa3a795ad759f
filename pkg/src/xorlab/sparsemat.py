"""Row-sparse matrices over GF(q) with exact elimination.

A :class:`SparseMatrix` is an immutable value: per-row sorted lists of
(column, coefficient) pairs plus a field reference.  On top of the
canonical reduced row echelon form (unique, so independent of the
elimination engine) this module derives ranks, kernel bases, exact
uniform kernel sampling, frozen variables, relation tests, the
(delta, ell)-freeness audit, and balance profiles of kernel vectors.

Everything here is pure; matrices can be shared freely across threads
and worker processes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dfield

import numpy as np

from xorlab._bitslice import eliminate
from xorlab.field import Field, build_field


class BudgetExceededError(RuntimeError):
    """An exact computation would exceed its configured budget."""


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable row-sparse matrix over GF(q).

    ``rows[i]`` is a tuple of (column, value) pairs with strictly
    increasing columns and nonzero values.
    """

    n_rows: int
    n_cols: int
    rows: tuple[tuple[tuple[int, int], ...], ...]
    field: Field

    @classmethod
    def from_rows(cls, field: Field, n_cols: int, rows) -> "SparseMatrix":
        clean = []
        for row in rows:
            row = tuple((int(c), int(v)) for c, v in row)
            for (c, v), (c2, _) in zip(row, row[1:]):
                if c >= c2:
                    raise ValueError("row columns must be strictly increasing")
            for c, v in row:
                if not 0 <= c < n_cols:
                    raise ValueError(f"column {c} out of range [0, {n_cols})")
                if not 1 <= v < field.q:
                    raise ValueError(f"{v} is not a nonzero element of GF({field.q})")
            clean.append(row)
        return cls(len(clean), n_cols, tuple(clean), field)

    @classmethod
    def from_dense(cls, field: Field, dense) -> "SparseMatrix":
        dense = np.asarray(dense)
        rows = [
            [(j, int(v)) for j, v in enumerate(row) if v]
            for row in dense
        ]
        n_cols = dense.shape[1] if dense.ndim == 2 else 0
        return cls.from_rows(field, n_cols, rows)

    @classmethod
    def identity(cls, field: Field, n: int) -> "SparseMatrix":
        return cls.from_rows(field, n, [[(j, 1)] for j in range(n)])

    @classmethod
    def zero(cls, field: Field, n_rows: int, n_cols: int) -> "SparseMatrix":
        return cls.from_rows(field, n_cols, [[] for _ in range(n_rows)])

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for c, v in row:
                out[i, c] = v
        return out

    def matvec(self, sigma) -> np.ndarray:
        """A @ sigma over the field, sigma integer-encoded."""
        f = self.field
        out = np.zeros(self.n_rows, dtype=np.int64)
        for i, row in enumerate(self.rows):
            acc = 0
            for c, v in row:
                acc = f.add(acc, f.mul(v, int(sigma[c])))
            out[i] = acc
        return out

    # -- text serialization: header "M N q", then "row col value" lines --

    def dumps(self) -> str:
        lines = [f"{self.n_rows} {self.n_cols} {self.field.q}"]
        for i, row in enumerate(self.rows):
            for c, v in row:
                lines.append(f"{i} {c} {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SparseMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix text")
        m, n, q = (int(x) for x in lines[0].split())
        f = build_field(q)
        rows: list[list[tuple[int, int]]] = [[] for _ in range(m)]
        for ln in lines[1:]:
            i, c, v = (int(x) for x in ln.split())
            if not 0 <= i < m:
                raise ValueError(f"row index {i} out of range")
            rows[i].append((c, v))
        return cls.from_rows(f, n, [sorted(r) for r in rows])


@dataclass(frozen=True)
class RrefResult:
    matrix: SparseMatrix
    rank: int
    pivot_cols: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class KernelBasis:
    """Basis of {sigma : A sigma = 0} from the reduced echelon form.

    ``basis[i]`` has a 1 in ``free_cols[i]`` and zeros in all other free
    columns, so independence is immediate and uniform kernel sampling is
    a uniform choice of coefficients.
    """

    dimension: int
    basis: np.ndarray  # (dimension, n_cols) integer-encoded values
    pivot_cols: tuple[int, ...]
    free_cols: tuple[int, ...]
    field: Field = dfield(repr=False, default=None)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One exactly-uniform kernel vector.

        Consumes ``dimension`` uniform draws from ``rng`` (one per free
        column, in increasing column order) and back-substitutes the
        pivots, which is the same as taking the corresponding
        combination of basis vectors.
        """
        f = self.field
        n = self.basis.shape[1]
        coeffs = rng.integers(0, f.q, size=self.dimension)
        sigma = np.zeros(n, dtype=np.int64)
        for c, vec in zip(coeffs, self.basis):
            if c:
                sigma = f.add_arrays(sigma, f.mul_scalar_array(int(c), vec))
        return sigma


def _elim(A: SparseMatrix, *, reduced: bool):
    return eliminate(A.field, A.rows, A.n_rows, A.n_cols, reduced=reduced)


def rref(A: SparseMatrix) -> RrefResult:
    """Canonical reduced row echelon form with unit pivots.

    Deterministic: pivots take the smallest eligible column, ties on the
    smallest row index; the RREF itself is unique either way.  Zero rows
    are dropped from the returned matrix.
    """
    res = _elim(A, reduced=True)
    mat = SparseMatrix.from_rows(
        A.field,
        A.n_cols,
        [
            [(j, int(v)) for j, v in enumerate(row) if v]
            for row in res.pivot_values
        ],
    )
    return RrefResult(mat, res.rank, res.pivot_cols)


def rank(A: SparseMatrix) -> int:
    return _elim(A, reduced=False).rank


def nullity(A: SparseMatrix) -> int:
    return A.n_cols - rank(A)


def kernel_basis(A: SparseMatrix) -> KernelBasis:
    """Basis of the right kernel; dimension = n_cols - rank."""
    res = _elim(A, reduced=True)
    n = A.n_cols
    pivot_cols = np.array(res.pivot_cols, dtype=np.int64)
    free_mask = np.ones(n, dtype=bool)
    free_mask[pivot_cols] = False
    free_cols = np.flatnonzero(free_mask)
    dim = free_cols.size
    basis = np.zeros((dim, n), dtype=np.int64)
    if dim:
        basis[np.arange(dim), free_cols] = 1
        if pivot_cols.size:
            # sigma_pivot = -sum(R[pivot_row, free] * sigma_free)
            coeffs = res.pivot_values[:, free_cols]  # (rank, dim)
            basis[:, pivot_cols] = A.field.neg_array(coeffs).T
    return KernelBasis(dim, basis, tuple(res.pivot_cols), tuple(int(c) for c in free_cols), A.field)


def frozen_set(A: SparseMatrix) -> frozenset[int]:
    """Columns j with sigma_j = 0 for every kernel vector sigma.

    Equivalently the complement of the union of supports of the kernel
    basis vectors.
    """
    kb = kernel_basis(A)
    if kb.dimension == 0:
        return frozenset(range(A.n_cols))
    touched = np.any(kb.basis != 0, axis=0)
    return frozenset(int(j) for j in np.flatnonzero(~touched))


def sample_kernel(A: SparseMatrix, rng: np.random.Generator) -> np.ndarray:
    """A uniformly random element of ker A (see :meth:`KernelBasis.sample`)."""
    return kernel_basis(A).sample(rng)


def is_relation(A: SparseMatrix, J) -> bool:
    """True iff some nonzero row-space combination has support inside J.

    Computed by comparing left-kernel dimensions, i.e. checking whether
    deleting the J columns lowers the rank.
    """
    J = frozenset(int(j) for j in J)
    if not J:
        raise ValueError("the empty set is not an admissible relation query")
    if not J <= set(range(A.n_cols)):
        raise ValueError("relation columns out of range")
    reduced_rank = rank(minor(A, (), J).matrix)
    return reduced_rank < rank(A)


def is_proper_relation(A: SparseMatrix, J) -> bool:
    """True iff J minus the frozen set is still a relation of A."""
    J = frozenset(int(j) for j in J)
    if not J:
        raise ValueError("the empty set is not an admissible relation query")
    rest = J - frozen_set(A)
    if not rest:
        return False
    return is_relation(A, rest)


@dataclass(frozen=True)
class FreenessAudit:
    is_free: bool
    counts: dict[int, int]  # proper-relation count per size h
    thresholds: dict[int, float]  # delta * C(N, h)


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def _projective_rep(field: Field, col: np.ndarray) -> tuple[int, ...]:
    lead = int(col[np.flatnonzero(col)[0]])
    return tuple(int(x) for x in field.mul_scalar_array(field.inv(lead), col))


def freeness_audit(
    A: SparseMatrix, delta: float, ell: int, *, budget: int = 20_000_000
) -> FreenessAudit:
    """Count proper relations of every size h in [2, ell].

    The count for size h equals the number of column sets J, |J| = h,
    such that J minus the frozen set supports a nonzero row-space
    vector.  Sizes 2 and 3 are counted through the projective classes of
    the kernel-basis columns (a set is a relation iff its unfrozen
    kernel columns are linearly dependent), which reproduces the
    exhaustive count exactly; larger sizes enumerate subsets directly.
    The audit refuses (rather than truncating) when N^ell exceeds the
    budget.
    """
    if ell < 2:
        raise ValueError("ell must be >= 2")
    n = A.n_cols
    if n**ell > budget:
        raise BudgetExceededError(
            f"freeness audit needs N^ell = {n**ell} > budget {budget}"
        )
    f = A.field
    kb = kernel_basis(A)
    K = kb.basis  # (dim, n); column j is the kernel profile of variable j
    frozen = np.all(K == 0, axis=0) if kb.dimension else np.ones(n, dtype=bool)
    n_frozen = int(frozen.sum())
    unfrozen = np.flatnonzero(~frozen)

    # group unfrozen columns by projective class
    class_of: dict[tuple[int, ...], int] = {}
    members: list[list[int]] = []
    col_class = {}
    for j in unfrozen:
        rep = _projective_rep(f, K[:, j])
        cid = class_of.setdefault(rep, len(class_of))
        if cid == len(members):
            members.append([])
        members[cid].append(int(j))
        col_class[int(j)] = cid
    reps = list(class_of.keys())
    sizes = [len(m) for m in members]

    counts: dict[int, int] = {}
    # h = 2: proportional unfrozen pairs
    prop_pairs = sum(s * (s - 1) // 2 for s in sizes)
    if ell >= 2:
        counts[2] = prop_pairs
    # h = 3: (a) one frozen + proportional pair, (b) dependent unfrozen triples
    if ell >= 3:
        total = prop_pairs * n_frozen
        # triples inside one class, and exactly-two-in-class triples
        u = len(unfrozen)
        for s in sizes:
            total += s * (s - 1) * (s - 2) // 6
            total += s * (s - 1) // 2 * (u - s)
        # pairwise-independent collinear class triples
        rep_arr = {cid: np.array(reps[cid], dtype=np.int64) for cid in range(len(reps))}
        for c1, c2 in itertools.combinations(range(len(reps)), 2):
            v1, v2 = rep_arr[c1], rep_arr[c2]
            for lam in f.nonzero_elements():
                comb = f.add_arrays(v1, f.mul_scalar_array(lam, v2))
                c3 = class_of.get(_projective_rep(f, comb))
                if c3 is not None and c3 > c2:
                    total += sizes[c1] * sizes[c2] * sizes[c3]
        counts[3] = total
    # h >= 4: direct subset enumeration (budget keeps N tiny here)
    for h in range(4, ell + 1):
        c = 0
        for J in itertools.combinations(range(n), h):
            rest = [j for j in J if not frozen[j]]
            if rest and _columns_dependent(f, K[:, rest]):
                c += 1
        counts[h] = c

    thresholds = {h: delta * _binom(n, h) for h in counts}
    is_free = all(counts[h] < thresholds[h] for h in counts)
    return FreenessAudit(is_free, counts, thresholds)


def _columns_dependent(field: Field, cols: np.ndarray) -> bool:
    sub = SparseMatrix.from_dense(field, cols)
    return rank(sub) < cols.shape[1]


@dataclass(frozen=True, eq=False)
class BalanceProfile:
    """Per-value frequency vector rho(sigma) of a vector over GF(q)."""

    freqs: np.ndarray  # (q,) with freqs[s] = |{i: sigma_i = s}| / n
    n: int


def balance_profile(sigma, q: int) -> BalanceProfile:
    sigma = np.asarray(sigma, dtype=np.int64)
    if sigma.size < 1:
        raise ValueError("balance profile needs a nonempty vector")
    counts = np.bincount(sigma, minlength=q).astype(np.float64)
    return BalanceProfile(counts / sigma.size, sigma.size)


def balance_distance(sigma, q: int, norm: str = "l2") -> float:
    """Distance of rho(sigma) from the uniform profile, in l1 or l2."""
    dev = balance_profile(sigma, q).freqs - 1.0 / q
    if norm == "l2":
        return float(np.sqrt(np.sum(dev * dev)))
    if norm == "l1":
        return float(np.sum(np.abs(dev)))
    raise ValueError(f"unknown norm {norm!r}")


def stack_rows(A: SparseMatrix, extra_rows) -> SparseMatrix:
    return SparseMatrix.from_rows(A.field, A.n_cols, list(A.rows) + list(extra_rows))


@dataclass(frozen=True)
class Minor:
    matrix: SparseMatrix
    kept_rows: tuple[int, ...]  # new row index -> original row index
    kept_cols: tuple[int, ...]  # new col index -> original col index


def minor(A: SparseMatrix, removed_rows, removed_cols) -> Minor:
    """Delete the given rows and columns, preserving the remaining order.

    The returned maps translate the minor's indices back to the
    original ones (needed because columns are re-indexed).
    """
    removed_rows = set(int(r) for r in removed_rows)
    removed_cols = set(int(c) for c in removed_cols)
    for r in removed_rows:
        if not 0 <= r < A.n_rows:
            raise ValueError(f"row {r} out of range")
    for c in removed_cols:
        if not 0 <= c < A.n_cols:
            raise ValueError(f"column {c} out of range")
    kept_cols = [c for c in range(A.n_cols) if c not in removed_cols]
    col_map = {c: i for i, c in enumerate(kept_cols)}
    kept_rows = [i for i in range(A.n_rows) if i not in removed_rows]
    new_rows = [
        [(col_map[c], v) for c, v in A.rows[i] if c in col_map]
        for i in kept_rows
    ]
    mat = SparseMatrix.from_rows(A.field, len(kept_cols), new_rows)
    return Minor(mat, tuple(kept_rows), tuple(kept_cols))
