"""Random instance generators for sparse matrices over GF(q).

The base ensemble draws m rows whose supports are independent uniform
k-subsets of the n columns; the nonzero entries come from a coefficient
scheme (all ones, a seeded i.i.d. stream, or an explicit table).
Pinning appends unary rows with a single 1 in a random column; the
pinned ensemble draws the pin count uniformly from {1, ..., ceil(ln n)}.
The interpolation family mixes Poisson numbers of weight-k and unary
rows.

Reproducibility contract: every generator is a pure function of
(params, rng state).  Row supports are sampled with Floyd's
rejection-free algorithm, consuming exactly k integer draws per row;
the draw order within each generator is documented in its docstring, so
identical (params, seed) produce bit-identical matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from xorlab.field import Field, build_field
from xorlab.sparsemat import SparseMatrix


class AllOnes:
    """Every nonzero entry is the field's 1 (XORSAT when q = 2)."""

    kind = "all_ones"

    def coefficient(self, field: Field, row: int, col: int) -> int:
        return 1

    def to_dict(self):
        return {"kind": self.kind}

    def __eq__(self, other):
        return isinstance(other, AllOnes)

    def __hash__(self):
        return hash(self.kind)


class SeededNonzero:
    """Entries drawn i.i.d. uniform from GF(q) \\ {0}.

    The entry at (row, col) comes from a counter-based stream keyed by
    the scheme seed with the (row, col) pair as the counter, so the
    scheme behaves like a fixed infinite coefficient matrix that can be
    addressed in any order.
    """

    kind = "seeded_nonzero"

    def __init__(self, seed: int):
        self.seed = int(seed)

    def coefficient(self, field: Field, row: int, col: int) -> int:
        bitgen = np.random.Philox(key=self.seed, counter=[0, 0, row, col])
        return int(np.random.Generator(bitgen).integers(1, field.q))

    def to_dict(self):
        return {"kind": self.kind, "seed": self.seed}

    def __eq__(self, other):
        return isinstance(other, SeededNonzero) and other.seed == self.seed

    def __hash__(self):
        return hash((self.kind, self.seed))


class ExplicitTable:
    """A finite prefix of the coefficient matrix, indexed [row][col].

    Rows may prescribe different nonzero entries; sampling a support
    column beyond a row's stored prefix is an error.
    """

    kind = "explicit"

    def __init__(self, rows):
        self.rows = tuple(tuple(int(v) for v in r) for r in rows)
        if any(v == 0 for r in self.rows for v in r):
            raise ValueError("explicit coefficient tables must be nonzero")

    def coefficient(self, field: Field, row: int, col: int) -> int:
        try:
            v = self.rows[row][col]
        except IndexError:
            raise ValueError(
                f"explicit table has no entry at ({row}, {col})"
            ) from None
        if not 1 <= v < field.q:
            raise ValueError(f"{v} is not a nonzero element of GF({field.q})")
        return v

    def to_dict(self):
        return {"kind": self.kind, "rows": [list(r) for r in self.rows]}

    def __eq__(self, other):
        return isinstance(other, ExplicitTable) and other.rows == self.rows

    def __hash__(self):
        return hash((self.kind, self.rows))


def scheme_from_dict(d) -> AllOnes | SeededNonzero | ExplicitTable:
    kind = d["kind"]
    if kind == AllOnes.kind:
        return AllOnes()
    if kind == SeededNonzero.kind:
        return SeededNonzero(d["seed"])
    if kind == ExplicitTable.kind:
        return ExplicitTable(d["rows"])
    raise ValueError(f"unknown coefficient scheme {kind!r}")


@dataclass(frozen=True)
class EnsembleParams:
    """Size, density and coefficient scheme of one random ensemble.

    Exactly one of ``m`` (row count) and ``d`` (average variable degree,
    m = round(d n / k)) must be given.
    """

    n: int
    k: int
    q: int
    m: int | None = None
    d: float | None = None
    scheme: AllOnes | SeededNonzero | ExplicitTable = AllOnes()
    seed: int = 0

    def __post_init__(self):
        if (self.m is None) == (self.d is None):
            raise ValueError("give exactly one of m and d")
        if self.k < 3:
            raise ValueError("row weight k must be >= 3")
        if self.k > self.n:
            raise ValueError("row weight k cannot exceed n")
        if self.m is not None and self.m < 0:
            raise ValueError("m must be >= 0")
        if self.d is not None and self.d <= 0:
            raise ValueError("d must be > 0")

    @property
    def m_rows(self) -> int:
        if self.m is not None:
            return self.m
        return round(self.d * self.n / self.k)

    @property
    def density(self) -> float:
        if self.d is not None:
            return self.d
        return self.k * self.m / self.n

    @property
    def field(self) -> Field:
        return build_field(self.q)

    def make_rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed))

    def to_dict(self) -> dict:
        out = {"n": self.n, "k": self.k, "q": self.q, "seed": self.seed,
               "scheme": self.scheme.to_dict()}
        if self.m is not None:
            out["m"] = self.m
        else:
            out["d"] = self.d
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleParams":
        return cls(
            n=d["n"],
            k=d["k"],
            q=d["q"],
            m=d.get("m"),
            d=d.get("d"),
            scheme=scheme_from_dict(d.get("scheme", {"kind": "all_ones"})),
            seed=d.get("seed", 0),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EnsembleParams":
        return cls.from_dict(json.loads(text))


def _floyd_ksubset(n: int, k: int, rng: np.random.Generator) -> list[int]:
    """Uniform k-subset of range(n); exactly k draws from rng."""
    chosen: set[int] = set()
    for t in range(n - k, n):
        x = int(rng.integers(0, t + 1))
        chosen.add(t if x in chosen else x)
    return sorted(chosen)


def gen_base(params: EnsembleParams, rng: np.random.Generator) -> SparseMatrix:
    """The base ensemble: m weight-k rows with scheme coefficients.

    Draw order: row 0's support (k draws), row 1's support, ...
    Coefficients come from the scheme, not from ``rng``.
    """
    f = params.field
    rows = []
    for i in range(params.m_rows):
        support = _floyd_ksubset(params.n, params.k, rng)
        rows.append(
            [(j, params.scheme.coefficient(f, i, j)) for j in support]
        )
    return SparseMatrix.from_rows(f, params.n, rows)


def pin(A: SparseMatrix, t: int, rng: np.random.Generator) -> SparseMatrix:
    """Append t unary rows, each a single 1 in an independent uniform column."""
    if t < 0:
        raise ValueError("pin count must be >= 0")
    extra = [[(int(rng.integers(0, A.n_cols)), 1)] for _ in range(t)]
    return SparseMatrix.from_rows(A.field, A.n_cols, list(A.rows) + extra)


def pin_count_bound(n: int) -> int:
    """T = ceil(ln n): the upper end of the pin-count range."""
    return math.ceil(math.log(n))


def gen_pinned(params: EnsembleParams, rng: np.random.Generator) -> tuple[SparseMatrix, int]:
    """Base ensemble plus t pinning rows, t uniform in {1, ..., ceil(ln n)}.

    Draw order: t first, then the base rows, then the pin columns.
    Requires n >= 2 so the range is nonempty.
    """
    if params.n < 2:
        raise ValueError("pinned ensemble needs n >= 2")
    T = pin_count_bound(params.n)
    t = int(rng.integers(1, T + 1))
    A = gen_base(params, rng)
    return pin(A, t, rng), t


def gen_interpolated(
    params: EnsembleParams,
    theta: float,
    alpha_f: float,
    rng: np.random.Generator,
) -> SparseMatrix:
    """The interpolation family between the pinned ensemble and unary rows.

    Poisson((1 - theta) d n / k) weight-k rows, then
    Poisson(d theta alpha_f^(k-1) n) unary rows, then the usual pinning
    block.  Draw order: m_theta, its rows, m'_theta, its columns, t,
    pin columns.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if not 0.0 <= alpha_f <= 1.0:
        raise ValueError("alpha_f must lie in [0, 1]")
    f = params.field
    d, n, k = params.density, params.n, params.k
    m_theta = int(rng.poisson((1.0 - theta) * d * n / k))
    rows = []
    for i in range(m_theta):
        support = _floyd_ksubset(n, k, rng)
        rows.append([(j, params.scheme.coefficient(f, i, j)) for j in support])
    m_unary = int(rng.poisson(d * theta * alpha_f ** (k - 1) * n))
    for _ in range(m_unary):
        rows.append([(int(rng.integers(0, n)), 1)])
    A = SparseMatrix.from_rows(f, n, rows)
    T = pin_count_bound(n)
    t = int(rng.integers(1, T + 1))
    return pin(A, t, rng)


def xorsat_instance(
    params: EnsembleParams, rng: np.random.Generator
) -> tuple[SparseMatrix, np.ndarray]:
    """A base matrix together with an independent uniform right-hand side.

    Draw order: the matrix first, then the m entries of y.  Solvability
    of A sigma = y is the satisfiability proxy.
    """
    A = gen_base(params, rng)
    y = rng.integers(0, params.q, size=params.m_rows)
    return A, y


def is_solvable(A: SparseMatrix, y) -> bool:
    """rank(A) == rank(A | y), via one elimination of the augmented matrix."""
    from xorlab.sparsemat import rank

    aug_rows = [
        list(row) + ([(A.n_cols, int(yi))] if yi else [])
        for row, yi in zip(A.rows, np.asarray(y))
    ]
    aug = SparseMatrix.from_rows(A.field, A.n_cols + 1, aug_rows)
    return rank(aug) == rank(A)
