import numpy as np
import pytest

from xorlab.ensemble import EnsembleParams, gen_base
from xorlab.field import build_field
from xorlab.peel import core_excess, has_full_row_rank, rank_via_core, two_core
from xorlab.sparsemat import SparseMatrix, rank
from xorlab.theory import threshold_dk_star

from tests.oracles import random_sparse

GF2 = build_field(2)


def mat(rows, n):
    return SparseMatrix.from_rows(GF2, n, rows)


def shuffled_order_core(A, rng):
    """Reference peeling that removes a RANDOM eligible column each step."""
    degree = [0] * A.n_cols
    col_rows = [[] for _ in range(A.n_cols)]
    for i, row in enumerate(A.rows):
        for c, _ in row:
            degree[c] += 1
            col_rows[c].append(i)
    row_alive = [True] * A.n_rows
    col_alive = [True] * A.n_cols
    while True:
        eligible = [j for j in range(A.n_cols) if col_alive[j] and degree[j] <= 1]
        if not eligible:
            break
        j = eligible[int(rng.integers(0, len(eligible)))]
        col_alive[j] = False
        if degree[j] == 1:
            i = next(r for r in col_rows[j] if row_alive[r])
            row_alive[i] = False
            for c, _ in A.rows[i]:
                if col_alive[c]:
                    degree[c] -= 1
    return (
        frozenset(i for i in range(A.n_rows) if row_alive[i]),
        frozenset(j for j in range(A.n_cols) if col_alive[j]),
    )


def test_single_row_peels_to_empty():
    A = mat([[(0, 1), (1, 1), (2, 1)]], 3)
    res = two_core(A)
    assert res.core_rows == 0 and res.core_cols == 0
    assert set(res.removed_cols) == {0, 1, 2}
    assert res.removed_rows == (0,)


def test_identity_peels_to_empty():
    A = SparseMatrix.identity(GF2, 2)
    res = two_core(A)
    assert res.core_rows == 0 and res.core_cols == 0


def test_triangle_is_its_own_core():
    A = mat([[(0, 1), (1, 1)], [(1, 1), (2, 1)], [(0, 1), (2, 1)]], 3)
    res = two_core(A)
    assert res.core.matrix == A
    assert res.excess == 0


def test_degree_zero_column_removed_without_row():
    A = mat([[(0, 1), (1, 1)], [(0, 1), (1, 1)]], 3)  # column 2 untouched
    res = two_core(A)
    assert 2 in res.removed_cols
    assert res.core_cols == 2 and res.core_rows == 2


def test_excess_empty_core_is_zero():
    assert core_excess(SparseMatrix.identity(GF2, 3)) == 0


@pytest.mark.parametrize("q", [2, 3])
def test_confluence_against_shuffled_order(q):
    f = build_field(q)
    rng = np.random.default_rng(123)
    for trial in range(100):
        n = int(rng.integers(5, 30))
        p = EnsembleParams(n=n, k=3, q=q, d=float(rng.uniform(1.0, 3.5)), seed=trial)
        A = gen_base(p, p.make_rng())
        res = two_core(A)
        det = (frozenset(res.core.kept_rows), frozenset(res.core.kept_cols))
        assert det == shuffled_order_core(A, rng)


def test_rank_via_core_matches_direct_rank():
    rng = np.random.default_rng(7)
    for q in [2, 3, 4]:
        f = build_field(q)
        for trial in range(15):
            A = random_sparse(f, int(rng.integers(1, 15)), int(rng.integers(2, 15)), rng, density=0.25)
            assert rank_via_core(A) == rank(A)
            assert has_full_row_rank(A) == (rank(A) == A.n_rows)


def test_positive_excess_implies_rank_deficiency():
    rng = np.random.default_rng(99)
    found = 0
    for trial in range(200):
        n = int(rng.integers(5, 40))
        p = EnsembleParams(n=n, k=3, q=2, d=float(rng.uniform(2.5, 4.5)), seed=1000 + trial)
        A = gen_base(p, p.make_rng())
        if core_excess(A) > 0:
            found += 1
            assert rank(A) < A.n_rows
    assert found > 0  # the regime above d_k produces positive excess


def test_nonempty_core_probability_monotone_in_d():
    # shared base randomness: same per-trial seed across the d grid
    n, trials = 200, 50
    grid = [1.5, 2.0, 2.5, 3.0]
    fracs = []
    for d in grid:
        hits = 0
        for trial in range(trials):
            p = EnsembleParams(n=n, k=3, q=2, d=d, seed=trial)
            A = gen_base(p, p.make_rng())
            if two_core(A).core_rows > 0:
                hits += 1
        fracs.append(hits / trials)
    assert all(a <= b for a, b in zip(fracs, fracs[1:]))


def test_core_emergence_threshold_near_dk_star():
    # bisect the empty-core probability crossing 1/2 at large n (peeling
    # only, no elimination) and compare with the analytic critical density
    n, trials = 50_000, 9
    lo, hi = 2.2, 2.7
    for _ in range(6):
        mid = 0.5 * (lo + hi)
        nonempty = 0
        for trial in range(trials):
            p = EnsembleParams(n=n, k=3, q=2, d=mid, seed=5000 + trial)
            if two_core(gen_base(p, p.make_rng())).core_rows > 0:
                nonempty += 1
        if nonempty > trials / 2:
            hi = mid
        else:
            lo = mid
    estimate = 0.5 * (lo + hi)
    assert abs(estimate - threshold_dk_star(3)) <= 0.05
