import numpy as np
import pytest

from xorlab.ensemble import EnsembleParams, gen_base, gen_pinned
from xorlab.field import build_field
from xorlab.sparsemat import BudgetExceededError, SparseMatrix, frozen_set
from xorlab.wp import (
    LABEL_F,
    LABEL_S,
    LABEL_U,
    MessageSet,
    TannerGraph,
    all_f_messages,
    all_u_messages,
    extension_defect,
    fixed_point_violations,
    is_alpha_fixed_point,
    is_extension,
    labels,
    messages_to_csv,
    standard_messages,
    stats,
    stats_distance,
    stats_to_json_dict,
    wp_iterate,
    wp_update,
)

from tests.oracles import random_acyclic_pinned

GF2 = build_field(2)


def mat(rows, n, q=2):
    return SparseMatrix.from_rows(build_field(q), n, rows)


PINNED_TRIANGLE = mat([[(0, 1), (1, 1), (2, 1)], [(1, 1)], [(2, 1)]], 3)


def test_graph_shape():
    G = TannerGraph(PINNED_TRIANGLE)
    assert G.n_vars == 3 and G.n_checks == 3 and G.n_edges == 5
    assert list(G.var_degree) == [1, 2, 2]
    assert list(G.check_degree) == [3, 1, 1]


def test_standard_messages_two_variable_path():
    # single row (1 1): removing the row unfreezes both; the full kernel
    # {00, 11} freezes neither, so all four messages are u
    A = mat([[(0, 1), (1, 1)]], 2)
    msgs = standard_messages(A)
    assert not msgs.var_to_check.any()
    assert not msgs.check_to_var.any()


def test_standard_messages_pinned_triangle():
    # exact oracle worked out by hand on the 3x3 instance
    A = PINNED_TRIANGLE
    G = TannerGraph(A)
    msgs = standard_messages(A)
    e_v1_a0 = G.edge_id(0, 1)
    e_v2_a0 = G.edge_id(0, 2)
    e_v0_a0 = G.edge_id(0, 0)
    assert msgs.var_to_check[e_v1_a0] and msgs.var_to_check[e_v2_a0]
    assert not msgs.var_to_check[e_v0_a0]
    assert msgs.check_to_var[e_v0_a0]  # a0 freezes v0
    lab = labels(G, msgs)
    assert lab.var_label[0] == LABEL_S
    st = stats(G, msgs, k=3)
    assert st.delta.get(("s", (0, 0, 1, 0)), 0) >= 1  # v0's bucket


def test_standard_messages_empty_matrix():
    A = SparseMatrix.zero(GF2, 0, 4)
    msgs = standard_messages(A)
    assert msgs.var_to_check.size == 0


def test_standard_messages_budget():
    p = EnsembleParams(n=4000, k=3, q=2, d=2.0, seed=0)
    A = gen_base(p, p.make_rng())
    with pytest.raises(BudgetExceededError):
        standard_messages(A)


def test_all_u_is_fixed_point_when_check_degrees_ge2():
    A = mat([[(0, 1), (1, 1)], [(1, 1), (2, 1)], [(0, 1), (2, 1)]], 3)
    G = TannerGraph(A)
    out = wp_update(G, all_u_messages(G))
    assert out == all_u_messages(G)
    assert fixed_point_violations(G, all_u_messages(G)) == 0


def test_unary_check_always_sends_f():
    A = mat([[(0, 1)]], 2)
    G = TannerGraph(A)
    for init in (all_u_messages(G), all_f_messages(G)):
        assert wp_update(G, init).check_to_var[0]


def test_all_f_on_isolated_check_flips_var_messages():
    # one k=3 check with degree-1 variables: no other checks exist, so all
    # three var-to-check messages flip to u in one update
    A = mat([[(0, 1), (1, 1), (2, 1)]], 3)
    G = TannerGraph(A)
    assert fixed_point_violations(G, all_f_messages(G)) == 3


def test_degree_one_variable_sends_u():
    A = mat([[(0, 1), (1, 1), (2, 1)]], 3)
    G = TannerGraph(A)
    out = wp_update(G, all_f_messages(G))
    assert not out.var_to_check.any()


def test_iterate_all_u_converges_immediately():
    A = mat([[(0, 1), (1, 1)], [(1, 1), (2, 1)], [(0, 1), (2, 1)]], 3)
    G = TannerGraph(A)
    msgs, converged, iters = wp_iterate(G, "all_u")
    assert converged and iters == 1


def test_iterate_monotone_and_converges():
    p = EnsembleParams(n=300, k=3, q=2, d=2.5, seed=4)
    A, _ = gen_pinned(p, p.make_rng())
    G = TannerGraph(A)
    msgs, converged, iters = wp_iterate(G, "all_f")
    assert converged
    assert fixed_point_violations(G, msgs) == 0


def test_tree_exactness_standard_equals_iterate():
    # acyclic pinned instances: the standard messages are an exact fixed
    # point and the all-f iteration reproduces them message-for-message
    rng = np.random.default_rng(42)
    for q in (2, 3):
        f = build_field(q)
        for trial in range(25):
            n = int(rng.integers(8, 41))
            m = int(rng.integers(1, max(2, n // 4)))
            A = random_acyclic_pinned(f, n, 3, m, int(rng.integers(1, 5)), rng)
            G = TannerGraph(A)
            std = standard_messages(A)
            assert fixed_point_violations(G, std) == 0
            it, converged, _ = wp_iterate(G, "all_f")
            assert converged and it == std


def test_labels_isolated_variable_u():
    A = mat([[(0, 1), (1, 1)]], 3)  # variable 2 isolated
    G = TannerGraph(A)
    lab = labels(G, all_u_messages(G))
    assert lab.var_label[2] == LABEL_U


def test_labels_degree_one_check_edge_cases():
    A = mat([[(0, 1)]], 1)
    G = TannerGraph(A)
    lab_f = labels(G, MessageSet(np.array([True]), np.array([False])))
    assert lab_f.check_label[0] == LABEL_F
    lab_u = labels(G, MessageSet(np.array([False]), np.array([False])))
    assert lab_u.check_label[0] == LABEL_S  # "all but one" of one message


def test_stats_totals_and_all_u_profile():
    p = EnsembleParams(n=100, k=3, q=2, d=2.0, seed=8)
    A = gen_base(p, p.make_rng())
    G = TannerGraph(A)
    st = stats(G, all_u_messages(G), k=3)
    assert sum(st.delta.values()) == G.n_vars
    assert sum(st.gamma.values()) == G.n_checks
    for (z, ell), c in st.delta.items():
        assert z == "u" and ell[1] == ell[2] == ell[3] == 0
    # every variable of degree c lands in profile (c, 0, 0, 0)
    deg_counts = np.bincount(G.var_degree)
    for deg, count in enumerate(deg_counts):
        if count:
            assert st.delta.get(("u", (deg, 0, 0, 0)), 0) == count


def test_alpha_fixed_point_unpinned_subcritical():
    p = EnsembleParams(n=1500, k=3, q=2, d=2.0, seed=15)
    A = gen_base(p, p.make_rng())
    G = TannerGraph(A)
    msgs = all_u_messages(G)
    assert is_alpha_fixed_point(G, msgs, 0.0, 2.0, 3, 0.1, 0.1)
    assert not is_alpha_fixed_point(G, msgs, 0.7, 2.0, 3, 0.1, 0.1)


def test_alpha_fixed_point_supercritical_iterate():
    from xorlab.theory import fixed_points

    p = EnsembleParams(n=4000, k=3, q=2, d=2.9, seed=16)
    A, _ = gen_pinned(p, p.make_rng())
    G = TannerGraph(A)
    msgs, converged, _ = wp_iterate(G, "all_f")
    assert converged
    alpha_hat = msgs.frozen_fraction
    a_f = fixed_points(2.9, 3)[2]
    assert abs(alpha_hat - a_f) < 0.05
    assert is_alpha_fixed_point(G, msgs, alpha_hat, 2.9, 3, 0.1, 0.1)


def test_extension_predicates():
    p = EnsembleParams(n=200, k=3, q=2, d=2.0, seed=23)
    A = gen_base(p, p.make_rng())
    G = TannerGraph(A)
    # all labels f: the zero vector extends at any tolerance
    from xorlab.wp import Labels

    lab_all_f = Labels(
        np.full(G.n_vars, LABEL_F, dtype=np.int8),
        np.full(G.n_checks, LABEL_F, dtype=np.int8),
    )
    zero = np.zeros(G.n_vars, dtype=np.int64)
    assert extension_defect(G, lab_all_f, zero, 2) <= 1e-9
    # all-u labelling: a balanced vector extends
    lab_all_u = labels(G, all_u_messages(G))
    balanced = np.arange(G.n_vars) % 2
    assert is_extension(G, lab_all_u, balanced, 2, tol=0.1)
    # all-ones vector against a half-frozen labelling fails for tol < 1/2
    half = labels(G, all_u_messages(G))
    half.var_label[: G.n_vars // 2] = LABEL_F
    ones = np.ones(G.n_vars, dtype=np.int64)
    assert not is_extension(G, half, ones, 2, tol=0.4)


def test_frozen_label_agreement_small():
    # on small pinned instances the label-based frozen set tracks the
    # exact one (Prop-style symmetric difference small)
    rng_seeds = range(12)
    total_sym = 0
    for seed in rng_seeds:
        p = EnsembleParams(n=60, k=3, q=2, d=2.0, seed=seed)
        A, _ = gen_pinned(p, p.make_rng())
        G = TannerGraph(A)
        std = standard_messages(A)
        lab = labels(G, std)
        by_labels = {j for j in range(G.n_vars) if lab.var_label[j] != LABEL_U}
        exact = set(frozen_set(A))
        total_sym += len(by_labels ^ exact)
    assert total_sym <= 0.1 * 60 * len(rng_seeds)


def test_message_csv_and_stats_json():
    A = PINNED_TRIANGLE
    G = TannerGraph(A)
    msgs = standard_messages(A)
    csv = messages_to_csv(G, msgs)
    assert csv.startswith("check,var,direction,value")
    assert len(csv.strip().splitlines()) == 1 + 2 * G.n_edges
    blob = stats_to_json_dict(stats(G, msgs, k=3))
    assert set(blob) == {
        "delta", "gamma", "n_vars", "n_checks", "off_class_vars", "off_class_checks",
    }
    for key in blob["delta"]:
        z, ell = key.split("/")
        assert z in "usf" and len(ell.split("-")) == 4
