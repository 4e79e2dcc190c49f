"""Random-cluster machinery: decomposition, exact laws, samplers, events."""

import math

import numpy as np
import pytest

from helpers import bfs_components, cluster_counts, fk_law_oracle, philox
from soc_ising import (
    BondConfig,
    FKParams,
    bernoulli_bonds,
    build_box,
    close_edges,
    decompose,
    event_D_n,
    event_Q_N,
    exact_fk_distribution,
    external_cluster_boundary,
    fk_weight,
    p_critical,
    sample_chain,
    single_bond_conditional,
    single_bond_heat_bath_sweep,
    swendsen_wang_step,
    tail_statistics,
    visit_counts,
)


def test_p_critical_values():
    assert abs(p_critical(1.0) - 0.5) < 1e-15
    assert abs(p_critical(2.0) - 0.5857864376269049) < 1e-14
    assert abs(p_critical(4.0) - 2.0 / 3.0) < 1e-15


def test_params_validation():
    with pytest.raises(ValueError):
        FKParams(p=-0.1, q=2.0, bc=1)
    with pytest.raises(ValueError):
        FKParams(p=0.5, q=0.0, bc=1)
    with pytest.raises(ValueError):
        FKParams(p=0.5, q=2.0, bc=2)


def test_bond_config_bitmask_roundtrip():
    g = build_box(3)
    rng = philox(5)
    for _ in range(20):
        mask = int(rng.integers(0, 1 << g.n_edges))
        omega = BondConfig.from_bitmask(g, mask)
        assert omega.to_bitmask() == mask
        assert omega.open_count() == bin(mask).count("1")
    assert BondConfig.all_open(g).open_count() == g.n_edges
    assert BondConfig.all_closed(g).open_count() == 0


def test_close_edges_leaves_original_untouched():
    g = build_box(3)
    omega = BondConfig.all_open(g)
    cut = close_edges(omega, [0, 3, 7])
    assert omega.open_count() == g.n_edges
    assert cut.open_count() == g.n_edges - 3
    assert cut.bonds[0] == 0 and cut.bonds[3] == 0 and cut.bonds[7] == 0


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5, 6])
def test_decompose_matches_bfs_oracle(seed):
    g = build_box(5)
    rng = philox(seed)
    omega = bernoulli_bonds(g, 0.55, rng)
    dec = decompose(omega)
    comps = bfs_components(g, omega.bonds)
    k0, k1 = cluster_counts(g, omega.bonds)
    assert dec.k0 == k0
    assert dec.k1 == k1
    assert sorted(dec.sizes.tolist()) == sorted(len(c) for c in comps)
    boundary = set(int(v) for v in g.boundary_ids)
    m_oracle = set().union(*(c for c in comps if c & boundary))
    assert dec.m_count == len(m_oracle)
    assert set(np.flatnonzero(dec.m_mask).tolist()) == m_oracle
    interior_oracle = sorted(len(c) for c in comps if not (c & boundary))
    assert sorted(dec.interior_sizes.tolist()) == interior_oracle
    assert dec.max_interior == (max(interior_oracle) if interior_oracle else 0)
    assert dec.sum_sq_interior == sum(s * s for s in interior_oracle)
    # members agree cluster by cluster
    for cid in range(dec.k0):
        members = set(dec.cluster_vertices(cid).tolist())
        assert members in [set(c) for c in comps]


def test_all_closed_counts():
    g = build_box(4)
    dec = decompose(BondConfig.all_closed(g))
    assert dec.k0 == 16
    assert dec.k1 == 4 + 1  # 4 interior singletons, merged boundary
    assert dec.unit_interior_count == 4
    assert dec.m_count == 12


def test_halfgrid_singleton_count():
    g = build_box(5)
    dec = decompose(BondConfig.all_closed(g))
    # interior singletons on the even 1-norm half-grid: 5 of 9
    assert dec.u_halfgrid == 5
    assert dec.unit_interior_count == 9


def test_fk_weight_hand_value():
    g = build_box(2)
    params = FKParams(p=0.6, q=3.0, bc=0)
    omega = BondConfig.all_closed(g)
    # 4 closed edges, 4 singleton clusters
    assert abs(fk_weight(omega, params) - 0.4 ** 4 * 3.0 ** 4) < 1e-15
    wired = FKParams(p=0.6, q=3.0, bc=1)
    # all 4 vertices are boundary: one merged cluster
    assert abs(fk_weight(omega, wired) - 0.4 ** 4 * 3.0) < 1e-15


@pytest.mark.parametrize("q", [1.0, 2.0, 3.5])
@pytest.mark.parametrize("bc", [0, 1])
def test_exact_distribution_matches_enumeration_oracle(q, bc):
    g = build_box(2)
    params = FKParams(p=0.6, q=q, bc=bc)
    dist = exact_fk_distribution(g, params)
    oracle = fk_law_oracle(g, 0.6, q, wired=bool(bc))
    assert np.abs(dist.probs - oracle).max() < 1e-14
    assert abs(dist.probs.sum() - 1.0) < 1e-12


def test_exact_distribution_product_case():
    # q = 1 is independent percolation whatever the boundary condition
    g = build_box(2)
    for bc in (0, 1):
        dist = exact_fk_distribution(g, FKParams(p=0.3, q=1.0, bc=bc))
        for e in range(g.n_edges):
            assert abs(dist.edge_marginal(e) - 0.3) < 1e-12


def test_prob_of_indexes_by_bitmask():
    g = build_box(2)
    params = FKParams(p=0.5, q=2.0, bc=1)
    dist = exact_fk_distribution(g, params)
    total = sum(dist.prob_of(BondConfig.from_bitmask(g, m))
                for m in range(1 << g.n_edges))
    assert abs(total - 1.0) < 1e-12


def test_single_bond_conditional_detailed_balance():
    # pi(x) K_e(x -> y) = pi(y) K_e(y -> x) for every edge and state
    g = build_box(2)
    for bc in (0, 1):
        params = FKParams(p=0.6, q=2.0, bc=bc)
        dist = exact_fk_distribution(g, params)
        for mask in range(1 << g.n_edges):
            for e in range(g.n_edges):
                x = BondConfig.from_bitmask(g, mask)
                y = BondConfig.from_bitmask(g, mask ^ (1 << e))
                px = single_bond_conditional(x, e, params)
                py = single_bond_conditional(y, e, params)
                # conditional prob of the edge being open given the rest
                x_open = (mask >> e) & 1
                kxy = px if not x_open else 1.0 - px
                kyx = py if x_open else 1.0 - py
                lhs = dist.prob_of(x) * kxy
                rhs = dist.prob_of(y) * kyx
                assert abs(lhs - rhs) < 1e-14


@pytest.mark.parametrize("method", ["sw", "single-bond"])
@pytest.mark.parametrize("bc", [0, 1])
def test_sampler_visits_match_exact_law(method, bc):
    g = build_box(2)
    params = FKParams(p=0.6, q=2.0, bc=bc)
    dist = exact_fk_distribution(g, params)
    omega0 = BondConfig.all_open(g)
    counts = visit_counts(omega0, params, 60000, philox(97, bc), method=method)
    emp = counts / counts.sum()
    tv = 0.5 * np.abs(emp - dist.probs).sum()
    assert tv < 0.03


def test_swendsen_wang_needs_q2():
    g = build_box(2)
    params = FKParams(p=0.5, q=3.0, bc=1)
    with pytest.raises(ValueError):
        swendsen_wang_step(BondConfig.all_open(g), params, philox(1))


def test_single_bond_sweep_q1_is_fresh_bernoulli():
    g = build_box(3)
    params = FKParams(p=0.25, q=1.0, bc=0)
    rng = philox(31)
    omega = BondConfig.all_closed(g)
    total = 0
    for _ in range(4000):
        omega = single_bond_heat_bath_sweep(omega, params, rng)
        total += omega.open_count()
    mean_density = total / (4000 * g.n_edges)
    assert abs(mean_density - 0.25) < 0.01


def test_sample_chain_is_reproducible():
    g = build_box(4)
    params = FKParams(p=0.55, q=2.0, bc=1)
    run1 = sample_chain(BondConfig.all_open(g), params, 10, 20, 3, philox(7))
    run2 = sample_chain(BondConfig.all_open(g), params, 10, 20, 3, philox(7))
    assert [w.to_bitmask() for w in run1] == [w.to_bitmask() for w in run2]


def test_tail_statistics_geometric_oracle():
    # geometric sizes have exactly exponential tails with rate -log(rho)
    rng = philox(12)
    rho = 0.6
    sizes = rng.geometric(1.0 - rho, size=40000)
    fit = tail_statistics(sizes, min_hits=80)
    assert not fit.degenerate
    assert abs(fit.psi_hat - (-math.log(rho))) < 0.03
    assert fit.ci_low < fit.psi_hat < fit.ci_high


def test_tail_statistics_degenerate_cases():
    assert tail_statistics([2] * 500).degenerate  # no decay in the window
    assert tail_statistics([1, 2, 3]).degenerate  # window too thin
    with pytest.raises(ValueError):
        tail_statistics([])


def test_tail_statistics_from_decompositions():
    g = build_box(3)
    rng = philox(44)
    decs = [decompose(bernoulli_bonds(g, 0.4, rng)) for _ in range(300)]
    v = g.vertex_id(0, 0)
    fit = tail_statistics(decs, v=v, min_hits=30)
    sizes = [d.cluster_size_of(v) for d in decs]
    fit2 = tail_statistics(sizes, min_hits=30)
    assert fit.psi_hat == fit2.psi_hat
    with pytest.raises(ValueError):
        tail_statistics(decs)  # vertex id required


def test_event_D_n_hand_cases():
    g = build_box(4)
    dec = decompose(BondConfig.all_open(g))
    # a single cluster of 16 = n^2; mass 16 against amp * n^2
    assert event_D_n(dec, 1.0, 1.0, 2.0)
    assert not event_D_n(dec, 1.1, 1.0, 2.0)
    # threshold above the cluster size: nothing qualifies
    assert not event_D_n(dec, 0.1, 2.1, 0.0)


def test_event_Q_N_hand_cases():
    g = build_box(4)
    closed = decompose(BondConfig.all_closed(g))
    # sixteen singletons: any three vertices sit in distinct unit clusters
    assert event_Q_N(closed, [(0, 1), (1, 1), (2, 1)])
    assert not event_Q_N(closed, [(0, 2), (1, 1)])
    full = decompose(BondConfig.all_open(g))
    assert event_Q_N(full, [(0, 16)])
    # two vertices of the same cluster are not distinct witnesses
    assert not event_Q_N(full, [(0, 1), (1, 1)])


def test_external_cluster_boundary_singleton():
    g = build_box(5)
    v = g.vertex_id(0, 0)
    edges = external_cluster_boundary([v], g)
    incident = sorted(
        e for e in range(g.n_edges)
        if v in (int(g.edge_a[e]), int(g.edge_b[e]))
    )
    assert edges.tolist() == incident


def test_external_cluster_boundary_excludes_holes():
    # ring of 8 vertices around the origin: the 4 edges into the hole are
    # unreachable from outside and must not appear
    g = build_box(7)
    ring = [g.vertex_id(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
            if (dx, dy) != (0, 0)]
    edges = external_cluster_boundary(ring, g)
    center = g.vertex_id(0, 0)
    for e in edges.tolist():
        assert center not in (int(g.edge_a[e]), int(g.edge_b[e]))
    assert len(edges) == 12
    assert edges.tolist() == sorted(edges.tolist())
