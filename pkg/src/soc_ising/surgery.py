"""Cluster surgery: closing a small set of edges to steer the number of
boundary-connected vertices to an exact target, plus the event checkers
and the sign-compensation estimates built on top of it.

The pipeline runs in three stages.  A pigeonhole argument over disjoint
annuli picks a cheap cut H0; a greedy pass extracts a maximal subset H1
whose closure keeps the boundary-connected count at or above the target,
and the first rejected edge e witnesses that one more closure overshoots;
finally the cluster that e would sever is trimmed to the exact overshoot m
by cutting around a breadth-first ball, with e itself left open.  The net
count then lands on the target exactly.
"""

import math
from dataclasses import dataclass, field
from collections import deque
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .lattice import BoxGeometry
from .fk import BondConfig, ClusterDecomposition, decompose, close_edges
from .soc import theta_asymptotic


@dataclass
class EventParams:
    """Shared parameters of the large-box events: the feedback exponent a,
    the inner box side n1 = floor(5n/6), the interior-cluster size cap
    n^(33/2 - 8a) with its integer floor N, the scale triple
    (lam, mu, nu) = (4, 3, 2), the tolerance delta, and the surgery budget
    constant K."""

    n: int
    a: float
    delta: float = 1.0 / 6.0
    K: float = 1.0
    lam: int = field(default=4, init=False)
    mu: int = field(default=3, init=False)
    nu: int = field(default=2, init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("side must be >= 1")
        if not 31.0 / 16.0 < self.a < 2.0:
            raise ValueError("exponent a must lie in (31/16, 2)")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.K <= 0:
            raise ValueError("K must be positive")
        assert self.lam > self.mu > self.nu

    @property
    def s(self) -> float:
        return 16.0 - 8.0 * self.a

    @property
    def n1(self) -> int:
        return (5 * self.n) // 6

    @property
    def size_cap(self) -> float:
        """Interior-cluster size cap n^(33/2 - 8a) = n^(s + 1/2)."""
        return float(self.n) ** (16.5 - 8.0 * self.a)

    @property
    def N(self) -> int:
        return math.floor(self.size_cap)

    @property
    def h_budget(self) -> float:
        """Edge budget K n^(a/2) allowed to the surgery."""
        return self.K * float(self.n) ** (self.a / 2.0)


def annulus_cut_H0(omega: BondConfig, n1: int | None = None) -> tuple[int, np.ndarray]:
    """Cheapest annulus cut: the half-index j in [ceil(n1/2), floor((n-2)/2)]
    whose annulus edge set meets the fewest edges spanned by the
    boundary-connected vertices, together with that intersection.

    Pigeonhole over the disjoint annuli gives |H0| <= |spanned edges| / L
    with L the number of admissible j.
    """
    g = omega.g
    n = g.n
    if n < 12:
        raise ValueError("annulus cut needs side >= 12")
    if n1 is None:
        n1 = (5 * n) // 6
    jlo = -((-n1) // 2)
    jhi = (n - 2) // 2
    if jlo > jhi:
        raise ValueError("empty annulus range")
    dec = decompose(omega)
    mm = dec.m_mask
    spanned = mm[g.edge_a] & mm[g.edge_b]
    best_j, best_ids = -1, None
    for j in range(jlo, jhi + 1):
        ids = g.annulus_edges(2 * j)
        hit = ids[spanned[ids]]
        if best_ids is None or hit.size < best_ids.size:
            best_j, best_ids = j, hit
    return best_j, best_ids


def maximal_subset_H1(omega: BondConfig, h0, target: int) -> tuple[np.ndarray, int]:
    """Greedy maximal subset H1 of h0 whose closure keeps the number of
    boundary-connected vertices >= target, and the first rejected edge e.

    Greedy in increasing edge order; since closing extra edges only shrinks
    the boundary-connected set, every rejected edge still overshoots when
    added to the final H1, so e witnesses maximality.
    """
    g = omega.g
    h0 = np.asarray(sorted(int(e) for e in h0), dtype=np.int64)
    m0 = decompose(close_edges(omega, h0)).m_count
    m_full = decompose(omega).m_count
    if not m0 < target <= m_full:
        raise ValueError(
            f"greedy cut needs count after full closure ({m0}) < target "
            f"({target}) <= count before ({m_full})"
        )
    cur = omega.copy()
    kept = []
    witness = -1
    for e in h0:
        cur.bonds[e] = 0
        if decompose(cur).m_count >= target:
            kept.append(int(e))
        else:
            cur.bonds[e] = 1
            if witness < 0:
                witness = int(e)
    # m0 < target guarantees at least one rejection
    assert witness >= 0
    return np.array(kept, dtype=np.int64), witness


def exact_cut_H2(g: BoxGeometry, cluster, edges, v: int, m: int) -> np.ndarray:
    """Cut edges so that the component of v inside the given cluster keeps
    exactly m vertices.

    The kept set is the first m vertices of a breadth-first traversal from
    v (neighbors visited in increasing vertex order), which is always
    connected; H2 is every open edge leaving it within the cluster.
    """
    cset = {int(x) for x in cluster}
    eids = [int(e) for e in edges]
    if int(v) not in cset:
        raise ValueError("v must belong to the cluster")
    if not 1 <= m <= len(cset):
        raise ValueError(f"kept size m={m} outside 1..{len(cset)}")
    adj: dict[int, list[int]] = {u: [] for u in cset}
    for e in eids:
        x, y = int(g.edge_a[e]), int(g.edge_b[e])
        if x not in cset or y not in cset:
            raise ValueError("edge endpoints must lie in the cluster")
        adj[x].append(y)
        adj[y].append(x)
    order = []
    seen = {int(v)}
    queue = deque([int(v)])
    while queue:
        u = queue.popleft()
        order.append(u)
        for w in sorted(adj[u]):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(order) != len(cset):
        raise ValueError("cluster is not connected by the given edges")
    kept = set(order[:m])
    h2 = [e for e in eids
          if (int(g.edge_a[e]) in kept) != (int(g.edge_b[e]) in kept)]
    return np.array(sorted(h2), dtype=np.int64)


@dataclass
class SurgeryResult:
    """Outcome of the three-stage cut toward target = ceil((|M| + b) / 2)."""

    success: bool
    stage: str
    b: int
    target: int
    m_before: int
    m_after: int
    j_star: int = -1
    h0: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64), repr=False)
    h1: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64), repr=False)
    h2: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64), repr=False)
    h: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64), repr=False)
    witness_edge: int = -1
    fine_m: int = 0
    disconnected: list = field(default_factory=list, repr=False)
    c0_sizes: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64), repr=False)
    parity_unit: int = -1
    identity_ok: bool = False
    cap_ok: bool = False
    units_ok: bool = False
    budget_used: float = 0.0

    def to_record(self) -> dict:
        return {
            "success": self.success,
            "stage": self.stage,
            "b": self.b,
            "target": self.target,
            "m_before": self.m_before,
            "m_after": self.m_after,
            "j_star": self.j_star,
            "h0": [int(e) for e in self.h0],
            "h1": [int(e) for e in self.h1],
            "h2": [int(e) for e in self.h2],
            "h": [int(e) for e in self.h],
            "h0_size": int(self.h0.size),
            "h1_size": int(self.h1.size),
            "h2_size": int(self.h2.size),
            "h_size": int(self.h.size),
            "witness_edge": self.witness_edge,
            "fine_m": self.fine_m,
            "c0_sizes": [int(s) for s in self.c0_sizes],
            "parity_unit": self.parity_unit,
            "identity_ok": self.identity_ok,
            "cap_ok": self.cap_ok,
            "units_ok": self.units_ok,
            "budget_used": self.budget_used,
        }


def surgery(omega: BondConfig, b: int, params: EventParams) -> SurgeryResult:
    """Close edges among those spanned by the boundary-connected set so that
    exactly ceil((|M| + b) / 2) vertices stay connected to the boundary,
    then collect the severed clusters.

    The severed set plus (when |M| + b is odd) one pre-existing interior
    unit cluster satisfies count-after minus severed mass = b.  The two
    cap conditions on interior clusters (max size <= the size cap, enough
    interior singletons left over) describe the ambient configuration and
    are reported, not required, for success.
    """
    g = omega.g
    if b < 0:
        raise ValueError("target level b must be >= 0")
    dec0 = decompose(omega)
    m_before = dec0.m_count
    target = -((-(m_before + b)) // 2)
    need_unit = (m_before + b) % 2 == 1

    def failure(stage, **kw):
        return SurgeryResult(success=False, stage=stage, b=b, target=target,
                             m_before=m_before, m_after=m_before, **kw)

    if target > m_before:
        return failure("target-above-count")

    h0 = np.empty(0, dtype=np.int64)
    h1 = np.empty(0, dtype=np.int64)
    h2 = np.empty(0, dtype=np.int64)
    j_star, witness, fine_m = -1, -1, 0

    if target == m_before:
        omega_h = omega.copy()
    else:
        try:
            j_star, h0 = annulus_cut_H0(omega, params.n1)
        except ValueError:
            return failure("annulus-precondition")
        try:
            h1, witness = maximal_subset_H1(omega, h0, target)
        except ValueError:
            return failure("greedy-precondition", j_star=j_star, h0=h0)
        omega_h1 = close_edges(omega, h1)
        m_h1 = decompose(omega_h1).m_count
        if m_h1 == target:
            omega_h = omega_h1
        else:
            omega_we = close_edges(omega_h1, [witness])
            dec_we = decompose(omega_we)
            va, vb = int(g.edge_a[witness]), int(g.edge_b[witness])
            # exactly one endpoint loses boundary contact
            v = va if not dec_we.m_mask[va] else vb
            if dec_we.m_mask[v]:
                return failure("witness-no-drop", j_star=j_star, h0=h0, h1=h1,
                               witness_edge=witness)
            cluster = dec_we.cluster_vertices(int(dec_we.labels[v]))
            fine_m = target - dec_we.m_count
            if not 1 <= fine_m <= cluster.size:
                return failure("fine-cut-range", j_star=j_star, h0=h0, h1=h1,
                               witness_edge=witness, fine_m=fine_m)
            inc = set(int(x) for x in cluster)
            e_v = [e for e in np.flatnonzero(omega_we.bonds)
                   if int(g.edge_a[e]) in inc and int(g.edge_b[e]) in inc]
            h2 = exact_cut_H2(g, cluster, e_v, v, fine_m)
            omega_h = close_edges(omega_h1, h2)

    h = np.array(sorted(set(map(int, h1)) | set(map(int, h2))), dtype=np.int64)
    dec_h = decompose(omega_h)
    m_after = dec_h.m_count
    if m_after != target:
        return failure("count-mismatch", j_star=j_star, h0=h0, h1=h1, h2=h2,
                       witness_edge=witness, fine_m=fine_m)

    # newly severed clusters: interior in omega_h, made of formerly
    # boundary-connected vertices
    c0 = []
    for cid in dec_h.interior_cluster_ids:
        members = dec_h.cluster_vertices(int(cid))
        if dec0.m_mask[members[0]]:
            c0.append(members)
    parity_unit = -1
    if need_unit:
        units = [int(v) for v in np.flatnonzero(~g.boundary_mask)
                 if dec0.cluster_size_of(int(v)) == 1]
        if not units:
            return failure("parity-unit-missing", j_star=j_star, h0=h0, h1=h1,
                           h2=h2, witness_edge=witness, fine_m=fine_m)
        parity_unit = min(units)
        c0.append(np.array([parity_unit], dtype=np.int64))

    c0_sizes = np.array([c.size for c in c0], dtype=np.int64)
    identity_ok = m_after - int(c0_sizes.sum()) == b

    c0_ids = {int(dec_h.labels[c[0]]) for c in c0}
    out_sizes = [int(dec_h.sizes[cid]) for cid in dec_h.interior_cluster_ids
                 if int(cid) not in c0_ids]
    cap_ok = (max(out_sizes) if out_sizes else 0) <= params.size_cap
    units_left = sum(1 for s in out_sizes if s == 1)
    units_ok = units_left >= params.size_cap

    return SurgeryResult(
        success=identity_ok, stage="ok" if identity_ok else "identity-mismatch",
        b=b, target=target, m_before=m_before, m_after=m_after,
        j_star=j_star, h0=h0, h1=h1, h2=h2, h=h,
        witness_edge=witness, fine_m=fine_m,
        disconnected=c0, c0_sizes=c0_sizes, parity_unit=parity_unit,
        identity_ok=identity_ok, cap_ok=cap_ok, units_ok=units_ok,
        budget_used=h.size / float(g.n) ** (params.a / 2.0),
    )


def event_G_n(omega: BondConfig | ClusterDecomposition, params: EventParams) -> bool:
    """Regular-configuration event: boundary-connected mass at most 4 n^a,
    at least 2 n^a of it inside the inner box, interior clusters no larger
    than the size cap, and strictly more interior singletons than the cap."""
    dec = decompose(omega) if isinstance(omega, BondConfig) else omega
    g = dec.g
    na = float(g.n) ** params.a
    if dec.m_count > 4.0 * na:
        return False
    inner = dec.m_mask & g.sub_box_mask(params.n1)
    if inner.sum() < 2.0 * na:
        return False
    cap = params.size_cap
    return dec.max_interior <= cap <= dec.unit_interior_count - 1


def event_R_n(omega: BondConfig, b: int, params: EventParams) -> bool:
    """Witness-certified: the surgery exhibits H with |H| <= K n^(a/2)
    reaching the half-way count, and the ambient config satisfies the
    interior-cluster caps.  Sound but not complete: a false return means no
    witness was found, not that none exists."""
    dec = decompose(omega)
    cap = params.size_cap
    if not (dec.max_interior <= cap <= dec.unit_interior_count - 1):
        return False
    res = surgery(omega, b, params)
    return res.success and res.h.size <= params.h_budget


def event_S_n(omega: BondConfig, b: int, params: EventParams, c0) -> bool:
    """Does the witness family c0 of interior clusters certify the
    post-surgery event: at most 2 K n^(a/2) clusters whose removal from the
    boundary-connected count leaves exactly b, every other interior cluster
    at most the size cap, and at least the cap's worth of interior
    singletons left outside c0."""
    dec = decompose(omega)
    c0 = list(c0)
    c0_ids = set()
    total = 0
    for cluster in c0:
        members = np.unique(np.asarray(list(cluster), dtype=np.int64))
        labels = dec.labels[members]
        cid = int(labels[0])
        if (labels != cid).any():
            return False  # vertices from more than one cluster
        if dec.touches_boundary[cid] or int(dec.sizes[cid]) != members.size:
            return False  # not a whole interior cluster of this configuration
        c0_ids.add(cid)
        total += members.size
    if len(c0_ids) != len(c0):
        return False
    if len(c0_ids) > 2.0 * params.K * float(dec.g.n) ** (params.a / 2.0):
        return False
    if dec.m_count - total != b:
        return False
    out = [int(dec.sizes[cid]) for cid in dec.interior_cluster_ids
           if int(cid) not in c0_ids]
    cap = params.size_cap
    if (max(out) if out else 0) > cap:
        return False
    return sum(1 for s in out if s == 1) >= cap


def fss_conditions(omega: BondConfig | ClusterDecomposition, params: EventParams,
                   p: float) -> tuple[bool, bool, bool]:
    """The three finite-size scaling clauses at bond density p, with the
    near-critical surrogate standing in for the connectivity function:
    upper bound on the boundary-connected mass, size cap on interior
    clusters, lower bound on the mass inside the inner box."""
    dec = decompose(omega) if isinstance(omega, BondConfig) else omega
    g = dec.g
    theta = theta_asymptotic(p)
    c1 = dec.m_count <= (1.0 + params.delta) * theta * g.n * g.n
    c2 = dec.max_interior <= float(g.n) ** (params.s + 0.5)
    inner = int((dec.m_mask & g.sub_box_mask(params.n1)).sum())
    n1side = int(g.sub_box_mask(params.n1).sum())
    c3 = inner >= (1.0 - params.delta) * theta * n1side
    return c1, c2, c3


def event_F_n(omega: BondConfig | ClusterDecomposition, params: EventParams,
              p: float) -> bool:
    """Conjunction of the three finite-size scaling clauses."""
    c1, c2, c3 = fss_conditions(omega, params, p)
    return c1 and c2 and c3


_DP_CELL_BUDGET = 2 * 10 ** 7


def sign_compensation_probability(sizes) -> Fraction | float:
    """Probability that independent fair signs on the given sizes sum to 0.

    Dynamic program over partial-sum distributions; exact rationals while
    the total mass is <= 64, floating point beyond.  The table is capped at
    count x span <= 2e7 cells.
    """
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    total = sum(sizes)
    if total == 0:
        return Fraction(1)
    if len(sizes) * (2 * total + 1) > _DP_CELL_BUDGET:
        raise ValueError("DP budget exceeded")
    if total % 2 == 1:
        return Fraction(0)
    if total <= 64:
        dist = {0: Fraction(1)}
        for s in sizes:
            new: dict[int, Fraction] = {}
            for v, pr in dist.items():
                half = pr / 2
                new[v + s] = new.get(v + s, Fraction(0)) + half
                new[v - s] = new.get(v - s, Fraction(0)) + half
            dist = new
        return dist.get(0, Fraction(0))
    probs = np.zeros(2 * total + 1)
    probs[total] = 1.0
    for s in sizes:
        new = np.zeros_like(probs)
        new[s:] += 0.5 * probs[: probs.size - s]
        new[: probs.size - s] += 0.5 * probs[s:]
        probs = new
    return float(probs[total])


def forced_sign(x: int) -> int:
    """Sign pulled toward zero: +1 when x <= 0, else -1."""
    return 1 if x <= 0 else -1


@lru_cache(maxsize=1)
def stirling_constant(kmax: int = 10 ** 6) -> float:
    """Largest K2 with C(2k, k) 4^(-k) >= K2 / sqrt(2k) for all k <= kmax.

    The normalized central binomial sqrt(2k) C(2k,k) 4^(-k) increases from
    sqrt(2)/2 toward sqrt(2/pi), so the minimum sits at k = 1; computed by
    scanning anyway, as the constructive definition demands.
    """
    k = np.arange(1, kmax + 1, dtype=np.float64)
    logc = gammaln(2 * k + 1) - 2 * gammaln(k + 1) - k * math.log(4.0)
    return float(np.exp(logc + 0.5 * np.log(2 * k)).min())


@dataclass
class WalkBoundReport:
    """Exact (or sampled) probabilities that the partial signed sums stay
    within [-N, N], against the lower bound (K2 / 2n)^j."""

    js: np.ndarray
    probs: np.ndarray
    bounds: np.ndarray
    holds: bool
    parity_ok: bool
    k2: float
    method: str


def compensation_walk_bound_check(sizes, N: int, n: int,
                                  rng: np.random.Generator | None = None,
                                  trials: int = 0) -> WalkBoundReport:
    """Check P(|S_j| <= N) >= (K2/(2n))^j for j = 0..N, where S_j is the
    signed sum of the clusters of size <= j under independent fair signs.

    Exact dynamic programming when the sum distribution fits the table
    budget, Monte Carlo otherwise (pass rng and trials).  Also reports the
    parity identity: N - S_N is even exactly when N matches the total mass
    parity, which the surrounding construction arranges.
    """
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    if any(s > N for s in sizes):
        raise ValueError("every size must be <= N")
    k2 = stirling_constant()
    total = sum(sizes)
    js = np.arange(0, N + 1)
    bounds = (k2 / (2.0 * n)) ** js.astype(float)
    counts = np.bincount(np.array(sizes or [0]), minlength=N + 1)
    if sizes:
        counts[0] = 0

    if (2 * total + 1) <= 2 * 10 ** 6:
        method = "dp"
        probs = np.zeros(N + 1)
        dist = np.zeros(2 * total + 1)
        dist[total] = 1.0
        probs[0] = 1.0
        for j in range(1, N + 1):
            for _ in range(int(counts[j])):
                new = np.zeros_like(dist)
                new[j:] += 0.5 * dist[: dist.size - j]
                new[: dist.size - j] += 0.5 * dist[j:]
                dist = new
            window = np.arange(-total, total + 1)
            probs[j] = float(dist[np.abs(window) <= N].sum())
    else:
        if rng is None or trials <= 0:
            raise ValueError("instance too large for DP; pass rng and trials")
        method = "mc"
        order = np.argsort(sizes, kind="stable")
        svals = np.array(sizes, dtype=np.int64)[order]
        eps = 2 * rng.integers(0, 2, size=(trials, len(sizes))) - 1
        contrib = eps * svals
        cum = np.cumsum(contrib, axis=1)
        probs = np.empty(N + 1)
        probs[0] = 1.0
        for j in range(1, N + 1):
            upto = int(np.searchsorted(svals, j, side="right"))
            sj = cum[:, upto - 1] if upto > 0 else np.zeros(trials)
            probs[j] = float((np.abs(sj) <= N).mean())

    holds = bool((probs >= bounds - 1e-12).all())
    parity_ok = (N - total) % 2 == 0
    return WalkBoundReport(js=js, probs=probs, bounds=bounds, holds=holds,
                           parity_ok=parity_ok, k2=k2, method=method)
