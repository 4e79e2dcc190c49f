"""Random-cluster (FK) configurations on the box: decomposition, exact law,
samplers, cluster events.

Bond configurations live on the box edge list (1 = open).  Free boundary
counts every open cluster; wired counts all boundary-touching vertices as a
single cluster.  Cluster decompositions are computed by union-find and carry
the observables used throughout: boundary-connected set, interior cluster
sizes, singleton counts.
"""

import math
from dataclasses import dataclass, field
from collections import deque

import numpy as np

from .lattice import BoxGeometry, build_box


def p_critical(q: float) -> float:
    """Self-dual point sqrt(q) / (1 + sqrt(q)) of the random-cluster model."""
    if q < 1:
        raise ValueError("cluster weight q must be >= 1")
    r = math.sqrt(q)
    return r / (1.0 + r)


@dataclass
class FKParams:
    """Edge probability p, cluster weight q, boundary condition (0 free, 1 wired)."""

    p: float
    q: float
    bc: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.bc not in (0, 1):
            raise ValueError("bc must be 0 (free) or 1 (wired)")


class BondConfig:
    """Open/closed assignment per edge, in the deterministic edge order."""

    __slots__ = ("g", "bonds")

    def __init__(self, g: BoxGeometry, bonds):
        bonds = np.asarray(bonds, dtype=np.uint8)
        if bonds.shape != (g.n_edges,):
            raise ValueError("bond array has wrong length")
        if bonds.size and bonds.max() > 1:
            raise ValueError("bonds must be 0 or 1")
        self.g = g
        self.bonds = bonds

    @classmethod
    def all_open(cls, g: BoxGeometry) -> "BondConfig":
        return cls(g, np.ones(g.n_edges, dtype=np.uint8))

    @classmethod
    def all_closed(cls, g: BoxGeometry) -> "BondConfig":
        return cls(g, np.zeros(g.n_edges, dtype=np.uint8))

    @classmethod
    def from_bitmask(cls, g: BoxGeometry, mask: int) -> "BondConfig":
        bits = (mask >> np.arange(g.n_edges)) & 1
        return cls(g, bits.astype(np.uint8))

    def to_bitmask(self) -> int:
        return int((self.bonds.astype(np.int64) << np.arange(self.g.n_edges)).sum())

    def open_count(self) -> int:
        return int(self.bonds.sum())

    def copy(self) -> "BondConfig":
        return BondConfig(self.g, self.bonds.copy())

    def key(self) -> bytes:
        return self.bonds.tobytes()


def close_edges(omega: BondConfig, edge_ids) -> BondConfig:
    """New configuration with the given edges closed (ids validated)."""
    ids = np.asarray(list(edge_ids), dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= omega.g.n_edges):
        raise ValueError("edge id out of range")
    bonds = omega.bonds.copy()
    bonds[ids] = 0
    return BondConfig(omega.g, bonds)


class DisjointSet:
    """Union-find over 0..n-1 with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, v: int) -> int:
        parent = self.parent
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


class ClusterDecomposition:
    """Connected components of the open subgraph, with the derived counts.

    Cluster ids are assigned by first appearance in vertex order, so the
    labelling is deterministic for a given configuration.  k0 counts every
    cluster; k1 counts the boundary-touching ones as a single merged cluster
    (interior clusters + 1).
    """

    def __init__(self, g: BoxGeometry, labels: np.ndarray):
        self.g = g
        self.labels = labels
        self.n_clusters = int(labels.max()) + 1 if labels.size else 0
        self.sizes = np.bincount(labels, minlength=self.n_clusters)
        touches = np.zeros(self.n_clusters, dtype=bool)
        touches[labels[g.boundary_ids]] = True
        self.touches_boundary = touches
        self.m_mask = touches[labels]
        self.m_count = int(self.m_mask.sum())
        self.interior_cluster_ids = np.flatnonzero(~touches)
        self.interior_sizes = self.sizes[self.interior_cluster_ids]
        self._members: list[np.ndarray] | None = None

    @property
    def k0(self) -> int:
        return self.n_clusters

    @property
    def k1(self) -> int:
        return len(self.interior_cluster_ids) + 1

    @property
    def max_interior(self) -> int:
        return int(self.interior_sizes.max()) if self.interior_sizes.size else 0

    @property
    def sum_sq_interior(self) -> int:
        return int((self.interior_sizes.astype(np.int64) ** 2).sum())

    @property
    def unit_interior_count(self) -> int:
        """Number of interior singleton clusters."""
        return int((self.interior_sizes == 1).sum())

    @property
    def u_halfgrid(self) -> int:
        """Interior singletons at even 1-norm sites (one half of the grid)."""
        v = np.flatnonzero(self.g.halfgrid_mask)
        return int((self.sizes[self.labels[v]] == 1).sum())

    def cluster_size_of(self, v: int) -> int:
        return int(self.sizes[self.labels[v]])

    def cluster_vertices(self, cid: int) -> np.ndarray:
        if self._members is None:
            order = np.argsort(self.labels, kind="stable")
            splits = np.cumsum(self.sizes)[:-1]
            self._members = np.split(order, splits)
        return self._members[cid]

    def interior_clusters(self) -> list[frozenset]:
        return [
            frozenset(int(v) for v in self.cluster_vertices(int(c)))
            for c in self.interior_cluster_ids
        ]

    def by_size(self, interior_only: bool = False) -> dict[int, int]:
        sizes = self.interior_sizes if interior_only else self.sizes
        out: dict[int, int] = {}
        for s in sizes:
            out[int(s)] = out.get(int(s), 0) + 1
        return out


def decompose(omega: BondConfig) -> ClusterDecomposition:
    """Cluster decomposition of the open subgraph (union-find)."""
    g = omega.g
    nsq = g.n * g.n
    ds = DisjointSet(nsq)
    open_ids = np.flatnonzero(omega.bonds)
    ea = g.edge_a[open_ids].tolist()
    eb = g.edge_b[open_ids].tolist()
    for a, b in zip(ea, eb):
        ds.union(a, b)
    labels = np.empty(nsq, dtype=np.int64)
    seen: dict[int, int] = {}
    for v in range(nsq):
        r = ds.find(v)
        if r not in seen:
            seen[r] = len(seen)
        labels[v] = seen[r]
    return ClusterDecomposition(g, labels)


def fk_weight(omega: BondConfig, params: FKParams) -> float:
    """Unnormalized random-cluster weight q^clusters p^open (1-p)^closed."""
    dec = decompose(omega)
    k = dec.k1 if params.bc == 1 else dec.k0
    o = omega.open_count()
    return (params.q ** k) * (params.p ** o) * ((1.0 - params.p) ** (omega.g.n_edges - o))


@dataclass
class FKDistribution:
    """Exact law over all 2^E bond configurations (bit e of the index = edge e).

    probs[mask] is the probability of the configuration whose open set is the
    bitmask; z is the partition sum of unnormalized weights.
    """

    g: BoxGeometry = field(repr=False)
    params: FKParams
    probs: np.ndarray = field(repr=False)
    z: float

    def prob_of(self, omega: BondConfig | int) -> float:
        mask = omega if isinstance(omega, (int, np.integer)) else omega.to_bitmask()
        return float(self.probs[mask])

    def edge_marginal(self, e: int) -> float:
        p = self.probs.reshape(1 << (self.g.n_edges - e - 1), 2, 1 << e)
        return float(p[:, 1, :].sum())


def _component_counts(g: BoxGeometry, mask: int, ea, eb) -> tuple[int, int]:
    """(k0, k1) for the open set given as a bitmask."""
    nsq = g.n * g.n
    parent = list(range(nsq + 1))

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    unions0 = 0
    m = mask
    e = 0
    while m:
        if m & 1:
            ra, rb = find(ea[e]), find(eb[e])
            if ra != rb:
                parent[rb] = ra
                unions0 += 1
        m >>= 1
        e += 1
    k0 = nsq - unions0
    # glue the boundary into the virtual vertex nsq
    unions1 = 0
    for v in g.boundary_ids:
        ra, rb = find(int(v)), find(nsq)
        if ra != rb:
            parent[rb] = ra
            unions1 += 1
    k1 = (nsq + 1) - unions0 - unions1
    return k0, k1


def exact_fk_distribution(g: BoxGeometry | int, params: FKParams) -> FKDistribution:
    """Exact finite-volume law by enumerating all bond configurations.

    Supported up to 24 edges (side 4); the side-4 table takes minutes and
    ~134 MB, tests stay at side <= 3.
    """
    if isinstance(g, (int, np.integer)):
        g = build_box(int(g))
    ne = g.n_edges
    if ne > 24:
        raise ValueError("exact enumeration limited to <= 24 edges (side <= 4)")
    ea = g.edge_a.tolist()
    eb = g.edge_b.tolist()
    p, q, bc = params.p, params.q, params.bc
    weights = np.empty(1 << ne, dtype=np.float64)
    for mask in range(1 << ne):
        o = mask.bit_count()
        k0, k1 = _component_counts(g, mask, ea, eb)
        k = k1 if bc == 1 else k0
        weights[mask] = (q ** k) * (p ** o) * ((1.0 - p) ** (ne - o))
    z = float(weights.sum())
    return FKDistribution(g=g, params=params, probs=weights / z, z=z)


def swendsen_wang_step(omega: BondConfig, params: FKParams, rng: np.random.Generator) -> BondConfig:
    """One cluster-update step targeting the q = 2 random-cluster law.

    Interior clusters draw independent fair signs (in cluster-id order);
    under the wired condition every boundary-touching cluster acts as one
    merged cluster and takes the plus sign, while under the free condition
    boundary clusters draw signs like any other.  Edges joining equal signs
    reopen with probability p, all others close.
    """
    if params.q != 2:
        raise ValueError("cluster step is specific to q = 2")
    g = omega.g
    dec = decompose(omega)
    k = dec.n_clusters
    if params.bc == 1:
        signs = np.ones(k, dtype=np.int8)
        ids = dec.interior_cluster_ids
        if ids.size:
            signs[ids] = (2 * rng.integers(0, 2, size=ids.size) - 1).astype(np.int8)
    else:
        signs = (2 * rng.integers(0, 2, size=k) - 1).astype(np.int8)
    spins = signs[dec.labels]
    eq = spins[g.edge_a] == spins[g.edge_b]
    u = rng.random(g.n_edges)
    return BondConfig(g, (eq & (u < params.p)).astype(np.uint8))


def _connected_without(omega: BondConfig, e: int, wired: bool) -> bool:
    """Are the endpoints of edge e connected by open edges other than e?

    Under the wired condition the boundary acts as a single glued vertex.
    """
    g = omega.g
    bonds = omega.bonds
    a, b = int(g.edge_a[e]), int(g.edge_b[e])
    bm = g.boundary_mask
    if wired and bm[a] and bm[b]:
        return True
    seen = np.zeros(g.n * g.n, dtype=bool)
    seen[a] = True
    queue = deque([a])
    glued = False
    nbr = g.neighbors
    inc = g.incident_edges
    while queue:
        v = queue.popleft()
        if wired and bm[v] and not glued:
            glued = True
            if bm[b]:
                return True
            for w in g.boundary_ids:
                if not seen[w]:
                    seen[w] = True
                    queue.append(int(w))
        for i in range(4):
            k = inc[v, i]
            if k < 0 or k == e or not bonds[k]:
                continue
            w = nbr[v, i]
            if w == b:
                return True
            if not seen[w]:
                seen[w] = True
                queue.append(int(w))
    return False


def single_bond_conditional(omega: BondConfig, e: int, params: FKParams) -> float:
    """Conditional probability that edge e is open given all other edges."""
    p, q = params.p, params.q
    if _connected_without(omega, e, params.bc == 1):
        return p
    return p / (p + (1.0 - p) * q)


def single_bond_heat_bath_sweep(
    omega: BondConfig,
    params: FKParams,
    rng: np.random.Generator,
    _cache: dict | None = None,
) -> BondConfig:
    """One pass of edge-by-edge heat-bath resampling, in edge order.

    Each edge is redrawn from its exact conditional law given the rest; one
    uniform is consumed per edge.  Valid for any q >= 1 (at q = 1 the
    conditional is p regardless of connectivity: independent resampling).
    `_cache` optionally memoizes connectivity queries keyed by the rest of
    the configuration, which changes nothing statistically.
    """
    g = omega.g
    out = BondConfig(g, omega.bonds.copy())
    u = rng.random(g.n_edges)
    p, q = params.p, params.q
    merge_p = p / (p + (1.0 - p) * q)
    for e in range(g.n_edges):
        if q == 1.0:
            cond = p
        elif _cache is not None:
            rest = out.bonds.copy()
            rest[e] = 0
            key = (rest.tobytes(), e)
            hit = _cache.get(key)
            if hit is None:
                hit = _connected_without(out, e, params.bc == 1)
                _cache[key] = hit
            cond = p if hit else merge_p
        else:
            cond = p if _connected_without(out, e, params.bc == 1) else merge_p
        out.bonds[e] = 1 if u[e] < cond else 0
    return out


def bernoulli_bonds(g: BoxGeometry, p: float, rng: np.random.Generator) -> BondConfig:
    """Direct sample of independent bond percolation (the q = 1 law)."""
    return BondConfig(g, (rng.random(g.n_edges) < p).astype(np.uint8))


def visit_counts(
    omega0: BondConfig,
    params: FKParams,
    steps: int,
    rng: np.random.Generator,
    method: str = "sw",
) -> np.ndarray:
    """State visit counts of a sampler chain over all 2^E configurations."""
    g = omega0.g
    if g.n_edges > 20:
        raise ValueError("visit counting limited to <= 20 edges")
    counts = np.zeros(1 << g.n_edges, dtype=np.int64)
    powers = 1 << np.arange(g.n_edges, dtype=np.int64)
    omega = omega0
    cache: dict = {}
    for _ in range(steps):
        if method == "sw":
            omega = swendsen_wang_step(omega, params, rng)
        elif method == "single-bond":
            omega = single_bond_heat_bath_sweep(omega, params, rng, _cache=cache)
        else:
            raise ValueError(f"unknown method {method!r}")
        counts[int(omega.bonds.astype(np.int64) @ powers)] += 1
    return counts


def sample_chain(
    omega0: BondConfig,
    params: FKParams,
    n_samples: int,
    burn_in: int,
    thin: int,
    rng: np.random.Generator,
    method: str = "sw",
) -> list[BondConfig]:
    """Thinned samples from a sampler chain after burn-in."""
    omega = omega0
    cache: dict = {}

    def step(w):
        if method == "sw":
            return swendsen_wang_step(w, params, rng)
        if method == "single-bond":
            return single_bond_heat_bath_sweep(w, params, rng, _cache=cache)
        raise ValueError(f"unknown method {method!r}")

    for _ in range(burn_in):
        omega = step(omega)
    out = []
    for _ in range(n_samples):
        for _ in range(thin):
            omega = step(omega)
        out.append(omega)
    return out


@dataclass
class TailFit:
    """Exponential tail fit of a cluster-size law: tail(k) ~ exp(-psi k)."""

    psi_hat: float
    ci_low: float
    ci_high: float
    window: np.ndarray
    tail_probs: np.ndarray
    n_samples: int
    degenerate: bool


def tail_statistics(samples, v: int | None = None, min_hits: int = 50) -> TailFit:
    """Fit the decay rate of P(|C(v)| >= k) from sampled decompositions.

    `samples` is a sequence of ClusterDecomposition (with `v` the observed
    vertex) or of raw cluster sizes.  The fit regresses -log tail on k by
    least squares, with intercept, over the window of k whose tail still has
    at least `min_hits` samples; the CI is the normal 95% band on the slope.
    """
    sizes = []
    for s in samples:
        if isinstance(s, ClusterDecomposition):
            if v is None:
                raise ValueError("vertex id required with decomposition samples")
            sizes.append(s.cluster_size_of(v))
        else:
            sizes.append(int(s))
    sizes = np.asarray(sizes, dtype=np.int64)
    n = len(sizes)
    if n == 0:
        raise ValueError("no samples")
    kmax = int(sizes.max())
    ks = np.arange(1, kmax + 1)
    counts = np.array([(sizes >= k).sum() for k in ks])
    keep = counts >= min_hits
    ks, counts = ks[keep], counts[keep]
    tail = counts / n
    if len(ks) < 3 or np.ptp(ks) == 0:
        return TailFit(math.nan, math.nan, math.nan, ks, tail, n, True)
    y = -np.log(tail)
    if np.ptp(y) == 0:
        # no decay observed inside the window
        return TailFit(math.nan, math.nan, math.nan, ks, tail, n, True)
    kbar = ks.mean()
    sxx = float(((ks - kbar) ** 2).sum())
    slope = float(((ks - kbar) * (y - y.mean())).sum() / sxx)
    resid = y - (y.mean() + slope * (ks - kbar))
    s2 = float((resid**2).sum() / (len(ks) - 2))
    se = math.sqrt(s2 / sxx)
    return TailFit(slope, slope - 1.96 * se, slope + 1.96 * se, ks, tail, n, False)


def event_D_n(dec: ClusterDecomposition | BondConfig, amp: float, b: float, c: float) -> bool:
    """Is the total mass of clusters of size >= n^b at least amp * n^c?

    Counts every cluster, boundary-touching ones included.
    """
    if isinstance(dec, BondConfig):
        dec = decompose(dec)
    n = dec.g.n
    thr = float(n) ** b
    mass = int(dec.sizes[dec.sizes >= thr].sum())
    return mass >= amp * float(n) ** c


def event_Q_N(dec: ClusterDecomposition | BondConfig, requirements) -> bool:
    """Do the given vertices sit in pairwise distinct clusters of the given
    minimum sizes?  `requirements` is a sequence of (vertex id, min size)."""
    if isinstance(dec, BondConfig):
        dec = decompose(dec)
    labels = set()
    for v, k in requirements:
        lab = int(dec.labels[v])
        if dec.cluster_size_of(int(v)) < k or lab in labels:
            return False
        labels.add(lab)
    return True


def external_cluster_boundary(cluster, g: BoxGeometry) -> np.ndarray:
    """Edges separating an interior cluster from the unbounded component of
    its complement (holes inside the cluster do not count).

    `cluster` is an iterable of vertex ids; it must not touch the box
    boundary.  Returns sorted edge ids.
    """
    vs = {int(v) for v in cluster}
    if not vs:
        raise ValueError("empty cluster")
    if any(g.boundary_mask[v] for v in vs):
        raise ValueError("cluster touches the box boundary")
    cs = {g.coord(v) for v in vs}
    xs = [c[0] for c in cs]
    ys = [c[1] for c in cs]
    x0, x1 = min(xs) - 1, max(xs) + 1
    y0, y1 = min(ys) - 1, max(ys) + 1
    # flood the complement from the surrounding ring; cells not reached are
    # holes enclosed by the cluster
    outside = set()
    queue = deque()
    for x in range(x0, x1 + 1):
        for y in (y0, y1):
            if (x, y) not in cs:
                outside.add((x, y))
                queue.append((x, y))
    for y in range(y0, y1 + 1):
        for x in (x0, x1):
            if (x, y) not in cs:
                outside.add((x, y))
                queue.append((x, y))
    while queue:
        x, y = queue.popleft()
        for dx, dy in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            w = (x + dx, y + dy)
            if x0 <= w[0] <= x1 and y0 <= w[1] <= y1 and w not in cs and w not in outside:
                outside.add(w)
                queue.append(w)
    out = []
    for (x, y) in cs:
        for dx, dy in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            w = (x + dx, y + dy)
            if w in outside:
                a = g.vertex_id(x, y)
                b = g.vertex_id(*w)
                out.append(g.edge_id(a, b))
    return np.array(sorted(out), dtype=np.int64)
