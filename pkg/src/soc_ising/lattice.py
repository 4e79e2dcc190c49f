"""Centered square-box geometry: vertices, edges, boundaries, annuli, planar dual.

The box of side n is the set of integer points (x, y) with -n/2 <= x, y < n/2.
All orderings (vertices, edges, neighbors) are deterministic: vertices are
sorted lexicographically by coordinate, edges lexicographically by their
(smaller endpoint, larger endpoint) pair in vertex order.
"""

from functools import lru_cache

import numpy as np

Coord = tuple[int, int]


def box_range(n: int) -> tuple[int, int]:
    """Inclusive coordinate range [lo, hi] of the side-n box on each axis."""
    if n < 1:
        raise ValueError(f"box side must be >= 1, got {n}")
    return -(n // 2), (n - 1) // 2


class BoxGeometry:
    """Static geometry of the side-n box.

    Attributes
    ----------
    n : int
        Side length; the box has n^2 vertices.
    lo, hi : int
        Inclusive coordinate bounds on each axis.
    coords : (n^2, 2) int array
        Vertex coordinates in lexicographic order; row index = vertex id.
    edges : (E, 2) int array
        Nearest-neighbour pairs (a, b) with a < b in vertex-id order,
        sorted lexicographically; E = 2n(n-1).
    boundary_mask : (n^2,) bool array
        True for vertices with a nearest neighbour outside the box.
    interior_edge_mask : (E,) bool array
        True for edges not contained in the boundary ring.
    neighbors : (n^2, 4) int array
        Neighbour vertex ids in the fixed order (-x, -y, +y, +x), -1 where the
        neighbour falls outside the box.
    incident_edges : (n^2, 4) int array
        Edge ids parallel to `neighbors`, -1 padding.
    """

    def __init__(self, n: int):
        lo, hi = box_range(n)
        self.n = n
        self.lo = lo
        self.hi = hi
        axis = np.arange(lo, hi + 1)
        xs, ys = np.meshgrid(axis, axis, indexing="ij")
        self.coords = np.stack([xs.ravel(), ys.ravel()], axis=1)

        nsq = n * n
        ids = np.arange(nsq)
        x = self.coords[:, 0]
        y = self.coords[:, 1]
        # vertical steps (x, y)-(x, y+1) are id steps of +1, horizontal of +n
        va = ids[y < hi]
        ha = ids[x < hi]
        ea = np.concatenate([va, ha])
        eb = np.concatenate([va + 1, ha + n])
        order = np.lexsort((eb, ea))
        self.edges = np.stack([ea[order], eb[order]], axis=1)
        self.edge_a = self.edges[:, 0]
        self.edge_b = self.edges[:, 1]
        self.n_edges = len(self.edges)

        self.boundary_mask = (x == lo) | (x == hi) | (y == lo) | (y == hi)
        self.boundary_ids = ids[self.boundary_mask]
        bm = self.boundary_mask
        self.interior_edge_mask = ~(bm[self.edge_a] & bm[self.edge_b])

        self._edge_id = {
            (int(a), int(b)): k for k, (a, b) in enumerate(self.edges)
        }

        nbr = np.full((nsq, 4), -1, dtype=np.int64)
        inc = np.full((nsq, 4), -1, dtype=np.int64)
        eid = np.arange(self.n_edges)
        # order (-x, -y, +y, +x); fill both directions of each edge
        horiz = (self.edge_b - self.edge_a) == n
        vert = ~horiz
        nbr[self.edge_b[horiz], 0] = self.edge_a[horiz]
        inc[self.edge_b[horiz], 0] = eid[horiz]
        nbr[self.edge_b[vert], 1] = self.edge_a[vert]
        inc[self.edge_b[vert], 1] = eid[vert]
        nbr[self.edge_a[vert], 2] = self.edge_b[vert]
        inc[self.edge_a[vert], 2] = eid[vert]
        nbr[self.edge_a[horiz], 3] = self.edge_b[horiz]
        inc[self.edge_a[horiz], 3] = eid[horiz]
        self.neighbors = nbr
        self.incident_edges = inc

        # vertices with all four neighbours inside, split by checkerboard color
        interior = ids[~bm]
        colors = (x[interior] + y[interior]) & 1
        self.interior_ids = interior
        self.interior_even = interior[colors == 0]
        self.interior_odd = interior[colors == 1]

        # interior half-grid used by the singleton count: even 1-norm
        self.halfgrid_mask = (~bm) & (((np.abs(x) + np.abs(y)) & 1) == 0)

        self._annuli: dict[int, np.ndarray] = {}

    # -- basic lookups ----------------------------------------------------

    def contains(self, x: int, y: int) -> bool:
        return self.lo <= x <= self.hi and self.lo <= y <= self.hi

    def vertex_id(self, x: int, y: int) -> int:
        if not self.contains(x, y):
            raise ValueError(f"({x}, {y}) outside box of side {self.n}")
        return (x - self.lo) * self.n + (y - self.lo)

    def coord(self, v: int) -> Coord:
        return int(self.coords[v, 0]), int(self.coords[v, 1])

    def edge_id(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        try:
            return self._edge_id[(a, b)]
        except KeyError:
            raise ValueError(f"({a}, {b}) is not an edge of the box") from None

    def sub_box_mask(self, j: int) -> np.ndarray:
        """Boolean vertex mask of the centered side-j sub-box."""
        if j > self.n:
            raise ValueError(f"sub-box side {j} exceeds box side {self.n}")
        lo, hi = box_range(j)
        x = self.coords[:, 0]
        y = self.coords[:, 1]
        return (x >= lo) & (x <= hi) & (y >= lo) & (y <= hi)

    def annulus_edges(self, j: int) -> np.ndarray:
        """Edge ids of the exterior edge boundary of the side-j sub-box.

        These are the box edges with exactly one endpoint in the sub-box.  For
        j <= n-2 every such edge of the full lattice lies inside the box, so
        the set is the complete exterior boundary (4j edges); for j = n-1 the
        edges leaving the box are not representable and are omitted.
        """
        if not 1 <= j < self.n:
            raise ValueError(f"annulus index must be in [1, {self.n - 1}], got {j}")
        if j not in self._annuli:
            inside = self.sub_box_mask(j)
            mask = inside[self.edge_a] ^ inside[self.edge_b]
            self._annuli[j] = np.flatnonzero(mask)
        return self._annuli[j]


@lru_cache(maxsize=None)
def build_box(n: int) -> BoxGeometry:
    """Construct (and cache) the side-n box geometry."""
    return BoxGeometry(n)


_STEPS = ((-1, 0), (0, -1), (0, 1), (1, 0))


def exterior_boundary_edges(
    vertices, g: BoxGeometry | None = None
) -> tuple[list[tuple[Coord, Coord]], list[bool]]:
    """Exterior edge boundary of a vertex set: lattice edges with exactly one
    endpoint in the set.

    `vertices` is an iterable of coordinates (or vertex ids when `g` is
    given).  Returns the edges as (inside endpoint, outside endpoint)
    coordinate pairs in lexicographic order, plus a parallel list flagging
    edges whose outside endpoint leaves the box (meaningless without `g`:
    all False then).
    """
    vs = set()
    for v in vertices:
        if g is not None and isinstance(v, (int, np.integer)):
            vs.add(g.coord(int(v)))
        else:
            vs.add((int(v[0]), int(v[1])))
    out: list[tuple[Coord, Coord]] = []
    leaves: list[bool] = []
    for (x, y) in sorted(vs):
        for dx, dy in _STEPS:
            w = (x + dx, y + dy)
            if w not in vs:
                out.append(((x, y), w))
                leaves.append(False if g is None else not g.contains(*w))
    return out, leaves


def diameter(vertices, g: BoxGeometry | None = None) -> int:
    """l-infinity diameter of a nonempty vertex set (coordinates or ids)."""
    xs, ys = [], []
    for v in vertices:
        if g is not None and isinstance(v, (int, np.integer)):
            cx, cy = g.coord(int(v))
        else:
            cx, cy = int(v[0]), int(v[1])
        xs.append(cx)
        ys.append(cy)
    if not xs:
        raise ValueError("diameter of an empty vertex set")
    return max(max(xs) - min(xs), max(ys) - min(ys))


class DualGeometry:
    """Planar dual pairing between the side-n box and the side-(n-1) box.

    Each interior edge of the primal box is crossed by exactly one edge of the
    dual lattice; after the parity-dependent half-unit shift the dual vertices
    land on the side-(n-1) box.  `edge_map[e]` is the dual edge id for primal
    interior edge e (-1 for boundary-ring edges); `primal_of[d]` inverts it.
    """

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("dual pairing needs box side >= 2")
        self.primal = build_box(n)
        self.dual = build_box(n - 1)
        g, d = self.primal, self.dual
        # identified dual endpoints: shift (0,0) for odd n, (1,1) for even n
        s = 0 if n % 2 == 1 else 1
        edge_map = np.full(g.n_edges, -1, dtype=np.int64)
        primal_of = np.full(d.n_edges, -1, dtype=np.int64)
        for e in np.flatnonzero(g.interior_edge_mask):
            a, b = g.edges[e]
            ax, ay = g.coord(int(a))
            bx, by = g.coord(int(b))
            if bx == ax + 1:  # horizontal edge -> vertical dual edge
                p1 = (ax + s, ay - 1 + s)
                p2 = (ax + s, ay + s)
            else:  # vertical edge -> horizontal dual edge
                p1 = (ax - 1 + s, ay + s)
                p2 = (ax + s, ay + s)
            de = d.edge_id(d.vertex_id(*p1), d.vertex_id(*p2))
            if primal_of[de] != -1:
                raise AssertionError("dual edge hit twice; pairing broken")
            edge_map[int(e)] = de
            primal_of[de] = int(e)
        if int(g.interior_edge_mask.sum()) != d.n_edges:
            raise AssertionError("interior/dual edge counts disagree")
        self.edge_map = edge_map
        self.primal_of = primal_of


@lru_cache(maxsize=None)
def dual_geometry(n: int) -> DualGeometry:
    """Construct (and cache) the dual pairing for the side-n box."""
    return DualGeometry(n)
