"""Ising model on the box with all-plus boundary condition.

Energy is the negative sum of products of nearest-neighbour spins; any
configuration violating the all-plus boundary gets energy +infinity (weight
zero at every temperature).  Temperature enters as 1/T directly; T = 0 is the
point mass on the all-plus configuration.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logsumexp

from .lattice import BoxGeometry, build_box

T_CRITICAL = 2.0 / math.log(1.0 + math.sqrt(2.0))


@dataclass
class IsingParams:
    """Box side and temperature for the plus-boundary model."""

    n: int
    t: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.t < 0:
            raise ValueError("temperature must be >= 0")


class SpinConfig:
    """Spin assignment (+1/-1 per vertex) with a cached magnetization.

    The cache is maintained on every mutation, so `magnetization()` is O(1).
    """

    __slots__ = ("g", "spins", "_m")

    def __init__(self, g: BoxGeometry, spins):
        spins = np.asarray(spins, dtype=np.int8)
        if spins.shape != (g.n * g.n,):
            raise ValueError("spin array has wrong length")
        if not np.all(np.abs(spins) == 1):
            raise ValueError("spins must be +1 or -1")
        self.g = g
        self.spins = spins
        self._m = int(spins.sum())

    @classmethod
    def all_plus(cls, g: BoxGeometry) -> "SpinConfig":
        return cls(g, np.ones(g.n * g.n, dtype=np.int8))

    def magnetization(self) -> int:
        return self._m

    def flip(self, v: int) -> None:
        s = int(self.spins[v])
        self.spins[v] = -s
        self._m -= 2 * s

    def set_spins(self, spins) -> None:
        spins = np.asarray(spins, dtype=np.int8)
        self.spins = spins
        self._m = int(spins.sum())

    def copy(self) -> "SpinConfig":
        return SpinConfig(self.g, self.spins.copy())

    def key(self) -> tuple:
        return tuple(int(s) for s in self.spins)


def hamiltonian(config: SpinConfig) -> float:
    """Energy of a configuration; +inf when the boundary is not all plus."""
    g = config.g
    s = config.spins
    if not np.all(s[g.boundary_ids] == 1):
        return math.inf
    prod = s[g.edge_a].astype(np.int64) * s[g.edge_b]
    return float(-prod.sum())


def feedback_temperature(config: SpinConfig, a: float) -> float:
    """Self-tuned temperature m(sigma)^2 / n^(2a)."""
    m = config.magnetization()
    return (m * m) / float(config.g.n) ** (2.0 * a)


def zero_temperature_config(g: BoxGeometry) -> SpinConfig:
    """The unique configuration carrying the T = 0 plus-boundary measure."""
    return SpinConfig.all_plus(g)


def conditional_plus_probability(h: float, t: float) -> float:
    """Heat-bath probability of drawing +1 at a site whose neighbours sum to h."""
    if t <= 0:
        raise ValueError("heat-bath conditional needs T > 0")
    return float(expit(2.0 * h / t))


def heat_bath_sweep(config: SpinConfig, t: float, rng: np.random.Generator) -> SpinConfig:
    """One deterministic-order heat-bath pass over all interior sites.

    Sites are visited in two-color checkerboard order (interior sites with
    even x+y in lexicographic order, then odd ones); sites within a color
    class are mutually non-adjacent, so this equals the sequential update in
    that order while allowing vectorization.  One uniform is drawn per site,
    in visit order.  Boundary spins never move.
    """
    if t <= 0:
        raise ValueError("heat_bath_sweep needs T > 0; T = 0 is the frozen point mass")
    g = config.g
    spins = config.spins
    for sites in (g.interior_even, g.interior_odd):
        if sites.size == 0:
            continue
        h = spins[g.neighbors[sites]].sum(axis=1)
        p_plus = expit(2.0 * h / t)
        u = rng.random(sites.size)
        spins[sites] = np.where(u < p_plus, 1, -1).astype(np.int8)
    config.set_spins(spins)
    return config


@dataclass
class IsingDistribution:
    """Exact plus-boundary Gibbs law from full enumeration of interior spins.

    `spins` holds every configuration with finite energy (row per config,
    boundary forced to +1), `probs` the matching probabilities.  `z` may
    overflow to inf at small T; `log_z` is always finite for T > 0 and +inf
    at T = 0 (diverging ground-state weight).
    """

    n: int
    t: float
    spins: np.ndarray
    probs: np.ndarray
    energies: np.ndarray
    magnetizations: np.ndarray
    log_z: float
    z: float
    _index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self._index:
            self._index = {
                row.tobytes(): i for i, row in enumerate(self.spins)
            }

    def prob_of(self, config) -> float:
        """Probability of a SpinConfig or raw spin array (0 off support)."""
        arr = config.spins if isinstance(config, SpinConfig) else np.asarray(config, dtype=np.int8)
        i = self._index.get(arr.astype(np.int8).tobytes())
        return float(self.probs[i]) if i is not None else 0.0

    def magnetization_law(self) -> dict[int, float]:
        law: dict[int, float] = {}
        for m, p in zip(self.magnetizations, self.probs):
            law[int(m)] = law.get(int(m), 0.0) + float(p)
        return law


def enumerate_plus_configs(g: BoxGeometry) -> np.ndarray:
    """All finite-energy spin rows: boundary +1, interior spins free.

    Bit i of the row index corresponds to the i-th interior vertex in
    lexicographic order (bit set = spin +1).
    """
    free = np.flatnonzero(~g.boundary_mask)
    k = len(free)
    if k > 16:
        raise ValueError("enumeration limited to <= 16 interior spins")
    rows = np.ones((1 << k, g.n * g.n), dtype=np.int8)
    if k:
        bits = (np.arange(1 << k)[:, None] >> np.arange(k)) & 1
        rows[:, free] = (2 * bits - 1).astype(np.int8)
    return rows


def exact_ising_distribution(g: BoxGeometry | int, t: float) -> IsingDistribution:
    """Exact finite-volume law by enumeration (needs side <= 5).

    At T = 0 this is the point mass on the all-plus configuration.
    """
    if isinstance(g, (int, np.integer)):
        g = build_box(int(g))
    if g.n > 5:
        raise ValueError("exact enumeration supported for side <= 5")
    if t < 0:
        raise ValueError("temperature must be >= 0")
    if t == 0:
        rows = np.ones((1, g.n * g.n), dtype=np.int8)
        e = -float(g.n_edges)
        return IsingDistribution(
            n=g.n, t=0.0, spins=rows, probs=np.array([1.0]),
            energies=np.array([e]), magnetizations=np.array([g.n * g.n]),
            log_z=math.inf, z=math.inf,
        )
    rows = enumerate_plus_configs(g)
    prod = rows[:, g.edge_a].astype(np.int64) * rows[:, g.edge_b]
    energies = -prod.sum(axis=1).astype(np.float64)
    mags = rows.sum(axis=1, dtype=np.int64)
    neg = -energies / t
    log_z = float(logsumexp(neg))
    probs = np.exp(neg - log_z)
    probs /= probs.sum()
    z = math.exp(log_z) if log_z < 709 else math.inf
    return IsingDistribution(
        n=g.n, t=t, spins=rows, probs=probs, energies=energies,
        magnetizations=mags, log_z=log_z, z=z,
    )
