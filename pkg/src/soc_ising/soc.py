"""The self-tuning model: exact law on tiny boxes, deviation inequalities,
feedback dynamics, and the fixed-point sequence.

The model replaces the temperature with the feedback T(sigma) =
m(sigma)^2 / n^(2a), so each configuration is weighted by the plus-boundary
Gibbs law evaluated at its own temperature.  On boxes of side <= 4 the law
is small enough to enumerate, which gives exact oracles for the dynamics
and for the two deviation inequalities that control T away from the
critical temperature.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .lattice import BoxGeometry, build_box
from .ising import SpinConfig, T_CRITICAL, enumerate_plus_configs, heat_bath_sweep, feedback_temperature
from .fk import p_critical, decompose
from .coupling import phi_n, es_ising_to_fk

# temperature floor substituted when a refresh lands on m = 0
EPS_T = 1e-6


@dataclass
class FeedbackParams:
    """Feedback exponent a with its admissible ranges and the rate exponent
    rho = max(a/2, 33/2 - 8a)."""

    a: float
    valid_theorem_range: bool = field(init=False)
    valid_conditional_range: bool = field(init=False)
    rho: float = field(init=False)

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("exponent a must be positive")
        self.valid_theorem_range = 81.0 / 41.0 < self.a < 2.0
        self.valid_conditional_range = 31.0 / 16.0 < self.a < 2.0
        self.rho = max(self.a / 2.0, 33.0 / 2.0 - 8.0 * self.a)


@dataclass
class FixedPoint:
    """The magnetization level b_n targeted by the feedback, its bond
    density p_n = phi_n(b_n) and temperature T* = b_n^2 / n^(2a)."""

    n: int
    a: float
    b_prime: float
    b_n: int
    p_n: float
    t_star: float


def fixed_point(n: int, a: float) -> FixedPoint:
    """Solve the self-consistency b = n^a sqrt(2) [-ln(1 - p_c - delta_n)]^(-1/2)
    with delta_n = 3^8 p_c / (8 n^(16-8a)), then round b down to the parity
    of n^2.

    Defined only when delta_n < 1 - p_c, which for a near 2 requires
    astronomically large n; the error message reports the threshold.
    """
    if n < 1:
        raise ValueError("side must be >= 1")
    pc = p_critical(2.0)
    delta = (3.0 ** 8) * pc / (8.0 * float(n) ** (16.0 - 8.0 * a))
    arg = 1.0 - pc - delta
    if not 0.0 < arg < 1.0:
        need = ((3.0 ** 8) * pc / (8.0 * (1.0 - pc))) ** (1.0 / (16.0 - 8.0 * a))
        raise ValueError(
            f"log argument {arg:.6g} outside (0, 1): at a = {a} the fixed point "
            f"needs n > {need:.4g}, got n = {n}"
        )
    b_prime = float(n) ** a * math.sqrt(2.0) / math.sqrt(-math.log(arg))
    b_n = math.floor(b_prime)
    if (b_n - n * n) % 2 != 0:
        b_n -= 1
    return FixedPoint(n=n, a=a, b_prime=b_prime, b_n=b_n, p_n=phi_n(b_n, n, a), t_star=float(b_n) ** 2 / float(n) ** (2 * a))


def theta_asymptotic(p: float) -> float:
    """Near-critical surrogate [8(p/p_c - 1)]^(1/8) for the spontaneous
    magnetization of the bond density p; exact only as p -> p_c from above."""
    pc = p_critical(2.0)
    if p < pc:
        raise ValueError("defined for p >= the self-dual point only")
    return (8.0 * (p / pc - 1.0)) ** 0.125


def edge_closing_price(n: int, p: float, N: int) -> float:
    """Lower-bound factor [min(p, 1-p) / (3 p n^2)]^N for forcing N chosen
    edges shut; contextualizes the cost of a surgery of N closures."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if N < 0:
        raise ValueError("N must be >= 0")
    return (min(p, 1.0 - p) / (3.0 * p * n * n)) ** N


@dataclass
class ExactMuN:
    """Exact self-tuned law on a tiny box: one row per plus-boundary spin
    configuration, with the partition sum computed two ways (directly, and
    as the sum over magnetization levels b of the probability of m = b at
    the level's own temperature)."""

    g: BoxGeometry = field(repr=False)
    a: float
    spins: np.ndarray = field(repr=False)
    mags: np.ndarray = field(repr=False)
    temps: np.ndarray = field(repr=False)
    probs: np.ndarray = field(repr=False)
    z_direct: float
    z_rewrite: float
    _index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        for row in range(self.spins.shape[0]):
            self._index[self.spins[row].tobytes()] = row

    def prob_of(self, config: SpinConfig) -> float:
        row = self._index.get(config.spins.tobytes())
        return float(self.probs[row]) if row is not None else 0.0


def exact_mu_n(g: BoxGeometry | int, a: float) -> ExactMuN:
    """Enumerate the self-tuned law on a box of side <= 4."""
    if isinstance(g, (int, np.integer)):
        g = build_box(int(g))
    n = g.n
    if n > 4:
        raise ValueError("exact self-tuned law limited to side <= 4")
    spins = enumerate_plus_configs(g)
    s64 = spins.astype(np.int64)
    energies = -(s64[:, g.edge_a] * s64[:, g.edge_b]).sum(axis=1)
    mags = s64.sum(axis=1)
    nsq = n * n
    n2a = float(n) ** (2 * a)

    def log_weight_at(b2: int) -> np.ndarray:
        # log of the plus-boundary Gibbs probabilities at T = b2 / n^(2a)
        t = b2 / n2a
        le = -energies / t
        return le - logsumexp(le)

    # with a plus boundary on side <= 4 the magnetization never vanishes
    assert (mags != 0).all()
    log_w = np.empty(len(mags), dtype=np.float64)
    for b2 in sorted(set(int(m) * int(m) for m in mags)):
        rows = np.flatnonzero(mags * mags == b2)
        log_w[rows] = log_weight_at(b2)[rows]
    weights = np.exp(log_w)
    z_direct = float(weights.sum())

    z_rewrite = 0.0
    for b in range(-nsq, nsq + 1):
        if b == 0:
            continue  # T = 0 charges only all-plus, whose m is n^2 > 0
        rows = np.flatnonzero(mags == b)
        if rows.size == 0:
            continue
        lw = log_weight_at(b * b)
        z_rewrite += float(np.exp(logsumexp(lw[rows])))

    return ExactMuN(
        g=g, a=a, spins=spins, mags=mags, temps=(mags.astype(float) ** 2) / n2a,
        probs=weights / z_direct, z_direct=z_direct, z_rewrite=z_rewrite,
    )


def exact_mu_prime(g: BoxGeometry | int, a: float) -> ExactMuN:
    """Enumerate the unnormalized-weight variant exp(-H(sigma)/T(sigma)) on
    a box of side <= 4; configurations with m = 0 carry weight zero.  The
    z_rewrite field repeats z_direct (no level decomposition applies)."""
    if isinstance(g, (int, np.integer)):
        g = build_box(int(g))
    n = g.n
    if n > 4:
        raise ValueError("exact self-tuned law limited to side <= 4")
    spins = enumerate_plus_configs(g)
    s64 = spins.astype(np.int64)
    energies = -(s64[:, g.edge_a] * s64[:, g.edge_b]).sum(axis=1)
    mags = s64.sum(axis=1)
    n2a = float(n) ** (2 * a)
    log_w = np.where(mags == 0, -np.inf, -energies * n2a / np.maximum(mags.astype(float) ** 2, 1e-300))
    log_z = float(logsumexp(log_w))
    weights = np.exp(log_w - log_z)
    return ExactMuN(
        g=g, a=a, spins=spins, mags=mags, temps=(mags.astype(float) ** 2) / n2a,
        probs=weights, z_direct=math.exp(log_z), z_rewrite=math.exp(log_z),
    )


@dataclass
class DeviationReport:
    """Both sides of the two deviation inequalities bounding how often the
    feedback temperature sits away from the critical one."""

    n: int
    a: float
    eps: float
    z_n: float
    lhs_above: float
    rhs_above: float
    lhs_below: float
    rhs_below: float
    grid_above: np.ndarray = field(repr=False)
    grid_below: np.ndarray = field(repr=False)

    @property
    def holds_above(self) -> bool:
        return self.lhs_above <= self.rhs_above + 1e-12

    @property
    def holds_below(self) -> bool:
        return self.lhs_below <= self.rhs_below + 1e-12


def _plus_mag_tail(g: BoxGeometry, t: float, lo: float | None, hi: float | None) -> float:
    """mu+ probability that |m| >= lo (and/or <= hi) at temperature t."""
    spins = enumerate_plus_configs(g).astype(np.int64)
    energies = -(spins[:, g.edge_a] * spins[:, g.edge_b]).sum(axis=1)
    am = np.abs(spins.sum(axis=1))
    if t == 0:
        probs = (energies == energies.min()).astype(float)
        probs /= probs.sum()
    else:
        le = -energies / t
        probs = np.exp(le - logsumexp(le))
    keep = np.ones(len(am), dtype=bool)
    if lo is not None:
        keep &= am >= lo
    if hi is not None:
        keep &= am <= hi
    return float(probs[keep].sum())


def deviation_bound_check(g: BoxGeometry | int, a: float, eps: float) -> DeviationReport:
    """Evaluate both deviation inequalities exactly on a box of side <= 4.

    The supremum over temperatures is exact: the only temperatures that can
    carry probability are b^2 / n^(2a) for integer levels b, so the grid is
    those values (restricted to the relevant side of T_c) together with the
    interval endpoint.
    """
    if isinstance(g, (int, np.integer)):
        g = build_box(int(g))
    n = g.n
    if n > 4:
        raise ValueError("deviation check limited to side <= 4")
    if eps <= 0:
        raise ValueError("eps must be positive")
    mu = exact_mu_n(g, a)
    nsq = n * n
    n2a = float(n) ** (2 * a)

    t_hi = T_CRITICAL + eps
    thr_hi = float(n) ** a * math.sqrt(t_hi)
    lhs_above = float(mu.probs[mu.temps >= t_hi].sum())
    grid_above = [b * b / n2a for b in range(nsq + 1) if b * b / n2a >= t_hi]
    grid_above.append(t_hi)
    rhs_above = (nsq + 1) / mu.z_direct * max(
        _plus_mag_tail(g, t, lo=thr_hi, hi=None) for t in grid_above
    )

    t_lo = T_CRITICAL - eps
    if t_lo < 0:
        lhs_below = 0.0
        rhs_below = 0.0
        grid_below = []
    else:
        thr_lo = float(n) ** a * math.sqrt(t_lo)
        lhs_below = float(mu.probs[mu.temps <= t_lo].sum())
        grid_below = [b * b / n2a for b in range(nsq + 1) if b * b / n2a <= t_lo]
        grid_below.append(t_lo)
        rhs_below = (nsq + 1) / mu.z_direct * max(
            _plus_mag_tail(g, t, lo=None, hi=thr_lo) for t in grid_below
        )

    return DeviationReport(
        n=n, a=a, eps=eps, z_n=mu.z_direct,
        lhs_above=lhs_above, rhs_above=rhs_above,
        lhs_below=lhs_below, rhs_below=rhs_below,
        grid_above=np.array(grid_above), grid_below=np.array(grid_below),
    )


@dataclass
class SocTrajectory:
    """Recorded refresh points of a feedback dynamics run."""

    n: int
    a: float
    tau: int
    variant: str
    steps: np.ndarray = field(repr=False)
    temps: np.ndarray = field(repr=False)
    mags: np.ndarray = field(repr=False)
    flips: np.ndarray = field(repr=False)
    floor_used: np.ndarray = field(repr=False)
    burn_in: int = 0
    elapsed: float = 0.0
    m_ns: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.steps) > 1 and not (np.diff(self.steps) > 0).all():
            raise ValueError("record steps must be strictly increasing")

    def kept(self) -> np.ndarray:
        return self.temps[self.burn_in:]

    def mean_temperature(self) -> float:
        return float(self.kept().mean())

    def temperature_std(self) -> float:
        return float(self.kept().std())


def two_timescale_dynamics(
    g: BoxGeometry | int,
    a: float,
    tau: int,
    total: int,
    rng: np.random.Generator,
    burn_in: int | None = None,
    snapshot_every: int = 0,
) -> SocTrajectory:
    """Feedback dynamics on the slow schedule: tau spin sweeps at the
    current frozen temperature, then a refresh T <- m^2 / n^(2a) from the
    instantaneous magnetization.  A refresh from m = 0 substitutes the
    floor EPS_T and flags the record.  Records one row per refresh; by
    default the first quarter of the records is marked as burn-in.

    With snapshot_every = k > 0, every k-th record additionally draws a
    bond configuration coupled to the current spins at the refreshed
    temperature and stores its boundary-cluster vertex count; other rows
    store -1.  Snapshots consume randomness, so the trajectory depends on
    k (but is still a pure function of the arguments and the rng state).
    """
    if isinstance(g, (int, np.integer)):
        g = build_box(int(g))
    if tau < 1:
        raise ValueError("tau must be >= 1")
    t0 = time.perf_counter()
    config = SpinConfig.all_plus(g)
    t = feedback_temperature(config, a)
    n_rec = total // tau
    steps = np.empty(n_rec, dtype=np.int64)
    temps = np.empty(n_rec, dtype=np.float64)
    mags = np.empty(n_rec, dtype=np.int64)
    flips = np.empty(n_rec, dtype=np.int64)
    floored = np.zeros(n_rec, dtype=bool)
    m_ns = np.full(n_rec, -1, dtype=np.int64)
    for r in range(n_rec):
        nflip = 0
        for _ in range(tau):
            before = config.spins.copy()
            heat_bath_sweep(config, t, rng)
            nflip += int((config.spins != before).sum())
        m = config.magnetization()
        t = feedback_temperature(config, a)
        if t == 0.0:
            t = EPS_T
            floored[r] = True
        steps[r] = (r + 1) * tau
        temps[r] = t
        mags[r] = m
        flips[r] = nflip
        if snapshot_every > 0 and (r + 1) % snapshot_every == 0:
            omega = es_ising_to_fk(config, t, rng)
            m_ns[r] = decompose(omega).m_count
    if burn_in is None:
        burn_in = n_rec // 4
    return SocTrajectory(
        n=g.n, a=a, tau=tau, variant="two-timescale",
        steps=steps, temps=temps, mags=mags, flips=flips, floor_used=floored,
        burn_in=burn_in, elapsed=time.perf_counter() - t0, m_ns=m_ns,
    )


def naive_mu_prime_dynamics(
    g: BoxGeometry | int,
    a: float,
    total: int,
    rng: np.random.Generator,
    account_for_T_change: bool = True,
    burn_in: int | None = None,
) -> SocTrajectory:
    """Single-flip Metropolis chain for the weight exp(-H(sigma)/T(sigma)).

    With account_for_T_change the acceptance uses the full difference
    H'/T' - H/T, so the chain targets that law exactly (m = 0 proposals
    carry weight zero and are always refused).  Without it the flip is
    judged by Delta H / T at the current temperature only, the variant
    whose self-organization the model's construction does not guarantee.
    One sweep is one proposal per interior site; records one row per sweep.
    """
    if isinstance(g, (int, np.integer)):
        g = build_box(int(g))
    t0 = time.perf_counter()
    interior = g.interior_ids
    ni = interior.size
    if ni == 0:
        # everything is boundary: the single plus configuration, forever
        config = SpinConfig.all_plus(g)
        t = feedback_temperature(config, a)
        steps = np.arange(1, total + 1)
        return SocTrajectory(
            n=g.n, a=a, tau=1, variant="mu-prime",
            steps=steps, temps=np.full(total, t), mags=np.full(total, g.n * g.n),
            flips=np.zeros(total, dtype=np.int64), floor_used=np.zeros(total, dtype=bool),
            burn_in=0 if burn_in is None else burn_in, elapsed=time.perf_counter() - t0,
        )
    n2a = float(g.n) ** (2 * a)
    spins = SpinConfig.all_plus(g).spins
    nbrs = [g.neighbors[int(v)] for v in interior]
    m = int(spins.sum())
    h = -int((spins[g.edge_a].astype(np.int64) * spins[g.edge_b]).sum())
    steps = np.empty(total, dtype=np.int64)
    temps = np.empty(total, dtype=np.float64)
    mags = np.empty(total, dtype=np.int64)
    flips = np.empty(total, dtype=np.int64)
    for sweep in range(total):
        picks = rng.integers(0, ni, size=ni)
        us = rng.random(ni)
        nflip = 0
        for i in range(ni):
            v = int(interior[picks[i]])
            s = int(spins[v])
            local = int(spins[nbrs[picks[i]]].sum())
            dh = 2 * s * local
            m_new = m - 2 * s
            if m_new == 0:
                continue  # zero-weight target state
            if account_for_T_change:
                log_acc = h / (m * m / n2a) - (h + dh) / (m_new * m_new / n2a)
            else:
                log_acc = -dh / (m * m / n2a)
            if log_acc >= 0 or us[i] < math.exp(log_acc):
                spins[v] = -s
                m = m_new
                h += dh
                nflip += 1
        steps[sweep] = sweep + 1
        temps[sweep] = m * m / n2a
        mags[sweep] = m
        flips[sweep] = nflip
    if burn_in is None:
        burn_in = total // 4
    return SocTrajectory(
        n=g.n, a=a, tau=1, variant="mu-prime" if account_for_T_change else "mu-prime-naive",
        steps=steps, temps=temps, mags=mags, flips=flips,
        floor_used=np.zeros(total, dtype=bool), burn_in=burn_in,
        elapsed=time.perf_counter() - t0,
    )
