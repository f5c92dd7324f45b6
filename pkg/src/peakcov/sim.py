"""Monte Carlo simulation of the loss-gated filter and exact
enumeration of the first post-burst covariance.

A run draws an arrival stream from the loss model, starts the one-step
prediction covariance at Sigma0, and advances it with the reception map
on arrival slots and the open-loop map on loss slots. Post-burst instants
are receptions whose preceding slot was a loss; the covariance entering
such an instant is a local maximum of the stream (it only shrinks on
receptions), and its norm sequence is the quantity whose boundedness is
being tested.

enumerate_first_peak integrates the first post-burst covariance exactly
over all arrival prefixes (leading run of zero-gaps, then the first
burst), giving an oracle the Monte Carlo estimate is checked against.
growth_trend fits a log-linear trend to the across-run mean of the peak
norms with a bootstrap-over-runs standard error; per-run statistics miss
mean growth carried by rare excursions, the across-run mean does not.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .markov import LossModel, gaps_to_arrivals, sample_gaps
from .riccati import check_cov, measurement_update, time_update
from .system import SystemModel

__all__ = [
    "RunRecord",
    "McEstimate",
    "FirstPeakEnumeration",
    "TrendStat",
    "simulate_run",
    "mc_estimate",
    "enumerate_first_peak",
    "growth_trend",
]


@dataclass(frozen=True, eq=False)
class RunRecord:
    seed: int
    horizon: int
    beta_times: np.ndarray  # 1-based slot indices of post-burst receptions
    peak_norms: np.ndarray  # ||P|| entering each post-burst reception
    post_norms: np.ndarray  # ||P|| one slot after it


@dataclass(frozen=True, eq=False)
class McEstimate:
    runs: int
    horizon: int
    base_seed: int
    means: np.ndarray    # mean of j-th peak norm over runs reaching it
    stderrs: np.ndarray  # sample standard error (ddof=1), nan when count < 2
    counts: np.ndarray   # number of runs with at least j+1 peaks
    peak_norms_by_run: list


@dataclass(frozen=True, eq=False)
class FirstPeakEnumeration:
    mean_matrix: np.ndarray
    mean_norm: float     # expectation of the norm, not norm of the mean
    covered_mass: float
    tail_mass: float
    max_span: int        # largest leading-reception count enumerated


@dataclass(frozen=True, eq=False)
class TrendStat:
    slope: float
    stderr: float
    z: float
    n_indices: int
    n_runs: int
    burn: int


def simulate_run(
    sys: SystemModel, loss: LossModel, horizon: int, seed: int
) -> RunRecord:
    """One covariance stream of `horizon` slots.

    The prediction covariance starts at Sigma0 in slot 1. A reception in
    slot 1 is never post-burst (there is no preceding slot).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    check_cov(sys.Sigma0, "Sigma0")
    gaps = sample_gaps(loss, horizon, seed)
    arr = gaps_to_arrivals(gaps)[:horizon]
    P = sys.Sigma0.copy()
    beta, peaks, posts = [], [], []
    for k in range(horizon):
        if arr[k]:
            Pn = measurement_update(sys, P)
            if k >= 1 and not arr[k - 1]:
                beta.append(k + 1)
                peaks.append(linalg.sym_spectral_norm(P))
                posts.append(linalg.sym_spectral_norm(Pn))
            P = Pn
        else:
            P = time_update(sys, P)
    return RunRecord(
        seed=seed,
        horizon=horizon,
        beta_times=np.asarray(beta, dtype=np.int64),
        peak_norms=np.asarray(peaks, dtype=float),
        post_norms=np.asarray(posts, dtype=float),
    )


def _thread_count(threads, runs: int) -> int:
    if threads is None:
        env = os.environ.get("PEAKCOV_THREADS", "")
        threads = int(env) if env.strip() else (os.cpu_count() or 1)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return min(threads, runs)


def mc_estimate(
    sys: SystemModel,
    loss: LossModel,
    runs: int,
    horizon: int,
    base_seed: int,
    threads: int | None = None,
) -> McEstimate:
    """Per-index statistics of post-burst norms over `runs` streams.

    Run i is seeded base_seed + i, so the ensemble is reproducible and
    independent of the thread count (aggregation happens in run order;
    threads only schedule the independent streams). PEAKCOV_THREADS
    overrides the default worker count when `threads` is None.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    workers = _thread_count(threads, runs)

    def one(i: int) -> np.ndarray:
        return simulate_run(sys, loss, horizon, base_seed + i).peak_norms

    if workers == 1:
        per_run = [one(i) for i in range(runs)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_run = list(pool.map(one, range(runs)))

    depth = max((p.size for p in per_run), default=0)
    means = np.full(depth, np.nan)
    stderrs = np.full(depth, np.nan)
    counts = np.zeros(depth, dtype=np.int64)
    for j in range(depth):
        vals = np.array([p[j] for p in per_run if p.size > j])
        counts[j] = vals.size
        means[j] = vals.mean()
        if vals.size > 1:
            stderrs[j] = vals.std(ddof=1) / np.sqrt(vals.size)
    return McEstimate(
        runs=runs,
        horizon=horizon,
        base_seed=base_seed,
        means=means,
        stderrs=stderrs,
        counts=counts,
        peak_norms_by_run=per_run,
    )


def enumerate_first_peak(
    sys: SystemModel,
    loss: LossModel,
    trunc_eps: float = 1e-12,
    max_lead: int = 100000,
) -> FirstPeakEnumeration:
    """Exact expectation of the first post-burst covariance.

    Conditions on the arrival prefix: a-1 immediate receptions (each a
    zero gap) followed by the first burst of length b in 1..s. The
    leading-reception count a has a geometric tail in Pi[0,0]; it is
    truncated once the remaining mass drops below trunc_eps. Burst
    lengths need no truncation, the gap chain bounds them by s.

    Returns both the mean matrix and the mean of the norm; stability is
    about the latter, and the two differ (norm is convex).
    """
    if trunc_eps <= 0.0:
        raise ValueError("trunc_eps must be positive")
    if max_lead < 1:
        raise ValueError("max_lead must be >= 1")
    check_cov(sys.Sigma0, "Sigma0")
    s = loss.s
    pi = loss.pi_stat
    P0 = loss.Pi[0, :]
    p00 = float(P0[0])

    mean_mat = np.zeros_like(sys.Sigma0)
    mean_norm = 0.0
    covered = 0.0

    def add_bursts(base: np.ndarray, weight_of_b) -> None:
        nonlocal mean_mat, mean_norm, covered
        X = base
        for b in range(1, s + 1):
            X = time_update(sys, X)
            w = weight_of_b(b)
            if w == 0.0:
                continue
            mean_mat = mean_mat + w * X
            mean_norm += w * linalg.sym_spectral_norm(X)
            covered += w

    # first gap itself is the burst
    add_bursts(sys.Sigma0, lambda b: float(pi[b]))

    a = 1
    lead_mass = float(pi[0])  # mass of prefixes with >= a-1 leading zero gaps
    if lead_mass > 0.0:
        gX = sys.Sigma0
        while lead_mass >= trunc_eps and a < max_lead:
            a += 1
            gX = measurement_update(sys, gX)
            w_lead = lead_mass
            add_bursts(gX, lambda b: w_lead * float(P0[b]))
            lead_mass *= p00
    tail = lead_mass
    return FirstPeakEnumeration(
        mean_matrix=mean_mat,
        mean_norm=mean_norm,
        covered_mass=covered,
        tail_mass=tail,
        max_span=a,
    )


def growth_trend(
    peak_lists,
    burn: int = 0,
    max_index: int | None = None,
    boots: int = 2000,
    seed: int = 0,
) -> TrendStat:
    """Trend of the across-run mean peak norm on a log scale.

    Fits log(mean_r peak[r, j]) against j by least squares over indices
    burn..J-1, where J is capped by max_index and by the shortest run.
    The slope's standard error comes from a bootstrap over runs, which
    is robust to the serial correlation along j that a residual-based
    error estimate ignores. z = slope / stderr; large positive z is
    evidence the mean grows without bound.
    """
    per_run = [np.asarray(p, dtype=float) for p in peak_lists]
    if not per_run:
        raise ValueError("need at least one run")
    depth = min(p.size for p in per_run)
    if max_index is not None:
        depth = min(depth, max_index)
    if depth - burn < 3:
        raise ValueError("need at least 3 usable peak indices after burn-in")
    Y = np.stack([p[:depth] for p in per_run])  # runs x indices
    j = np.arange(burn, depth, dtype=float)

    def slope_of(sample: np.ndarray) -> float:
        m = sample.mean(axis=0)[burn:depth]
        return float(np.polyfit(j, np.log(m), 1)[0])

    slope = slope_of(Y)
    rng = np.random.Generator(np.random.Philox(key=seed))
    n = Y.shape[0]
    bs = np.empty(boots)
    for t in range(boots):
        bs[t] = slope_of(Y[rng.integers(0, n, size=n)])
    stderr = float(bs.std(ddof=1))
    z = slope / stderr if stderr > 0 else np.inf * np.sign(slope)
    return TrendStat(
        slope=slope,
        stderr=stderr,
        z=float(z),
        n_indices=int(depth - burn),
        n_runs=n,
        burn=burn,
    )
