"""Monte Carlo confrontation of the samplers with the closed-form results.

Seeding contract
----------------
Every estimator derives its generators as

    Philox(SeedSequence(master_seed, spawn_key=(stream_id, shard_index)))

with one fixed stream id per operation (the ``STREAMS`` table) and shard
indices 0..shards-1.  Shards are therefore reproducible and non-overlapping,
may run in any order, and aggregate through sums, so identical
(seed, shards, config) always produce bit-identical results.

Each bound comparison reports estimate, standard error and bound; the bound
"holds" when estimate - 4 se <= bound, one-sided, because the inequalities
being checked are one-sided.  Statistical tests report a normalized
statistic: the maximum over their sub-checks of (observed / allowed), so
the rejection rule is uniformly "statistic > 1".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, ndtr
from scipy.stats import chi2 as _chi2

from . import walk
from .schedule import Constant, Critical, Schedule
from .zigzag import b_from_a

__all__ = [
    "STREAMS",
    "EstimatorResult",
    "TestReport",
    "RecurrencePoint",
    "VolkovResult",
    "estimate_tail",
    "tail_report",
    "estimate_covariance",
    "scaling_limit_test",
    "critical_limit_test",
    "recurrence_experiment",
    "volkov_bc_experiment",
    "moment4_experiment",
    "envelope",
]

STREAMS = {
    "tail": 1,
    "covariance": 2,
    "scaling": 3,
    "critical_walk": 4,
    "critical_zigzag": 5,
    "recurrence": 6,
    "volkov": 7,
    "moment4": 8,
    "simulate": 9,
    "zigzag": 10,
}


def stream_rng(seed: int, stream: str, shard: int) -> np.random.Generator:
    """The one rng derivation used everywhere; see the module docstring."""
    ss = np.random.SeedSequence(seed, spawn_key=(STREAMS[stream], shard))
    return np.random.Generator(np.random.Philox(ss))


def _shard_sizes(samples: int, shards: int) -> list:
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    if shards < 1:
        raise ValueError("shards must be >= 1")
    base, extra = divmod(samples, shards)
    return [base + (1 if s < extra else 0) for s in range(shards)]


def _builtin(obj):
    """Recursively strip numpy scalar/array types for JSON-stable output."""
    if isinstance(obj, dict):
        return {k: _builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_builtin(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_builtin(v) for v in obj.tolist()]
    return obj


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    std_error: float
    n_samples: int
    ci95: tuple
    seed: int
    shards: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be nonnegative")
        object.__setattr__(self, "ci95", tuple(self.ci95))

    def to_json(self) -> dict:
        return _builtin({
            "estimate": self.estimate,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "ci95": list(self.ci95),
            "seed": self.seed,
            "shards": self.shards,
        })


@dataclass(frozen=True)
class TestReport:
    """Normalized test outcome: rejected iff statistic > threshold."""

    __test__ = False  # not a pytest class, despite the name

    statistic: float
    threshold: float
    config: dict
    details: dict = field(default_factory=dict)
    rejected: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rejected", bool(self.statistic > self.threshold))

    def to_json(self) -> dict:
        return _builtin({
            "statistic": self.statistic,
            "threshold": self.threshold,
            "rejected": self.rejected,
            "config": self.config,
            "details": self.details,
        })


def _mean_estimator(sum_x: float, sum_x2: float, n: int, seed: int,
                    shards: int) -> EstimatorResult:
    mean = sum_x / n
    var = max(0.0, (sum_x2 - n * mean * mean) / (n - 1)) if n > 1 else 0.0
    se = math.sqrt(var / n)
    return EstimatorResult(mean, se, n, (mean - 1.96 * se, mean + 1.96 * se),
                           seed, shards)


def _proportion_estimator(hits: int, n: int, seed: int, shards: int) -> EstimatorResult:
    est = hits / n
    se = math.sqrt(est * (1.0 - est) / n)
    return EstimatorResult(est, se, n, (est - 1.96 * se, est + 1.96 * se), seed, shards)


def envelope(op: str, config: dict, result: EstimatorResult,
             bound: float | None = None) -> dict:
    """Self-describing JSON object for one estimator run.

    When a bound is supplied, the verdict is "holds" iff
    estimate - 4 std_error <= bound (one-sided check).
    """
    out = {"op": op, "config": _builtin(config)}
    out.update(result.to_json())
    if bound is not None:
        out["bound"] = float(bound)
        out["verdict"] = ("holds" if result.estimate - 4.0 * result.std_error <= bound
                          else "violated")
    return out


# ---------------------------------------------------------------------------
# statistical helpers


def ks_one_sample_normal(values: np.ndarray) -> float:
    """Kolmogorov-Smirnov sup distance against the standard normal CDF."""
    z = np.sort(np.asarray(values, dtype=float))
    n = z.size
    cdf = ndtr(z)
    d_plus = float(np.max(np.arange(1, n + 1) / n - cdf))
    d_minus = float(np.max(cdf - np.arange(0, n) / n))
    return max(d_plus, d_minus)


def ks_two_sample(x: np.ndarray, y: np.ndarray) -> float:
    """Two-sample KS statistic, tie-safe (evaluates ECDFs with side='right')."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / x.size
    fy = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


def ks_critical(alpha: float) -> float:
    """Asymptotic Kolmogorov critical constant c(alpha) = sqrt(-ln(alpha/2)/2)."""
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def poisson_gof(counts: np.ndarray, lam: float, alpha: float = 0.01,
                min_expected: float = 5.0) -> tuple:
    """Chi-square goodness of fit of integer counts against Poisson(lam).

    Cells with expected count below ``min_expected`` are pooled inward from
    both ends.  Returns (statistic, critical_value, dof); lam is treated as
    known, so dof = cells - 1.
    """
    counts = np.asarray(counts)
    kmax = int(counts.max())
    ks = np.arange(kmax + 1, dtype=float)
    pmf = np.exp(-lam + ks * math.log(lam) - gammaln(ks + 1.0))
    expected = np.append(pmf, max(0.0, 1.0 - pmf.sum())) * counts.size
    observed = np.append(np.bincount(counts, minlength=kmax + 1), 0).astype(float)
    while expected.size > 2 and expected[-1] < min_expected:
        expected[-2] += expected[-1]
        observed[-2] += observed[-1]
        expected, observed = expected[:-1], observed[:-1]
    while expected.size > 2 and expected[0] < min_expected:
        expected[1] += expected[0]
        observed[1] += observed[0]
        expected, observed = expected[1:], observed[1:]
    stat = float(np.sum((observed - expected) ** 2 / expected))
    dof = expected.size - 1
    crit = float(_chi2.ppf(1.0 - alpha, dof))
    return stat, crit, dof


def _zigzag_endpoints(d: int, b: float, eps: float, samples: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Vectorized draw of Z_1 over many labeled PPP realizations on (eps, 1].

    The label chain is generated forward from the first interval instead of
    outward from the anchor at t = 1; the chain's transition matrix is
    symmetric, so labels are uniform on every interval and both
    constructions induce the same joint law (this equivalence is tested
    against ``zigzag.label_intervals``).
    """
    lam = b * math.log(1.0 / eps)
    counts = rng.poisson(lam, samples)
    total_pts = int(counts.sum())
    pts = np.exp(rng.uniform(math.log(eps), 0.0, total_pts))
    owner = np.repeat(np.arange(samples), counts)
    order = np.lexsort((pts, owner))
    pts = pts[order]

    n_int = counts + 1
    total_int = int(n_int.sum())
    int_owner = np.repeat(np.arange(samples), n_int)
    starts = np.zeros(samples, dtype=np.int64)
    np.cumsum(n_int[:-1], out=starts[1:])
    first = np.zeros(total_int, dtype=bool)
    first[starts] = True
    last = np.zeros(total_int, dtype=bool)
    last[starts + counts] = True
    lefts = np.empty(total_int)
    lefts[first] = eps
    lefts[~first] = pts
    rights = np.empty(total_int)
    rights[last] = 1.0
    rights[~last] = pts
    lengths = rights - lefts

    base = rng.integers(0, 2 * d, samples)
    inc = np.zeros(total_int, dtype=np.int64)
    inc[~first] = 1 + rng.integers(0, 2 * d - 1, total_pts)
    csum = np.cumsum(inc)
    labels = (base[int_owner] + csum - csum[starts][int_owner]) % (2 * d)
    axis = labels // 2
    sign = 1 - 2 * (labels % 2)

    coords = np.zeros((samples, d))
    np.add.at(coords, (int_owner, axis), sign * lengths)
    return coords


# ---------------------------------------------------------------------------
# operations


def estimate_tail(d: int, p: float, n: int, a: float, samples: int,
                  seed: int = 0, shards: int = 1) -> EstimatorResult:
    """Empirical P(|S_n| > a sqrt(n)), Euclidean norm, binomial s.e."""
    if a < (1.0 if d == 1 else math.sqrt(d)):
        raise ValueError(f"a = {a} is below the bound's validity threshold for d = {d}")
    cutoff = a * a * n
    hits = 0
    for s, size in enumerate(_shard_sizes(samples, shards)):
        if size == 0:
            continue
        rng = stream_rng(seed, "tail", s)
        pos = walk.sample_positions(d, Constant(p), n, size, rng, method="step").at(n)
        r2 = np.sum(pos.astype(float) ** 2, axis=1)
        hits += int(np.count_nonzero(r2 > cutoff))
    return _proportion_estimator(hits, samples, seed, shards)


def tail_report(d: int, p: float, n: int, a: float, samples: int,
                seed: int = 0, shards: int = 1) -> dict:
    """estimate_tail plus its closed-form bound, as the JSON envelope."""
    from .analytics import ld_bound
    result = estimate_tail(d, p, n, a, samples, seed=seed, shards=shards)
    config = {"d": d, "p": p, "n": n, "a": a, "samples": samples,
              "seed": seed, "shards": shards}
    return envelope("tail", config, result, bound=ld_bound(p, a, d))


def estimate_covariance(schedule: Schedule, i: int, j: int, samples: int,
                        seed: int = 0, shards: int = 1) -> EstimatorResult:
    """Empirical E[Y_i Y_j] for the 1-d walk's step signs."""
    if not 1 <= i <= j:
        raise ValueError(f"need 1 <= i <= j, got i={i}, j={j}")
    probs = schedule.prefix_probs(j)
    total = 0
    for s, size in enumerate(_shard_sizes(samples, shards)):
        if size == 0:
            continue
        rng = stream_rng(seed, "covariance", s)
        sign = (rng.integers(0, 2, size) * 2 - 1).astype(np.int8)
        yi = sign.copy()
        for k in range(2, j + 1):
            mask = rng.random(size) < probs[k - 1]
            hits = int(mask.sum())
            if hits:
                sign[mask] = (rng.integers(0, 2, hits) * 2 - 1).astype(np.int8)
            if k == i:
                yi = sign.copy()
        total += int((yi.astype(np.int64) * sign).sum())
    # products are +-1, so the second moment is exactly 1
    mean = total / samples
    var = max(0.0, (samples - samples * mean * mean) / (samples - 1)) if samples > 1 else 0.0
    se = math.sqrt(var / samples)
    return EstimatorResult(mean, se, samples, (mean - 1.96 * se, mean + 1.96 * se),
                           seed, shards)


def scaling_limit_test(d: int, p: float, n: int, samples: int, seed: int = 0,
                       shards: int = 1, alpha: float = 0.01) -> TestReport:
    """Endpoint normality check under diffusive rescaling.

    Each coordinate of S_n is scaled by sqrt(d p / (2-p)) / sqrt(n), which
    normalizes the per-coordinate variance to 1 (the 1/d of the steps spent
    on an axis joins the (2-p)/p run-length factor).  Sub-checks, each
    contributing observed/allowed to the normalized statistic: per-coordinate
    KS distance to the standard normal against the alpha critical value plus
    a one-lattice-spacing allowance; per-coordinate variance within 4% of 1;
    pairwise cross-covariances within 4 s.e. of 0.
    """
    if n < 1_000:
        raise ValueError("scaling_limit_test needs n >= 10^3 to be meaningful")
    chunks = []
    for s, size in enumerate(_shard_sizes(samples, shards)):
        if size == 0:
            continue
        rng = stream_rng(seed, "scaling", s)
        chunks.append(walk.sample_positions(d, Constant(p), n, size, rng,
                                            method="step").at(n))
    pos = np.concatenate(chunks, axis=0).astype(float)
    factor = math.sqrt(d * p / (2.0 - p)) / math.sqrt(n)
    z = pos * factor

    # coordinate parity is fixed only in one dimension, where S_n has the
    # parity of n and the lattice spacing doubles
    spacing = factor * (2.0 if d == 1 else 1.0)
    ks_thresh = ks_critical(alpha) / math.sqrt(samples) + spacing
    ks = [ks_one_sample_normal(z[:, c]) for c in range(d)]
    variances = z.var(axis=0, ddof=1)
    ratios = [dc / ks_thresh for dc in ks]
    ratios += [abs(v - 1.0) / 0.04 for v in variances]
    cross = []
    for c1 in range(d):
        for c2 in range(c1 + 1, d):
            prod = z[:, c1] * z[:, c2]
            cov = float(prod.mean())
            se = float(prod.std(ddof=1)) / math.sqrt(samples)
            cross.append({"axes": [c1, c2], "cov": cov, "std_error": se})
            ratios.append(abs(cov) / (4.0 * se))
    config = {"op": "scaling", "d": d, "p": p, "n": n, "samples": samples,
              "seed": seed, "shards": shards, "alpha": alpha}
    details = {
        "ks_per_coordinate": ks,
        "ks_threshold": ks_thresh,
        "lattice_allowance": spacing,
        "variances": list(variances),
        "variance_band": [0.96, 1.04],
        "cross_covariances": cross,
    }
    return TestReport(statistic=float(max(ratios)), threshold=1.0,
                      config=config, details=details)


def critical_limit_test(d: int, a: float, n: int, samples: int, delta: float,
                        seed: int = 0, shards: int = 1,
                        zigzag_samples: int | None = None,
                        alpha: float = 0.01) -> TestReport:
    """Critical-regime comparison of the walk with the zigzag process.

    Two legs, windowed to (delta n, n] on the walk side and (delta, 1] on
    the zigzag side so both laws carry the same truncation:

    1. the number of direction changes of the walk in (delta n, n] is
       compared to Poisson(b ln(1/delta)) by mean (4 s.e.) and by chi-square;
    2. the rescaled windowed displacement (S_n - S_{floor(delta n)})/n is
       compared per coordinate and in Euclidean norm to the truncated zigzag
       endpoint Z_1 by two-sample KS.  Matching the truncations also matches
       the straight-run atoms (both sit exactly at 1 - delta); the naive
       untruncated comparison |S_n|/n vs the truncated Z_1 mixes different
       laws and is reported in details only, outside the statistic.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if n < 10_000:
        raise ValueError("critical_limit_test needs n >= 10^4 to be meaningful")
    zigzag_samples = samples if zigzag_samples is None else zigzag_samples
    b = b_from_a(a, d)
    schedule = Critical(a=a, n0=max(1, math.ceil(a)))
    m = int(delta * n)

    counts_parts, sm_parts, sn_parts = [], [], []
    for s, size in enumerate(_shard_sizes(samples, shards)):
        if size == 0:
            continue
        rng = stream_rng(seed, "critical_walk", s)
        out = walk.sample_positions(d, schedule, n, size, rng, times=(m, n),
                                    count_changes_in=(m, n), method="events")
        counts_parts.append(out.change_counts)
        sm_parts.append(out.at(m))
        sn_parts.append(out.at(n))
    counts = np.concatenate(counts_parts)
    s_m = np.concatenate(sm_parts, axis=0).astype(float)
    s_n = np.concatenate(sn_parts, axis=0).astype(float)
    windowed = (s_n - s_m) / n

    z_parts = []
    for s, size in enumerate(_shard_sizes(zigzag_samples, shards)):
        if size == 0:
            continue
        rng = stream_rng(seed, "critical_zigzag", s)
        z_parts.append(_zigzag_endpoints(d, b, delta, size, rng))
    zz = np.concatenate(z_parts, axis=0)

    lam = b * math.log(1.0 / delta)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1)) / math.sqrt(samples)
    ratio_mean = abs(mean - lam) / (4.0 * se)
    chi_stat, chi_crit, chi_dof = poisson_gof(counts, lam, alpha=alpha)

    ks_thresh = ks_critical(alpha) * math.sqrt((samples + zigzag_samples)
                                               / (samples * zigzag_samples))
    ks_coords = [ks_two_sample(windowed[:, c], zz[:, c]) for c in range(d)]
    ks_norm = ks_two_sample(np.linalg.norm(windowed, axis=1),
                            np.linalg.norm(zz, axis=1))
    unmatched = ks_two_sample(np.linalg.norm(s_n / n, axis=1),
                              np.linalg.norm(zz, axis=1))

    ratios = [ratio_mean, chi_stat / chi_crit]
    ratios += [dc / ks_thresh for dc in ks_coords]
    ratios.append(ks_norm / ks_thresh)
    config = {"op": "critical", "d": d, "a": a, "n": n, "samples": samples,
              "zigzag_samples": zigzag_samples, "delta": delta, "seed": seed,
              "shards": shards, "alpha": alpha}
    details = {
        "b": b,
        "turn_count_mean": mean,
        "turn_count_se": se,
        "poisson_mean": lam,
        "chi2_statistic": chi_stat,
        "chi2_critical": chi_crit,
        "chi2_dof": chi_dof,
        "ks_per_coordinate": ks_coords,
        "ks_norm": ks_norm,
        "ks_threshold": ks_thresh,
        "ks_norm_untruncated_info": unmatched,
    }
    return TestReport(statistic=float(max(ratios)), threshold=1.0,
                      config=config, details=details)


@dataclass(frozen=True)
class RecurrencePoint:
    horizon: int
    mean_visits: float
    se_visits: float
    fraction_late: float
    se_late: float

    def to_json(self) -> dict:
        return _builtin({
            "horizon": self.horizon,
            "mean_visits": self.mean_visits,
            "se_visits": self.se_visits,
            "fraction_late": self.fraction_late,
            "se_late": self.se_late,
        })


def recurrence_experiment(d: int, schedule: Schedule, horizons, samples: int,
                          seed: int = 0, shards: int = 1) -> list:
    """Origin-visit statistics at nested horizons over a shared path set.

    For each horizon h: the mean number of visits to the origin in [1, h],
    and the fraction of paths with at least one visit in (h/2, h] (the
    "still coming back late" signature).  Horizons must be increasing; each
    path is simulated once to the largest horizon.
    """
    horizons = [int(h) for h in horizons]
    if any(h2 <= h1 for h1, h2 in zip(horizons, horizons[1:])) or not horizons:
        raise ValueError("horizons must be a nonempty strictly increasing list")
    if horizons[0] < 0:
        raise ValueError("horizons must be nonnegative")
    positive = [h for h in horizons if h >= 1]
    count_parts = {h: [] for h in positive}
    late_parts = {h: [] for h in positive}
    if positive:
        for s, size in enumerate(_shard_sizes(samples, shards)):
            if size == 0:
                continue
            rng = stream_rng(seed, "recurrence", s)
            stats = walk.sample_visit_stats(d, schedule, positive[-1], size, rng,
                                            horizons=positive)
            for h in positive:
                count_parts[h].append(stats.counts[h])
                late_parts[h].append(stats.late[h])
    out = []
    for h in horizons:
        if h == 0:
            out.append(RecurrencePoint(0, 0.0, 0.0, 0.0, 0.0))
            continue
        counts = np.concatenate(count_parts[h])
        late = np.concatenate(late_parts[h])
        mean = float(counts.mean())
        se = float(counts.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
        frac = float(late.mean())
        se_frac = math.sqrt(frac * (1.0 - frac) / samples)
        out.append(RecurrencePoint(h, mean, se, frac, se_frac))
    return out


@dataclass(frozen=True)
class VolkovResult:
    single: EstimatorResult
    joint: EstimatorResult
    horizon: int
    certified_error: float


def _volkov_certify(p: float, j: int, horizon: int | None) -> tuple:
    """Pick/validate a horizon making truncation error < 1e-6.

    Post-horizon misclassification needs either X_H < j + Delta (Hoeffding)
    or a return of depth Delta from above (probability r^Delta, twice for
    the two levels); Delta is fixed so the return part is below 5e-7.
    """
    r = (1.0 - p) / p
    mu = 2.0 * p - 1.0
    delta = math.ceil(math.log(2.5e-7) / math.log(r))

    def err(h: int) -> float:
        slack = mu * h - j - delta
        hoeff = 1.0 if slack <= 0 else math.exp(-slack * slack / (2.0 * h))
        return hoeff + 2.0 * r ** delta

    if horizon is None:
        horizon = 256
        while err(horizon) > 1e-6:
            horizon *= 2
    elif err(horizon) > 1e-6:
        raise ValueError(
            f"horizon {horizon} cannot certify truncation error < 1e-6 for p={p}, j={j}")
    return horizon, err(horizon)


def volkov_bc_experiment(p: float, i: int, j: int, samples: int,
                         horizon: int | None = None, seed: int = 0,
                         shards: int = 1) -> VolkovResult:
    """Pass-once frequencies for the biased +-1 walk.

    The walk passes level l "once" when, after first hitting l, it never
    falls back to l or below.  Detection runs within a horizon certified so
    that post-horizon reversals contribute < 1e-6 misclassification mass;
    horizon=None picks the smallest power-of-two that certifies.
    Returns estimators for P(pass i) and P(pass i and pass j).
    """
    if not 0.5 < p < 1.0:
        raise ValueError(f"p must be in (1/2, 1), got {p}")
    if not 1 <= i < j:
        raise ValueError(f"need 1 <= i < j, got i={i}, j={j}")
    horizon, cert = _volkov_certify(p, j, horizon)
    hits_i = 0
    hits_ij = 0
    chunk = 2048
    for s, size in enumerate(_shard_sizes(samples, shards)):
        rng = stream_rng(seed, "volkov", s)
        done = 0
        while done < size:
            c = min(chunk, size - done)
            steps = (rng.random((c, horizon)) < p).astype(np.int8) * 2 - 1
            x = np.cumsum(steps, axis=1, dtype=np.int32)
            # suffix minima: smallest value from each time onward
            suffmin = np.minimum.accumulate(x[:, ::-1], axis=1)[:, ::-1]
            rows = np.arange(c)
            passed = {}
            for level in (i, j):
                hit = x == level
                has = hit.any(axis=1)
                tau = hit.argmax(axis=1)
                after = np.full(c, np.iinfo(np.int32).max, dtype=np.int32)
                inner = has & (tau < horizon - 1)
                after[inner] = suffmin[rows[inner], tau[inner] + 1]
                passed[level] = has & (after > level)
            hits_i += int(passed[i].sum())
            hits_ij += int((passed[i] & passed[j]).sum())
            done += c
    single = _proportion_estimator(hits_i, samples, seed, shards)
    joint = _proportion_estimator(hits_ij, samples, seed, shards)
    return VolkovResult(single=single, joint=joint, horizon=horizon,
                        certified_error=cert)


def moment4_experiment(p: float, n: int, samples: int, seed: int = 0,
                       shards: int = 1) -> EstimatorResult:
    """Empirical E[L_n^4] of the 1-d walk, s.e. from the sample variance."""
    if n < 1:
        raise ValueError("n must be positive")
    sum_x = 0.0
    sum_x2 = 0.0
    for s, size in enumerate(_shard_sizes(samples, shards)):
        if size == 0:
            continue
        rng = stream_rng(seed, "moment4", s)
        pos = walk.sample_positions(1, Constant(p), n, size, rng, method="step").at(n)
        x = pos[:, 0].astype(float) ** 4
        sum_x += float(x.sum())
        sum_x2 += float((x * x).sum())
    return _mean_estimator(sum_x, sum_x2, samples, seed, shards)
