"""Statistical characterization of error series.

Four moments, histograms, normality tests, and one-dimensional Gaussian
mixture fitting with BIC order selection.  Moment conventions: sample
standard deviation (n-1 denominator), population-style skewness
g1 = m3/m2^1.5 and excess kurtosis g2 = m4/m2^2 - 3, both zero for a
Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special
from scipy import stats as sps

from .errors import (
    ConstantInput,
    DegenerateSeries,
    EmptySeries,
    TooFewSamples,
)

SHAPIRO_MAX_N = 5000        # validity cap of the W approximation
SHAPIRO_SUBSAMPLES = 11     # disjoint-seeded subsamples used above the cap


@dataclass
class MomentSummary:
    n: int
    mean: float
    median: float
    std_dev: float
    skewness: float
    excess_kurtosis: float
    degenerate: bool = False


class NormalityTest(str, Enum):
    SHAPIRO_WILK = "SHAPIRO_WILK"
    KS_GAUSSIAN = "KS_GAUSSIAN"


@dataclass
class NormalityResult:
    test: NormalityTest
    statistic: float
    p_value: float
    alpha: float
    reject: bool
    n_used: int
    meta: dict = field(default_factory=dict)


@dataclass
class GmmModel:
    k: int
    components: tuple           # ((weight, mean, std), ...) sorted by mean
    log_likelihood: float
    bic: float
    converged: bool = True


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=float)
        self.counts = np.asarray(self.counts, dtype=int)
        if len(self.bin_edges) != len(self.counts) + 1:
            raise ValueError("need len(edges) == len(counts) + 1")
        if np.any(np.diff(self.bin_edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")

    @property
    def n_total(self) -> int:
        return int(self.counts.sum())


# -- moments -------------------------------------------------------------------

def moments(x) -> MomentSummary:
    """Mean, median, sample std, and zero-centered shape moments.

    A zero-variance series is returned with degenerate=True and NaN shape
    moments rather than raising.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        raise TooFewSamples(f"moments needs n >= 2, got {n}")
    mean = float(np.mean(x))
    median = float(np.median(x))
    d = x - mean
    m2 = float(np.mean(d * d))
    std = float(np.std(x, ddof=1))
    if m2 == 0.0:
        return MomentSummary(n=n, mean=mean, median=median, std_dev=0.0,
                             skewness=float("nan"),
                             excess_kurtosis=float("nan"), degenerate=True)
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    return MomentSummary(
        n=n, mean=mean, median=median, std_dev=std,
        skewness=m3 / m2**1.5,
        excess_kurtosis=m4 / (m2 * m2) - 3.0,
    )


# -- histograms ----------------------------------------------------------------

def fd_bin_width(x) -> float:
    """Freedman-Diaconis width 2*IQR*n^(-1/3); zero when IQR degenerates."""
    x = np.asarray(x, dtype=float)
    q1, q3 = np.percentile(x, [25.0, 75.0])
    return 2.0 * (q3 - q1) * len(x) ** (-1.0 / 3.0)


def histogram(x, rule: str = "FD", width: float = None) -> Histogram:
    """Bin a series with the Freedman-Diaconis rule or a fixed width.

    FIXED bins are anchored at multiples of the width so that quantized
    series land one value per bin.
    """
    x = np.asarray(x, dtype=float)
    if len(x) == 0:
        raise EmptySeries("cannot histogram an empty series")
    lo, hi = float(np.min(x)), float(np.max(x))

    if rule == "FIXED":
        if width is None or width <= 0:
            raise ValueError("FIXED rule needs a positive width")
        first = math.floor(lo / width - 0.5)
        last = math.floor(hi / width + 0.5)
        edges = (np.arange(first, last + 2) + 0.5) * width
    else:
        w = fd_bin_width(x)
        if w <= 0 or hi == lo:
            eps = max(1e-12, 1e-12 * max(abs(lo), abs(hi)))
            edges = np.array([lo - eps, hi + eps])
        else:
            nbins = max(1, math.ceil((hi - lo) / w))
            edges = lo + w * np.arange(nbins + 1)
            if edges[-1] <= hi:  # guard float roundoff at the top edge
                edges[-1] = np.nextafter(hi, np.inf)
    counts, edges = np.histogram(x, bins=edges)
    return Histogram(bin_edges=edges, counts=counts)


# -- normality tests -----------------------------------------------------------

def _check_sample(x, min_n: int, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if len(x) < min_n:
        raise TooFewSamples(f"{name} needs n >= {min_n}, got {len(x)}")
    if np.min(x) == np.max(x):
        raise ConstantInput(f"{name} undefined for constant input")
    return x


def shapiro_wilk(x, alpha: float = 0.05, seed: int = 0) -> NormalityResult:
    """Shapiro-Wilk W test of normality.

    The W approximation is only valid up to n = 5000; larger series are
    tested on 11 disjoint-seeded random subsamples of 5000 and the median
    p-value is reported, with the per-subsample results kept in the
    metadata.
    """
    x = _check_sample(x, 3, "shapiro_wilk")
    n = len(x)
    if n <= SHAPIRO_MAX_N:
        w, p = sps.shapiro(x)
        return NormalityResult(test=NormalityTest.SHAPIRO_WILK,
                               statistic=float(w), p_value=float(p),
                               alpha=alpha, reject=bool(p < alpha), n_used=n)
    seeds = np.random.SeedSequence(seed).spawn(SHAPIRO_SUBSAMPLES)
    subs = []
    for child in seeds:
        rng = np.random.default_rng(child)
        idx = rng.choice(n, size=SHAPIRO_MAX_N, replace=False)
        w, p = sps.shapiro(x[idx])
        subs.append((float(w), float(p)))
    ws = np.array([s[0] for s in subs])
    ps = np.array([s[1] for s in subs])
    p_med = float(np.median(ps))
    return NormalityResult(
        test=NormalityTest.SHAPIRO_WILK,
        statistic=float(np.median(ws)), p_value=p_med, alpha=alpha,
        reject=bool(p_med < alpha), n_used=SHAPIRO_MAX_N,
        meta={"subsamples": subs, "policy": "median-of-11-subsamples"},
    )


def _lilliefors_p(d: float, n: int) -> float:
    """Dallal-Wilkinson approximation for the KS test with estimated
    Gaussian parameters, with the large-n modification (n capped at 100
    after rescaling D) and the Stephens branch for p > 0.1."""
    if n > 100:
        kd = d * (n / 100.0) ** 0.49
        nd = 100.0
    else:
        kd, nd = d, float(n)
    p = math.exp(
        -7.01256 * kd * kd * (nd + 2.78019)
        + 2.99587 * kd * math.sqrt(nd + 2.78019)
        - 0.122119 + 0.974598 / math.sqrt(nd) + 1.67997 / nd
    )
    if p > 0.1:
        kk = (math.sqrt(n) - 0.01 + 0.85 / math.sqrt(n)) * d
        if kk <= 0.302:
            p = 1.0
        elif kk <= 0.5:
            p = 2.76773 - 19.828315 * kk + 80.709644 * kk**2 \
                - 138.55152 * kk**3 + 81.218052 * kk**4
        elif kk <= 0.9:
            p = -4.901232 + 40.662806 * kk - 97.490286 * kk**2 \
                + 94.029866 * kk**3 - 32.355711 * kk**4
        elif kk <= 1.31:
            p = 6.198765 - 19.558097 * kk + 23.186922 * kk**2 \
                - 12.234627 * kk**3 + 2.423045 * kk**4
        else:
            p = 0.0
    return min(max(p, 0.0), 1.0)


def ks_gaussian(x, alpha: float = 0.05) -> NormalityResult:
    """Kolmogorov-Smirnov distance between the ECDF and a Gaussian fitted
    to the data.

    Because the Gaussian parameters are estimated from the same data, the
    raw asymptotic Kolmogorov p-value would be badly inflated; the p-value
    here uses the estimated-parameter (Lilliefors) calibration instead,
    which is recorded in the metadata.
    """
    x = _check_sample(x, 5, "ks_gaussian")
    n = len(x)
    mu = float(np.mean(x))
    sigma = float(np.std(x, ddof=1))
    z = np.sort((x - mu) / sigma)
    cdf = sps.norm.cdf(z)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
    p = _lilliefors_p(d, n)
    return NormalityResult(
        test=NormalityTest.KS_GAUSSIAN, statistic=d, p_value=p, alpha=alpha,
        reject=bool(p < alpha), n_used=n,
        meta={"estimated_params": True, "mu": mu, "sigma": sigma,
              "p_value_method": "lilliefors-dallal-wilkinson"},
    )


def ks_two_sample(a, b) -> tuple:
    """Two-sample KS sup-distance with the asymptotic p-value."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 5 or len(b) < 5:
        raise TooFewSamples("ks_two_sample needs n >= 5 in both samples")
    na, nb = len(a), len(b)
    a_sorted, b_sorted = np.sort(a), np.sort(b)
    vals = np.union1d(a_sorted, b_sorted)  # evaluate at distinct values (ties)
    cdf_a = np.searchsorted(a_sorted, vals, side="right") / na
    cdf_b = np.searchsorted(b_sorted, vals, side="right") / nb
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = math.sqrt(na * nb / (na + nb))
    p = float(special.kolmogorov((en + 0.12 + 0.11 / en) * d))
    return d, min(max(p, 0.0), 1.0)


# -- Gaussian mixtures -----------------------------------------------------------

GMM_TOL = 1e-8
GMM_MAX_ITER = 500
GMM_RESTARTS = 3


def _em_kernel(x, w, mu, var, var_floor, tol, max_iter):
    """EM iterations for a 1-D mixture; returns (w, mu, var, ll_history,
    converged).  Written as a fused loop so numba can compile it."""
    n = x.shape[0]
    k = mu.shape[0]
    ll_hist = np.empty(max_iter)
    resp = np.empty((n, k))
    converged = False
    prev_ll = -np.inf
    n_iter = 0
    for it in range(max_iter):
        log_w = np.log(w)
        log_norm_c = -0.5 * np.log(2.0 * np.pi * var)
        ll = 0.0
        for i in range(n):
            row_max = -np.inf
            for j in range(k):
                d = x[i] - mu[j]
                lp = log_w[j] + log_norm_c[j] - 0.5 * d * d / var[j]
                resp[i, j] = lp
                if lp > row_max:
                    row_max = lp
            s = 0.0
            for j in range(k):
                resp[i, j] = np.exp(resp[i, j] - row_max)
                s += resp[i, j]
            for j in range(k):
                resp[i, j] /= s
            ll += row_max + np.log(s)
        ll_hist[it] = ll
        n_iter = it + 1
        for j in range(k):
            nk = 0.0
            sx = 0.0
            for i in range(n):
                nk += resp[i, j]
                sx += resp[i, j] * x[i]
            if nk < 1e-300:
                nk = 1e-300
            w[j] = nk / n
            mu[j] = sx / nk
            sv = 0.0
            for i in range(n):
                d = x[i] - mu[j]
                sv += resp[i, j] * d * d
            var[j] = max(sv / nk, var_floor)
        if ll - prev_ll <= tol * abs(ll):
            converged = True
            prev_ll = ll
            break
        prev_ll = ll
    return w, mu, var, ll_hist[:n_iter], converged


try:
    from numba import njit

    _em_kernel = njit(cache=True)(_em_kernel)
except ImportError:  # pragma: no cover - numba is an optional accelerator
    pass


def _em_once(x: np.ndarray, k: int, means0: np.ndarray, stds0: np.ndarray,
             weights0: np.ndarray, var_floor: float, history: list = None):
    """Run EM to convergence from one starting point.

    Returns (weights, means, stds, log_likelihood, converged).  When given,
    `history` collects the per-iteration log-likelihoods.
    """
    w, mu, var, ll_hist, converged = _em_kernel(
        np.ascontiguousarray(x, dtype=np.float64),
        weights0.astype(np.float64).copy(),
        means0.astype(np.float64).copy(),
        np.maximum(stds0.astype(np.float64) ** 2, var_floor),
        float(var_floor), GMM_TOL, GMM_MAX_ITER,
    )
    if history is not None:
        history.extend(float(v) for v in ll_hist)
    return w, mu, np.sqrt(var), float(ll_hist[-1]), converged


def fit_gmm(x, k: int, seed: int = 0) -> GmmModel:
    """Fit a k-component 1-D Gaussian mixture by EM.

    Deterministic given seed: initialization places means at the
    (i-0.5)/k data quantiles with equal weights and stds of sample_std/k;
    two additional seed-perturbed restarts are run and the best likelihood
    kept.  Variances are floored at 1e-12 * var(x).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 10 * k:
        raise TooFewSamples(f"fit_gmm needs n >= 10k = {10 * k}, got {n}")
    var_x = float(np.var(x))
    if var_x == 0.0:
        raise DegenerateSeries("cannot fit a mixture to a constant series")
    var_floor = 1e-12 * var_x
    std_x = math.sqrt(var_x)

    q = (np.arange(k) + 0.5) / k
    base_means = np.quantile(x, q)
    base_stds = np.full(k, std_x / k)
    base_weights = np.full(k, 1.0 / k)

    rng = np.random.default_rng(seed)
    best = None
    for restart in range(GMM_RESTARTS):
        means0 = base_means.copy()
        if restart > 0:
            means0 = means0 + rng.standard_normal(k) * std_x / k
        w, mu, sd, ll, converged = _em_once(
            x, k, means0, base_stds, base_weights, var_floor)
        if best is None or ll > best[3]:
            best = (w, mu, sd, ll, converged)

    w, mu, sd, ll, converged = best
    order = np.argsort(mu)
    components = tuple((float(w[j]), float(mu[j]), float(sd[j])) for j in order)
    n_params = 3 * k - 1
    bic = n_params * math.log(n) - 2.0 * ll
    return GmmModel(k=k, components=components, log_likelihood=ll, bic=bic,
                    converged=converged)


def select_gmm_order(x, k_max: int, seed: int = 0) -> GmmModel:
    """Fit k = 1..k_max and return the minimum-BIC model."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    x = np.asarray(x, dtype=float)
    best = None
    fitted_any = False
    for k in range(1, k_max + 1):
        if len(x) < 10 * k:
            break
        model = fit_gmm(x, k, seed=seed)
        fitted_any = True
        if best is None or model.bic < best.bic:
            best = model
    if not fitted_any:
        raise TooFewSamples(f"too few samples for even k = 1 (n = {len(x)})")
    return best
