"""Empirical estimation: trend regressions, bootstrap, scaling exponents.

The core regression models tomorrow's normalized return as a cubic
polynomial of today's trend strength,

    R(t+1) = a + b phi(t) + c phi(t)^3 + noise,

with quadratic and quartic terms deliberately absent (they carry no
statistical significance on market data).  Standard errors come from
i.i.d. day bootstrapping, out-of-sample explanatory power from
contiguous-block cross-validation.  Scaling exponents (kappa, Hurst) are
read off log-log regressions of variance and moment curves, and a
seeded Gaussian-process generator provides oracle paths whose two-point
statistics follow a given propagator model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .theory import PropagatorModel
from .trends import ReturnSeries, TrendSeries

_MIN_OBSERVATIONS = 100
_COND_LIMIT = 1e12


# -- alignment -------------------------------------------------------------

def aligned_pairs(trend: TrendSeries, next_returns: ReturnSeries,
                  min_obs: int = _MIN_OBSERVATIONS):
    """Pair phi(t) with R(t+1), excluding the trend warm-up window."""
    n = len(next_returns.values)
    if len(trend.values) != n:
        raise ValueError("trend and return series must have equal length")
    start = max(int(trend.warmup), 0)
    x = np.asarray(trend.values[start:n - 1], dtype=np.float64)
    y = np.asarray(next_returns.values[start + 1:n], dtype=np.float64)
    if x.size < min_obs:
        raise ValueError(
            f"need at least {min_obs} aligned observations, got {x.size}")
    return x, y


# -- cubic regression --------------------------------------------------------

@dataclass(frozen=True)
class RegressionReport:
    """Cubic-regression coefficients with errors and fit quality.

    r_squared_adj is the classical small-sample adjustment; the honest
    out-of-sample figure comes from cross_validate.  R-squared values
    are fractions; multiply by 1e4 to read them in basis points.
    """
    a: float
    b: float
    c: float
    se_a: float
    se_b: float
    se_c: float
    t_a: float
    t_b: float
    t_c: float
    r_squared: float
    r_squared_adj: float
    n_obs: int
    se_method: str = "ols"

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @property
    def standard_errors(self) -> np.ndarray:
        return np.array([self.se_a, self.se_b, self.se_c])


def _design(x: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones_like(x), x, x ** 3])


def fit_cubic_xy(x, y, min_obs: int = _MIN_OBSERVATIONS) -> RegressionReport:
    """OLS of y on (1, x, x^3) for pre-aligned pairs."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    n = x.size
    if n < min_obs:
        raise ValueError(f"need at least {min_obs} observations, got {n}")
    design = _design(x)
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise ValueError("rank-deficient design (constant trend strength?)")
    resid = y - design @ coef
    ssr = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    sigma2 = ssr / (n - 3)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    se = np.sqrt(np.diag(cov))
    r2 = 1.0 - ssr / sst if sst > 0 else 0.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, coef / se, np.inf * np.sign(coef))
    return RegressionReport(
        a=float(coef[0]), b=float(coef[1]), c=float(coef[2]),
        se_a=float(se[0]), se_b=float(se[1]), se_c=float(se[2]),
        t_a=float(tstats[0]), t_b=float(tstats[1]), t_c=float(tstats[2]),
        r_squared=r2, r_squared_adj=r2_adj, n_obs=n)


def fit_cubic(trend: TrendSeries,
              next_returns: ReturnSeries) -> RegressionReport:
    """Cubic regression of next-day returns on the trend strength."""
    x, y = aligned_pairs(trend, next_returns)
    return fit_cubic_xy(x, y)


def fit_langevin_xy(x, y) -> tuple[float, float]:
    """Solve the 2x2 moment system for the no-intercept pair (beta, gamma).

        [ <x^2>  <x^4> ] [beta ]   [ <x y>   ]
        [ <x^4>  <x^6> ] [gamma] = [ <x^3 y> ]

    This equals no-intercept OLS on the regressors (x, x^3).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    x2 = x * x
    moments = np.array([
        [np.mean(x2), np.mean(x2 * x2)],
        [np.mean(x2 * x2), np.mean(x2 * x2 * x2)],
    ])
    rhs = np.array([np.mean(x * y), np.mean(x2 * x * y)])
    if np.linalg.cond(moments) > _COND_LIMIT:
        raise ValueError("singular moment matrix")
    beta, gamma = np.linalg.solve(moments, rhs)
    return float(beta), float(gamma)


def fit_langevin_pair(trend: TrendSeries,
                      next_returns: ReturnSeries) -> tuple[float, float]:
    x, y = aligned_pairs(trend, next_returns)
    return fit_langevin_xy(x, y)


# -- bootstrap ---------------------------------------------------------------

@dataclass(frozen=True)
class BootstrapResult:
    """Resampled coefficient spread for the cubic regression."""
    se_a: float
    se_b: float
    se_c: float
    percentiles: np.ndarray   # shape (3, 2): 2.5% / 97.5% per coefficient
    samples: np.ndarray       # (n_kept, 3) resampled coefficients
    n_skipped: int

    @property
    def standard_errors(self) -> np.ndarray:
        return np.array([self.se_a, self.se_b, self.se_c])


def _moment_columns(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-observation sufficient statistics for the cubic normal equations."""
    x2 = x * x
    x3 = x2 * x
    return np.column_stack([
        np.ones_like(x), x, x2, x3, x2 * x2, x3 * x3, y, x * y, x3 * y,
    ])


def _solve_from_sums(s: np.ndarray) -> np.ndarray | None:
    gram = np.array([
        [s[0], s[1], s[3]],
        [s[1], s[2], s[4]],
        [s[3], s[4], s[5]],
    ])
    rhs = np.array([s[6], s[7], s[8]])
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > _COND_LIMIT:
        return None
    return np.linalg.solve(gram, rhs)


def bootstrap_errors_xy(x, y, n_samples: int, seed,
                        groups=None) -> BootstrapResult:
    """Day-resampled standard errors for the cubic regression.

    Observations (days) are resampled i.i.d. with replacement and the
    regression refit on each sample; the per-coefficient standard
    deviation and 2.5/97.5 percentile interval are reported.  When
    `groups` labels are given (e.g. dates shared by several markets),
    whole groups are resampled jointly, preserving within-group
    correlation.  Deterministic for a fixed seed; degenerate resamples
    are skipped and counted.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if n_samples < 100:
        raise ValueError("need at least 100 bootstrap samples")
    if x.size < _MIN_OBSERVATIONS:
        raise ValueError(
            f"need at least {_MIN_OBSERVATIONS} observations, got {x.size}")
    cols = _moment_columns(x, y)
    if groups is None:
        group_sums = cols
    else:
        codes, _ = _group_codes(groups, x.size)
        group_sums = np.zeros((codes.max() + 1, cols.shape[1]))
        np.add.at(group_sums, codes, cols)
    n_groups = group_sums.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    kept = []
    skipped = 0
    for _ in range(n_samples):
        chosen = rng.integers(0, n_groups, n_groups)
        coef = _solve_from_sums(group_sums[chosen].sum(axis=0))
        if coef is None:
            skipped += 1
        else:
            kept.append(coef)
    if not kept:
        raise ValueError("all bootstrap resamples were degenerate")
    samples = np.asarray(kept)
    se = samples.std(axis=0, ddof=1)
    pct = np.percentile(samples, [2.5, 97.5], axis=0).T
    return BootstrapResult(se_a=float(se[0]), se_b=float(se[1]),
                           se_c=float(se[2]), percentiles=pct,
                           samples=samples, n_skipped=skipped)


def _group_codes(groups, size: int) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(groups)
    if labels.shape != (size,):
        raise ValueError("groups must label every observation")
    uniques, codes = np.unique(labels, return_inverse=True)
    return codes, uniques


def bootstrap_errors(trend: TrendSeries, next_returns: ReturnSeries,
                     n_samples: int, seed, groups=None) -> BootstrapResult:
    x, y = aligned_pairs(trend, next_returns)
    return bootstrap_errors_xy(x, y, n_samples, seed, groups=groups)


# -- cross-validation ---------------------------------------------------------

@dataclass(frozen=True)
class CrossValidationResult:
    """Out-of-sample R-squared from contiguous-block folds."""
    r_squared_folds: np.ndarray
    r_squared_adj: float
    folds: int
    n_obs: int


def cross_validate_xy(x, y, folds: int,
                      premium_shift: float = 0.0) -> CrossValidationResult:
    """Contiguous-block CV of the cubic regression on pre-aligned pairs.

    Each fold is scored as 1 - SS_res / SS_tot with SS_tot measured
    against the training mean.  premium_shift, when nonzero, is the
    sensitivity of the trend value to the estimated risk premium
    (weight sum); the premium is re-estimated from the training folds
    and the trend levels shifted accordingly before fitting and scoring.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if folds < 2:
        raise ValueError("need at least 2 folds")
    n = x.size
    if n < folds * 30:
        raise ValueError(f"need at least folds*30 = {folds * 30} observations")
    blocks = np.array_split(np.arange(n), folds)
    full_mean = float(y.mean())
    scores = []
    for i in range(folds):
        val = blocks[i]
        train = np.concatenate([blocks[j] for j in range(folds) if j != i])
        delta = (full_mean - float(y[train].mean())) * premium_shift
        x_train = x[train] + delta
        x_val = x[val] + delta
        design = _design(x_train)
        coef, _, rank, _ = np.linalg.lstsq(design, y[train], rcond=None)
        if rank < 3:
            raise ValueError("rank-deficient training fold")
        pred = _design(x_val) @ coef
        ss_res = float(np.sum((y[val] - pred) ** 2))
        ss_tot = float(np.sum((y[val] - y[train].mean()) ** 2))
        scores.append(1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0)
    scores = np.asarray(scores)
    return CrossValidationResult(r_squared_folds=scores,
                                 r_squared_adj=float(scores.mean()),
                                 folds=folds, n_obs=n)


def cross_validate(trend: TrendSeries, next_returns: ReturnSeries,
                   folds: int, seed=None) -> CrossValidationResult:
    """Cross-validate with the risk premium re-estimated per training set.

    The trend's dependence on the premium estimate is a uniform level
    shift of (premium difference) * (weight sum), applied from the
    training data only.  Fold assignment is deterministic (contiguous
    blocks); `seed` is accepted for interface symmetry and unused.
    """
    del seed
    x, y = aligned_pairs(trend, next_returns, min_obs=2)
    return cross_validate_xy(x, y, folds, premium_shift=-trend.weight_sum)


# -- parabolic scale dependence ------------------------------------------------

@dataclass(frozen=True)
class ParabolicFit:
    """b(k) = amplitude * (1 - (k - k0)^2 / delta_k^2) plus a constant c.

    Fitted by the exact quadratic-in-k reparametrization of the same
    least-squares objective; degenerate curvature (flat or convex b)
    is flagged with delta_k = inf.
    """
    amplitude: float
    k0: float
    delta_k: float
    c_const: float
    se_amplitude: float
    se_k0: float
    se_delta_k: float
    se_c: float
    residual_sse: float
    degenerate: bool = False


def _parabola_params(beta: np.ndarray) -> np.ndarray:
    b0, b1, b2 = beta
    amp = b0 - b1 * b1 / (4.0 * b2)
    k0 = -b1 / (2.0 * b2)
    return np.array([amp, k0, math.sqrt(-amp / b2)])


def fit_parabolic_b(b_by_scale, c_by_scale) -> ParabolicFit:
    """Fit the peaked horizon dependence of b and the constant level of c.

    b_by_scale and c_by_scale are sequences of (k, value) with
    k = log2(horizon).  Standard errors follow from the quadratic-fit
    covariance by the delta method.
    """
    b_pts = np.asarray(list(b_by_scale), dtype=np.float64)
    c_pts = np.asarray(list(c_by_scale), dtype=np.float64)
    if b_pts.ndim != 2 or b_pts.shape[1] != 2 or b_pts.shape[0] < 4:
        raise ValueError("need at least 4 (k, b) points")
    k = b_pts[:, 0]
    b = b_pts[:, 1]
    design = np.column_stack([np.ones_like(k), k, k * k])
    beta, _, rank, _ = np.linalg.lstsq(design, b, rcond=None)
    resid = b - design @ beta
    sse = float(resid @ resid)
    c_vals = c_pts[:, 1] if c_pts.size else np.array([0.0])
    c_const = float(c_vals.mean())
    se_c = float(c_vals.std(ddof=1) / math.sqrt(len(c_vals))) \
        if len(c_vals) > 1 else 0.0
    scale = float(np.abs(b).max()) + 1e-300
    if rank < 3 or beta[2] >= -1e-10 * scale \
            or beta[0] - beta[1] ** 2 / (4 * beta[2]) <= 0:
        return ParabolicFit(amplitude=float("nan"), k0=float("nan"),
                            delta_k=math.inf, c_const=c_const,
                            se_amplitude=float("nan"), se_k0=float("nan"),
                            se_delta_k=float("nan"), se_c=se_c,
                            residual_sse=sse, degenerate=True)
    dof = max(len(k) - 3, 1)
    cov = (sse / dof) * np.linalg.inv(design.T @ design)
    params = _parabola_params(beta)
    jac = np.empty((3, 3))
    for j in range(3):
        h = 1e-7 * (abs(beta[j]) + 1.0)
        bp = beta.copy()
        bp[j] += h
        jac[:, j] = (_parabola_params(bp) - params) / h
    se = np.sqrt(np.clip(np.diag(jac @ cov @ jac.T), 0.0, None))
    return ParabolicFit(amplitude=float(params[0]), k0=float(params[1]),
                        delta_k=float(params[2]), c_const=c_const,
                        se_amplitude=float(se[0]), se_k0=float(se[1]),
                        se_delta_k=float(se[2]), se_c=se_c,
                        residual_sse=sse, degenerate=False)


# -- scaling fits ---------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    """Log-log (or linear) scaling fit with residual diagnostics."""
    horizons: np.ndarray
    statistics: np.ndarray
    slope: float
    intercept: float
    slope_se: float
    exponent: float
    exponent_se: float
    residuals: np.ndarray


def _line_fit(x: np.ndarray, y: np.ndarray,
              weights: np.ndarray | None) -> tuple[float, float, float, np.ndarray]:
    design = np.column_stack([x, np.ones_like(x)])
    w = np.ones_like(x) if weights is None else np.asarray(weights, float)
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    wd = design * w[:, None]
    gram = design.T @ wd
    beta = np.linalg.solve(gram, wd.T @ y)
    resid = y - design @ beta
    dof = max(x.size - 2, 1)
    sigma2 = float((w * resid * resid).sum() / dof)
    cov = sigma2 * np.linalg.inv(gram)
    return float(beta[0]), float(beta[1]), float(math.sqrt(cov[0, 0])), resid


def moment_scaling(series, qs, horizons, kind: str = "path"
                   ) -> dict[float, ScalingFit]:
    """Generalized Hurst exponents from moment curves M_q(T).

    M_q(T) = mean over sliding windows (step 1) of |pi(t+T) - pi(t)|^q;
    H_q is slope(log M_q vs log T) / q.  kind="returns" cumulates the
    input into a path first.  The series must cover at least 10 times
    the largest horizon.
    """
    x = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if kind == "returns":
        x = np.cumsum(x)
    elif kind != "path":
        raise ValueError("kind must be 'path' or 'returns'")
    horizons = np.asarray(sorted(int(t) for t in horizons))
    if horizons.size < 3:
        raise ValueError("need at least 3 horizons")
    if np.any(horizons < 1):
        raise ValueError("horizons must be >= 1")
    if x.size < 10 * horizons.max():
        raise ValueError(
            f"series of length {x.size} is too short for T={horizons.max()}"
            " (need 10x)")
    out: dict[float, ScalingFit] = {}
    diffs = {int(t): np.abs(x[t:] - x[:-t]) for t in horizons}
    log_t = np.log(horizons.astype(float))
    for q in qs:
        if q <= 0:
            raise ValueError("moment orders must be positive")
        mq = np.array([np.mean(diffs[int(t)] ** q) for t in horizons])
        slope, intercept, slope_se, resid = _line_fit(log_t, np.log(mq), None)
        out[float(q)] = ScalingFit(
            horizons=horizons.astype(float), statistics=mq, slope=slope,
            intercept=intercept, slope_se=slope_se, exponent=slope / q,
            exponent_se=slope_se / q, residuals=resid)
    return out


def fit_kappa(variances_by_scale, weights=None,
              method: str = "log") -> ScalingFit:
    """Read kappa off the scale dependence of the trend variance.

    Input points are (k, var) with k = log2(horizon).  method="log"
    regresses ln(var) on k ln 2, whose slope is kappa - 1 (exact for the
    power law var = T^(kappa-1)); method="linear" uses the small-slope
    approximation var ~ 1 - (1-kappa) ln2 k, valid only for kappa near 1.
    Optional per-point weights (e.g. effective window counts) give a
    weighted fit.
    """
    pts = np.asarray(list(variances_by_scale), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least 3 (k, variance) points")
    k = pts[:, 0]
    var = pts[:, 1]
    w = None if weights is None else np.asarray(weights, dtype=np.float64)
    if method == "log":
        if np.any(var <= 0):
            raise ValueError("variances must be positive for the log fit")
        slope, intercept, slope_se, resid = _line_fit(
            k * math.log(2.0), np.log(var), w)
        kappa_hat = 1.0 + slope
        kappa_se = slope_se
    elif method == "linear":
        slope, intercept, slope_se, resid = _line_fit(k, var, w)
        kappa_hat = 1.0 + slope / math.log(2.0)
        kappa_se = slope_se / math.log(2.0)
    else:
        raise ValueError("method must be 'log' or 'linear'")
    return ScalingFit(horizons=2.0 ** k, statistics=var, slope=slope,
                      intercept=intercept, slope_se=slope_se,
                      exponent=kappa_hat, exponent_se=kappa_se,
                      residuals=resid)


# -- Gaussian-process oracle ---------------------------------------------------

_EIG_CLIP_REL = 1e-10
_MAX_PATH = 2 ** 15
_MAX_DENSE = 2 ** 12


def _stationary_gaussian(cov: np.ndarray, rng: np.random.Generator
                         ) -> np.ndarray:
    """One sample of a stationary Gaussian vector by circulant embedding.

    cov[h] is the autocovariance at lag h.  The covariance is embedded in
    a circulant whose eigenvalues come from one FFT; eigenvalues below
    -1e-10 * cov[0] mean the embedding is indefinite and raise, small
    negatives are clipped to zero (the documented jitter).
    """
    n = cov.size
    emb = np.concatenate([cov, cov[-2:0:-1]])
    lam = np.fft.fft(emb).real
    if lam.min() < -_EIG_CLIP_REL * abs(cov[0]):
        raise ValueError(
            "covariance is not positive semi-definite beyond clip tolerance")
    lam = np.clip(lam, 0.0, None)
    m = emb.size
    # The real part of one complex draw carries half the circulant
    # covariance, hence the 1/m (not 1/2m) scaling.
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return np.fft.fft(np.sqrt(lam / m) * z).real[:n]


def fractional_gaussian_noise(n: int, hurst: float, seed) -> np.ndarray:
    """Exact unit-variance fractional Gaussian noise (Davies-Harte).

    The autocovariance rho(h) = (|h+1|^2H - 2|h|^2H + |h-1|^2H) / 2 is
    realized exactly; cumulating the output gives fractional Brownian
    motion with E[(B(t+T) - B(t))^2] = T^(2H).
    """
    if not 0.0 < hurst < 1.0:
        raise ValueError("hurst must lie in (0, 1)")
    if n < 2:
        raise ValueError("need n >= 2")
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(np.random.SeedSequence(seed))
    if hurst == 0.5:
        return rng.standard_normal(n)
    h = np.arange(n, dtype=np.float64)
    two_h = 2.0 * hurst
    rho = 0.5 * ((h + 1.0) ** two_h + np.abs(h - 1.0) ** two_h
                 - 2.0 * h ** two_h)
    return _stationary_gaussian(rho, rng)


def _dense_stationary(cov: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Dense-eigendecomposition sampler, cross-check for small n."""
    n = cov.size
    idx = np.arange(n)
    c_mat = cov[np.abs(idx[:, None] - idx[None, :])]
    lam, vec = np.linalg.eigh(c_mat)
    trace = float(np.trace(c_mat))
    if lam.min() < -_EIG_CLIP_REL * trace / n:
        raise ValueError(
            "covariance is not positive semi-definite beyond clip tolerance")
    lam = np.clip(lam, 0.0, None)
    return vec @ (np.sqrt(lam) * rng.standard_normal(n))


def gaussian_process_from_propagator(model: PropagatorModel, n: int, seed,
                                     method: str = "auto") -> np.ndarray:
    """Sample a path pi(0..n-1) whose two-point statistics follow the model.

    exponential regime: the stationary Gaussian process with covariance
    Delta(h) itself (an Ornstein-Uhlenbeck kernel), sampled exactly by
    circulant embedding (method="circulant", default) or by dense
    eigendecomposition with eigenvalue clipping (method="dense",
    n <= 4096).

    scaling regime: the stationary kernel only exists as an increment
    law, E[(pi(t+T) - pi(t))^2] = T^kappa, matching fractional Brownian
    motion with H = kappa/2; the path is built by cumulating exact
    fractional Gaussian noise.  All return-based statistics (trend
    variances, increment autocorrelations, moment scaling) follow the
    propagator; the absolute level Delta(0) is set by the far boundary
    tau and is not realized by a finite nonstationary path.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if n > _MAX_PATH:
        raise ValueError(f"path length capped at {_MAX_PATH}")
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(np.random.SeedSequence(seed))
    if model.regime == "scaling":
        if method not in ("auto", "circulant"):
            raise ValueError(
                "scaling-regime paths are generated from fractional noise; "
                "use method='auto'")
        increments = fractional_gaussian_noise(n - 1, model.kappa / 2.0, rng)
        path = np.empty(n)
        path[0] = 0.0
        np.cumsum(increments, out=path[1:])
        return path
    if model.regime == "exponential":
        h = np.arange(n, dtype=np.float64)
        cov = 0.5 * model.tau ** model.kappa * np.exp(-h / model.tau)
        if method in ("auto", "circulant"):
            return _stationary_gaussian(cov, rng)
        if method == "dense":
            if n > _MAX_DENSE:
                raise ValueError(f"dense sampling capped at n={_MAX_DENSE}")
            return _dense_stationary(cov, rng)
        raise ValueError("method must be 'auto', 'circulant' or 'dense'")
    raise ValueError("path sampling supports scaling and exponential regimes")
