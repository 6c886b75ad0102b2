"""Reproducible analysis pipelines behind the command-line interface.

Every command is a pure function of (inputs, config, master seed): output
files carry a provenance header and reruns are byte-identical.  Defaults
match the standard study protocol: horizons 2^k for k = 1..10, 5000
bootstrap samples, 15 cross-validation folds.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics, io, stats, theory, trends

log = logging.getLogger("latticemarket")


@dataclass
class PipelineConfig:
    """Analysis defaults; CLI flags > config file > these values."""
    horizons: list[int] = field(default_factory=lambda: list(range(1, 11)))
    estimator: str = "phi"            # phi | psi | step
    bootstrap_samples: int = 5000
    cv_folds: int = 15
    seed: int = 0
    # simulate
    dims: int = 2
    side: int = 32
    init: str = "random"
    temperature: float = dynamics.CRITICAL_TEMPERATURE_2D
    sweeps: int = 20000
    burn_in: int = 2000
    thin: int = 1
    # predict
    dimension: float | None = 3.0
    kappa: float | None = None
    tau: float = 2.0 ** 15
    regime: str = "scaling"
    predict_horizons: list[int] = field(default_factory=lambda: list(range(1, 14)))

    def validate(self) -> "PipelineConfig":
        if not self.horizons or any(k < 1 for k in self.horizons):
            raise ValueError("horizons must be positive k values")
        if self.estimator not in ("phi", "psi", "step"):
            raise ValueError("estimator must be phi, psi or step")
        if self.bootstrap_samples < 100:
            raise ValueError("bootstrap_samples must be >= 100")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")
        if self.regime not in ("scaling", "exponential", "matched"):
            raise ValueError("regime must be scaling, exponential or matched")
        if self.dimension is None and self.kappa is None:
            raise ValueError("need dimension or kappa for predictions")
        return self

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def overridden(self, **kwargs) -> "PipelineConfig":
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return dataclasses.replace(self, **updates)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _weights_for(estimator: str, horizon: int) -> trends.WeightFunction:
    if estimator == "step":
        return trends.weight_step(horizon)
    if estimator == "psi":
        return trends.weight_psi(horizon)
    return trends.weight_phi(horizon)


def _propagator_from_config(config: PipelineConfig) -> theory.PropagatorModel:
    if config.kappa is not None:
        kappa = config.kappa
    else:
        kappa = theory.kappa_for_dimension(config.dimension)
    t_star = config.tau / 2.0 if config.regime == "matched" else None
    return theory.PropagatorModel(tau=config.tau, kappa=kappa,
                                  regime=config.regime, t_star=t_star)


# -- simulate -------------------------------------------------------------

def cmd_simulate(config: PipelineConfig, out_dir) -> list[Path]:
    """Run the lattice simulation; write magnetization, returns, params."""
    config.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = dynamics.SimulationParams(
        dims=config.dims, side=config.side, init=config.init,
        temperature=config.temperature, sweeps=config.sweeps,
        burn_in=config.burn_in, thin=config.thin, seed=config.seed)
    series = dynamics.run_simulation(params)
    n_sites = config.side ** config.dims
    prov = io.make_provenance(
        config.seed,
        inputs={"config": io.sha256_of_text(
            json.dumps(config.as_dict(), sort_keys=True))})
    mag_path = out / "magnetization.csv"
    rows = []
    for i, m in enumerate(series.values):
        sweep_no = params.burn_in + (i + 1) * params.thin
        rows.append((sweep_no, m, 1.0 + 2.0 * m / n_sites))
    io.write_csv(mag_path, ["sweep", "M", "price"], rows, prov)
    returns = dynamics.magnetization_to_returns(series)
    ret_path = out / "returns.csv"
    io.write_csv(ret_path, ["t", "R"],
                 list(enumerate(returns.values)), prov)
    params_path = out / "params.json"
    io.write_json(params_path, {"params": dataclasses.asdict(params),
                                "n_sites": n_sites,
                                "returns_mu": returns.mu,
                                "returns_sigma": returns.sigma}, prov)
    return [mag_path, ret_path, params_path]


# -- predict --------------------------------------------------------------

def cmd_predict(config: PipelineConfig, out_dir) -> list[Path]:
    """Emit the theory curves over the prediction horizons."""
    config.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = _propagator_from_config(config)
    prov = io.make_provenance(
        config.seed,
        inputs={"config": io.sha256_of_text(
            json.dumps(config.as_dict(), sort_keys=True))},
        extra={"kappa": model.kappa, "tau": model.tau,
               "regime": model.regime
               + (" (heuristic)" if model.regime == "matched" else "")})
    rows = []
    for k in config.predict_horizons:
        horizon = 2.0 ** k
        if model.regime == "scaling" and 2.0 * horizon > model.tau:
            log.warning("dropping k=%d: 2T exceeds tau in the scaling regime", k)
            continue
        try:
            rows.append((
                k, horizon,
                theory.predicted_return_autocorrelation(model, horizon),
                theory.predicted_trend_return_correlation(model, 2.0 / horizon),
                theory.predicted_trend_variance(model, horizon, "phi"),
                theory.predicted_trend_variance(model, horizon, "tilde"),
                theory.predicted_adjacent_window_correlation(model, horizon),
            ))
        except theory.DomainError as exc:
            log.warning("dropping k=%d: %s", k, exc)
    pred_path = out / "predictions.csv"
    io.write_csv(pred_path,
                 ["k", "T", "return_autocorrelation",
                  "trend_return_correlation", "variance_phi",
                  "variance_tilde", "adjacent_window_correlation"],
                 rows, prov)
    hurst = model.kappa / 2.0
    try:
        dim = theory.dimension_for_kappa(model.kappa)
    except ValueError:
        dim = None
    hurst_path = out / "hurst.csv"
    io.write_csv(hurst_path, ["dimension", "kappa", "hurst"],
                 [(dim if dim is not None else "", model.kappa, hurst)], prov)
    params_path = out / "params.json"
    io.write_json(params_path, {"config": config.as_dict(),
                                "kappa": model.kappa, "hurst": hurst,
                                "dimension": dim}, prov)
    return [pred_path, hurst_path, params_path]


# -- analyze ----------------------------------------------------------------

@dataclass
class _ScaleData:
    k: int
    x: np.ndarray           # trend strengths, pooled across markets
    y: np.ndarray           # next-day normalized returns
    dates: np.ndarray       # ISO date of the target return
    market_idx: np.ndarray  # market index per observation
    weight_sum: float       # premium sensitivity of the trend level


def _market_scale_data(table: io.PriceTable, horizons: list[int],
                       estimator: str) -> tuple[list[_ScaleData], list, list]:
    """Aligned (phi, next return) observations per scale, pooled over markets."""
    returns_all = []
    for market in table.markets:
        returns_all.append(trends.normalize_returns(market.prices))
    scales = []
    for k in horizons:
        horizon = 2 ** k
        weights = _weights_for(estimator, horizon)
        # statistical warm-up, not the (much longer) numerical truncation
        warmup = min(weights.n_max,
                     trends.statistical_warmup(estimator, horizon))
        xs, ys, ds, ms = [], [], [], []
        for m_idx, (market, rets) in enumerate(zip(table.markets, returns_all)):
            n = len(rets.values)
            start = warmup
            if n - 1 - start < 30:
                continue
            trend = trends.trend_strength(rets, weights)
            xs.append(trend.values[start:n - 1])
            ys.append(rets.values[start + 1:n])
            # return index i carries the date of its later price
            ds.append([d.isoformat() for d in market.dates[start + 2:n + 1]])
            ms.append(np.full(n - 1 - start, m_idx, dtype=np.int64))
        if not xs:
            log.warning("dropping k=%d: no market has enough history", k)
            continue
        x = np.concatenate(xs)
        if x.size < stats._MIN_OBSERVATIONS:
            log.warning("dropping k=%d: only %d pooled observations",
                        k, x.size)
            continue
        scales.append(_ScaleData(
            k=k, x=x, y=np.concatenate(ys),
            dates=np.concatenate(ds), market_idx=np.concatenate(ms),
            weight_sum=float(weights.weights.sum())))
    return scales, returns_all, [m.name for m in table.markets]


def _date_block_cv(x, y, dates, folds: int) -> float:
    """Out-of-sample R^2 with folds that are contiguous date blocks."""
    order = np.argsort(dates, kind="stable")
    x, y, dates = x[order], y[order], dates[order]
    unique_dates = np.unique(dates)
    if unique_dates.size < folds:
        raise ValueError("fewer distinct dates than folds")
    date_blocks = np.array_split(unique_dates, folds)
    scores = []
    for block in date_blocks:
        val_mask = np.isin(dates, block)
        if val_mask.sum() < 4 or (~val_mask).sum() < 30:
            raise ValueError("fold too small")
        res = stats.fit_cubic_xy(x[~val_mask], y[~val_mask], min_obs=30)
        coef = res.coefficients
        pred = coef[0] + coef[1] * x[val_mask] + coef[2] * x[val_mask] ** 3
        y_val = y[val_mask]
        train_mean = y[~val_mask].mean()
        ss_res = float(np.sum((y_val - pred) ** 2))
        ss_tot = float(np.sum((y_val - train_mean) ** 2))
        scores.append(1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0)
    return float(np.mean(scores))


def analyze_price_table(table: io.PriceTable,
                        config: PipelineConfig) -> dict:
    """Full empirical pipeline on a loaded price table; returns the report."""
    scales, returns_all, names = _market_scale_data(
        table, config.horizons, config.estimator)
    if not scales:
        raise ValueError("no usable horizon: price history too short")
    report: dict = {"markets": names,
                    "estimator": config.estimator,
                    "horizons_requested": list(config.horizons),
                    "horizons_used": [s.k for s in scales]}

    # per-scale regression and trend statistics
    by_scale = []
    for s in scales:
        fit = stats.fit_cubic_xy(s.x, s.y)
        by_scale.append({
            "k": s.k, "T": 2 ** s.k, "n_obs": fit.n_obs,
            "a": fit.a, "b": fit.b, "c": fit.c,
            "se_b": fit.se_b, "se_c": fit.se_c,
            "trend_return_covariance": float(np.mean(s.x * s.y)),
            "r_squared": fit.r_squared,
        })
    report["by_scale"] = by_scale

    # stacked regression across markets and scales (the headline fit)
    x_all = np.concatenate([s.x for s in scales])
    y_all = np.concatenate([s.y for s in scales])
    dates_all = np.concatenate([s.dates for s in scales])
    stacked = stats.fit_cubic_xy(x_all, y_all)
    boot = stats.bootstrap_errors_xy(
        x_all, y_all, config.bootstrap_samples, config.seed,
        groups=dates_all)
    cv_r2 = _date_block_cv(x_all, y_all, dates_all, config.cv_folds)
    report["regression"] = {
        "a": stacked.a, "b": stacked.b, "c": stacked.c,
        "se_a": boot.se_a, "se_b": boot.se_b, "se_c": boot.se_c,
        "t_a": stacked.a / boot.se_a if boot.se_a > 0 else math.inf,
        "t_b": stacked.b / boot.se_b if boot.se_b > 0 else math.inf,
        "t_c": stacked.c / boot.se_c if boot.se_c > 0 else math.inf,
        "r_squared": stacked.r_squared,
        "r_squared_cv": cv_r2,
        "n_obs": stacked.n_obs,
        "bootstrap_samples": config.bootstrap_samples,
        "bootstrap_skipped": boot.n_skipped,
        "cv_folds": config.cv_folds,
    }

    # combined factor: equally weighted mean trend across scales
    combined = _combined_factor(scales)
    if combined is not None:
        xc, yc, dc = combined
        cfit = stats.fit_cubic_xy(xc, yc)
        report["aggregated_factor"] = {
            "a": cfit.a, "b": cfit.b, "c": cfit.c,
            "r_squared": cfit.r_squared,
            "r_squared_cv": _date_block_cv(xc, yc, dc, config.cv_folds),
            "n_obs": cfit.n_obs,
        }

    # horizon dependence of b and c
    if len(by_scale) >= 4:
        para = stats.fit_parabolic_b(
            [(row["k"], row["b"]) for row in by_scale],
            [(row["k"], row["c"]) for row in by_scale])
        report["parabolic_b"] = {
            "amplitude": para.amplitude, "k0": para.k0,
            "delta_k": para.delta_k, "c_const": para.c_const,
            "degenerate": para.degenerate,
        }

    # step-trend variance over non-overlapping windows, pooled per scale
    var_rows, counts = [], []
    for s in scales:
        horizon = 2 ** s.k
        sq_sum, n_win, pair_prod, n_pair = 0.0, 0, 0.0, 0
        for rets in returns_all:
            if len(rets.values) < 2 * horizon:
                continue
            adj = trends.adjacent_window_trends(rets, horizon)
            sq_sum += float(np.sum(adj.values ** 2))
            n_win += adj.values.size
            pair_prod += float(np.sum(adj.pairs[:, 0] * adj.pairs[:, 1]))
            n_pair += adj.pairs.shape[0]
        if n_win < 4:
            continue
        variance = sq_sum / n_win
        var_rows.append({
            "k": s.k, "T": horizon, "variance_tilde": variance,
            "n_windows": n_win,
            "adjacent_correlation":
                (pair_prod / n_pair / variance) if n_pair else 0.0,
        })
        counts.append(n_win)
    report["variance_by_scale"] = var_rows

    # kappa and network dimension from the variance curve
    if len(var_rows) >= 3:
        kap_fit = stats.fit_kappa(
            [(row["k"], row["variance_tilde"]) for row in var_rows],
            weights=np.asarray(counts, dtype=float))
        kappa_hat = kap_fit.exponent
        kappa_se = kap_fit.exponent_se
        report["kappa"] = {"estimate": kappa_hat, "se": kappa_se}
        report["dimension"] = {
            "estimate": _safe_dimension(kappa_hat),
            "low": _safe_dimension(kappa_hat - kappa_se),
            "high": _safe_dimension(kappa_hat + kappa_se),
        }
        if report["dimension"]["estimate"] is not None:
            report["hurst_predicted"] = kappa_hat / 2.0

    # moment scaling (generalized Hurst exponents), pooled per observation
    report["moment_scaling"] = _pooled_moments(returns_all, config.horizons)
    return report


def _combined_factor(scales: list[_ScaleData]):
    """Equally weighted mean of the per-scale trends on shared observations."""
    if len(scales) < 2:
        return None
    keys = [np.char.add(np.char.add(s.dates, "|"),
                        s.market_idx.astype(str)) for s in scales]
    common = keys[0]
    for arr in keys[1:]:
        common = np.intersect1d(common, arr)
    if common.size < stats._MIN_OBSERVATIONS:
        return None
    x_sum = np.zeros(common.size)
    y_ref = None
    d_ref = None
    for s, key in zip(scales, keys):
        order = np.argsort(key, kind="stable")
        pos = np.searchsorted(key[order], common)
        sel = order[pos]
        x_sum += s.x[sel]
        if y_ref is None:
            y_ref = s.y[sel]
            d_ref = s.dates[sel]
    return x_sum / len(scales), y_ref, d_ref


def _safe_dimension(kappa: float):
    try:
        return theory.dimension_for_kappa(min(kappa, 1.0))
    except ValueError:
        return None


def _pooled_moments(returns_all, horizons: list[int],
                    qs=(1.0, 2.0, 3.0, 4.0)) -> dict:
    """Per-observation pooled M_q(T) across markets, with H_q fits."""
    rows: dict[float, dict[int, list[float]]] = {q: {} for q in qs}
    for rets in returns_all:
        path = np.cumsum(rets.excess())
        usable = [k for k in horizons if 2 ** k * 10 <= path.size]
        if len(usable) < 3:
            continue
        fits = stats.moment_scaling(path, qs, [2 ** k for k in usable])
        for q in qs:
            for k, stat in zip(usable, fits[q].statistics):
                n_win = path.size - 2 ** k
                rows[q].setdefault(k, []).append((stat, n_win))
    out = {"qs": list(qs), "curves": [], "hurst": {}}
    for q in qs:
        curve = []
        for k in sorted(rows[q]):
            pairs = rows[q][k]
            total = sum(n for _, n in pairs)
            pooled = sum(s * n for s, n in pairs) / total
            curve.append({"q": q, "k": k, "T": 2 ** k, "M_q": pooled})
        out["curves"].extend(curve)
        if len(curve) >= 3:
            log_t = np.log([row["T"] for row in curve])
            log_m = np.log([row["M_q"] for row in curve])
            slope, _, slope_se, _ = stats._line_fit(log_t, log_m, None)
            out["hurst"][str(q)] = {"H": slope / q, "se": slope_se / q}
    return out


def cmd_analyze(config: PipelineConfig, price_path, out_dir,
                schema: str = "long") -> list[Path]:
    """Load prices, run the full pipeline, write the report and figures."""
    config.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = io.load_price_csv(price_path, schema=schema)
    report = analyze_price_table(table, config)
    prov = io.make_provenance(
        config.seed,
        inputs={Path(price_path).name: io.sha256_of_file(price_path),
                "config": io.sha256_of_text(
                    json.dumps(config.as_dict(), sort_keys=True))})
    paths = []
    report_path = out / "report.json"
    io.write_json(report_path, {"report": report,
                                "config": config.as_dict()}, prov)
    paths.append(report_path)

    coeff_path = out / "coefficients_by_scale.csv"
    io.write_csv(coeff_path, ["k", "T", "b", "se_b", "c", "se_c", "n_obs"],
                 [(r["k"], r["T"], r["b"], r["se_b"], r["c"], r["se_c"],
                   r["n_obs"]) for r in report["by_scale"]], prov)
    paths.append(coeff_path)

    auto_path = out / "trend_autocorrelation.csv"
    io.write_csv(auto_path, ["k", "T", "trend_return_covariance"],
                 [(r["k"], r["T"], r["trend_return_covariance"])
                  for r in report["by_scale"]], prov)
    paths.append(auto_path)

    var_path = out / "variance_by_scale.csv"
    io.write_csv(var_path,
                 ["k", "T", "variance_tilde", "adjacent_correlation",
                  "n_windows"],
                 [(r["k"], r["T"], r["variance_tilde"],
                   r["adjacent_correlation"], r["n_windows"])
                  for r in report["variance_by_scale"]], prov)
    paths.append(var_path)

    mom_path = out / "moments.csv"
    io.write_csv(mom_path, ["q", "k", "T", "M_q"],
                 [(r["q"], r["k"], r["T"], r["M_q"])
                  for r in report["moment_scaling"]["curves"]], prov)
    paths.append(mom_path)

    reg = report["regression"]
    table_path = out / "coefficient_table.csv"
    io.write_csv(table_path, ["Coefficient", "Value", "Error", "t-statistic"],
                 [("a", reg["a"], reg["se_a"], reg["t_a"]),
                  ("b", reg["b"], reg["se_b"], reg["t_b"]),
                  ("c", reg["c"], reg["se_c"], reg["t_c"]),
                  ("R2", reg["r_squared"], "", ""),
                  ("R2_adj_cv", reg["r_squared_cv"], "", "")], prov)
    paths.append(table_path)
    return paths


# -- fit-kappa ----------------------------------------------------------------

def cmd_fit_kappa(config: PipelineConfig, variance_csv, out_dir) -> Path:
    """Fit kappa from a (k, variance) CSV and invert to the dimension."""
    config.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header, rows = io.read_csv_rows(variance_csv)
    cols = {name.strip().lower(): i for i, name in enumerate(header)}
    k_col = cols.get("k", 0)
    v_col = cols.get("variance", cols.get("variance_tilde", 1))
    points = []
    for row in rows:
        points.append((float(row[k_col]), float(row[v_col])))
    fit = stats.fit_kappa(points)
    kappa_hat, kappa_se = fit.exponent, fit.exponent_se
    result = {
        "kappa": kappa_hat,
        "kappa_se": kappa_se,
        "dimension": _safe_dimension(kappa_hat),
        "dimension_low": _safe_dimension(kappa_hat - kappa_se),
        "dimension_high": _safe_dimension(kappa_hat + kappa_se),
        "n_points": len(points),
    }
    prov = io.make_provenance(
        config.seed,
        inputs={Path(variance_csv).name: io.sha256_of_file(variance_csv)})
    report_path = out / "kappa_fit.json"
    io.write_json(report_path, result, prov)
    return report_path
