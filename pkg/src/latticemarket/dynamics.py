"""Stochastic time evolution of the lattice and of the price zero mode.

The lattice relaxes by single-spin-flip Glauber heat-bath updates, the
discrete realization of purely dissipative (non-conserved order
parameter) critical dynamics.  One time unit is one Monte Carlo sweep,
i.e. N attempted flips at uniformly random sites; random-sequential site
selection preserves detailed balance exactly.

The spatially constant mode pi(t) (total magnetization, alias price
deviation) additionally gets a direct Langevin integrator

    dpi/dt = a - (r/2) pi - (g/12) pi^3 + noise,   Var(noise) = 1/dt

integrated by Euler-Maruyama.

Randomness: all entropy flows through numpy SeedSequence.  A master seed
is split into named child streams (lattice init, dynamics, replicas), so
replicas and bootstrap draws are independent and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .lattice import SpinLattice, new_lattice
from . import trends

# Onsager critical temperature mapped to this energy normalization:
# spins +-1/2 and coupling 1/D rescale the standard +-1 Ising coupling by
# 1/(4D), so T_c(2D) = 2 * (1/8) / ln(1 + sqrt 2).
CRITICAL_TEMPERATURE_2D = 0.25 / math.log(1.0 + math.sqrt(2.0))


@dataclass(frozen=True)
class SimulationParams:
    """Glauber run description; temperature in k=1 units, time in sweeps."""
    dims: int = 2
    side: int = 32
    init: str = "random"
    temperature: float = CRITICAL_TEMPERATURE_2D
    sweeps: int = 10_000
    burn_in: int = 0
    thin: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if not 0 <= self.burn_in < self.sweeps:
            raise ValueError("burn_in must satisfy 0 <= burn_in < sweeps")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.init not in ("all_up", "all_down", "random"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class MagnetizationSeries:
    """Recorded M(t), one value per kept sweep."""
    values: np.ndarray
    params: SimulationParams


def glauber_flip_probability(delta_e: float, temperature: float) -> float:
    """Heat-bath acceptance 1 / (1 + exp(dE/T)).

    Satisfies detailed balance w.r.t. the Gibbs weight exp(-E/T):
    p(dE)/p(-dE) = exp(-dE/T).  Saturates to 0/1 instead of overflowing.
    """
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    x = delta_e / temperature
    if x >= 0:
        e = math.exp(-x) if x < 700 else 0.0
        return e / (1.0 + e)
    e = math.exp(x) if x > -700 else 0.0
    return 1.0 / (1.0 + e)


def _acceptance_table(dims: int, temperature: float) -> dict[int, float]:
    """Acceptance probability keyed by m = sigma_site * sum sigma_nbr.

    With sigma = 2s in {-1,+1}, the flip energy is dE = m / (2D); m takes
    the even values -2D..2D, so the exp is evaluated once per value.
    """
    return {
        m: glauber_flip_probability(m / (2.0 * dims), temperature)
        for m in range(-2 * dims, 2 * dims + 1, 2)
    }


def _run_sweeps(sigma: list[int], nbrs: list[list[int]], ptab: dict[int, float],
                rng: np.random.Generator, sweeps: int, record_every: int = 0,
                skip: int = 0) -> list[float]:
    """Random-sequential Glauber sweeps over a sigma = +-1 site list.

    Mutates sigma in place; returns M = sum(sigma)/2 after each recorded
    sweep.  Python lists beat numpy here because the update is
    inherently sequential and per-site.
    """
    n = len(sigma)
    out: list[float] = []
    for s in range(1, sweeps + 1):
        sites = rng.integers(0, n, n).tolist()
        coins = rng.random(n).tolist()
        for k, c in zip(sites, coins):
            nb = nbrs[k]
            acc = 0
            for j in nb:
                acc += sigma[j]
            if c < ptab[sigma[k] * acc]:
                sigma[k] = -sigma[k]
        if record_every and s > skip and (s - skip) % record_every == 0:
            out.append(sum(sigma) / 2.0)
    return out


def sweep(lattice: SpinLattice, temperature: float,
          rng: np.random.Generator) -> SpinLattice:
    """One Monte Carlo sweep: N Glauber updates at uniform random sites.

    Mutates the lattice in place and advances the generator
    deterministically; returns the lattice for chaining.
    """
    sigma = (2 * lattice.occupations.astype(np.int64) - 1).tolist()
    nbrs = lattice.neighbor_table.tolist()
    ptab = _acceptance_table(lattice.dims, temperature)
    _run_sweeps(sigma, nbrs, ptab, rng, 1)
    lattice.occupations[:] = (np.asarray(sigma, dtype=np.int64) + 1) // 2
    return lattice


def run_simulation(params: SimulationParams) -> MagnetizationSeries:
    """Run Glauber dynamics and record M every `thin` sweeps after burn-in.

    The recorded length is floor((sweeps - burn_in) / thin).  The master
    seed is split into an init stream and a dynamics stream, so identical
    params give bit-identical output.
    """
    ss_init, ss_dyn = np.random.SeedSequence(params.seed).spawn(2)
    lattice = new_lattice(params.dims, params.side, params.init,
                          seed=ss_init if params.init == "random" else None)
    sigma = (2 * lattice.occupations.astype(np.int64) - 1).tolist()
    nbrs = lattice.neighbor_table.tolist()
    ptab = _acceptance_table(params.dims, params.temperature)
    rng = np.random.default_rng(ss_dyn)
    values = _run_sweeps(sigma, nbrs, ptab, rng, params.sweeps,
                         record_every=params.thin, skip=params.burn_in)
    return MagnetizationSeries(values=np.asarray(values), params=params)


def replica_seeds(master_seed: int, n_replicas: int) -> list[int]:
    """Deterministic per-replica 64-bit seeds derived from a master seed."""
    state = np.random.SeedSequence(master_seed).generate_state(
        n_replicas, dtype=np.uint64)
    return [int(s) for s in state]


def run_replicas(params: SimulationParams, n_replicas: int,
                 max_workers: int = 1) -> list[MagnetizationSeries]:
    """Run independent replicas with seeds derived from params.seed.

    Each replica is a fully independent simulation (own lattice, own rng
    stream); results are returned in replica order regardless of
    scheduling, so the output is deterministic for any max_workers.
    """
    runs = [replace(params, seed=s)
            for s in replica_seeds(params.seed, n_replicas)]
    if max_workers <= 1:
        return [run_simulation(p) for p in runs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run_simulation, runs))


def magnetization_to_returns(series: MagnetizationSeries) -> trends.ReturnSeries:
    """First differences of M, normalized to unit sample variance.

    This is the direct identification of market returns with the time
    derivative of the price deviation.  A deterministic (constant-step)
    series has zero difference variance and is rejected.
    """
    values = np.asarray(series.values, dtype=np.float64)
    if values.size < 2:
        raise ValueError("need at least 2 recorded sweeps")
    return trends.normalize_raw_returns(np.diff(values))


def binder_cumulant(m_samples) -> float:
    """1 - <M^4> / (3 <M^2>^2), a finite-size locator of T_c."""
    m = np.asarray(m_samples, dtype=np.float64)
    if m.size < 100:
        raise ValueError("need at least 100 samples")
    m2 = np.mean(m * m)
    if m2 == 0:
        raise ValueError("<M^2> is zero")
    m4 = np.mean(m ** 4)
    return float(1.0 - m4 / (3.0 * m2 * m2))


@dataclass(frozen=True)
class AutocorrelationEstimate:
    """Integrated autocorrelation time with its self-consistent window."""
    tau: float
    window: int
    reliable: bool


def autocorrelation_time(series) -> AutocorrelationEstimate:
    """Integrated autocorrelation time tau_int = 1/2 + sum_h rho(h).

    The sum is cut at the smallest window W >= 6 * tau_int(W)
    (self-consistent windowing).  White noise gives ~0.5 in sweep units.
    If no window converges below a third of the series length the
    estimate is flagged unreliable.
    """
    x = np.asarray(getattr(series, "values", series), dtype=np.float64)
    n = x.size
    if n < 16:
        raise ValueError("series too short for autocorrelation analysis")
    x = x - x.mean()
    # biased autocovariances via FFT
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n] / n
    if acov[0] <= 0:
        raise ValueError("zero-variance series")
    rho = acov / acov[0]
    max_lag = n // 3
    tau = 0.5
    for w in range(1, max_lag + 1):
        tau += float(rho[w])
        if w >= 6.0 * tau:
            return AutocorrelationEstimate(tau=tau, window=w, reliable=True)
    return AutocorrelationEstimate(tau=tau, window=max_lag, reliable=False)


@dataclass(frozen=True)
class ZeroModeParams:
    """Euler-Maruyama parameters for the price-deviation Langevin equation.

    Stability requires dt <= 0.1 / max(1, |r|, g); the constructor
    enforces this documented bound.
    """
    r: float
    g: float
    a: float
    dt: float
    steps: int
    seed: int = 0

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("g must be >= 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        bound = 0.1 / max(1.0, abs(self.r), self.g)
        if self.dt > bound + 1e-15:
            raise ValueError(
                f"dt={self.dt} violates the stability bound dt <= {bound:.6g}")


@dataclass(frozen=True)
class PriceDeviationSeries:
    """Sampled pi(t) path, values[0] = initial condition."""
    values: np.ndarray
    params: ZeroModeParams


_DIVERGENCE_GUARD = 1e8


def integrate_zero_mode(params: ZeroModeParams,
                        initial: float = 0.0) -> PriceDeviationSeries:
    """Integrate dpi = (a - (r/2) pi - (g/12) pi^3) dt + sqrt(dt) dW.

    The noise has unit variance per unit time.  Paths exceeding the
    overflow guard raise with the offending step named.
    """
    rng = np.random.default_rng(np.random.SeedSequence(params.seed))
    noise = rng.standard_normal(params.steps) * math.sqrt(params.dt)
    r_half = 0.5 * params.r
    g_sixth2 = params.g / 12.0
    dt = params.dt
    a = params.a
    pi = float(initial)
    out = np.empty(params.steps + 1)
    out[0] = pi
    for i in range(params.steps):
        pi = pi + (a - r_half * pi - g_sixth2 * pi ** 3) * dt + noise[i]
        if not (-_DIVERGENCE_GUARD < pi < _DIVERGENCE_GUARD):
            raise RuntimeError(f"zero-mode path diverged at step {i + 1}")
        out[i + 1] = pi
    return PriceDeviationSeries(values=out, params=params)
