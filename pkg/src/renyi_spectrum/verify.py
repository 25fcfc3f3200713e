"""Randomized certification sweeps over the library's invariants.

Each check draws spectra from the flat Dirichlet distribution on the
probability simplex (sorted non-increasing) and measures a signed
margin whose sign decides pass or fail: the check passes when
``margin >= threshold``.  Margins are ordinary library outputs, so any
reported worst case can be replayed exactly from the spectrum recorded
in the report.

Checks
------
roundtrip          spectrum -> power sums -> invariants -> roots -> spectrum,
                   margin is minus the worst eigenvalue error
newton_identity    degree-d Newton identity residual between invariants
                   expanded directly and power sums
jacobian_fd        analytic de_k/dr_l against central differences
integral_vs_direct von Neumann entropy by quadrature against direct sum
sign_dSdSq         dS/dS_q >= 0 for even q, <= 0 for odd q
sign_dSde          dS/de_k >= 0
sign_dr_de         columns of dr/de non-positive for even order,
                   non-negative for odd order
reconstruction     spectrum -> Renyi entropies -> recovered spectrum

Sampling is deterministic: sample i of dimension d under seed s comes
from its own Philox substream keyed by (s, d, i), so results do not
depend on evaluation order.  The worker pool size is taken from the
``RENYI_SPECTRUM_THREADS`` environment variable (or the config), and
reports are byte identical for any thread count.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entropy import entropy_gradient, renyi_vector, von_neumann_direct, von_neumann_integral
from .exceptions import (
    ConfigError,
    DimensionTooLarge,
    DimensionTooSmall,
    SpectrumError,
)
from .invariants import (
    D_MAX,
    PowerSums,
    Spectrum,
    _as_spectrum,
    elem_from_power,
    elem_sym_direct,
    jacobian_e_wrt_r,
    jacobian_r_wrt_e,
    newton_residual,
    power_sums,
    spectrum_from_elem,
)
from .reconstruct import reconstruct_spectrum

__all__ = [
    "CHECK_NAMES",
    "DEFAULT_TOLERANCES",
    "THREADS_ENV_VAR",
    "CheckResult",
    "SweepConfig",
    "VerificationReport",
    "sample_spectrum",
    "evaluate_checks",
    "run_sweep",
]

SCHEMA = "verify-report/1"
THREADS_ENV_VAR = "RENYI_SPECTRUM_THREADS"

CHECK_NAMES = (
    "roundtrip",
    "newton_identity",
    "jacobian_fd",
    "integral_vs_direct",
    "sign_dSdSq",
    "sign_dSde",
    "sign_dr_de",
    "reconstruction",
)

DEFAULT_TOLERANCES = {
    # maximum eigenvalue error through the power-sum round trip
    "roundtrip": 1e-8,
    # relaxed bound applied for dimensions 13..20
    "roundtrip_highdim": 1e-6,
    # Newton identity residual
    "newton_identity": 1e-13,
    # relative error of analytic vs finite-difference Jacobian
    "jacobian_fd": 1e-6,
    # central difference step
    "jacobian_fd_step": 1e-6,
    # |integral - direct| for the von Neumann entropy
    "integral_vs_direct": 1e-8,
    # integral check skips spectra with smaller eigenvalues
    "integral_min_eigenvalue": 1e-6,
    # sign checks tolerate this much of the wrong sign
    "sign_slack": 1e-10,
    "sign_dr_de_slack": 1e-12,
    # maximum eigenvalue error through the Renyi round trip
    "reconstruction": 1e-7,
    # quadrature target inside derivative and integral checks
    "quad_abs_tol": 1e-10,
    # derivative checks skip spectra with eigenvalues below this
    "pos_floor": 1e-9,
}

_BLOCK = 256  # samples per worker task; does not affect results


@dataclass(frozen=True)
class CheckResult:
    """One check evaluated on one sample; passes iff margin >= threshold."""

    name: str
    dim: int
    index: int
    margin: float
    threshold: float
    passed: bool
    skipped: bool = False
    error: str | None = None
    time_s: float = 0.0


@dataclass(frozen=True)
class SweepConfig:
    """What to sweep: dimensions, samples per dimension, seed, checks.

    ``tolerances`` overrides entries of :data:`DEFAULT_TOLERANCES`.
    ``threads`` of None defers to the RENYI_SPECTRUM_THREADS variable,
    defaulting to a single worker.
    """

    dims: tuple[int, ...] = tuple(range(2, 9))
    samples: int = 10_000
    seed: int = 1
    checks: tuple[str, ...] = CHECK_NAMES
    tolerances: dict[str, float] = field(default_factory=dict)
    threads: int | None = None


def sample_spectrum(dim: int, seed: int = 1, index: int = 0) -> Spectrum:
    """Draw one spectrum from the flat Dirichlet on the d-simplex.

    Sample ``index`` of dimension ``dim`` under ``seed`` has its own
    counter-based substream, so any subset of samples can be generated
    independently and in any order.
    """
    dim = int(dim)
    if dim < 2:
        raise DimensionTooSmall(f"dimension {dim} below the minimum 2")
    if dim > D_MAX:
        raise DimensionTooLarge(f"dimension {dim} exceeds the cap {D_MAX}")
    seed = int(seed)
    index = int(index)
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must lie in [0, 2**64), got {seed}")
    if not 0 <= index < 2**32:
        raise ConfigError(f"sample index must lie in [0, 2**32), got {index}")
    key = np.array([seed, (dim << 32) + index], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    x = gen.standard_exponential(dim)
    x.sort()
    # sorted and normalized by construction, skip the validating path
    return Spectrum._trusted(x[::-1] / x.sum())


class _SampleContext:
    """Caches the per-sample intermediates the checks share."""

    def __init__(self, spectrum: Spectrum, tol: dict):
        self.spectrum = spectrum
        self.lam = spectrum.values
        self.dim = spectrum.dim
        self.tol = tol
        self._cache: dict[str, object] = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def r(self):
        return self._get("r", lambda: power_sums(self.spectrum))

    @property
    def e_direct(self):
        return self._get("e", lambda: elem_sym_direct(self.spectrum))

    @property
    def gradient(self):
        return self._get(
            "grad",
            lambda: entropy_gradient(
                self.e_direct,
                abs_tol=self.tol["quad_abs_tol"],
                pos_floor=self.tol["pos_floor"],
            ),
        )


def _threshold(name: str, dim: int, tol: dict) -> float:
    if name == "roundtrip":
        return -(tol["roundtrip"] if dim <= 12 else tol["roundtrip_highdim"])
    if name == "newton_identity":
        return -tol["newton_identity"]
    if name == "jacobian_fd":
        return -tol["jacobian_fd"]
    if name == "integral_vs_direct":
        return -tol["integral_vs_direct"]
    if name in ("sign_dSdSq", "sign_dSde"):
        return -tol["sign_slack"]
    if name == "sign_dr_de":
        return -tol["sign_dr_de_slack"]
    if name == "reconstruction":
        return -tol["reconstruction"]
    raise ConfigError(f"unknown check {name!r}")


def _run_roundtrip(ctx: _SampleContext):
    e = elem_from_power(ctx.r)
    recovered = spectrum_from_elem(e)
    return -float(np.abs(recovered.values - ctx.lam).max()), False


def _run_newton_identity(ctx: _SampleContext):
    return -abs(newton_residual(ctx.e_direct, ctx.r)), False


def _run_jacobian_fd(ctx: _SampleContext):
    jac = jacobian_e_wrt_r(ctx.e_direct).matrix
    h = ctx.tol["jacobian_fd_step"]
    base = np.array(ctx.r.r)
    worst = 0.0
    for l in range(2, ctx.dim + 1):
        up = base.copy()
        up[l] += h
        down = base.copy()
        down[l] -= h
        e_up = elem_from_power(PowerSums(up)).e
        e_down = elem_from_power(PowerSums(down)).e
        fd = (e_up[2:] - e_down[2:]) / (2.0 * h)
        for k in range(l, ctx.dim + 1):
            exact = jac[k - 2, l - 2]
            worst = max(worst, abs(fd[k - 2] - exact) / abs(exact))
    return -worst, False


def _run_integral_vs_direct(ctx: _SampleContext):
    if float(ctx.lam.min()) < ctx.tol["integral_min_eigenvalue"]:
        return math.nan, True
    s_int = von_neumann_integral(ctx.e_direct, abs_tol=ctx.tol["quad_abs_tol"])
    s_dir = von_neumann_direct(ctx.spectrum)
    return -abs(s_int - s_dir), False


def _run_sign_dSdSq(ctx: _SampleContext):
    if float(ctx.lam.min()) < ctx.tol["pos_floor"]:
        return math.nan, True
    v = ctx.gradient.dS_dSq
    signed = [v[q - 2] if q % 2 == 0 else -v[q - 2] for q in range(2, ctx.dim + 1)]
    return float(min(signed)), False


def _run_sign_dSde(ctx: _SampleContext):
    if float(ctx.lam.min()) < ctx.tol["pos_floor"]:
        return math.nan, True
    return float(ctx.gradient.dS_de.min()), False


def _run_sign_dr_de(ctx: _SampleContext):
    x = jacobian_r_wrt_e(ctx.e_direct).matrix
    worst = math.inf
    for l in range(2, ctx.dim + 1):
        col = x[l - 2 :, l - 2]
        signed = -col if l % 2 == 0 else col
        worst = min(worst, float(signed.min()))
    return worst, False


def _run_reconstruction(ctx: _SampleContext):
    rv = renyi_vector(ctx.spectrum)
    result = reconstruct_spectrum(rv, recon_tol=ctx.tol["reconstruction"])
    return -float(np.abs(result.spectrum.values - ctx.lam).max()), False


_CHECK_FUNCS = {
    "roundtrip": _run_roundtrip,
    "newton_identity": _run_newton_identity,
    "jacobian_fd": _run_jacobian_fd,
    "integral_vs_direct": _run_integral_vs_direct,
    "sign_dSdSq": _run_sign_dSdSq,
    "sign_dSde": _run_sign_dSde,
    "sign_dr_de": _run_sign_dr_de,
    "reconstruction": _run_reconstruction,
}


def _merge_tolerances(overrides: dict | None) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}")
        value = float(value)
        if not math.isfinite(value) or value < 0.0:
            raise ConfigError(f"tolerance {key!r} must be non-negative, got {value!r}")
        tol[key] = value
    return tol


def evaluate_checks(
    spectrum,
    checks=CHECK_NAMES,
    tolerances: dict | None = None,
    sample_index: int = 0,
) -> list[CheckResult]:
    """Run the named checks on one spectrum and return their margins.

    This is the same code path the sweep uses, so a worst case recorded
    in a report can be replayed verbatim.
    """
    sp = _as_spectrum(spectrum)
    tol = _merge_tolerances(tolerances)
    ctx = _SampleContext(sp, tol)
    out = []
    for name in checks:
        if name not in _CHECK_FUNCS:
            raise ConfigError(f"unknown check {name!r}")
        threshold = _threshold(name, ctx.dim, tol)
        start = time.perf_counter()
        try:
            margin, skipped = _CHECK_FUNCS[name](ctx)
        except SpectrumError as exc:
            out.append(
                CheckResult(
                    name=name,
                    dim=ctx.dim,
                    index=sample_index,
                    margin=-math.inf,
                    threshold=threshold,
                    passed=False,
                    error=f"{type(exc).__name__}: {exc}",
                    time_s=time.perf_counter() - start,
                )
            )
            continue
        if skipped:
            out.append(
                CheckResult(
                    name=name,
                    dim=ctx.dim,
                    index=sample_index,
                    margin=math.nan,
                    threshold=threshold,
                    passed=True,
                    skipped=True,
                    time_s=time.perf_counter() - start,
                )
            )
        else:
            out.append(
                CheckResult(
                    name=name,
                    dim=ctx.dim,
                    index=sample_index,
                    margin=float(margin),
                    threshold=threshold,
                    passed=bool(margin >= threshold),
                    time_s=time.perf_counter() - start,
                )
            )
    return out


class _CheckAggregate:
    def __init__(self, name: str):
        self.name = name
        self.evaluated = 0
        self.passes = 0
        self.failures = 0
        self.errors = 0
        self.skipped = 0
        self.time_s = 0.0
        self.worst = None  # (margin, threshold, dim, index, spectrum, error)
        self.failing: list[tuple] = []

    def add(self, res: CheckResult, lam: np.ndarray):
        self.time_s += res.time_s
        if res.skipped:
            self.skipped += 1
            return
        self.evaluated += 1
        if res.error is not None:
            self.errors += 1
        elif res.passed:
            self.passes += 1
        else:
            self.failures += 1
        key = res.margin
        if self.worst is None or key < self.worst[0]:
            self.worst = (key, res.threshold, res.dim, res.index, lam.tolist(), res.error)
        if not res.passed:
            self.failing.append(
                (key, res.dim, res.index, res.threshold, lam.tolist(), res.error)
            )
            if len(self.failing) > 64:
                self.failing.sort(key=lambda f: (f[0], f[1], f[2]))
                del self.failing[5:]

    def summary(self, include_timings: bool) -> dict:
        def entry(margin, threshold, dim, index, lam, error):
            out = {
                "margin": margin if math.isfinite(margin) else None,
                "threshold": threshold,
                "dim": dim,
                "index": index,
                "spectrum": lam,
            }
            if error is not None:
                out["error"] = error
            return out

        self.failing.sort(key=lambda f: (f[0], f[1], f[2]))
        data = {
            "evaluated": self.evaluated,
            "passes": self.passes,
            "failures": self.failures,
            "errors": self.errors,
            "skipped": self.skipped,
            "passed": self.failures == 0 and self.errors == 0,
            "worst": None
            if self.worst is None
            else entry(*self.worst),
            "failing": [
                entry(m, t, d, i, lam, err)
                for (m, d, i, t, lam, err) in self.failing[:5]
            ],
        }
        if include_timings:
            data["wall_time_s"] = self.time_s
        return data


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Aggregated sweep outcome plus enough detail to replay failures."""

    dims: tuple[int, ...]
    samples: int
    seed: int
    checks: tuple[str, ...]
    tolerances: dict
    aggregates: dict
    passed: bool
    wall_time_s: float

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "schema": SCHEMA,
            "config": {
                "dims": list(self.dims),
                "samples": self.samples,
                "seed": self.seed,
                "checks": list(self.checks),
                "tolerances": dict(sorted(self.tolerances.items())),
            },
            "results": {
                name: agg.summary(include_timings)
                for name, agg in self.aggregates.items()
            },
            "passed": self.passed,
        }
        if include_timings:
            out["wall_time_s"] = self.wall_time_s
        return out

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), sort_keys=True, indent=2) + "\n"


def _validate_config(config: SweepConfig):
    dims = tuple(int(d) for d in config.dims)
    if not dims:
        raise ConfigError("dims must be non-empty")
    for d in dims:
        if not 2 <= d <= D_MAX:
            raise ConfigError(f"dimension {d} outside 2..{D_MAX}")
    samples = int(config.samples)
    if samples < 1:
        raise ConfigError(f"samples must be >= 1, got {samples}")
    seed = int(config.seed)
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must lie in [0, 2**64), got {seed}")
    checks = tuple(config.checks)
    if not checks:
        raise ConfigError("checks must be non-empty")
    for name in checks:
        if name not in _CHECK_FUNCS:
            raise ConfigError(f"unknown check {name!r}")
    tol = _merge_tolerances(config.tolerances)
    if config.threads is not None:
        threads = int(config.threads)
    else:
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw is None or raw.strip() == "":
            threads = 1
        else:
            try:
                threads = int(raw)
            except ValueError:
                raise ConfigError(
                    f"{THREADS_ENV_VAR} must be an integer, got {raw!r}"
                ) from None
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return dims, samples, seed, checks, tol, threads


def run_sweep(config: SweepConfig | None = None) -> VerificationReport:
    """Run the configured randomized sweep and aggregate a report.

    Per-sample exceptions from the library are recorded as errors on
    the corresponding check, never raised.  The report's ``passed``
    flag is the conjunction of the per-check flags (no failures and no
    errors; skipped samples are neutral).
    """
    config = config or SweepConfig()
    dims, samples, seed, checks, tol, threads = _validate_config(config)
    started = time.perf_counter()

    tasks = [
        (dim, lo, min(lo + _BLOCK, samples))
        for dim in dims
        for lo in range(0, samples, _BLOCK)
    ]

    def run_block(task):
        dim, lo, hi = task
        block = []
        for i in range(lo, hi):
            sp = sample_spectrum(dim, seed, i)
            block.append((sp.values, evaluate_checks(sp, checks, tol, sample_index=i)))
        return block

    if threads == 1:
        blocks = map(run_block, tasks)
    else:
        pool = ThreadPoolExecutor(max_workers=threads)
        try:
            blocks = list(pool.map(run_block, tasks))
        finally:
            pool.shutdown()

    aggregates = {name: _CheckAggregate(name) for name in checks}
    for block in blocks:
        for lam, results in block:
            for res in results:
                aggregates[res.name].add(res, lam)

    passed = all(
        agg.failures == 0 and agg.errors == 0 for agg in aggregates.values()
    )
    return VerificationReport(
        dims=dims,
        samples=samples,
        seed=seed,
        checks=checks,
        tolerances=tol,
        aggregates=aggregates,
        passed=passed,
        wall_time_s=time.perf_counter() - started,
    )
