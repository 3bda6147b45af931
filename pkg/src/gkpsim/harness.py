"""Experiment orchestration: sigma/distance sweeps, crossings, plateaus, CSV output.

A sweep cell (family, d, sigma) samples shifts, reduces them to candidates,
decodes, and scores the net logical class: success means the residual
xi - candidate + correction lies in the trivial coset.  The net class is the
Klein composition of the decoded class with the true class of the candidate
offset; the fast paths use the quaternary XOR shortcut, which is
property-tested against logical_class_of on the explicit residual vector.

Trials are keyed by (run_seed, trial_index) so results are byte-identical
for a fixed config regardless of the worker count.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .channel import candidate_error_batch, sample_shift_batch
from .codes import CodeFamily, GkpCodeLayout, build_layout, single_mode_equivalent
from .decoders import (decode_baseline_batch, decode_brute_force_batch,
                       decode_partition_function_batch)
from .decoders.tensor_network import color_weights
from .errors import (FeasibilityError, InvalidParameterError, MissingDataError,
                     NoCrossingError)
from .lattice import LogicalClass
from .rates import PauliChannelEstimate, hashing_rate

WORKERS_ENV_VAR = "GKPSIM_WORKERS"
Z_95 = 1.959963984540054

DECODER_NAMES = ("auto", "mld-pf", "mld-bf", "mld-tn", "baseline")

#: quaternary label order is I, X, Z, Y; CSV reports counts as I, X, Y, Z
_QUAT_TO_IXYZ = (0, 1, 3, 2)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV_VAR, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    distances: tuple
    sigmas: tuple
    trials: int
    run_seed: int
    decoder: str = "auto"
    pf_backend: str = "transfer"
    max_bond: int = 64
    n_v: int = 4
    output_path: str | None = None
    workers: int = 0                      # 0 = use default_workers()
    suppress_timestamp: bool = False
    batch: int = 1024

    def __post_init__(self):
        CodeFamily.from_name(self.family)
        if self.trials < 1:
            raise InvalidParameterError("trials must be >= 1")
        if any(d % 2 == 0 or d < 1 for d in self.distances):
            raise InvalidParameterError("distances must be odd positive integers")
        if list(self.sigmas) != sorted(set(self.sigmas)):
            raise InvalidParameterError("sigmas must be strictly increasing")
        if any(s <= 0 for s in self.sigmas):
            raise InvalidParameterError("sigmas must be positive")
        if self.decoder not in DECODER_NAMES:
            raise InvalidParameterError(f"unknown decoder {self.decoder!r}")

    @property
    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else default_workers()


@dataclass(frozen=True)
class CellResult:
    family: str
    d: int
    n_modes: int
    sigma: float
    trials: int
    counts: tuple                 # (n_I, n_X, n_Y, n_Z)
    fidelity: float
    fidelity_ci: tuple
    rate: float
    run_seed: int
    decoder: str
    max_bond: int
    n_v: int
    wall_time: float = 0.0
    error: str | None = None

    @property
    def pauli_estimate(self) -> PauliChannelEstimate:
        p = np.array(self.counts, dtype=float) / self.trials
        lo, hi = wilson_interval(self.counts[0], self.trials)
        return PauliChannelEstimate(p=p, trials=self.trials,
                                    ci_radius=0.5 * (hi - lo))


@dataclass
class SweepResult:
    config: ExperimentConfig
    cells: list = field(default_factory=list)

    def cell(self, d: int, sigma: float) -> CellResult:
        for c in self.cells:
            if c.d == d and math.isclose(c.sigma, sigma, rel_tol=0, abs_tol=1e-12):
                return c
        raise MissingDataError(f"no cell for d={d}, sigma={sigma}")

    def to_csv(self) -> str:
        lines = []
        if not self.config.suppress_timestamp:
            lines.append(f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S')}")
        lines.append("family,d,N,sigma,trials,n_I,n_X,n_Y,n_Z,fidelity,"
                     "fidelity_ci_lo,fidelity_ci_hi,rate,seed,decoder,max_bond,nv")
        for c in self.cells:
            if c.error is not None:
                continue
            lines.append(
                f"{c.family},{c.d},{c.n_modes},{c.sigma:.6g},{c.trials},"
                f"{c.counts[0]},{c.counts[1]},{c.counts[2]},{c.counts[3]},"
                f"{c.fidelity:.10g},{c.fidelity_ci[0]:.10g},{c.fidelity_ci[1]:.10g},"
                f"{c.rate:.10g},{c.run_seed},{c.decoder},{c.max_bond},{c.n_v}")
        return "\n".join(lines) + "\n"


def wilson_interval(successes: int, trials: int, z: float = Z_95) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


# ---------------------------------------------------------------------------
# decoding dispatch
# ---------------------------------------------------------------------------


def _resolve_decoder(decoder: str, layout: GkpCodeLayout) -> str:
    if decoder != "auto":
        return decoder
    if layout.family is CodeFamily.SURFACE_SQUARE:
        return "mld-pf"
    if layout.family in (CodeFamily.COLOR_SQUARE, CodeFamily.COLOR_HEX):
        return "mld-tn"
    return "mld-bf"


def _batch_weights(fracs: np.ndarray, bits: np.ndarray, layout: GkpCodeLayout,
                   sigma: float, decoder: str, pf_backend: str, max_bond: int,
                   n_v: int) -> np.ndarray:
    """Quaternary log (or pseudo) coset weights (B, 4) for one batch."""
    name = _resolve_decoder(decoder, layout)
    if name == "baseline":
        return decode_baseline_batch(bits, layout)
    if name == "mld-bf" or layout.n_modes == 1:
        return decode_brute_force_batch(fracs, layout, sigma, n_v)
    if name == "mld-pf":
        if layout.family is not CodeFamily.SURFACE_SQUARE:
            raise InvalidParameterError(
                f"mld-pf requires a surface-square layout, not {layout.family.value}")
        return decode_partition_function_batch(fracs, layout, sigma, n_v,
                                               backend=pf_backend, max_bond=max_bond)
    if name == "mld-tn":
        if layout.family not in (CodeFamily.COLOR_SQUARE, CodeFamily.COLOR_HEX):
            raise InvalidParameterError(
                f"mld-tn requires a color layout, not {layout.family.value}")
        out = np.empty((fracs.shape[0], 4))
        for row in range(fracs.shape[0]):
            out[row] = color_weights(fracs[row], layout, sigma, n_v, max_bond)
        return out
    raise InvalidParameterError(f"unknown decoder {name!r}")


def _layout_for(family: str, d: int) -> GkpCodeLayout:
    fam = CodeFamily.from_name(family)
    if d == 1 and fam not in (CodeFamily.SQUARE_SINGLE, CodeFamily.HEX_SINGLE,
                              CodeFamily.FIVE_ONE_THREE_HEX):
        fam = single_mode_equivalent(fam)
    return build_layout(fam, d)


def _count_range(family: str, d: int, sigma: float, trial_lo: int, trial_hi: int,
                 config: ExperimentConfig) -> np.ndarray:
    """Quaternary-ordered net-class counts for one contiguous trial range."""
    layout = _layout_for(family, d)
    counts = np.zeros(4, dtype=np.int64)
    for lo in range(trial_lo, trial_hi, config.batch):
        hi = min(lo + config.batch, trial_hi)
        xis = sample_shift_batch(sigma, layout.n_modes, config.run_seed,
                                 np.arange(lo, hi))
        fracs, bits, true_quat = candidate_error_batch(xis, layout)
        weights = _batch_weights(fracs, bits, layout, sigma, config.decoder,
                                 config.pf_backend, config.max_bond, config.n_v)
        net = np.argmax(weights, axis=-1).astype(np.int64) ^ true_quat
        counts += np.bincount(net, minlength=4)
    return counts


def _cell_worker(args) -> np.ndarray:
    return _count_range(*args)


def _run_cell(config: ExperimentConfig, d: int, sigma: float) -> CellResult:
    start = time.time()
    layout = _layout_for(config.family, d)
    workers = config.effective_workers
    decoder_label = _resolve_decoder(config.decoder, layout)

    if workers <= 1 or config.trials < 2 * config.batch:
        counts = _count_range(config.family, d, sigma, 0, config.trials, config)
    else:
        bounds = np.linspace(0, config.trials, workers + 1, dtype=int)
        jobs = [(config.family, d, sigma, int(bounds[i]), int(bounds[i + 1]), config)
                for i in range(workers) if bounds[i] < bounds[i + 1]]
        import multiprocessing
        with multiprocessing.get_context("fork").Pool(workers) as pool:
            partials = pool.map(_cell_worker, jobs)
        counts = np.sum(partials, axis=0)

    counts_ixyz = tuple(int(counts[q]) for q in _QUAT_TO_IXYZ)
    fid = counts_ixyz[0] / config.trials
    ci = wilson_interval(counts_ixyz[0], config.trials)
    p = np.array(counts_ixyz, dtype=float) / config.trials
    return CellResult(
        family=config.family, d=d, n_modes=layout.n_modes, sigma=sigma,
        trials=config.trials, counts=counts_ixyz, fidelity=fid, fidelity_ci=ci,
        rate=hashing_rate(p, layout.n_modes), run_seed=config.run_seed,
        decoder=decoder_label, max_bond=config.max_bond, n_v=config.n_v,
        wall_time=time.time() - start)


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Run every (d, sigma) cell; per-cell feasibility errors are recorded."""
    result = SweepResult(config=config)
    for d in config.distances:
        for sigma in config.sigmas:
            try:
                result.cells.append(_run_cell(config, d, sigma))
            except FeasibilityError as exc:
                layout = _layout_for(config.family, d)
                result.cells.append(CellResult(
                    family=config.family, d=d, n_modes=layout.n_modes, sigma=sigma,
                    trials=config.trials, counts=(0, 0, 0, 0), fidelity=float("nan"),
                    fidelity_ci=(float("nan"), float("nan")), rate=float("nan"),
                    run_seed=config.run_seed, decoder=config.decoder,
                    max_bond=config.max_bond, n_v=config.n_v, error=str(exc)))
    if config.output_path:
        with open(config.output_path, "w") as fh:
            fh.write(result.to_csv())
    return result


def load_results_csv(path: str) -> SweepResult:
    """Read a sweep CSV back into a SweepResult (analysis-relevant columns only)."""
    cells = []
    meta = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("family,"):
                continue
            f = line.split(",")
            counts = (int(f[5]), int(f[6]), int(f[7]), int(f[8]))
            cells.append(CellResult(
                family=f[0], d=int(f[1]), n_modes=int(f[2]), sigma=float(f[3]),
                trials=int(f[4]), counts=counts, fidelity=float(f[9]),
                fidelity_ci=(float(f[10]), float(f[11])), rate=float(f[12]),
                run_seed=int(f[13]), decoder=f[14], max_bond=int(f[15]),
                n_v=int(f[16])))
            meta = {"family": f[0], "trials": int(f[4]), "seed": int(f[13])}
    if not cells:
        raise MissingDataError(f"no result rows found in {path}")
    config = ExperimentConfig(
        family=meta["family"], distances=tuple(sorted({c.d for c in cells})),
        sigmas=tuple(sorted({c.sigma for c in cells})), trials=meta["trials"],
        run_seed=meta["seed"])
    return SweepResult(config=config, cells=cells)


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------


def net_class_via_residual(xi: np.ndarray, candidate: np.ndarray,
                           decoded: LogicalClass, layout: GkpCodeLayout) -> LogicalClass:
    """Net logical class from the explicit residual vector.

    The residual xi - candidate + (decoded-class representative) must lie in
    the dual lattice; its class is the net logical action after correction.
    This is the candidate-convention-independent scoring rule.
    """
    from .lattice import logical_class_of
    residual = np.asarray(xi, float) - np.asarray(candidate, float) \
        + layout.from_frame(layout.logical_frame(decoded).astype(float))
    return logical_class_of(residual, layout)


def optimal_distance_rate(result: SweepResult, sigma: float):
    """(d_opt, rate) maximizing the rate at one sigma, with CI-overlap flags."""
    cells = [c for c in result.cells
             if math.isclose(c.sigma, sigma, rel_tol=0, abs_tol=1e-12)
             and c.error is None]
    if not cells:
        raise MissingDataError(f"no data at sigma={sigma}")
    ranked = sorted(cells, key=lambda c: c.rate, reverse=True)
    best = ranked[0]
    flags = {"degenerate": len(cells) < 2, "ci_overlap": False}
    if len(ranked) >= 2:
        lo_best = _rate_at_fidelity(best, best.fidelity_ci[0])
        hi_next = _rate_at_fidelity(ranked[1], ranked[1].fidelity_ci[1])
        flags["ci_overlap"] = bool(hi_next >= lo_best)
    return best.d, best.rate, flags


def _rate_at_fidelity(cell: CellResult, fidelity: float) -> float:
    """Rate recomputed at a shifted fidelity, scaling error components."""
    p = np.array(cell.counts, dtype=float) / cell.trials
    err = 1.0 - p[0]
    if err <= 0:
        rest = np.full(3, (1.0 - fidelity) / 3.0)
    else:
        rest = p[1:] * (1.0 - fidelity) / err
    return hashing_rate(np.concatenate([[fidelity], rest]), cell.n_modes)


def crossing_point(result: SweepResult, d_low: int, d_high: int):
    """Interpolated sigma where the fidelity curves of d_low and d_high cross.

    Returns (sigma_cross, (ci_lo, ci_hi)); the interval is a conservative
    union propagated from the Wilson intervals of both curves.
    """
    lows = {c.sigma: c for c in result.cells if c.d == d_low and c.error is None}
    highs = {c.sigma: c for c in result.cells if c.d == d_high and c.error is None}
    sigmas = sorted(set(lows) & set(highs))
    if len(sigmas) < 2:
        raise MissingDataError(f"need >= 2 common sigma points for d={d_low}, d={d_high}")

    def zero_of(values):
        for i in range(len(sigmas) - 1):
            a, b = values[i], values[i + 1]
            if a == 0.0:
                return sigmas[i]
            if a * b < 0:
                return sigmas[i] + (sigmas[i + 1] - sigmas[i]) * a / (a - b)
        if values[-1] == 0.0:
            return sigmas[-1]
        return None

    diff = [lows[s].fidelity - highs[s].fidelity for s in sigmas]
    cross = zero_of(diff)
    if cross is None:
        raise NoCrossingError(
            f"fidelity curves for d={d_low} and d={d_high} do not cross on the grid")
    diff_lo = [lows[s].fidelity_ci[0] - highs[s].fidelity_ci[1] for s in sigmas]
    diff_hi = [lows[s].fidelity_ci[1] - highs[s].fidelity_ci[0] for s in sigmas]
    lo_cross = zero_of(diff_hi)
    hi_cross = zero_of(diff_lo)
    bounds = [c for c in (lo_cross, hi_cross) if c is not None]
    ci = (min(bounds + [cross]) if bounds else sigmas[0],
          max(bounds + [cross]) if bounds else sigmas[-1])
    if lo_cross is None:
        ci = (sigmas[0], ci[1])
    if hi_cross is None:
        ci = (ci[0], sigmas[-1])
    return cross, ci


def plateau_check(result: SweepResult, sigma: float, distances=None) -> str:
    """Classify fidelity vs distance at one sigma: increasing / flat / decreasing."""
    cells = [c for c in result.cells
             if math.isclose(c.sigma, sigma, rel_tol=0, abs_tol=1e-12)
             and c.error is None]
    if distances is not None:
        cells = [c for c in cells if c.d in set(distances)]
    cells.sort(key=lambda c: c.d)
    if len(cells) < 3:
        raise MissingDataError("plateau_check needs at least 3 distances at the sigma")
    rises = drops = 0
    for a, b in zip(cells, cells[1:]):
        if b.fidelity_ci[0] > a.fidelity_ci[1]:
            rises += 1
        elif b.fidelity_ci[1] < a.fidelity_ci[0]:
            drops += 1
    if rises and not drops:
        return "increasing"
    if drops and not rises:
        return "decreasing"
    return "flat"


# ---------------------------------------------------------------------------
# single-decode debug dump
# ---------------------------------------------------------------------------


def debug_decode_dump(family: str, d: int, sigma: float, run_seed: int,
                      trial_index: int, decoder: str = "auto", n_v: int = 4,
                      max_bond: int = 64, pf_backend: str = "transfer") -> dict:
    """JSON-ready dump of one decode: candidate, weight tables, coset weights."""
    from .channel import candidate_error, sample_shift
    from .weights import coset_weight_table

    layout = _layout_for(family, d)
    sample = sample_shift(sigma, layout.n_modes, run_seed, trial_index)
    record = candidate_error(sample.xi, layout)
    frame = layout.to_frame(record.candidate)
    weights = _batch_weights(frame[None, :], record.residual_bits[None, :], layout,
                             sigma, decoder, pf_backend, max_bond, n_v)[0]
    quat = int(np.argmax(weights))
    decoded = LogicalClass.from_quaternary(quat)
    net = net_class_via_residual(sample.xi, record.candidate, decoded, layout)
    table = coset_weight_table(layout, frame, sigma, n_v)
    return {
        "family": family,
        "d": d,
        "n_modes": layout.n_modes,
        "sigma": sigma,
        "seed_path": [run_seed, trial_index],
        "decoder": _resolve_decoder(decoder, layout),
        "candidate": record.candidate.tolist(),
        "log_tau_tables": table.log_tau_f4.tolist(),
        "log_coset_weights": {
            "I": weights[0], "X": weights[1], "Z": weights[2], "Y": weights[3]},
        "chosen": decoded.name,
        "true_class": record.true_class.name,
        "net_class": net.name,
    }
