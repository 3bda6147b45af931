import json
import math
import os

import numpy as np
import pytest

from gkpsim.channel import candidate_error, sample_shift
from gkpsim.codes import build_layout
from gkpsim.decoders import decode_brute_force
from gkpsim.errors import (InvalidParameterError, MissingDataError, NoCrossingError)
from gkpsim.harness import (CellResult, ExperimentConfig, SweepResult,
                            crossing_point, debug_decode_dump, load_results_csv,
                            net_class_via_residual, optimal_distance_rate,
                            plateau_check, run_sweep, wilson_interval)
from gkpsim.lattice import compose
from gkpsim.rates import hashing_rate


def make_cell(d, sigma, fidelity, half_width=0.002, trials=100_000, n_modes=None):
    n_i = int(round(fidelity * trials))
    rest = trials - n_i
    counts = (n_i, rest // 2, rest - rest // 2 - rest // 4, rest // 4)
    p = np.array(counts) / trials
    return CellResult(
        family="surface-square", d=d, n_modes=n_modes or d * d, sigma=sigma,
        trials=trials, counts=counts, fidelity=p[0],
        fidelity_ci=(p[0] - half_width, p[0] + half_width),
        rate=hashing_rate(p, n_modes or d * d), run_seed=0, decoder="mld-pf",
        max_bond=64, n_v=4)


def fixture_result(cells):
    config = ExperimentConfig(family="surface-square", distances=(3, 5),
                              sigmas=tuple(sorted({c.sigma for c in cells})),
                              trials=cells[0].trials, run_seed=0)
    return SweepResult(config=config, cells=list(cells))


def test_wilson_interval_known_values():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.0 < hi < 0.05
    lo, hi = wilson_interval(100, 100)
    assert hi == 1.0 and lo > 0.95
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert hi - lo == pytest.approx(2 * 1.96 * math.sqrt(0.25 / 100), rel=0.05)


def test_crossing_point_fixture_midpoint():
    cells = [make_cell(3, 0.58, 0.82), make_cell(5, 0.58, 0.80),
             make_cell(3, 0.60, 0.80), make_cell(5, 0.60, 0.82)]
    cross, ci = crossing_point(fixture_result(cells), 3, 5)
    assert cross == pytest.approx(0.59, abs=1e-12)
    assert ci[0] <= 0.59 <= ci[1]


def test_crossing_point_requires_sign_change():
    cells = [make_cell(3, 0.58, 0.90), make_cell(5, 0.58, 0.95),
             make_cell(3, 0.60, 0.85), make_cell(5, 0.60, 0.90)]
    with pytest.raises(NoCrossingError):
        crossing_point(fixture_result(cells), 3, 5)


def test_crossing_point_needs_common_grid():
    cells = [make_cell(3, 0.58, 0.9), make_cell(5, 0.60, 0.9)]
    with pytest.raises(MissingDataError):
        crossing_point(fixture_result(cells), 3, 5)


def test_plateau_fixture_verdicts():
    up = [make_cell(3, 0.6, 0.80), make_cell(5, 0.6, 0.85), make_cell(7, 0.6, 0.90)]
    assert plateau_check(fixture_result(up), 0.6) == "increasing"
    down = [make_cell(3, 0.6, 0.90), make_cell(5, 0.6, 0.85), make_cell(7, 0.6, 0.80)]
    assert plateau_check(fixture_result(down), 0.6) == "decreasing"
    flat = [make_cell(3, 0.6, 0.850), make_cell(5, 0.6, 0.851), make_cell(7, 0.6, 0.8505)]
    assert plateau_check(fixture_result(flat), 0.6) == "flat"
    with pytest.raises(MissingDataError):
        plateau_check(fixture_result(up[:2]), 0.6)


def test_optimal_distance_fixture():
    cells = [make_cell(1, 0.5, 0.95, n_modes=1), make_cell(3, 0.5, 0.93),
             make_cell(5, 0.5, 0.94)]
    d_opt, rate, flags = optimal_distance_rate(fixture_result(cells), 0.5)
    rates = {c.d: c.rate for c in cells}
    assert d_opt == max(rates, key=rates.get)
    assert not flags["degenerate"]
    d_opt, _, flags = optimal_distance_rate(fixture_result(cells[:1]), 0.5)
    assert d_opt == 1 and flags["degenerate"]
    with pytest.raises(MissingDataError):
        optimal_distance_rate(fixture_result(cells), 0.77)


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(family="surface-square", distances=(2,), sigmas=(0.5,),
                         trials=10, run_seed=0)
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(family="surface-square", distances=(3,), sigmas=(0.6, 0.5),
                         trials=10, run_seed=0)
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(family="surface-square", distances=(3,), sigmas=(0.5,),
                         trials=0, run_seed=0)


def test_sweep_rows_are_consistent():
    cfg = ExperimentConfig(family="surface-square", distances=(1, 3),
                           sigmas=(0.5, 0.6), trials=400, run_seed=11,
                           suppress_timestamp=True)
    result = run_sweep(cfg)
    assert len(result.cells) == 4
    for cell in result.cells:
        assert sum(cell.counts) == cell.trials
        p = np.array(cell.counts) / cell.trials
        assert cell.fidelity == pytest.approx(p[0], abs=1e-15)
        assert cell.rate == pytest.approx(hashing_rate(p, cell.n_modes), abs=1e-12)
        lo, hi = cell.fidelity_ci
        assert lo <= cell.fidelity <= hi


def test_sweep_distance_one_uses_single_mode_family():
    cfg = ExperimentConfig(family="color-hex", distances=(1,), sigmas=(0.5,),
                           trials=50, run_seed=1)
    cell = run_sweep(cfg).cells[0]
    assert cell.n_modes == 1


def test_sweep_records_infeasible_cells():
    cfg = ExperimentConfig(family="surface-square", distances=(9,), sigmas=(0.6,),
                           trials=10, run_seed=0, decoder="mld-bf")
    result = run_sweep(cfg)
    assert result.cells[0].error is not None
    assert "guard" in result.cells[0].error


def test_csv_deterministic_across_worker_counts(tmp_path):
    outputs = []
    for workers in (1, 2):
        cfg = ExperimentConfig(family="surface-square", distances=(3,),
                               sigmas=(0.55,), trials=3000, run_seed=5,
                               workers=workers, suppress_timestamp=True, batch=256)
        outputs.append(run_sweep(cfg).to_csv())
    assert outputs[0] == outputs[1]


def test_csv_round_trip(tmp_path):
    path = os.path.join(tmp_path, "out.csv")
    cfg = ExperimentConfig(family="surface-square", distances=(1, 3),
                           sigmas=(0.5, 0.55), trials=300, run_seed=2,
                           output_path=path, suppress_timestamp=True)
    result = run_sweep(cfg)
    loaded = load_results_csv(path)
    assert len(loaded.cells) == len(result.cells)
    for a, b in zip(loaded.cells, result.cells):
        assert (a.d, a.sigma, a.counts) == (b.d, b.sigma, b.counts)
        assert a.rate == pytest.approx(b.rate, abs=1e-9)
    # rate column is recomputable from the stored counts
    for cell in loaded.cells:
        p = np.array(cell.counts) / cell.trials
        assert cell.rate == pytest.approx(hashing_rate(p, cell.n_modes), abs=1e-10)


def test_net_class_via_residual_matches_compose_shortcut():
    layout = build_layout("surface-square", 3)
    mismatches = 0
    for t in range(200):
        xi = sample_shift(0.6, 9, 23, t).xi
        rec = candidate_error(xi, layout)
        decoded = decode_brute_force(rec, layout, 0.6).chosen
        via_residual = net_class_via_residual(xi, rec.candidate, decoded, layout)
        mismatches += via_residual is not compose(decoded, rec.true_class)
    assert mismatches == 0


def test_near_noiseless_sweep_is_perfect():
    cfg = ExperimentConfig(family="surface-square", distances=(3,), sigmas=(0.05,),
                           trials=10_000, run_seed=4)
    cell = run_sweep(cfg).cells[0]
    assert cell.fidelity == 1.0


def test_debug_decode_dump_schema():
    dump = debug_decode_dump("surface-square", 3, 0.6, 42, 0)
    text = json.dumps(dump)
    parsed = json.loads(text)
    for key in ("family", "d", "sigma", "seed_path", "candidate", "log_tau_tables",
                "log_coset_weights", "chosen", "true_class", "net_class", "decoder"):
        assert key in parsed
    assert len(parsed["candidate"]) == 18
    assert set(parsed["log_coset_weights"]) == {"I", "X", "Y", "Z"}
    assert parsed["chosen"] in "IXYZ"
    # the reported chosen class maximises the reported weights
    weights = parsed["log_coset_weights"]
    assert weights[parsed["chosen"]] == max(weights.values())


def test_pauli_estimate_property():
    cell = make_cell(3, 0.6, 0.9)
    est = cell.pauli_estimate
    assert est.p.sum() == pytest.approx(1.0, abs=1e-12)
    assert est.p[0] == pytest.approx(0.9, abs=1e-12)
    assert est.trials == cell.trials


def test_optimal_distance_is_one_at_small_sigma():
    """At sigma = 0.50 the single-mode code maximises the rate."""
    cfg = ExperimentConfig(family="surface-square", distances=(1, 3, 5),
                           sigmas=(0.5,), trials=30_000, run_seed=811)
    result = run_sweep(cfg)
    d_opt, rate, flags = optimal_distance_rate(result, 0.5)
    assert d_opt == 1
    assert rate > 0.15
    assert not flags["ci_overlap"]


def test_baseline_crossing_sits_below_mld_crossing():
    """Hard-decision decoding loses the analog information and crosses earlier."""
    base = run_sweep(ExperimentConfig(
        family="surface-square", distances=(3, 5), sigmas=(0.50, 0.53, 0.56),
        trials=30_000, run_seed=812, decoder="baseline"))
    cross_base, _ = crossing_point(base, 3, 5)
    mld = run_sweep(ExperimentConfig(
        family="surface-square", distances=(3, 5), sigmas=(0.57, 0.61, 0.65),
        trials=30_000, run_seed=813, decoder="mld-pf"))
    cross_mld, _ = crossing_point(mld, 3, 5)
    assert cross_base < cross_mld
    assert cross_base < 0.56 < cross_mld


def test_plateau_is_not_increasing_at_the_threshold_anchor():
    sigma = 1.0 / math.sqrt(math.e)
    cfg = ExperimentConfig(family="surface-square", distances=(3, 5, 7),
                           sigmas=(sigma,), trials=40_000, run_seed=814)
    verdict = plateau_check(run_sweep(cfg), sigma)
    assert verdict in ("flat", "decreasing")
