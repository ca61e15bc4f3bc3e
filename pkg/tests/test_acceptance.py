"""Acceptance criteria, one test each.

Every test records a single ``PASS``/``FAIL``/``SKIP`` line; the lines
are printed together at the end of the pytest run (see conftest.py) and
also when this file is run directly.

Tolerances are pinned here and nowhere else.
"""
import os
import time

import numpy as np
import pytest

from conftest import path_tree, random_distance, star_tree
from eraseg.embed import mds_embed
from eraseg.graph import DistanceMatrix, minimum_spanning_tree
from eraseg.indices import build_index_panel, compute_indices
from eraseg.panel import load_panel, write_panel
from eraseg.pipeline import PipelineConfig, build_windows, run_pipeline, segment_index_panel
from eraseg.segment import SegmenterConfig, group_tv_denoise, lambda_for_era_count, segment, standardize
from eraseg.synth import planted_regime_panel
from oracles import brute_force_mst, tv_oracle, tv_primal

SOLVER_SLACK = 1e-6
SOLVER_BUDGET_S = 5.0
CLOSED_FORM_TOL = 1e-8
IDENTITY_TOL = 1e-9
MEAN_COLLAPSE_TOL = 1e-6
INDEX_TOL = 1e-12
RECOVERY_WINDOW = 1
RECOVERY_SEEDS = range(20)
RECOVERY_MIN = 18
MDS_TOL = 1e-9
REAL_YEARS = (1964, 1983, 2007)
REAL_YEAR_TOL = 2
PIPELINE_BUDGET_S = 60.0

RESULTS = []


def record(number, ok, detail):
    status = "SKIP" if ok is None else ("PASS" if bool(ok) else "FAIL")
    line = f"{status} criterion {number:2d}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def test_01_solver_vs_oracle():
    rng = np.random.default_rng(20240601)
    cases = [
        (rng.choice([1, 2, 3, 5]), rng.choice([5, 10, 20]), rng.choice([0.1, 1.0, 10.0]))
        for _ in range(200)
    ]
    Xs = [rng.normal(size=(K, T)) for K, T, _ in cases]

    start = time.perf_counter()
    ours = [group_tv_denoise(X, SegmenterConfig(lam=lam)) for X, (_, _, lam) in zip(Xs, cases)]
    elapsed = time.perf_counter() - start

    # batch the oracle by T, padding rows with zeros (they stay at zero)
    worst = -np.inf
    for T in (5, 10, 20):
        idx = [i for i, c in enumerate(cases) if c[1] == T]
        batch = np.zeros((len(idx), 5, T))
        for b, i in enumerate(idx):
            batch[b, : cases[i][0]] = Xs[i]
        U, _ = tv_oracle(batch, [cases[i][2] for i in idx], iterations=100_000)
        for b, i in enumerate(idx):
            K, _, lam = cases[i]
            ref = tv_primal(Xs[i], U[b, :K], lam)
            worst = max(worst, ours[i].objective_value - ref)
    ok = worst <= SOLVER_SLACK and elapsed < SOLVER_BUDGET_S
    record(1, ok, f"200 instances, max(solver - oracle) = {worst:.2e} (<= {SOLVER_SLACK:g}), "
                  f"solver time {elapsed:.2f}s (< {SOLVER_BUDGET_S:g}s)")
    assert ok


def test_02_closed_form():
    X = np.array([[0.0, 4.0]])
    a = group_tv_denoise(X, SegmenterConfig(lam=2.0)).Y[0]
    b = group_tv_denoise(X, SegmenterConfig(lam=4.5)).Y[0]
    err = max(np.abs(a - [1, 3]).max(), np.abs(b - [2, 2]).max())
    ok = err <= CLOSED_FORM_TOL
    record(2, ok, f"X=(0,4): lam=2 -> {a.round(10)}, lam=4.5 -> {b.round(10)}, max error {err:.1e}")
    assert ok


def test_03_limits():
    rng = np.random.default_rng(3)
    X, _ = standardize(rng.normal(size=(5, 56)) + np.linspace(0, 3, 56))
    ident = np.abs(group_tv_denoise(X, SegmenterConfig(lam=0.0)).Y - X).max()
    out = group_tv_denoise(X, SegmenterConfig(lam=1e6))
    collapse = np.abs(out.Y - X.mean(axis=1, keepdims=True)).max()
    ok = ident <= IDENTITY_TOL and collapse <= MEAN_COLLAPSE_TOL
    record(3, ok, f"lam=0 max|Y-X| = {ident:.1e}; lam=1e6 max|Y-mean| = {collapse:.1e}")
    assert ok


def test_04_mst_oracle():
    rng = np.random.default_rng(4)
    bad = 0
    for k in range(500):
        n = int(rng.integers(2, 8))
        dist = random_distance(rng, n, ties=bool(k % 2))
        tree = minimum_spanning_tree(dist)
        edges, best = brute_force_mst(dist.d, dist.countries)
        bad += tree.total_weight != best or tree.edge_set() != edges
    ok = bad == 0
    record(4, ok, f"500 graphs (n <= 7, half with tied weights): {bad} mismatches vs enumeration")
    assert ok


def test_05_index_values():
    table = {
        "star": (star_tree(5), (1.0, 1.6, 2.0, 1.2, 3.4)),
        "path": (path_tree(5), (1.0, 2.0, 4.0, np.sqrt(0.24), 1.8)),
    }
    err = max(
        np.abs(compute_indices(tree).as_array() - np.array(expected)).max()
        for tree, expected in table.values()
    )
    disc = all(
        compute_indices(star_tree(n)).degree_std > compute_indices(path_tree(n)).degree_std
        and compute_indices(star_tree(n)).mean_neighbor_degree > compute_indices(path_tree(n)).mean_neighbor_degree
        for n in range(4, 33)
    )
    ok = err <= INDEX_TOL and disc
    record(5, ok, f"K_1,4 / P_5 max error {err:.1e}; star > path for n=4..32: {disc}")
    assert ok


@pytest.mark.slow
def test_06_planted_recovery():
    cfg = PipelineConfig(input="<memory>", target_eras=(3,))
    hits, found = 0, []
    for seed in RECOVERY_SEEDS:
        fx = planted_regime_panel(seed=seed)
        windows = build_windows(fx.panel, cfg)
        seg = segment_index_panel(build_index_panel([w.tree for w in windows]), cfg)[0]
        cps = seg.change_points
        ok = seg.n_eras == 3 and all(
            abs(c - t) <= RECOVERY_WINDOW for c, t in zip(cps, fx.true_change_points)
        )
        hits += ok
        found.append(cps)
    truth = planted_regime_panel(seed=0).true_change_points
    ok = hits >= RECOVERY_MIN
    record(6, ok, f"{hits}/{len(RECOVERY_SEEDS)} seeds recover {truth} within +-{RECOVERY_WINDOW} "
                  f"(need >= {RECOVERY_MIN}); found {found}")
    assert ok


def test_07_mds_round_trip():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 33))
        pts = rng.uniform(-1, 1, size=(n, 2)) * rng.uniform(0.1, 10)
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
        emb = mds_embed(DistanceMatrix(tuple(f"P{k:02d}" for k in range(n)), d))
        worst = max(worst, float(np.abs(emb.pairwise_distances() - d).max()))
    ok = worst <= MDS_TOL
    record(7, ok, f"100 planar configurations, max distance error {worst:.1e}")
    assert ok


def test_08_real_data():
    path = os.environ.get("ERASEG_REAL_PANEL")
    if not path:
        record(8, None, "real panel not supplied (set ERASEG_REAL_PANEL to the exported CSV)")
        pytest.skip("real panel not supplied")
    cfg = PipelineConfig(input=path, target_eras=(4,))
    panel = load_panel(path)
    ip = build_index_panel([w.tree for w in build_windows(panel, cfg)])
    X, std = standardize(ip)
    kw = dict(standardization=std, label_years=ip.label_years, names=ip.names)
    four = lambda_for_era_count(X, 4, config=cfg.segmenter(), **kw).segmentation
    years = four.change_point_years()
    located = four.n_eras == 4 and all(abs(y - r) <= REAL_YEAR_TOL for y, r in zip(years, REAL_YEARS))
    # decreasing lambda: look for an 8-era segmentation refining the 4-era one
    refined = False
    for lam in np.geomspace(four.lam, four.lam / 100, 60):
        seg = segment(X, cfg.segmenter(float(lam)), **kw)
        if seg.n_eras == 8:
            inner = [y for y in seg.change_point_years() if years[0] < y < years[1]] if len(years) > 1 else []
            refined = set(four.change_points) <= set(seg.change_points) and len(inner) > 0
            break
    ok = located and refined
    record(8, ok, f"4-era change-point years {years} vs {REAL_YEARS} (+-{REAL_YEAR_TOL}); "
                  f"8-era refinement splitting the middle span: {refined}")
    assert ok


def test_09_performance(tmp_path):
    fx = planted_regime_panel(seed=9, n_countries=32, n_months=732)
    write_panel(fx.panel, tmp_path / "panel.csv")
    cfg = PipelineConfig(input=str(tmp_path / "panel.csv"), outdir=str(tmp_path / "out"), lambdas=(2.0, 10.0))
    start = time.perf_counter()
    res = run_pipeline(cfg)
    elapsed = time.perf_counter() - start
    ok = elapsed < PIPELINE_BUDGET_S and res.index_panel.T == 56
    record(9, ok, f"32 x 732 panel, {res.index_panel.T} windows, 2 lambdas, rendering on: "
                  f"{elapsed:.1f}s (< {PIPELINE_BUDGET_S:g}s)")
    assert ok


def test_10_determinism(tmp_path):
    from eraseg import cli

    fx = planted_regime_panel(seed=10, n_countries=10, n_months=240, break_months=(80, 160))
    write_panel(fx.panel, tmp_path / "p.csv")
    args = ["run", "--input", str(tmp_path / "p.csv"), "--lambda", "1", "--lambda", "5", "--target-eras", "3"]
    manifests = []
    for out in ("a", "a", "b"):
        assert cli.main(args + ["--outdir", str(tmp_path / out)]) == 0
        manifests.append((tmp_path / out / "manifest.json").read_bytes())
    ok = len(set(manifests)) == 1
    n_files = manifests[0].count(b'"sha256"')
    record(10, ok, f"three runs (same and different outdir), {n_files} files: manifests identical = {ok}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
