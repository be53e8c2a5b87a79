"""Exit criteria. Each test appends one PASS/FAIL/SKIP line to the summary
printed at the end of the pytest run."""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from hera import Hyperparams, PartialLabelDataset, fit
from hera.cli import main
from hera.data import (CorruptionSpec, corrupt, coupling_label, gaussian_blobs, load_dataset,
                       dumps)
from hera.harness import cross_validate, format_sweep, sweep
from hera.loss import grad_p, grad_w
from hera.prox import shrink, svt

from conftest import ACCEPTANCE_LINES, random_problem
from oracles import (central_diff, l1_prox_by_grid, naive_augmented, naive_heterogeneous,
                     nuclear, rel_err)

SEED = 0
LOST_PATH = Path(os.environ.get("HERA_LOST_DATA", Path(__file__).parents[1] / "data" / "lost.pll"))


def record(cid, ok, detail):
    ACCEPTANCE_LINES.append(f"{cid:<3} {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


@pytest.fixture(scope="module")
def blobs():
    return gaussian_blobs(150, 5, 3, separation=6.0, seed=SEED)


def blind(ds):
    return PartialLabelDataset(ds.features, ds.candidates)


def test_G1_gradient_fidelity():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst_w = worst_p = 0.0
    for _ in range(20):
        ds, W, cs, hp, lam, rho = random_problem(rng)
        X, Y = ds.features, ds.Y
        fd_w = central_diff(lambda w: naive_heterogeneous(X, w, cs.P, hp.alpha)
                            + hp.beta * np.sum(w * w), W)
        fd_p = central_diff(lambda p: naive_augmented(X, Y, W, p, cs.E, cs.J, cs.M, cs.N,
                                                      hp, lam, rho), cs.P)
        worst_w = max(worst_w, rel_err(grad_w(ds, W, cs.P, hp), fd_w))
        worst_p = max(worst_p, rel_err(grad_p(ds, W, cs, hp, lam, rho), fd_p))
    elapsed = time.perf_counter() - start
    ok = worst_w < 1e-5 and worst_p < 1e-5 and elapsed < 10
    record("G1", ok, f"max rel err W {worst_w:.2e}, P {worst_p:.2e} (< 1e-5); {elapsed:.1f}s (< 10s)")
    assert ok


def test_G2_prox_oracles():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    l1_err = spec_err = 0.0
    probes_beaten = True
    for _ in range(10):
        G = rng.uniform(-2, 2, (5, 7))
        eps = float(rng.uniform(0.1, 1.0))
        l1_err = max(l1_err, float(np.max(np.abs(shrink(G, eps) - l1_prox_by_grid(G, eps)))))
        Z = svt(G, eps)
        s_in = np.linalg.svd(G, compute_uv=False)
        s_out = np.linalg.svd(Z, compute_uv=False)
        spec_err = max(spec_err, float(np.max(np.abs(np.sort(s_out) - np.sort(np.maximum(s_in - eps, 0))))))
        objective = lambda z: eps * nuclear(z) + 0.5 * np.sum((z - G) ** 2)
        best = objective(Z)
        probes_beaten &= all(best <= objective(Z + 1e-3 * rng.normal(size=Z.shape))
                             for _ in range(100))
    elapsed = time.perf_counter() - start
    ok = l1_err < 1e-6 and spec_err < 1e-8 and probes_beaten and elapsed < 10
    record("G2", ok, f"l1 prox err {l1_err:.1e} (< 1e-6), spectrum err {spec_err:.1e} (< 1e-8), "
                     f"perturbations beaten: {probes_beaten}; {elapsed:.1f}s (< 10s)")
    assert ok


@pytest.mark.slow
def test_G3_alm_feasibility(blobs):
    ds = blind(corrupt(blobs, CorruptionSpec(p=0.5, r=1, seed=SEED)))
    scale = np.linalg.norm(ds.Y)
    start = time.perf_counter()
    _, cs, report = fit(ds, Hyperparams(iter_max=200))
    elapsed = time.perf_counter() - start
    r1, r2 = report.feasibility_trace[-1]
    ok = r1 < 1e-2 * scale and r2 < 1e-2 * scale and elapsed < 60
    detail = (f"after {report.iterations} iterations |Y-P-E|/|Y| = {r1 / scale:.2e}, "
              f"|P-J|/|Y| = {r2 / scale:.2e} (< 1e-2); {elapsed:.1f}s (< 60s)")
    if not ok:
        # diagnostic only: how long the default penalty schedule actually needs
        _, _, longer = fit(ds, Hyperparams(iter_max=1000))
        fr = np.array(longer.feasibility_trace) / scale
        first = int(np.flatnonzero((fr < 1e-2).all(axis=1))[0]) + 1
        detail += f"; with the same schedule both drop below 1e-2 at iteration {first}"
    record("G3", ok, detail)
    assert ok


@pytest.mark.slow
def test_A1_unambiguous_sanity(blobs):
    cv = cross_validate(blobs, Hyperparams(), folds=10, seed=SEED)
    _, cs, _ = fit(blind(blobs))
    recovered = float(np.mean(cs.P.argmax(axis=0) == blobs.ground_truth))
    ok = cv.mean >= 0.95 and recovered >= 0.95
    record("A1", ok, f"10-fold accuracy {cv.row()} (>= 0.95), P argmax recovery {recovered:.3f} (>= 0.95)")
    assert ok


@pytest.mark.slow
def test_A2_disambiguation_value(blobs):
    ds = corrupt(blobs, CorruptionSpec(p=0.7, r=2, seed=SEED))
    hera = cross_validate(ds, Hyperparams(), folds=10, seed=SEED, method="hera")
    knn = cross_validate(ds, Hyperparams(), folds=10, seed=SEED, method="plknn")
    margin = hera.mean - knn.mean
    ok = margin >= 0.02
    # accuracy of the nearest-true-mean rule bounds what any method can reach here
    means = np.eye(3, 5) * 6.0 / np.sqrt(2.0)
    X = blobs.features.T
    ceiling = float(np.mean(((X[:, None] - means) ** 2).sum(-1).argmin(1) == blobs.ground_truth))
    record("A2", ok, f"HERA {hera.row()} vs PL-KNN {knn.row()}, margin {margin:+.3f} (>= +0.020); "
                     f"nearest-true-mean ceiling {ceiling:.3f}")
    assert ok


@pytest.mark.slow
def test_A3_degradation_trend(blobs):
    grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]
    rows = sweep(blobs, "r1", grid, Hyperparams(), folds=10, seed=SEED)
    table = format_sweep("r1", rows)
    lo, hi = rows[0].hera, rows[-1].hera
    pooled = float(np.sqrt((lo.std**2 + hi.std**2) / 2))
    ok = len(table.splitlines()) == 8 and lo.mean >= hi.mean - 2 * pooled
    record("A3", ok, f"p=0.1 {lo.row()} vs p=0.7 {hi.row()}, pooled std {pooled:.3f}; "
                     f"HERA curve {' '.join(f'{r.hera.mean:.3f}' for r in rows)}")
    print(table)
    assert ok


def test_A4_corruption_statistics():
    base = gaussian_blobs(10000, 5, 5, seed=SEED)
    out = corrupt(base, CorruptionSpec(p=0.3, r=2, seed=SEED))
    sizes = out.candidates.sum(axis=0)
    n_corrupt = int(np.sum(sizes > 1))
    all_three = bool(np.all(sizes[sizes > 1] == 3))
    eps = corrupt(base, CorruptionSpec(p=1.0, r=1, epsilon=0.4, seed=SEED))
    freq = float(np.mean(eps.candidates[coupling_label(base.ground_truth, 5), np.arange(10000)] == 1))
    bound = 3 * np.sqrt(0.4 * 0.6 / 10000)
    ok = n_corrupt == 3000 and all_three and abs(freq - 0.4) <= bound
    record("A4", ok, f"{n_corrupt} corrupted columns (== 3000), all size 3: {all_three}; "
                     f"coupling frequency {freq:.4f} (|f - 0.4| <= {bound:.4f})")
    assert ok


def test_A5_determinism_and_round_trips(blobs, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    clean = tmp_path / "clean.pll"
    clean.write_text(dumps(blobs.subset(range(60))))

    def run_twice(make_args, outputs):
        blobs_out = []
        for tag in "ab":
            capsys.readouterr()
            assert main(make_args(tag)) == 0
            blobs_out.append([capsys.readouterr().out.encode()]
                             + [(tmp_path / f"{name}_{tag}").read_bytes() for name in outputs])
        return blobs_out[0] == blobs_out[1]

    same_corrupt = run_twice(lambda t: ["corrupt", "--in", str(clean), "--out",
                                        str(tmp_path / f"noisy_{t}"), "--p", "0.5", "--r", "1",
                                        "--seed", "3"], ["noisy"])
    noisy = str(tmp_path / "noisy_a")
    same_train = run_twice(lambda t: ["train", "--data", noisy, "--out",
                                      str(tmp_path / f"model_{t}")], ["model"])
    same_log = (tmp_path / "model_a.log").read_bytes() == (tmp_path / "model_b.log").read_bytes()
    same_eval = run_twice(lambda t: ["eval", "--data", noisy, "--folds", "5", "--seed", "3",
                                     "--baseline", "plknn", "--out", str(tmp_path / f"rec_{t}")],
                          ["rec"])

    rng = np.random.default_rng(SEED)
    round_trips = 0
    for i in range(50):
        n, d, q = (int(v) for v in rng.integers([1, 1, 2], [40, 8, 10]))
        truth = rng.integers(0, q, n)
        Y = (rng.random((q, n)) < 0.3).astype(np.uint8)
        Y[truth, np.arange(n)] = 1
        ds = PartialLabelDataset(rng.normal(size=(d, n)) * 10.0 ** rng.integers(-6, 6), Y,
                                 truth if i % 2 else None)
        path = tmp_path / f"rt{i}.pll"
        path.write_text(dumps(ds))
        round_trips += load_dataset(path) == ds
    ok = same_corrupt and same_train and same_log and same_eval and round_trips == 50
    record("A5", ok, f"byte-identical corrupt/train/eval: {same_corrupt}/{same_train and same_log}/"
                     f"{same_eval}; round trips {round_trips}/50")
    assert ok


@pytest.mark.slow
def test_A6_lost_dataset():
    if not LOST_PATH.exists():
        ACCEPTANCE_LINES.append(f"A6  SKIP  Lost dataset not found at {LOST_PATH} "
                                "(set HERA_LOST_DATA to run)")
        pytest.skip(f"Lost dataset not supplied ({LOST_PATH})")
    ds = load_dataset(LOST_PATH)
    cv = cross_validate(ds, Hyperparams(), folds=10, seed=SEED)
    ok = abs(cv.mean - 0.712) <= 0.07
    record("A6", ok, f"Lost 10-fold accuracy {cv.row()} (0.712 +/- 0.07)")
    assert ok
