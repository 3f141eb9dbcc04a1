"""Exit criteria for the package, one test per criterion.

Each test appends a PASS/FAIL line to the acceptance summary printed at the
end of the pytest run.
"""
import hashlib
import math
import time
from contextlib import contextmanager

import numpy as np

from drivenbs import cli, gauss
from drivenbs.fock import full_distribution, input_from_positions
from drivenbs.linalg import haar_unitary, permanent_naive, permanent_ryser, unitarity_residual
from drivenbs.montecarlo import simulate_trials
from drivenbs.network import block, coupling_matrix, evolution_matrix, GenerationNetwork, random_network
from drivenbs.rng import RandomSeed
from drivenbs.source import (SchemeParams, lambda_opt, min_layers_for_unit_snr,
                             min_modes_for_unit_snr, snr, success_probability)

from conftest import ACCEPTANCE_LOG, random_complex


@contextmanager
def criterion(label, budget=None):
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None:
            assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LOG.append(f"[{status}] {label} ({elapsed:.2f}s)")


def test_ac01_permanent_oracle_equivalence():
    with criterion("AC1 Ryser vs naive permanent, 200 matrices per n in 1..8", budget=10):
        rng = np.random.default_rng(1)
        worst = 0.0
        for n in range(1, 9):
            for _ in range(200):
                a = random_complex(rng, (n, n))
                naive = permanent_naive(a)
                worst = max(worst, abs(permanent_ryser(a) - naive) / max(1.0, abs(naive)))
        assert worst <= 1e-10, worst


def test_ac02_network_algebra():
    with criterion("AC2 block unitarity and nesting, 50 networks m<=32 k<=16", budget=30):
        rng = np.random.default_rng(2)
        for trial in range(50):
            m = 2 * int(rng.integers(1, 17))
            k = int(rng.integers(1, 17))
            net = random_network(m, k, RandomSeed(2, trial))
            ev = evolution_matrix(net, haar_unitary(m, RandomSeed(3, trial)))
            bs = [block(net, q) for q in range(1, k + 1)]
            for q in range(1, k + 1):
                assert unitarity_residual(bs[q - 1]) < 1e-10
                assert unitarity_residual(ev.blocks[q - 1]) < 1e-10
                if q < k:
                    nested = bs[q] @ coupling_matrix(net.layers[q - 1], m)
                    assert np.max(np.abs(bs[q - 1] - nested)) < 1e-10


def test_ac03_distribution_normalization():
    with criterion("AC3 distributions sum to 1; single-block normalizer is 1", budget=120):
        rng = np.random.default_rng(3)
        for n in range(1, 5):
            for m in (4, 6, 8):
                for k in range(1, 5):
                    seed = RandomSeed(n * 100 + m * 10 + k)
                    ev = evolution_matrix(random_network(m, k, seed.substream(0)),
                                          haar_unitary(m, seed.substream(1)))
                    cols = rng.choice(k * m, n, replace=False)
                    mixed = [ev.location(int(c)) for c in cols]
                    q = int(rng.integers(1, k + 1))
                    same = [(q, int(j) + 1) for j in rng.choice(m, n, replace=False)]
                    for positions in (mixed, same):
                        dist = full_distribution(ev, input_from_positions(ev, positions))
                        assert abs(dist.probabilities.sum() - 1) < 1e-9
                    assert abs(dist.normalizer - 1) < 1e-9


def test_ac04_hong_ou_mandel():
    with criterion("AC4 Hong-Ou-Mandel: P(1,1)=0, P(2,0)=P(0,2)=1/2"):
        ev = evolution_matrix(GenerationNetwork.uniform(2, 1, math.pi / 4), np.eye(2))
        dist = full_distribution(ev, (1, 1))
        # oracle: naive permanent of the repeated-row / full submatrices
        t = r = math.sqrt(0.5)
        assert abs(permanent_naive([[t, r], [-r, t]])) ** 2 < 1e-12
        assert abs(abs(permanent_naive([[t, r], [t, r]])) ** 2 / 2 - 0.5) < 1e-12
        assert abs(dist[(1, 1)]) < 1e-12
        assert abs(dist[(2, 0)] - 0.5) < 1e-12
        assert abs(dist[(0, 2)] - 0.5) < 1e-12


def test_ac05_lambda_opt_optimality():
    with criterion("AC5 lambda_opt beats a 10^4-point grid for n<=20, SBS and DBS"):
        grid = np.linspace(0.0, 1.0, 10_002)[1:-1]
        for n in range(1, 21):
            for scheme in ("SBS", "DBS"):
                p = SchemeParams.paper_default(n, scheme)
                best = success_probability(p, lambda_opt(p))
                assert best >= max(success_probability(p, lam) for lam in grid) - 1e-12


def test_ac06_snr_ceiling_and_growth():
    with criterion("AC6 SBS SNR <= 1; DBS SNR increasing and > 1; spot values"):
        for n in range(1, 101):
            assert snr(SchemeParams.paper_default(n, "SBS")) <= 1.0
        dbs = [snr(SchemeParams.paper_default(n, "DBS")) for n in range(2, 101)]
        assert all(b > a for a, b in zip(dbs, dbs[1:]))
        assert all(v > 1 for v in dbs)
        x = 0.8 ** 4
        assert abs(snr(SchemeParams(4, 16, 1, "SBS")) - x / (1 - x)) < 1e-9
        assert abs(snr(SchemeParams(4, 16, 1, "SBS")) - 0.69377) < 5e-6
        y = (64 / 68) ** 4
        assert abs(snr(SchemeParams(4, 16, 4, "DBS")) - y / (1 - y)) < 1e-9
        assert abs(snr(SchemeParams(4, 16, 4, "DBS")) - 3.644) < 5e-4


def test_ac07_e_fold_enhancement():
    with criterion("AC7 DBS/SBS ratio increasing on [10,200], in [2.5,2.72] at 200", budget=5):
        ratios = []
        for n in range(10, 201):
            s = success_probability(SchemeParams.paper_default(n, "SBS"))
            d = success_probability(SchemeParams.paper_default(n, "DBS"))
            ratios.append(d / s)
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert 2.5 <= ratios[-1] <= 2.72, ratios[-1]
        s100 = success_probability(SchemeParams.paper_default(100, "SBS"))
        assert abs(s100 * math.e * math.sqrt(2 * math.pi * 100) - 1) < 0.05


def test_ac08_bound_table():
    with criterion("AC8 min_m(2), min_k(2) and k=n >= min_k for n<=1000"):
        assert abs(min_modes_for_unit_snr(2) - 2 / (math.sqrt(2) - 1)) < 1e-9
        assert abs(min_layers_for_unit_snr(2) - 1 / (2 * (math.sqrt(2) - 1))) < 1e-9
        assert abs(min_modes_for_unit_snr(2) - 4.8284) < 1e-4
        assert abs(min_layers_for_unit_snr(2) - 1.2071) < 1e-4
        assert all(n >= min_layers_for_unit_snr(n) for n in range(1, 1001))


def test_ac09_monte_carlo_concordance():
    with criterion("AC9 Monte Carlo within 4 SE at 10^6 shots; 1/2/8 workers identical",
                   budget=60):
        p = SchemeParams(2, 4, 2, "DBS")
        lam = lambda_opt(p)
        runs = [simulate_trials(p, lam, 10**6, RandomSeed(2016, 2), workers=w) for w in (1, 2, 8)]
        assert runs[0] == runs[1] == runs[2]
        s = runs[0]
        assert abs(s.p_s - success_probability(p)) <= 4 * s.p_s_err
        assert abs(s.snr - snr(p)) <= 4 * s.snr_err


def test_ac10_gaussian_diagnostics():
    with criterion("AC10 KS null calibration <= 2% and m=256 n=3 k=4 passes"):
        rates = gauss.null_calibration(100, 4500, 0.01, RandomSeed(0))
        assert all(rate <= 0.02 for rate in rates.values()), rates
        seed = RandomSeed(0)
        ev = evolution_matrix(random_network(256, 4, seed.substream(0)),
                              haar_unitary(256, seed.substream(1)))
        for selection in gauss.SELECTIONS:
            reports = gauss.submatrix_element_test(ev, 3, 500, seed.substream(2), selection)
            assert all(r.pvalue > 0.01 for r in reports), (selection, reports)


CLI_CASES = {
    "rates": ["rates", "--n-min", "1", "--n-max", "30", "--lambda-rule", "opt@20"],
    "lambda": ["lambda", "--n-min", "1", "--n-max", "30"],
    "snr": ["snr", "--n-min", "1", "--n-max", "30", "--format", "json"],
    "bounds": ["bounds", "--n-min", "1", "--n-max", "50"],
    "sample": ["sample", "--m", "6", "--k", "3", "--inject", "1:1,2:4,3:6", "--shots", "500",
               "--seed", "4"],
    "montecarlo": ["montecarlo", "--n", "3", "--shots", "100000", "--seed", "9"],
    "gauss": ["gauss", "--m", "64", "--n", "2", "--k", "2", "--draws", "200", "--seed", "1"],
}


def _hashes(directory):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(directory.iterdir())}


def test_ac11_cli_determinism(tmp_path):
    with criterion("AC11 every CLI command is byte-identical on re-run"):
        results = []
        for attempt in range(2):
            # same output path both times; the path is part of the manifest
            work = tmp_path / "run"
            if work.exists():
                for f in work.iterdir():
                    f.unlink()
            work.mkdir(exist_ok=True)
            for name, args in CLI_CASES.items():
                assert cli.main(args + ["--out", str(work / f"{name}.out")]) == 0
            results.append(_hashes(work))
        assert len(results[0]) == len(CLI_CASES) + 2
        assert results[0] == results[1]
