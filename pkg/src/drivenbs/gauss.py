"""Element statistics of n x n submatrices of the evolution matrix.

Entries of a Haar unitary scaled by sqrt(m) approach a standard complex
Gaussian when m >> n**2. These helpers collect such entries from random
collision-free submatrices and run one-sample Kolmogorov-Smirnov tests on
the real part, the imaginary part (both N(0, 1/2)) and the squared modulus
(Exp(1)). They are diagnostics only: a passing test is evidence, not a
bound on the total-variation distance between matrix ensembles.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ConfigurationError
from .network import EvolutionMatrix
from .rng import RandomSeed, as_seed

COMPONENTS = ("real-part", "imaginary-part", "modulus-squared")
SELECTIONS = ("mixed", "single-block", "cross-block")
_HALF_SD = math.sqrt(0.5)


@dataclass(frozen=True)
class KsReport:
    component: str
    statistic: float
    pvalue: float
    samples: int
    selection: str = "synthetic"


def ks_reports(z, selection: str = "synthetic") -> list[KsReport]:
    """KS tests of complex samples ``z`` against a standard complex Gaussian."""
    z = np.asarray(z, dtype=np.complex128).ravel()
    tests = (
        stats.kstest(z.real, "norm", args=(0.0, _HALF_SD)),
        stats.kstest(z.imag, "norm", args=(0.0, _HALF_SD)),
        stats.kstest(np.abs(z) ** 2, "expon"),
    )
    return [KsReport(name, float(t.statistic), float(t.pvalue), z.size, selection)
            for name, t in zip(COMPONENTS, tests)]


def _pick_columns(gen: np.random.Generator, ev: EvolutionMatrix, n: int, selection: str):
    width = ev.k * ev.m
    if selection == "mixed":
        return gen.choice(width, n, replace=False)
    if selection == "single-block":
        q = gen.integers(ev.k)
        return q * ev.m + gen.choice(ev.m, n, replace=False)
    # cross-block: redraw until at least two blocks are touched
    while True:
        cols = gen.choice(width, n, replace=False)
        if len(set((cols // ev.m).tolist())) > 1:
            return cols


def collect_entries(ev: EvolutionMatrix, n: int, draws: int,
                    rng: RandomSeed | int | None = None,
                    selection: str = "mixed") -> np.ndarray:
    """sqrt(m)-scaled entries of ``draws`` random n x n submatrices, pooled."""
    if selection not in SELECTIONS:
        raise ConfigurationError(f"selection must be one of {SELECTIONS}, got {selection!r}")
    if n < 1 or 4 * n * n > ev.m:
        raise ConfigurationError(
            f"need n**2 <= m/4 for the element test, got n={n}, m={ev.m}")
    if draws < 100:
        raise ConfigurationError(f"need at least 100 draws, got {draws}")
    if selection == "cross-block" and (ev.k < 2 or n < 2):
        raise ConfigurationError("cross-block selection needs k >= 2 and n >= 2")
    gen = as_seed(rng).generator()
    scale = math.sqrt(ev.m)
    out = np.empty((draws, n * n), dtype=np.complex128)
    for d in range(draws):
        cols = _pick_columns(gen, ev, n, selection)
        rows = gen.choice(ev.m, n, replace=False)
        out[d] = ev.matrix[np.ix_(rows, cols)].ravel() * scale
    return out.ravel()


def submatrix_element_test(ev: EvolutionMatrix, n: int, draws: int,
                           rng: RandomSeed | int | None = None,
                           selection: str = "mixed") -> list[KsReport]:
    z = collect_entries(ev, n, draws, rng, selection)
    return ks_reports(z, selection)


def null_calibration(repetitions: int = 100, samples: int = 4500, alpha: float = 0.01,
                     rng: RandomSeed | int | None = None) -> dict[str, float]:
    """Per-component rejection rate of the KS tests on exact Gaussian samples."""
    gen = as_seed(rng).generator()
    rejected = dict.fromkeys(COMPONENTS, 0)
    for _ in range(repetitions):
        z = (gen.standard_normal(samples) + 1j * gen.standard_normal(samples)) * _HALF_SD
        for rep in ks_reports(z):
            rejected[rep.component] += rep.pvalue < alpha
    return {c: rejected[c] / repetitions for c in COMPONENTS}


def reports_to_csv(reports, path=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["component", "statistic", "pvalue", "samples"])
    for r in reports:
        writer.writerow([r.component, repr(r.statistic), repr(r.pvalue), r.samples])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
