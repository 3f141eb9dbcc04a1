"""Monte Carlo check of the source model.

Each shot fires every one of the scheme's ``q`` sources once. A source
heralds when it emits at least one pair (threshold detector). A shot is
*valid* when exactly ``n`` sources herald, *noisy* when it is valid and some
heralded source emitted two or more pairs, and *clean* otherwise. The
clean-shot rate estimates ``P_s`` and clean/noisy estimates the SNR.

Shots are processed in fixed-size chunks; chunk ``c`` draws from Philox
sub-stream ``c`` of the seed, so tallies do not depend on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import _backend
from .errors import DomainError
from .rng import RandomSeed, as_seed
from .source import SchemeParams, _as_source

CHUNK_CELLS = 1 << 21


def default_workers() -> int:
    env = os.environ.get("DRIVENBS_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def geometric_photon_count(src, rng: RandomSeed | int | None = None, size=None):
    """Pair count drawn by inverting the CDF of (1 - lam^2) lam^(2i)."""
    src = _as_source(src)
    gen = rng if isinstance(rng, np.random.Generator) else as_seed(rng).generator()
    u = gen.random(size)
    if src.lam == 0.0:
        return np.zeros_like(u, dtype=np.int64) if size is not None else 0
    counts = np.floor(np.log1p(-u) / math.log(src.lam2)).astype(np.int64)
    return counts if size is not None else int(counts)


@dataclass(frozen=True)
class TrialRecord:
    photon_counts: tuple[int, ...]
    n: int

    @property
    def herald_pattern(self) -> tuple[bool, ...]:
        return tuple(c >= 1 for c in self.photon_counts)

    @property
    def valid(self) -> bool:
        return sum(self.herald_pattern) == self.n

    @property
    def noisy(self) -> bool:
        return self.valid and any(c >= 2 for c in self.photon_counts)


def simulate_records(p: SchemeParams, src, shots: int,
                     rng: RandomSeed | int | None = None) -> list[TrialRecord]:
    """Per-shot records with full photon counts; meant for inspection, not speed."""
    counts = geometric_photon_count(src, as_seed(rng), size=(shots, p.inputs))
    return [TrialRecord(tuple(int(c) for c in row), p.n) for row in counts]


@dataclass(frozen=True)
class TrialSummary:
    config: dict
    shots: int
    valid: int
    noisy: int
    clean: int
    p_s: float
    p_s_err: float
    snr: float
    snr_err: float
    p_herald: float
    noise_fraction: float

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, float) and not math.isfinite(value):
                out[key] = None
        return out


def _chunk_rows(sources: int) -> int:
    return max(1, CHUNK_CELLS // sources)


def simulate_trials(p: SchemeParams, src, shots: int,
                    rng: RandomSeed | int | None = None, *,
                    workers: int | None = None,
                    number_resolving: bool = False) -> TrialSummary:
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    src = _as_source(src)
    seed = as_seed(rng)
    sources = p.inputs
    rows = _chunk_rows(sources)
    nchunks = -(-shots // rows)
    lam2 = src.lam2
    herald_below, multi_below = lam2, lam2 * lam2

    def run(c: int) -> tuple[int, int, int]:
        size = min(rows, shots - c * rows)
        u = seed.generator(c).random((size, sources))
        return _backend.tally_trials(u, herald_below, multi_below, p.n, number_resolving)

    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or nchunks == 1:
        tallies = [run(c) for c in range(nchunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(run, range(nchunks)))
    valid = sum(t[0] for t in tallies)
    noisy = sum(t[1] for t in tallies)
    clean = valid - noisy

    p_s = clean / shots
    p_s_err = math.sqrt(p_s * (1.0 - p_s) / shots)
    if valid:
        frac = clean / valid
        frac_err = math.sqrt(frac * (1.0 - frac) / valid)
        snr = clean / noisy if noisy else math.inf
        # delta method on f/(1-f)
        snr_err = frac_err / (1.0 - frac) ** 2 if noisy else math.inf
        noise_fraction = noisy / valid
    else:
        snr = snr_err = noise_fraction = math.nan
    config = {
        "scheme": p.scheme.value, "n": p.n, "m": p.m, "k": p.k,
        "lambda": src.lam, "seed": seed.seed, "stream": seed.stream,
        "number_resolving": number_resolving,
    }
    return TrialSummary(config, shots, valid, noisy, clean, p_s, p_s_err,
                        snr, snr_err, valid / shots, noise_fraction)


def herald_probability(p: SchemeParams, src) -> float:
    """Closed-form P(exactly n threshold heralds) = C(q,n) lam^2n (1-lam^2)^(q-n)."""
    lam2 = _as_source(src).lam2
    q, n = p.inputs, p.n
    if lam2 == 0.0:
        return 0.0
    return math.exp(math.lgamma(q + 1) - math.lgamma(n + 1) - math.lgamma(q - n + 1)
                    + n * math.log(lam2) + (q - n) * math.log1p(-lam2))
