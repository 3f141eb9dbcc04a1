"""Exact n-photon output statistics of an evolution matrix.

The weight of an output pattern is ``|Per(A)|**2 / prod(s_out!)`` where ``A``
is the submatrix picked out by the input and output occupations. Summing the
weights over all outputs gives ``Per(V^dagger V)`` for the selected columns
``V``; that total is 1 when every photon enters in the same layer and larger
otherwise, and the distribution is normalised by it.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ConfigurationError, NumericError, SizeLimitError
from .linalg import gram_matrix, permanent_ryser
from .network import EvolutionMatrix, _counts, submatrix
from .rng import RandomSeed, as_seed

MAX_WEIGHT_PHOTONS = 12
MAX_DIST_PHOTONS = 6
MAX_OUTCOMES = 10**6
NORM_CHECK_TOL = 1e-8


def occupation_key(counts) -> tuple[int, ...]:
    return tuple(int(c) for c in counts)


def format_occupation(counts) -> str:
    return "-".join(str(int(c)) for c in counts)


def parse_occupation(text: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(x) for x in text.strip().split("-"))
    except ValueError:
        raise ConfigurationError(f"bad occupation {text!r}; expected dash-separated counts") from None
    if any(c < 0 for c in counts):
        raise ConfigurationError(f"negative count in occupation {text!r}")
    return counts


def input_from_positions(ev: EvolutionMatrix, positions) -> tuple[int, ...]:
    """Binary input occupation from (layer, mode) pairs, both 1-based."""
    s_in = [0] * (ev.k * ev.m)
    for q, j in positions:
        if not (1 <= q <= ev.k and 1 <= j <= ev.m):
            raise ConfigurationError(f"injection position {(q, j)} outside the network")
        c = ev.column(q, j)
        if s_in[c]:
            raise ConfigurationError(f"injection position {(q, j)} given twice")
        s_in[c] = 1
    return tuple(s_in)


def compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All length-m occupations with total n, in descending lexicographic order.

    For m=2, n=2 this yields (2, 0), (1, 1), (0, 2).
    """
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, m - 1):
            yield (first,) + rest


def outcome_count(n: int, m: int) -> int:
    return math.comb(m + n - 1, n)


def outcome_weight(ev: EvolutionMatrix, s_in, s_out) -> float:
    """Unnormalised probability ``|Per|^2 / prod(s_out!)``."""
    s_out = _counts(s_out)
    sub = submatrix(ev, s_in, s_out)
    if sub.shape[0] > MAX_WEIGHT_PHOTONS:
        raise SizeLimitError(f"outcome weights limited to n <= {MAX_WEIGHT_PHOTONS}")
    per = permanent_ryser(sub)
    denom = math.prod(math.factorial(int(c)) for c in s_out)
    return abs(per) ** 2 / denom


@dataclass(frozen=True)
class OutcomeDistribution:
    outcomes: tuple[tuple[int, ...], ...]
    probabilities: np.ndarray
    normalizer: float

    def __post_init__(self):
        self.probabilities.setflags(write=False)

    def __len__(self):
        return len(self.outcomes)

    def __getitem__(self, s_out) -> float:
        return self.as_dict()[occupation_key(s_out)]

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return dict(zip(self.outcomes, self.probabilities.tolist()))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["occupation", "probability"])
        for occ, p in zip(self.outcomes, self.probabilities):
            writer.writerow([format_occupation(occ), repr(float(p))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def full_distribution(ev: EvolutionMatrix, s_in) -> OutcomeDistribution:
    s_in = _counts(s_in)
    n = int(s_in.sum())
    if n > MAX_DIST_PHOTONS:
        raise SizeLimitError(f"exact distributions limited to n <= {MAX_DIST_PHOTONS}, got {n}")
    if outcome_count(n, ev.m) > MAX_OUTCOMES:
        raise SizeLimitError(
            f"{outcome_count(n, ev.m)} outcomes for n={n}, m={ev.m} exceeds {MAX_OUTCOMES}")

    outcomes = tuple(compositions(n, ev.m))
    weights = np.array([outcome_weight(ev, s_in, s_out) for s_out in outcomes])
    total = float(weights.sum())

    cols = ev.matrix[:, np.flatnonzero(s_in)]
    expected = permanent_ryser(gram_matrix(cols)).real
    if abs(total - expected) > NORM_CHECK_TOL * max(1.0, abs(expected)):
        raise NumericError(
            f"summed weights {total!r} disagree with Gram permanent {expected!r}")
    return OutcomeDistribution(outcomes, weights / total, total)


def sample_outcomes(ev: EvolutionMatrix, s_in, shots: int,
                    rng: RandomSeed | int | None = None,
                    dist: OutcomeDistribution | None = None) -> list[tuple[int, ...]]:
    """i.i.d. draws by inverting the cumulative distribution."""
    if shots < 0:
        raise ConfigurationError(f"shots must be >= 0, got {shots}")
    if dist is None:
        dist = full_distribution(ev, s_in)
    cdf = np.cumsum(dist.probabilities)
    cdf /= cdf[-1]
    u = as_seed(rng).generator().random(shots)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, len(cdf) - 1)
    return [dist.outcomes[i] for i in idx]


def empirical_frequencies(samples, outcomes) -> np.ndarray:
    index = {o: i for i, o in enumerate(outcomes)}
    counts = np.zeros(len(outcomes))
    for s in samples:
        counts[index[occupation_key(s)]] += 1
    return counts / max(len(samples), 1)
