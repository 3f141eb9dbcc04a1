"""PDC source statistics and scheme-level rate, SNR and bound formulas.

A PDC source with squeezing ``lam`` emits ``i`` pairs with probability
``(1 - lam**2) * lam**(2*i)``. A scheme offers ``q`` possible input
positions (``n`` for BS, ``m`` for SBS, ``k*m`` for DBS) and succeeds when
exactly ``n`` of its ``q`` sources emit one pair and the rest emit nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError, DomainError

UNDERFLOW_LOG = -700.0


class Scheme(str, Enum):
    BS = "BS"
    SBS = "SBS"
    DBS = "DBS"


@dataclass(frozen=True)
class PdcSource:
    lam: float

    def __post_init__(self):
        if not (0.0 <= self.lam < 1.0) or math.isnan(self.lam):
            raise DomainError(f"squeezing parameter must lie in [0, 1), got {self.lam}")

    @property
    def lam2(self) -> float:
        return self.lam * self.lam

    def photon_number_pmf(self, i: int) -> float:
        return (1.0 - self.lam2) * self.lam2 ** i

    def heralded_pmf(self, i: int) -> float:
        """Photon-number law of the heralded arm given a threshold click (i >= 1)."""
        if i < 1:
            return 0.0
        return (1.0 - self.lam2) * self.lam2 ** (i - 1)


@dataclass(frozen=True)
class SchemeParams:
    n: int
    m: int
    k: int = 1
    scheme: Scheme = Scheme.DBS

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.n < 1:
            raise ConfigurationError(f"photon number must be >= 1, got {self.n}")
        if self.m < 1 or self.k < 1:
            raise ConfigurationError(f"need m >= 1 and k >= 1, got m={self.m}, k={self.k}")
        if self.scheme is Scheme.SBS and self.k != 1:
            raise ConfigurationError("scattershot sampling has exactly one layer (k=1)")
        if self.n > self.inputs:
            raise ConfigurationError(
                f"{self.scheme.value} offers {self.inputs} input positions, fewer than n={self.n}")

    @classmethod
    def paper_default(cls, n: int, scheme: Scheme | str = Scheme.DBS) -> "SchemeParams":
        """m = n**2, with k = n for DBS and k = 1 otherwise."""
        scheme = Scheme(scheme)
        return cls(n, n * n, n if scheme is Scheme.DBS else 1, scheme)

    @property
    def inputs(self) -> int:
        if self.scheme is Scheme.BS:
            return self.n
        if self.scheme is Scheme.SBS:
            return self.m
        return self.k * self.m


def _as_source(src) -> PdcSource:
    return src if isinstance(src, PdcSource) else PdcSource(float(src))


def p_single(src) -> float:
    lam2 = _as_source(src).lam2
    return (1.0 - lam2) * lam2


def p_vacuum(src) -> float:
    return 1.0 - _as_source(src).lam2


def p_single_given_herald(src) -> float:
    return 1.0 - _as_source(src).lam2


def log_binomial(q: int, n: int) -> float:
    return math.lgamma(q + 1) - math.lgamma(n + 1) - math.lgamma(q - n + 1)


def log_success_probability(p: SchemeParams, src=None) -> float:
    """log P_s; the source defaults to the optimal squeezing for ``p``."""
    src = PdcSource(lambda_opt(p)) if src is None else _as_source(src)
    q, n, lam2 = p.inputs, p.n, src.lam2
    if lam2 == 0.0:
        return -math.inf
    # C(q, n) * P1^n * P0^(q-n) == C(q, n) * lam2^n * (1 - lam2)^q
    return log_binomial(q, n) + n * math.log(lam2) + q * math.log1p(-lam2)


def success_probability(p: SchemeParams, src=None) -> float:
    """Probability that exactly n of the scheme's sources emit a single pair.

    Evaluated in log space; results below exp(-700) are returned as 0.
    """
    lp = log_success_probability(p, src)
    return 0.0 if lp < UNDERFLOW_LOG else math.exp(lp)


def lambda_opt(p: SchemeParams) -> float:
    return math.sqrt(p.n / (p.inputs + p.n))


def _single_fraction_pow(p: SchemeParams, src) -> tuple[float, float]:
    """(x, 1 - x) with x = P_{1|H}**n, computed without cancellation."""
    if src is None:
        # at lambda_opt, 1 - lam^2 = q / (q + n)
        log_x = p.n * math.log1p(-p.n / (p.inputs + p.n))
    else:
        lam2 = _as_source(src).lam2
        log_x = p.n * math.log1p(-lam2)
    return math.exp(log_x), -math.expm1(log_x)


def noise_probability(p: SchemeParams, src=None) -> float:
    """P(at least one heralded source carries >= 2 photons | n heralds)."""
    return _single_fraction_pow(p, src)[1]


def snr(p: SchemeParams, src=None) -> float:
    """Heralding signal-to-noise ratio P_{1|H}^n / (1 - P_{1|H}^n).

    Uses lambda_opt unless an explicit source is given; infinite at lam = 0.
    """
    x, one_minus_x = _single_fraction_pow(p, src)
    if one_minus_x == 0.0:
        return math.inf
    return x / one_minus_x


def _root2_minus_1(n: int) -> float:
    if n < 1:
        raise DomainError(f"photon number must be >= 1, got {n}")
    return math.expm1(math.log(2.0) / n)


def min_modes_for_unit_snr(n: int) -> float:
    """Smallest single-layer mode count with SNR >= 1 at lambda_opt."""
    return n / _root2_minus_1(n)


def min_layers_for_unit_snr(n: int) -> float:
    """Smallest k with SNR >= 1 when m = n**2: 1 / (n * (2**(1/n) - 1))."""
    return 1.0 / (n * _root2_minus_1(n))


def asymptotic_pmax(n: int, b: float) -> float:
    """Large-n optimal success probability 1 / (b * sqrt(2*pi*n))."""
    if n < 1 or b <= 0:
        raise DomainError(f"need n >= 1 and b > 0, got n={n}, b={b}")
    return 1.0 / (b * math.sqrt(2.0 * math.pi * n))
