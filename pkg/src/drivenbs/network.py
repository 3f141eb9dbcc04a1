"""Layered beam-splitter generation network and its evolution matrix.

Layer ``i`` (1-based) is a brick-wall of 2x2 rotations ``[[t, r], [-r, t]]``
with ``t = cos(theta)``, ``r = sin(theta)``. Odd layers pair modes
(1,2), (3,4), ...; even layers pair (2,3), (4,5), ... and leave the first
and last mode untouched. A photon injected just before layer ``q`` sees
``B_q = C_k ... C_{q+1} C_q``; the full evolution is the m x (k*m) matrix
``[U_H B_1 | ... | U_H B_k]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ConservationError, DimensionError
from .linalg import as_matrix, unitarity_residual
from .rng import RandomSeed, as_seed

UNITARY_TOL = 1e-10


def _check_modes(m: int) -> None:
    if m < 2 or m % 2:
        raise ConfigurationError(f"mode count must be even and >= 2, got m={m}")


def splitters_in_layer(index: int, m: int) -> int:
    return m // 2 if index % 2 else (m - 2) // 2


@dataclass(frozen=True)
class BeamSplitterLayer:
    index: int
    angles: tuple[float, ...]

    def __post_init__(self):
        if self.index < 1:
            raise ConfigurationError(f"layer index is 1-based, got {self.index}")
        object.__setattr__(self, "angles", tuple(float(x) for x in self.angles))
        for theta in self.angles:
            if not 0.0 <= theta <= math.pi / 2:
                raise ConfigurationError(f"beam-splitter angle {theta} outside [0, pi/2]")

    @property
    def odd(self) -> bool:
        return bool(self.index % 2)


@dataclass(frozen=True)
class GenerationNetwork:
    m: int
    k: int
    layers: tuple[BeamSplitterLayer, ...]
    seed: RandomSeed | None = None

    def __post_init__(self):
        _check_modes(self.m)
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.k < 1 or len(self.layers) != self.k:
            raise ConfigurationError(f"expected {self.k} layers, got {len(self.layers)}")
        for i, layer in enumerate(self.layers, start=1):
            if layer.index != i:
                raise ConfigurationError(f"layer {i} carries index {layer.index}")
            want = splitters_in_layer(i, self.m)
            if len(layer.angles) != want:
                raise ConfigurationError(
                    f"layer {i} needs {want} angles for m={self.m}, got {len(layer.angles)}")

    @classmethod
    def from_angles(cls, m: int, angles, seed: RandomSeed | None = None) -> "GenerationNetwork":
        layers = [BeamSplitterLayer(i, a) for i, a in enumerate(angles, start=1)]
        return cls(m, len(layers), tuple(layers), seed)

    @classmethod
    def uniform(cls, m: int, k: int, theta: float) -> "GenerationNetwork":
        """Every splitter in every layer at the same angle."""
        _check_modes(m)
        return cls.from_angles(m, [[theta] * splitters_in_layer(i, m) for i in range(1, k + 1)])

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "seed": None if self.seed is None else [self.seed.seed, self.seed.stream],
            "layers": [list(layer.angles) for layer in self.layers],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GenerationNetwork":
        seed = doc.get("seed")
        if isinstance(seed, int):
            seed = RandomSeed(seed)
        elif seed is not None:
            seed = RandomSeed(*seed)
        net = cls.from_angles(int(doc["m"]), doc["layers"], seed)
        if net.k != int(doc.get("k", net.k)):
            raise ConfigurationError(f"k={doc['k']} disagrees with {net.k} listed layers")
        return net

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "GenerationNetwork":
        return cls.from_dict(json.loads(Path(path).read_text()))


def random_network(m: int, k: int, rng: RandomSeed | int | None = None) -> GenerationNetwork:
    """Network with every angle drawn independently and uniformly from [0, pi/2)."""
    _check_modes(m)
    if k < 1:
        raise ConfigurationError(f"layer count must be >= 1, got k={k}")
    seed = as_seed(rng)
    gen = seed.generator()
    angles = [gen.uniform(0.0, math.pi / 2, splitters_in_layer(i, m)).tolist()
              for i in range(1, k + 1)]
    return GenerationNetwork.from_angles(m, angles, seed)


def coupling_matrix(layer: BeamSplitterLayer, m: int) -> np.ndarray:
    _check_modes(m)
    want = splitters_in_layer(layer.index, m)
    if len(layer.angles) != want:
        raise ConfigurationError(
            f"layer {layer.index} needs {want} angles for m={m}, got {len(layer.angles)}")
    c = np.eye(m)
    start = 0 if layer.odd else 1
    for s, theta in enumerate(layer.angles):
        a = start + 2 * s
        t, r = math.cos(theta), math.sin(theta)
        c[a, a], c[a, a + 1] = t, r
        c[a + 1, a], c[a + 1, a + 1] = -r, t
    return c.astype(np.complex128)


def block(net: GenerationNetwork, q: int) -> np.ndarray:
    """B_q = C_k ... C_q, so C_q acts first on a column vector."""
    if not 1 <= q <= net.k:
        raise IndexError(f"block index q={q} outside 1..{net.k}")
    b = coupling_matrix(net.layers[q - 1], net.m)
    for layer in net.layers[q:]:
        b = coupling_matrix(layer, net.m) @ b
    return b


def blocks(net: GenerationNetwork) -> list[np.ndarray]:
    """All of B_1..B_k, built back-to-front so each costs one product."""
    out = [None] * net.k
    acc = np.eye(net.m, dtype=np.complex128)
    for q in range(net.k, 0, -1):
        acc = acc @ coupling_matrix(net.layers[q - 1], net.m)
        out[q - 1] = acc
    return out


@dataclass(frozen=True)
class EvolutionMatrix:
    m: int
    k: int
    blocks: tuple[np.ndarray, ...]
    matrix: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.k * self.m

    def column(self, q: int, j: int) -> int:
        """0-based column of injection layer q (1-based) and mode j (1-based)."""
        return (q - 1) * self.m + (j - 1)

    def location(self, c: int) -> tuple[int, int]:
        """Inverse of :meth:`column`: (layer q, mode j), both 1-based."""
        q, j = divmod(c, self.m)
        return q + 1, j + 1


def evolution_matrix(net: GenerationNetwork, u_h) -> EvolutionMatrix:
    u = as_matrix(u_h)
    if u.shape != (net.m, net.m):
        raise DimensionError(f"U_H has shape {u.shape}, network needs {(net.m, net.m)}")
    if unitarity_residual(u) >= UNITARY_TOL:
        raise ConfigurationError("U_H is not unitary within 1e-10")
    bl = tuple(u @ b for b in blocks(net))
    for b in bl:
        b.setflags(write=False)
    full = np.ascontiguousarray(np.hstack(bl))
    full.setflags(write=False)
    return EvolutionMatrix(net.m, net.k, bl, full)


def _counts(v) -> np.ndarray:
    arr = np.asarray(v)
    if arr.ndim != 1 or (arr.size and (np.any(arr < 0) or np.any(arr != np.round(arr)))):
        raise ConfigurationError(f"occupation vector must hold nonnegative integers: {v!r}")
    return arr.astype(np.int64)


def submatrix(ev: EvolutionMatrix, s_in, s_out) -> np.ndarray:
    """n x n matrix: one column per occupied input, row j repeated s_out[j] times."""
    s_in, s_out = _counts(s_in), _counts(s_out)
    m, width = ev.shape
    if s_in.size != width:
        raise DimensionError(f"input occupation needs length {width}, got {s_in.size}")
    if s_out.size != m:
        raise DimensionError(f"output occupation needs length {m}, got {s_out.size}")
    if np.any(s_in > 1):
        raise ConfigurationError("input occupations must be 0 or 1")
    if s_in.sum() != s_out.sum():
        raise ConservationError(
            f"{s_in.sum()} photons in but {s_out.sum()} photons out")
    cols = np.flatnonzero(s_in)
    rows = np.repeat(np.arange(m), s_out)
    return np.ascontiguousarray(ev.matrix[np.ix_(rows, cols)])
