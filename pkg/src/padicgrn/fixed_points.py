"""Fixed points, their nested-ball chains and A/E/I classification words."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .network import TransitionMap
from .padic_core import PadicError, decode, encode
from .stability import as_perm, classify, image_digits, permuted_images, prefix_lengths_from_digits


class NotAFixedPointError(PadicError):
    pass


@dataclass(frozen=True)
class FixedPointReport:
    config: tuple[int, ...]
    encoded: int
    ball_chain: tuple[int, ...]  # ball index at levels 1..N
    sequence: str  # length N-1, letters A/E/I
    label: str | None = None

    def prefix(self, length: int = 4) -> str:
        return self.sequence[:length]


def find_fixed_points(f: TransitionMap) -> set[int]:
    """Canonical encodings ``m`` with ``f(m) = m``."""
    idx = np.arange(f.size, dtype=np.int64)
    return {int(m) for m in np.flatnonzero(f.images == idx)}


def _all_levels(f: TransitionMap, ordering) -> list[np.ndarray]:
    D = image_digits(permuted_images(f, ordering), f.p, f.N)
    return [prefix_lengths_from_digits(D, f.p, f.N, n) for n in range(1, f.N)]


def _word(levels: list[np.ndarray], enc: int, p: int) -> str:
    return "".join(classify(int(M[enc % p ** n]), n).letter
                   for n, M in enumerate(levels, start=1))


def classification_sequence(f: TransitionMap, ordering, fp: int) -> str:
    """Word over {A, E, I}; letter ``n-1`` is the class of the level-``n`` ball of ``fp``.

    ``fp`` is a canonical encoding.
    """
    if f(fp) != fp:
        raise NotAFixedPointError(f"{fp} maps to {f(fp)}, not to itself")
    perm = as_perm(ordering, f.N)
    enc = encode(decode(fp, f.N, f.p), perm, f.p)
    return _word(_all_levels(f, perm), enc, f.p)


def fixed_point_report(f: TransitionMap, ordering=None,
                       labels: Mapping[tuple[int, ...], str] | None = None) -> list[FixedPointReport]:
    """One report per fixed point, sorted by encoding under ``ordering``."""
    perm = as_perm(ordering, f.N)
    levels = _all_levels(f, perm)
    labels = labels or {}
    out = []
    for m in find_fixed_points(f):
        cfg = decode(m, f.N, f.p)
        enc = encode(cfg, perm, f.p)
        chain = tuple(enc % f.p ** n for n in range(1, f.N + 1))
        out.append(FixedPointReport(cfg, enc, chain, _word(levels, enc, f.p), labels.get(cfg)))
    out.sort(key=lambda r: r.encoded)
    return out


def periodic_orbits(f: TransitionMap, min_length: int = 2) -> list[tuple[int, ...]]:
    """Cycles of ``f`` with at least ``min_length`` states, each rotated to start at its minimum."""
    img = f.images
    color = np.zeros(f.size, dtype=np.int8)  # 0 new, 1 on current path, 2 done
    cycles = []
    for start in range(f.size):
        if color[start]:
            continue
        path = []
        x = start
        while color[x] == 0:
            color[x] = 1
            path.append(x)
            x = int(img[x])
        if color[x] == 1:
            cyc = path[path.index(x):]
            if len(cyc) >= min_length:
                k = cyc.index(min(cyc))
                cycles.append(tuple(cyc[k:] + cyc[:k]))
        for y in path:
            color[y] = 2
    cycles.sort()
    return cycles
