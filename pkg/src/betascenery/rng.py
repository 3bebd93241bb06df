"""Deterministic, counter-based randomness.

Every random quantity in this package is drawn from a Philox stream keyed by
(master seed, string labels).  Philox is counter-based: the draw at absolute
index i is a pure function of (key, i), so infinite sequences can be
materialized lazily, accessed at random offsets, and *shifted* by adjusting an
index offset instead of reseeding.  That last property is what the dynamics
code relies on: shifting a symbolic sequence must yield literally the same
tail, not an equidistributed imitation.

Reproducibility contract: for a fixed master seed and label path, draws are
bit-identical across runs, platforms, and thread counts.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.random import Generator, Philox

_BLOCK = 1024


def derive_key(seed: int, *labels: object) -> int:
    """Derive a 128-bit Philox key from a master seed and a label path.

    Labels are hashed through blake2b on a canonical string encoding, so any
    mix of ints and strings is fine.  Distinct label paths give independent
    streams; the same path always gives the same key.
    """
    h = hashlib.blake2b(digest_size=16)
    h.update(repr(int(seed)).encode())
    for lab in labels:
        h.update(b"/")
        h.update(repr(lab).encode())
    return int.from_bytes(h.digest(), "big")


def generator(seed: int, *labels: object) -> Generator:
    """A fresh numpy Generator on the stream named by (seed, labels)."""
    return Generator(Philox(key=derive_key(seed, *labels)))


class UniformStream:
    """Lazily materialized sequence of i.i.d. uniforms with random access.

    ``stream[i]`` is a float in [0, 1) depending only on (seed, labels, i).
    Blocks of 1024 draws are generated on demand from Philox with the block
    index placed in the counter, and cached.  ``shift(m)`` returns a view of
    the same underlying sequence starting at index m; views share the cache.
    """

    __slots__ = ("_key", "_offset", "_blocks")

    def __init__(self, seed: int, *labels: object, _key: int | None = None,
                 _offset: int = 0, _blocks: dict | None = None):
        self._key = derive_key(seed, *labels) if _key is None else _key
        self._offset = _offset
        self._blocks = {} if _blocks is None else _blocks

    def _block(self, b: int) -> np.ndarray:
        blk = self._blocks.get(b)
        if blk is None:
            gen = Generator(Philox(key=self._key, counter=b << 64))
            blk = gen.random(_BLOCK)
            self._blocks[b] = blk
        return blk

    def __getitem__(self, i: int) -> float:
        if i < 0:
            raise IndexError("stream index must be nonnegative")
        j = i + self._offset
        return float(self._block(j // _BLOCK)[j % _BLOCK])

    def slice(self, start: int, count: int) -> np.ndarray:
        """Uniforms at indices start .. start+count-1 as an array."""
        j0 = start + self._offset
        out = np.empty(count)
        filled = 0
        while filled < count:
            b, r = divmod(j0 + filled, _BLOCK)
            take = min(_BLOCK - r, count - filled)
            out[filled:filled + take] = self._block(b)[r:r + take]
            filled += take
        return out

    def shift(self, m: int) -> "UniformStream":
        if m < 0:
            raise ValueError("cannot shift before the start of the stream")
        return UniformStream(0, _key=self._key, _offset=self._offset + m,
                             _blocks=self._blocks)

    @property
    def offset(self) -> int:
        return self._offset


def cdf_thresholds(weights: Sequence[Fraction]) -> np.ndarray:
    """Cumulative thresholds for inverse-CDF symbol draws.

    Exact rational weights are accumulated exactly, then converted to floats
    once; the tiny conversion bias is irrelevant for sampling but the
    accumulation order is fixed so draws are deterministic.
    """
    acc = Fraction(0)
    out = []
    for w in weights:
        acc += Fraction(w)
        out.append(float(acc))
    out[-1] = 1.0 + 1e-9  # guard: a uniform draw can never fall past the end
    return np.asarray(out)


def draw_symbol(thresholds: np.ndarray, u: float) -> int:
    """Index of the first threshold exceeding u."""
    return int(np.searchsorted(thresholds, u, side="right"))
