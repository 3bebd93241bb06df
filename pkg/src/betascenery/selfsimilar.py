"""Similarity maps and iterated function systems on the real line.

A similarity map is x -> r*x + t with r nonzero; an IFS is a finite list of
strict contractions (|r_i| < 1) with positive rational weights summing to 1.
The invariant measure mu = sum_i p_i * (f_i)_* mu is the distribution of the
random series obtained by composing maps drawn i.i.d. from the weights.

Scalars are exact throughout: Fractions, or elements of a single real
algebraic number field (all non-rational scalars must live in one field).
Floating point enters only in bulk sampling, where it belongs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .algebraics import ExactScalar, FieldElement, exact_float, exact_sign
from .rng import UniformStream, cdf_thresholds


def canonical_scalar(x: ExactScalar) -> ExactScalar:
    """Fold rational-valued field elements down to plain Fractions so that
    equal scalars compare and hash equal regardless of representation."""
    if isinstance(x, FieldElement):
        r = x.to_rational()
        if r is not None:
            return r
    return x


def _as_scalar(x) -> ExactScalar:
    if isinstance(x, FieldElement):
        return canonical_scalar(x)
    return Fraction(x)


class SimilarityMap:
    """The affine map x -> ratio * x + shift with exact coefficients."""

    __slots__ = ("ratio", "shift")

    def __init__(self, ratio, shift):
        ratio = _as_scalar(ratio)
        shift = _as_scalar(shift)
        if exact_sign(ratio) == 0:
            raise ValueError("similarity ratio must be nonzero")
        self.ratio = ratio
        self.shift = shift

    def __call__(self, x):
        return self.ratio * x + self.shift

    def compose(self, other: "SimilarityMap") -> "SimilarityMap":
        """self after other: x -> self(other(x))."""
        return SimilarityMap(self.ratio * other.ratio,
                             self.ratio * other.shift + self.shift)

    def image_interval(self, lo, hi) -> Tuple[ExactScalar, ExactScalar]:
        a, b = self(lo), self(hi)
        return (a, b) if exact_sign(self.ratio) > 0 else (b, a)

    def fixed_point(self) -> ExactScalar:
        return self.shift / (1 - self.ratio)

    def inverse(self) -> "SimilarityMap":
        r = 1 / self.ratio if isinstance(self.ratio, FieldElement) \
            else Fraction(1) / self.ratio
        return SimilarityMap(r, -r * self.shift)

    def float_pair(self) -> Tuple[float, float]:
        return exact_float(self.ratio), exact_float(self.shift)

    def __eq__(self, other):
        if not isinstance(other, SimilarityMap):
            return NotImplemented
        return self.ratio == other.ratio and self.shift == other.shift

    def __hash__(self):
        return hash((self.ratio, self.shift))

    def __repr__(self):
        r, t = self.float_pair()
        return f"SimilarityMap({r:.6g}*x + {t:.6g})"


def _check_one_field(scalars) -> None:
    field = None
    for s in scalars:
        if isinstance(s, FieldElement):
            if field is None:
                field = s.field
            elif field is not s.field and not field.same_field(s.field):
                raise ValueError(
                    "IFS scalars mix two distinct algebraic fields; express "
                    "all of them in a single field")


class SimilarityIFS:
    """A finite contracting IFS with rational weights.

    maps    -- tuple of SimilarityMap, each with |ratio| < 1
    weights -- tuple of positive Fractions summing to 1
    """

    def __init__(self, maps: Sequence[SimilarityMap], weights=None):
        maps = tuple(maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        for f in maps:
            if exact_sign(abs(f.ratio) - 1) >= 0:
                raise ValueError(f"{f} is not a strict contraction")
        _check_one_field([f.ratio for f in maps] + [f.shift for f in maps])
        if weights is None:
            weights = [Fraction(1, len(maps))] * len(maps)
        weights = tuple(Fraction(w) for w in weights)
        if len(weights) != len(maps):
            raise ValueError("need one weight per map")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        if sum(weights) != 1:
            raise ValueError(f"weights sum to {sum(weights)}, expected 1")
        self.maps = maps
        self.weights = weights
        self._hull: Optional[Tuple[ExactScalar, ExactScalar]] = None

    @property
    def n(self) -> int:
        return len(self.maps)

    def has_infinite_attractor(self) -> bool:
        """True when two maps have distinct fixed points.  A one-map system
        (or several copies of the same map) contracts to a single point."""
        first = self.maps[0].fixed_point()
        return any(exact_sign(f.fixed_point() - first) != 0
                   for f in self.maps[1:])

    def __repr__(self):
        inner = ", ".join(repr(f) for f in self.maps)
        return f"SimilarityIFS([{inner}])"

    # -- words --------------------------------------------------------------

    def word_map(self, word: Sequence[int]) -> SimilarityMap:
        """f_{w_1} after f_{w_2} after ... after f_{w_k}."""
        if not word:
            return SimilarityMap(Fraction(1), Fraction(0))
        f = self.maps[word[0]]
        for i in word[1:]:
            f = f.compose(self.maps[i])
        return f

    def word_weight(self, word: Sequence[int]) -> Fraction:
        w = Fraction(1)
        for i in word:
            w *= self.weights[i]
        return w

    def words(self, length: int) -> Iterator[Tuple[int, ...]]:
        return itertools.product(range(self.n), repeat=length)

    # -- attractor hull -------------------------------------------------------

    def attractor_hull(self) -> Tuple[ExactScalar, ExactScalar]:
        """Exact convex hull [L, H] of the attractor.

        [L, H] is the unique fixed interval of the hull map
            L = min_i min f_i([L, H]),   H = max_i max f_i([L, H]).
        Floating point suggests which map attains each extreme; the 2x2
        linear system for that pattern is solved exactly and the candidate
        verified against every map.  If the suggestion fails (extremes too
        close to call in floats), all patterns are tried; the true hull
        always corresponds to one of them.
        """
        if self._hull is not None:
            return self._hull

        pairs = [f.float_pair() for f in self.maps]
        lo = min(t / (1 - r) for r, t in pairs)
        hi = max(t / (1 - r) for r, t in pairs)
        for _ in range(200):
            lo2 = min(min(r * lo + t, r * hi + t) for r, t in pairs)
            hi2 = max(max(r * lo + t, r * hi + t) for r, t in pairs)
            if (lo2, hi2) == (lo, hi):
                break
            lo, hi = lo2, hi2

        i_min = min(range(self.n),
                    key=lambda i: min(pairs[i][0] * lo + pairs[i][1],
                                      pairs[i][0] * hi + pairs[i][1]))
        i_max = max(range(self.n),
                    key=lambda i: max(pairs[i][0] * lo + pairs[i][1],
                                      pairs[i][0] * hi + pairs[i][1]))

        candidates = [(i_min, i_max)]
        candidates += [(i, j) for i in range(self.n) for j in range(self.n)
                       if (i, j) != (i_min, i_max)]
        for i, j in candidates:
            hull = self._solve_hull_pattern(i, j)
            if hull is not None:
                self._hull = hull
                return hull
        raise ArithmeticError("attractor hull fixed point not found")

    def _solve_hull_pattern(self, i: int, j: int):
        """Solve L = min f_i([L,H]), H = max f_j([L,H]) exactly and verify."""
        ri, ti = self.maps[i].ratio, self.maps[i].shift
        rj, tj = self.maps[j].ratio, self.maps[j].shift
        # row (a, b, c) encodes the equation  x = a*L + b*H + c
        if exact_sign(ri) > 0:
            a1, b1 = ri, 0 * ri
        else:
            a1, b1 = 0 * ri, ri
        if exact_sign(rj) > 0:
            a2, b2 = 0 * rj, rj
        else:
            a2, b2 = rj, 0 * rj
        det = (1 - a1) * (1 - b2) - b1 * a2
        if exact_sign(det) == 0:
            return None
        L = (ti * (1 - b2) + b1 * tj) / det
        H = ((1 - a1) * tj + a2 * ti) / det
        L, H = canonical_scalar(L), canonical_scalar(H)
        if exact_sign(H - L) < 0:
            return None
        # verify the fixed-interval property against every map
        images = [f.image_interval(L, H) for f in self.maps]
        true_lo = images[0][0]
        true_hi = images[0][1]
        for a, b in images[1:]:
            if exact_sign(a - true_lo) < 0:
                true_lo = a
            if exact_sign(b - true_hi) > 0:
                true_hi = b
        if exact_sign(true_lo - L) == 0 and exact_sign(true_hi - H) == 0:
            return (L, H)
        return None

    # -- sampling -------------------------------------------------------------

    def sampling_depth(self, bits: int = 60) -> int:
        """Word length making the truncation error below 2^-bits of hull."""
        worst = max(abs(exact_float(f.ratio)) for f in self.maps)
        return max(1, math.ceil(bits / -math.log2(worst)))

    def sample(self, count: int, seed: int, *labels,
               depth: Optional[int] = None) -> np.ndarray:
        """`count` i.i.d. draws from the invariant measure as float64.

        Deterministic given (seed, labels): symbols come from the counter
        based stream, and each point is the word map applied to the hull
        midpoint, evaluated innermost first.
        """
        if depth is None:
            depth = self.sampling_depth()
        syms = self.sample_words(count, depth, seed, *labels)
        r = np.array([exact_float(f.ratio) for f in self.maps])
        t = np.array([exact_float(f.shift) for f in self.maps])
        lo, hi = self.attractor_hull()
        x = np.full(count, (exact_float(lo) + exact_float(hi)) / 2)
        for k in range(depth - 1, -1, -1):
            rk = r[syms[:, k]]
            tk = t[syms[:, k]]
            x = rk * x + tk
        return x

    def sample_words(self, count: int, depth: int, seed: int,
                     *labels) -> np.ndarray:
        """(count, depth) array of symbol draws from the weights."""
        stream = UniformStream(seed, "ifs-words", *labels)
        u = stream.slice(0, count * depth).reshape(count, depth)
        thresholds = cdf_thresholds(self.weights)
        return np.searchsorted(thresholds, u, side="right").astype(np.int64)

    def point_of_word(self, word: Sequence[int]) -> ExactScalar:
        """Exact evaluation of the word map at the hull midpoint."""
        lo, hi = self.attractor_hull()
        x = (lo + hi) / 2
        for i in reversed(word):
            f = self.maps[i]
            x = f.ratio * x + f.shift
        return canonical_scalar(x)


def attractor_hull(ifs: SimilarityIFS) -> Tuple[ExactScalar, ExactScalar]:
    return ifs.attractor_hull()


def sample_measure(ifs: SimilarityIFS, count: int, depth: Optional[int] = None,
                   seed: int = 0, *labels) -> np.ndarray:
    """`count` draws from the invariant measure; each point sits within
    diam(hull) * (max |ratio|)^depth of an exactly distributed one."""
    return ifs.sample(count, seed, *labels, depth=depth)


def iterate_ifs(ifs: SimilarityIFS, length: int,
                size_cap: int = 20000) -> SimilarityIFS:
    """The length-fold composition system: one map per word, in lexicographic
    word order, with product weights.  Its invariant measure is the same."""
    if length < 1:
        raise ValueError("composition length must be >= 1")
    total = ifs.n ** length
    if total > size_cap:
        raise ValueError(
            f"composing to length {length} needs {total} maps; raise "
            f"size_cap (currently {size_cap}) to allow it")
    maps = []
    weights = []
    for word in ifs.words(length):
        maps.append(ifs.word_map(word))
        weights.append(ifs.word_weight(word))
    return SimilarityIFS(maps, weights)


@dataclass(frozen=True)
class SeparatedPair:
    """Two equal-length words with the same exact derivative whose images of
    the attractor hull are strictly disjoint (a shared endpoint does not
    count).  I is lexicographically before J."""
    length: int
    word_i: Tuple[int, ...]
    word_j: Tuple[int, ...]
    ratio: ExactScalar
    hull_i: Tuple[ExactScalar, ExactScalar]
    hull_j: Tuple[ExactScalar, ExactScalar]


def find_separated_pair(ifs: SimilarityIFS, max_length: int = 8,
                        max_words_per_level: int = 20000) -> SeparatedPair:
    """Shortest (then lexicographically least) separated pair of words.

    Scans word lengths 1, 2, ... and within each length examines pairs
    (I, J) in lexicographic order on the pair, keeping only those whose
    composed maps have the same exact signed derivative and strictly
    disjoint hull images.  Raises ValueError when the search space is
    exhausted without a hit.
    """
    if not ifs.has_infinite_attractor():
        raise ValueError("the attractor is finite (all maps share one fixed "
                         "point); no separated pair can exist")
    hull = ifs.attractor_hull()
    for m in range(1, max_length + 1):
        if ifs.n ** m > max_words_per_level:
            raise ValueError(
                f"no separated pair found within the word budget "
                f"({max_words_per_level} words per level, level {m} needs "
                f"{ifs.n ** m})")
        entries: List[Tuple[Tuple[int, ...], ExactScalar,
                            Tuple[ExactScalar, ExactScalar]]] = []
        for word in ifs.words(m):
            f = ifs.word_map(word)
            entries.append((word, canonical_scalar(f.ratio),
                            f.image_interval(*hull)))
        for a in range(len(entries)):
            word_i, ratio_i, hull_i = entries[a]
            for b in range(a + 1, len(entries)):
                word_j, ratio_j, hull_j = entries[b]
                if ratio_i != ratio_j:
                    continue
                # strict disjointness, either side
                if exact_sign(hull_i[1] - hull_j[0]) < 0 or \
                        exact_sign(hull_j[1] - hull_i[0]) < 0:
                    return SeparatedPair(m, word_i, word_j, ratio_i,
                                         hull_i, hull_j)
    raise ValueError(
        f"no separated pair of words up to length {max_length}; the IFS may "
        "have too much overlap or too little contrast")
