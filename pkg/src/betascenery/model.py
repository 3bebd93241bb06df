"""Disintegration of a self-similar measure into a random model with strong
separation.

Starting from an IFS whose invariant measure mu may fail the open set
condition, group the words of a fixed length M: a separated pair (I, J) of
words with equal signed derivative and strictly disjoint hull images becomes
one two-map component, and every other word of length M becomes a singleton
component.  Because mu is also invariant for the length-M system,

    mu = q_0 * (ptilde_I (phi_I)* mu + ptilde_J (phi_J)* mu)
         + sum_W p_W (phi_W)* mu,

drawing an i.i.d. component sequence omega and forming the corresponding
random composition gives measures eta_omega with

    mu = E_omega[eta_omega],

and each eta_omega is dynamically self-similar: its level-k pieces are affine
copies of eta of the shifted sequence, with strong separation inside every
component.  All maps within one component share a single signed contraction
ratio, so the magnification clock of eta_omega ticks in steps determined by
omega alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebraics import (
    AlgebraicNumber,
    ExactScalar,
    FieldElement,
    IntPolynomial,
    NumberField,
    exact_float,
    exact_sign,
)
from .rng import UniformStream, cdf_thresholds
from .selfsimilar import (
    SeparatedPair,
    SimilarityIFS,
    SimilarityMap,
    canonical_scalar,
    find_separated_pair,
)


@dataclass(frozen=True)
class ModelComponent:
    """One symbol of the random model: maps applied together with inner
    weights, all sharing one signed contraction ratio."""
    maps: Tuple[SimilarityMap, ...]
    weights: Tuple[Fraction, ...]
    words: Tuple[Tuple[int, ...], ...]   # originating base-IFS words
    ratio: ExactScalar

    def __post_init__(self):
        for f in self.maps:
            if canonical_scalar(f.ratio) != self.ratio:
                raise ValueError("component maps must share one ratio")
        if len(self.maps) != len(self.weights) or \
                len(self.maps) != len(self.words):
            raise ValueError("maps, weights, words must align")
        if sum(self.weights) != 1:
            raise ValueError("inner weights must sum to 1")

    @property
    def size(self) -> int:
        return len(self.maps)

    @property
    def max_weight(self) -> Fraction:
        return max(self.weights)

    @property
    def reflects(self) -> bool:
        return exact_sign(self.ratio) < 0


class Model:
    """The random dynamically self-similar disintegration of an IFS measure.

    components[0] is always the separated pair; the rest are singletons for
    the remaining words of the pair's length, in lexicographic word order.
    selection[i] is the probability of drawing component i at each level.
    """

    def __init__(self, base: SimilarityIFS, pair: SeparatedPair,
                 components: Sequence[ModelComponent],
                 selection: Sequence[Fraction]):
        self.base = base
        self.pair = pair
        self.components = tuple(components)
        self.selection = tuple(Fraction(q) for q in selection)
        if len(self.selection) != len(self.components):
            raise ValueError("need one selection weight per component")
        if sum(self.selection) != 1:
            raise ValueError("selection weights must sum to 1")
        self.hull = base.attractor_hull()

    # -- structure ------------------------------------------------------------

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def gap(self) -> ExactScalar:
        """Exact distance between the two hull images of the pair component."""
        lo_j = self.pair.hull_j[0]
        hi_i = self.pair.hull_i[1]
        if exact_sign(lo_j - hi_i) > 0:
            return canonical_scalar(lo_j - hi_i)
        return canonical_scalar(self.pair.hull_i[0] - self.pair.hull_j[1])

    @property
    def has_reflection(self) -> bool:
        return any(c.reflects for c in self.components)

    def verify_ssc(self) -> bool:
        """Strict disjointness of hull images inside every component."""
        lo, hi = self.hull
        for comp in self.components:
            images = [f.image_interval(lo, hi) for f in comp.maps]
            for a in range(len(images)):
                for b in range(a + 1, len(images)):
                    if not (exact_sign(images[a][1] - images[b][0]) < 0 or
                            exact_sign(images[b][1] - images[a][0]) < 0):
                        return False
        return True

    def atom_mass_bound(self, omega: Sequence[int]) -> Fraction:
        """Upper bound for the largest atom of eta_omega after these levels:
        the product of each level's largest inner weight.  Singleton
        components contribute a factor of 1, so only pair levels shrink it."""
        bound = Fraction(1)
        for i in omega:
            bound *= self.components[i].max_weight
        return bound

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.base.maps == other.base.maps
                and self.base.weights == other.base.weights
                and self.pair.word_i == other.pair.word_i
                and self.pair.word_j == other.pair.word_j)

    def __repr__(self):
        sizes = "+".join(str(c.size) for c in self.components)
        return (f"Model({self.base.n} maps, pair length {self.pair.length}, "
                f"components {sizes})")

    # -- sampling -------------------------------------------------------------

    def omega_word(self, seed: int, *labels) -> "OmegaWord":
        return OmegaWord(self.selection, seed, *labels)

    def sample_omega(self, length: int, seed: int, *labels) -> np.ndarray:
        """I.i.d. component symbols from the selection weights."""
        return self.omega_word(seed, *labels).prefix(length)

    def sample_inner(self, omega: np.ndarray, seed: int,
                     *labels) -> np.ndarray:
        """One inner map index per level, drawn from that level's component
        weights."""
        stream = UniformStream(seed, "inner", *labels)
        u = stream.slice(0, len(omega))
        out = np.zeros(len(omega), dtype=np.int64)
        for i, comp in enumerate(self.components):
            mask = omega == i
            if comp.size == 1 or not mask.any():
                continue
            thr = cdf_thresholds(comp.weights)
            out[mask] = np.searchsorted(thr, u[mask], side="right")
        return out

    def point_of_path(self, omega: Sequence[int],
                      inner: Sequence[int]) -> ExactScalar:
        """Exact composition of the chosen maps applied to the hull midpoint."""
        lo, hi = self.hull
        x = (lo + hi) / 2
        for i, u in zip(reversed(list(omega)), reversed(list(inner))):
            f = self.components[i].maps[u]
            x = f.ratio * x + f.shift
        return canonical_scalar(x)

    def sampling_depth(self, bits: int = 60) -> int:
        import math
        worst = max(abs(exact_float(c.ratio)) for c in self.components)
        return max(1, math.ceil(bits / -math.log2(worst)))

    def sample_measure(self, count: int, seed: int, *labels,
                       depth: Optional[int] = None) -> np.ndarray:
        """`count` float draws from E_omega[eta_omega] = mu: every point gets
        an independent component path and inner path."""
        if depth is None:
            depth = self.sampling_depth()
        stream = UniformStream(seed, "model-measure", *labels)
        u = stream.slice(0, 2 * count * depth)
        u_omega = u[:count * depth].reshape(count, depth)
        u_inner = u[count * depth:].reshape(count, depth)
        omega = np.searchsorted(cdf_thresholds(self.selection), u_omega,
                                side="right")
        # per-component inner draw, then gather float coefficients
        r = np.empty_like(u_inner)
        t = np.empty_like(u_inner)
        for i, comp in enumerate(self.components):
            mask = omega == i
            if not mask.any():
                continue
            if comp.size == 1:
                inner = np.zeros(int(mask.sum()), dtype=np.int64)
            else:
                thr = cdf_thresholds(comp.weights)
                inner = np.searchsorted(thr, u_inner[mask], side="right")
            ri = np.array([exact_float(f.ratio) for f in comp.maps])
            ti = np.array([exact_float(f.shift) for f in comp.maps])
            r[mask] = ri[inner]
            t[mask] = ti[inner]
        lo, hi = self.hull
        x = np.full(count, (exact_float(lo) + exact_float(hi)) / 2)
        for k in range(depth - 1, -1, -1):
            x = r[:, k] * x + t[:, k]
        return x

    def sample_eta(self, omega: Sequence[int], count: int, seed: int,
                   *labels) -> np.ndarray:
        """`count` float draws from eta_omega for one fixed component path."""
        omega = np.asarray(omega, dtype=np.int64)
        depth = len(omega)
        prod = 1.0
        for i in omega:
            prod *= abs(exact_float(self.components[int(i)].ratio))
        if prod > 2.0 ** -50:
            raise ValueError(
                "component path too short for sampling; extend omega until "
                "its contraction product drops below 2^-50")
        stream = UniformStream(seed, "eta", *labels)
        u = stream.slice(0, count * depth).reshape(count, depth)
        lo, hi = self.hull
        x = np.full(count, (exact_float(lo) + exact_float(hi)) / 2)
        for k in range(depth - 1, -1, -1):
            comp = self.components[int(omega[k])]
            if comp.size == 1:
                rk = exact_float(comp.maps[0].ratio)
                tk = exact_float(comp.maps[0].shift)
                x = rk * x + tk
            else:
                inner = np.searchsorted(cdf_thresholds(comp.weights),
                                        u[:, k], side="right")
                rk = np.array([exact_float(f.ratio) for f in comp.maps])
                tk = np.array([exact_float(f.shift) for f in comp.maps])
                x = rk[inner] * x + tk[inner]
        return x

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> str:
        field = None
        for s in _model_scalars(self):
            if isinstance(s, FieldElement):
                gen = s.field.generator
                field = {"poly": str(s.field.poly),
                         "lo": str(gen.lo), "hi": str(gen.hi)}
                break
        doc = {
            "format": "dss-model-v1",
            "field": field,
            "maps": [{"ratio": _scalar_doc(f.ratio),
                      "shift": _scalar_doc(f.shift)}
                     for f in self.base.maps],
            "weights": [str(w) for w in self.base.weights],
            "pair": {"length": self.pair.length,
                     "word_i": list(self.pair.word_i),
                     "word_j": list(self.pair.word_j)},
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Model":
        doc = json.loads(text)
        if doc.get("format") != "dss-model-v1":
            raise ValueError("not a serialized model document")
        field = None
        if doc["field"] is not None:
            gen = AlgebraicNumber(IntPolynomial.parse(doc["field"]["poly"]),
                                  Fraction(doc["field"]["lo"]),
                                  Fraction(doc["field"]["hi"]))
            field = NumberField(gen)
        maps = [SimilarityMap(_scalar_load(m["ratio"], field),
                              _scalar_load(m["shift"], field))
                for m in doc["maps"]]
        weights = [Fraction(w) for w in doc["weights"]]
        base = SimilarityIFS(maps, weights)
        return build_model(base,
                           pair_words=(tuple(doc["pair"]["word_i"]),
                                       tuple(doc["pair"]["word_j"])))


def _model_scalars(model: Model):
    for f in model.base.maps:
        yield f.ratio
        yield f.shift


def _scalar_doc(s: ExactScalar):
    if isinstance(s, Fraction):
        return {"frac": str(s)}
    return {"vec": [str(c) for c in s.vec]}


def _scalar_load(doc, field: Optional[NumberField]):
    if "frac" in doc:
        return Fraction(doc["frac"])
    if field is None:
        raise ValueError("vector scalar without a field declaration")
    return field.element([Fraction(c) for c in doc["vec"]])


def build_model(base: SimilarityIFS, max_length: int = 8,
                pair_words: Optional[Tuple[Tuple[int, ...],
                                           Tuple[int, ...]]] = None) -> Model:
    """Construct the disintegration model for `base`.

    Finds the shortest separated pair (or revalidates the supplied words),
    then groups the length-M words: the pair becomes the two-map component 0
    and every other word a singleton, with selection weights q_0 = p_I + p_J
    and p_W respectively.
    """
    hull = base.attractor_hull()
    if pair_words is None:
        pair = find_separated_pair(base, max_length=max_length)
    else:
        word_i, word_j = pair_words
        fi, fj = base.word_map(word_i), base.word_map(word_j)
        ri, rj = canonical_scalar(fi.ratio), canonical_scalar(fj.ratio)
        if ri != rj:
            raise ValueError("supplied words have different derivatives")
        hi_, hj_ = fi.image_interval(*hull), fj.image_interval(*hull)
        if not (exact_sign(hi_[1] - hj_[0]) < 0 or
                exact_sign(hj_[1] - hi_[0]) < 0):
            raise ValueError("supplied words are not strictly separated")
        pair = SeparatedPair(len(word_i), tuple(word_i), tuple(word_j),
                             ri, hi_, hj_)

    m = pair.length
    w_i = base.word_weight(pair.word_i)
    w_j = base.word_weight(pair.word_j)
    q0 = w_i + w_j
    pair_comp = ModelComponent(
        maps=(base.word_map(pair.word_i), base.word_map(pair.word_j)),
        weights=(w_i / q0, w_j / q0),
        words=(pair.word_i, pair.word_j),
        ratio=pair.ratio)

    components: List[ModelComponent] = [pair_comp]
    selection: List[Fraction] = [q0]
    for word in base.words(m):
        if word in (pair.word_i, pair.word_j):
            continue
        f = base.word_map(word)
        components.append(ModelComponent(
            maps=(f,), weights=(Fraction(1),), words=(word,),
            ratio=canonical_scalar(f.ratio)))
        selection.append(base.word_weight(word))
    return Model(base, pair, components, selection)


class OmegaWord:
    """Lazily streamed i.i.d. component symbols.

    Symbols come from a counter-based uniform stream, so symbol(k) is
    computable in any order and shift(m) is a cheap view: the shifted word
    shares the stream and re-reads nothing.
    """

    __slots__ = ("_thresholds", "_stream", "seed")

    def __init__(self, selection, seed: int, *labels, _stream=None):
        self._thresholds = cdf_thresholds(selection)
        self._stream = _stream if _stream is not None \
            else UniformStream(seed, "omega", *labels)
        self.seed = seed

    def symbol(self, k: int) -> int:
        u = self._stream[k]
        return int(np.searchsorted(self._thresholds, u, side="right"))

    def prefix(self, n: int) -> np.ndarray:
        u = self._stream.slice(0, n)
        return np.searchsorted(self._thresholds, u, side="right") \
            .astype(np.int64)

    def shift(self, m: int) -> "OmegaWord":
        out = OmegaWord.__new__(OmegaWord)
        out._thresholds = self._thresholds
        out._stream = self._stream.shift(m)
        out.seed = self.seed
        return out

    def __getitem__(self, k: int) -> int:
        return self.symbol(k)


@dataclass(frozen=True)
class CodedPoint:
    """Truncated coding-map value for one (component, inner) digit path:
    the exact partial sum of shifted translations, carried as an enclosure,
    plus the geometric tail bound (product of |ratios|) * diam(hull)."""
    omega_prefix: Tuple[int, ...]
    digits: Tuple[int, ...]
    value: "BigReal"
    tail_bound: float


def verify_ssc(model: Model):
    """Minimum exact gap between hull images inside any multi-map component.

    Singleton components are vacuously separated and excluded from the
    minimum; a model with only singletons returns float('inf').  A
    nonpositive gap raises, naming the offending component.
    """
    import functools
    lo, hi = model.hull
    best = None
    for idx, comp in enumerate(model.components):
        if comp.size == 1:
            continue
        images = [f.image_interval(lo, hi) for f in comp.maps]
        order = sorted(range(len(images)), key=functools.cmp_to_key(
            lambda s, t: exact_sign(images[s][0] - images[t][0])))
        for a, b in zip(order, order[1:]):
            gap = canonical_scalar(images[b][0] - images[a][1])
            if exact_sign(gap) <= 0:
                raise ValueError(
                    f"SSC violated: component {idx} hull images overlap "
                    f"(gap {exact_float(gap):.6g})")
            if best is None or exact_sign(gap - best) < 0:
                best = gap
    return float("inf") if best is None else best


def sample_eta(model: Model, omega, count: int, depth: int,
               seed: int, *labels) -> np.ndarray:
    """Bulk float draws from eta_omega, truncated at `depth` levels."""
    if isinstance(omega, OmegaWord):
        omega = omega.prefix(depth)
    omega = np.asarray(omega, dtype=np.int64)
    if len(omega) < depth:
        raise ValueError("omega prefix shorter than the requested depth")
    return model.sample_eta(omega[:depth], count, seed, *labels)


def sample_eta_coded(model: Model, omega, count: int, depth: int,
                     seed: int, *labels, bits: int = 128):
    """`count` CodedPoints for one component path: exact digit draws, the
    exact truncated coding sum as an enclosure, and the tail bound."""
    from .algebraics import BigReal, exact_enclosure

    if isinstance(omega, OmegaWord):
        omega = omega.prefix(depth)
    omega = np.asarray(omega, dtype=np.int64)
    if len(omega) < depth:
        raise ValueError("omega prefix shorter than the requested depth")
    omega = omega[:depth]
    prefix = tuple(int(i) for i in omega)

    stream = UniformStream(seed, "eta-coded", *labels)
    u = stream.slice(0, count * depth).reshape(count, depth)
    inner = np.zeros((count, depth), dtype=np.int64)
    for k in range(depth):
        comp = model.components[int(omega[k])]
        if comp.size > 1:
            thr = cdf_thresholds(comp.weights)
            inner[:, k] = np.searchsorted(thr, u[:, k], side="right")

    lo, hi = model.hull
    diam = exact_float(hi - lo)
    tail = 1.0
    for i in omega:
        tail *= abs(exact_float(model.components[int(i)].ratio))
    tail *= diam

    out = []
    for row in range(count):
        x = canonical_scalar(lo * 0)  # exact zero of the right flavor
        for k in range(depth - 1, -1, -1):
            f = model.components[int(omega[k])].maps[int(inner[row, k])]
            x = f.ratio * x + f.shift
        enc_lo, enc_hi = exact_enclosure(canonical_scalar(x), bits)
        out.append(CodedPoint(prefix, tuple(int(d) for d in inner[row]),
                              BigReal.from_interval(enc_lo, enc_hi, bits),
                              tail))
    return out


def sample_disintegration(model: Model, count: int, seed: int, *labels,
                          depth: Optional[int] = None) -> np.ndarray:
    """Joint (omega, digits) sampling: the output distribution is the
    original self-similar measure, up to the truncation bound."""
    return model.sample_measure(count, seed, *labels, depth=depth)


def atom_mass_bound(model: Model, omega_prefix) -> Fraction:
    return model.atom_mass_bound(omega_prefix)
