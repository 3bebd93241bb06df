"""Magnification dynamics: orbit replay under the zoom flow and sampling
from the stationary suspension distribution.

The zoom flow acts on (sequence, focus, orientation) triples.  Rather than
magnifying a fixed sample cloud (whose resolution dies exponentially in t),
the orbit replays the shift identity: once the accumulated time passes
-log|ratio| of the leading component, the window of the magnified measure
equals the window of the shifted state, reflected when the leading ratio is
negative.  Each emitted window therefore zooms by at most one roof's worth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..algebraics import exact_float, exact_sign
from ..model import Model, OmegaWord, build_model, verify_ssc
from ..rng import UniformStream, cdf_thresholds
from ..selfsimilar import SimilarityIFS, SimilarityMap
from .chain import ExtendedChain
from .windows import (DEFAULT_BINS_HALF, MASS_CUTOFF, PANEL_VERSION,
                      WindowMeasure, as_word, evaluate_panel, panel_average,
                      panel_names, window_of_state)


def rescale_model_for_gap(model: Model, margin: Fraction = Fraction(1, 2)):
    """Scale every translation by a common exact factor c so the separation
    gap inside each component exceeds 2 (window diameter).  Returns the new
    model and c; c = 1 when the gap is already wide enough.

    The factor maps coordinates of results back: x_new = c * x_old.
    """
    g = verify_ssc(model)
    target = 2 + Fraction(margin)
    if g == float("inf") or exact_sign(g - target) >= 0:
        return model, Fraction(1)
    c = target / g
    base = SimilarityIFS(
        [SimilarityMap(f.ratio, f.shift * c) for f in model.base.maps],
        model.base.weights)
    scaled = build_model(base, pair_words=(model.pair.word_i,
                                           model.pair.word_j))
    return scaled, c


class InnerWord:
    """Lazy inner-map choices: position k draws from the weights of the
    component that omega selects at k.  Deterministic in (seed, labels)."""

    __slots__ = ("_model", "_omega", "_stream", "_thresholds")

    def __init__(self, model: Model, omega, seed: Optional[int] = None,
                 *labels, _stream=None):
        self._model = model
        self._omega = as_word(omega)
        if _stream is not None:
            self._stream = _stream
        else:
            if seed is None:
                raise ValueError("need a seed (or an existing stream)")
            self._stream = UniformStream(seed, "inner", *labels)
        self._thresholds = [cdf_thresholds(c.weights)
                            for c in model.components]

    def symbol(self, k: int) -> int:
        th = self._thresholds[self._omega.symbol(k)]
        return int(np.searchsorted(th, self._stream[k], side="right"))

    def prefix(self, n: int) -> np.ndarray:
        return np.array([self.symbol(k) for k in range(n)], dtype=np.int64)

    def shift(self, m: int) -> "InnerWord":
        out = object.__new__(InnerWord)
        out._model = self._model
        out._omega = self._omega.shift(m)
        out._stream = self._stream.shift(m)
        out._thresholds = self._thresholds
        return out


class PrefixedWord:
    """A word with finitely many fixed leading symbols before a lazy tail."""

    __slots__ = ("head", "tail")

    def __init__(self, head: Sequence[int], tail):
        self.head = tuple(int(s) for s in head)
        self.tail = tail

    def symbol(self, k: int) -> int:
        if k < len(self.head):
            return self.head[k]
        return self.tail.symbol(k - len(self.head))

    def shift(self, m: int):
        if m < len(self.head):
            return PrefixedWord(self.head[m:], self.tail)
        return self.tail.shift(m - len(self.head))


@dataclass
class SceneryOrbit:
    """Windows of one zoom trajectory, sampled on a uniform time grid."""
    start: tuple                      # (omega prefix, inner prefix, a)
    times: np.ndarray
    windows: List[WindowMeasure]
    gap_rescale: float
    bins_half: int

    def __len__(self):
        return len(self.windows)


def _component_roofs(model: Model) -> np.ndarray:
    return np.array([-math.log(abs(exact_float(c.ratio)))
                     for c in model.components])


def _require_separated(model: Model) -> None:
    g = verify_ssc(model)
    if g != float("inf") and exact_sign(g - 2) <= 0:
        raise ValueError(
            "model gap must exceed the window diameter 2; apply "
            "rescale_model_for_gap first")


def scenery_orbit(model: Model, omega=None, inner=None, a: int = 0,
                  T: float = 50.0, dt: float = 0.25,
                  n_samples: int = 500_000, seed: int = 0,
                  bins_half: int = DEFAULT_BINS_HALF,
                  gap_rescale: float = 1.0,
                  window_radius: float = 1.0) -> SceneryOrbit:
    """Replay the zoom flow from (omega, inner, a) for time T, emitting the
    window at each multiple of dt.

    omega and inner default to fresh seeded lazy words; explicit sequences
    are accepted and must be long enough to cover T.  n_samples caps the
    cylinder-descent work per window (a resolution budget, not a sampling
    count).
    """
    _require_separated(model)
    if omega is None:
        omega = model.omega_word(seed, "orbit-omega")
    omega = as_word(omega)
    if inner is None:
        inner = InnerWord(model, omega, seed, "orbit-inner")
    else:
        inner = as_word(inner)
    roofs = _component_roofs(model)
    signs = [exact_sign(c.ratio) for c in model.components]

    times = np.arange(0.0, T + 1e-12, dt)
    windows: List[WindowMeasure] = []
    shift_count = 0
    tau = 0.0
    a_cur = int(a) & 1
    for t in times:
        while t - tau >= roofs[omega.symbol(shift_count)] - 1e-12:
            c = omega.symbol(shift_count)
            tau += roofs[c]
            if signs[c] < 0:
                a_cur ^= 1
            shift_count += 1
        windows.append(window_of_state(
            model, omega.shift(shift_count), inner.shift(shift_count),
            a_cur, t - tau, bins_half=bins_half, node_budget=n_samples,
            window_radius=window_radius))
    start = (tuple(omega.symbol(k) for k in range(16)),
             tuple(inner.symbol(k) for k in range(16)), int(a) & 1)
    return SceneryOrbit(start, times, windows, float(gap_rescale), bins_half)


@dataclass
class QSamples:
    """Draws from the stationary suspension law: per draw the chain state,
    the elapsed time within its roof, and (optionally) the window."""
    windows: List[WindowMeasure]
    state_indices: np.ndarray
    times: np.ndarray
    chain: ExtendedChain

    def __len__(self):
        return len(self.windows) if self.windows else self.state_indices.size

    def __iter__(self):
        return iter(self.windows)


def sample_Q(model: Model, chain: ExtendedChain, n: int, seed: int,
             bins_half: int = DEFAULT_BINS_HALF,
             with_windows: bool = True,
             n_samples: int = 500_000,
             window_radius: float = 1.0) -> QSamples:
    """n independent draws from the stationary law of the zoom flow.

    The chain state is drawn from the roof-length-biased stationary vector
    (time spent in a state is proportional to its roof), the in-state time
    uniformly over [0, roof); the sequence continues i.i.d. beyond the
    state.  Set with_windows=False to get only the (state, time) marginals.
    """
    if with_windows:
        _require_separated(model)
    biased = chain.length_biased_weights()
    thresholds = np.cumsum(biased)[:-1]
    u_state = UniformStream(seed, "Q-state").slice(0, n)
    u_time = UniformStream(seed, "Q-time").slice(0, n)
    idx = np.searchsorted(thresholds, u_state, side="right")
    roofs = np.array(chain.roofs)
    ts = u_time * roofs[idx]

    windows: List[WindowMeasure] = []
    if with_windows:
        for j in range(n):
            state = chain.states[idx[j]]
            i0, u0 = state[0], state[1]
            a0 = state[2] if chain.has_orientation else 0
            tail_omega = model.omega_word(seed, "Q-omega", j)
            omega = PrefixedWord((i0,), tail_omega)
            tail_inner = InnerWord(model, omega.shift(1), seed, "Q-inner", j)
            inner = PrefixedWord((u0,), tail_inner)
            windows.append(window_of_state(
                model, omega, inner, a0, float(ts[j]),
                bins_half=bins_half, node_budget=n_samples,
                window_radius=window_radius))
    return QSamples(windows, idx, ts, chain)


@dataclass
class ComparisonReport:
    """Per-functional distance between an orbit's time average and the
    stationary-sample average, over the fixed panel."""
    panel_version: str
    names: List[str]
    orbit_average: np.ndarray
    q_average: np.ndarray
    distances: np.ndarray
    max_distance: float
    n_orbit: int
    n_q: int

    def to_dict(self) -> dict:
        return {
            "panel_version": self.panel_version,
            "max_distance": self.max_distance,
            "n_orbit_windows": self.n_orbit,
            "n_q_samples": self.n_q,
            "functionals": [
                {"name": nm, "orbit": float(o), "q": float(q),
                 "distance": float(d)}
                for nm, o, q, d in zip(self.names, self.orbit_average,
                                       self.q_average, self.distances)],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=2, **kw)


def compare_scenery_to_Q(orbit: SceneryOrbit,
                         q_samples: Union[QSamples, Sequence[WindowMeasure]]
                         ) -> ComparisonReport:
    """Max over the fp-v1 panel of |orbit time average - Q sample mean|."""
    q_windows = list(q_samples.windows) if isinstance(q_samples, QSamples) \
        else list(q_samples)
    if not q_windows:
        raise ValueError("no stationary-sample windows to compare against")
    if q_windows[0].bins.size != orbit.windows[0].bins.size:
        raise ValueError("orbit and stationary samples use different "
                         "binnings; rebuild with matching bins_half")
    o_avg = panel_average(orbit.windows)
    q_avg = panel_average(q_windows)
    dist = np.abs(o_avg - q_avg)
    return ComparisonReport(PANEL_VERSION, panel_names(), o_avg, q_avg,
                            dist, float(dist.max()), len(orbit.windows),
                            len(q_windows))
