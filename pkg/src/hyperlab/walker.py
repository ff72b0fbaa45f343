"""Random walks driven by finitely supported measures, and their statistics.

Randomness comes from numpy's counter-based Philox4x64 bit generator.  Every
trial gets its own stream keyed by ``SeedSequence([seed, trial, lane])``, so
results do not depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, partial
from typing import Callable, Sequence

import numpy as np

from .geometry import PLANE_BASEPOINT, common_prefix, dist, gromov_product, orbit_point
from .models import (
    ActionModel,
    Asymmetry,
    ExtElement,
    FreeWord,
    GroupElement,
    HalfPlane,
    Mat,
    SplitExtension,
    classify_asymmetry,
    is_hyperbolic,
)
from .words import Word

WEIGHT_TOL = 1e-12


def trial_rng(seed: int, trial: int = 0, lane: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, trial, lane)``."""
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, trial, lane])
    return np.random.Generator(np.random.Philox(ss))


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("LAB_THREADS")
    n = requested if requested is not None else (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, n)


def map_trials(fn: Callable[[int], object], trials: int, workers: int | None = None) -> list:
    """``[fn(0), ..., fn(trials - 1)]``, possibly computed in worker processes."""
    workers = worker_count(workers)
    if workers == 1 or trials < 2:
        return [fn(t) for t in range(trials)]
    chunk = max(1, trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(trials), chunksize=chunk))


# ------------------------------------------------------------------ measures


@dataclass(frozen=True)
class AdmissibilityAudit:
    non_elementary: bool
    weakly_asymmetric: bool | None
    witnesses: tuple = ()

    @property
    def admissible(self) -> bool | None:
        if not self.non_elementary:
            return False
        return self.weakly_asymmetric

    def summary(self) -> str:
        return (f"non_elementary={self.non_elementary} weakly_asymmetric={self.weakly_asymmetric} "
                f"admissible={self.admissible}")


@dataclass(frozen=True)
class ProbabilityMeasure:
    model: ActionModel
    support: tuple

    def __post_init__(self):
        sup = tuple((g, float(w)) for g, w in self.support)
        if not sup:
            raise ValueError("measure support is empty")
        for g, w in sup:
            if not w > 0:
                raise ValueError(f"weight {w} is not positive")
            if not self.model.owns(g):
                raise ValueError(f"{g} does not belong to {self.model.spec()}")
        total = math.fsum(w for _, w in sup)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "support", sup)

    @classmethod
    def uniform(cls, model: ActionModel, elements: Sequence[GroupElement] | None = None,
                symmetric: bool = True) -> "ProbabilityMeasure":
        """Uniform on ``elements`` (default: the model's generators), closed
        under inverses when ``symmetric``."""
        elems = list(model.generators() if elements is None else elements)
        if symmetric:
            for g in list(elems):
                if g.inverse() not in elems:
                    elems.append(g.inverse())
        w = 1.0 / len(elems)
        return cls(model, tuple((g, w) for g in elems))

    @classmethod
    def point_mass(cls, model: ActionModel, g: GroupElement) -> "ProbabilityMeasure":
        return cls(model, ((g, 1.0),))

    @property
    def elements(self) -> list:
        return [g for g, _ in self.support]

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.support])

    def reflected(self) -> "ProbabilityMeasure":
        return ProbabilityMeasure(self.model, tuple((g.inverse(), w) for g, w in self.support))

    def __contains__(self, g) -> bool:
        return any(g == h for h, _ in self.support)

    def audit(self) -> AdmissibilityAudit:
        """Heuristic admissibility check over support words of length <= 2."""
        elems = self.elements
        cands = list(dict.fromkeys(elems + [g * h for g in elems for h in elems]))
        hyp = [g for g in cands if is_hyperbolic(g)]
        pair = None
        for i, g in enumerate(hyp):
            for h in hyp[i + 1:]:
                if not _commute(g, h):
                    pair = (g, h)
                    break
            if pair:
                break
        weak = None
        if not isinstance(self.model, HalfPlane):
            weak = any(classify_asymmetry(g) is not Asymmetry.NOT_WEAK for g in hyp)
        wit = tuple(str(g) for g in pair) if pair else ()
        return AdmissibilityAudit(pair is not None, weak, wit)

    def spec(self) -> str:
        return ";".join(f"{g}:{w!r}" for g, w in self.support)


def _commute(g, h) -> bool:
    gh, hg = g * h, h * g
    if isinstance(g, Mat):
        return gh == hg or gh.entries == tuple(-x for x in hg.entries)
    return gh == hg


# ---------------------------------------------------------- fast products


class _Compiled:
    """Support elements flattened to letter tuples for fast multiplication."""

    def __init__(self, mu: ProbabilityMeasure):
        self.model = mu.model
        self.kind = "mat" if isinstance(mu.model, HalfPlane) else "word"
        self.elements = mu.elements
        self.cdf = np.cumsum(mu.weights)
        self.cdf[-1] = 1.0
        if self.kind == "word":
            self.letters = [g.word.letters for g in self.elements]
            self.single = all(len(x) == 1 for x in self.letters)
            self.codes = [x[0] if len(x) == 1 else -1 for x in self.letters]
        if isinstance(mu.model, SplitExtension):
            self.tors = [g.t for g in self.elements]
            self.twists = [mu.model.twist(g.word) for g in self.elements]

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.searchsorted(self.cdf, rng.random(n), side="right")

    def word_stack(self, idx) -> list:
        stack: list[int] = []
        push, pop = stack.append, stack.pop
        if self.single:
            codes = self.codes
            for j in idx:
                c = codes[j]
                if stack and stack[-1] == c ^ 1:
                    pop()
                else:
                    push(c)
        else:
            letters = self.letters
            for j in idx:
                for c in letters[j]:
                    if stack and stack[-1] == c ^ 1:
                        pop()
                    else:
                        push(c)
        return stack

    def product(self, idx) -> GroupElement:
        if self.kind == "mat":
            a, b, c, d = 1, 0, 0, 1
            for j in idx:
                m = self.elements[j]
                a, b, c, d = a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d
            return Mat(a, b, c, d)
        w = Word._trusted(tuple(self.word_stack(idx)))
        if isinstance(self.model, SplitExtension):
            q = self.model.q
            t = 0
            for j in idx:
                t = (self.twists[j] * t + self.tors[j]) % q
            return ExtElement(w, t, self.model)
        return FreeWord(w)


_COMPILED: dict = {}


def _compiled(mu: ProbabilityMeasure) -> _Compiled:
    c = _COMPILED.get(mu)
    if c is None:
        c = _COMPILED[mu] = _Compiled(mu)
    return c


# -------------------------------------------------------------- sample paths


@dataclass(frozen=True)
class SamplePath:
    """Increments of one walk; positions are computed on demand."""

    measure: ProbabilityMeasure = field(repr=False)
    seed: int
    trial: int
    indices: tuple = field(repr=False)
    lane: int = 0

    @property
    def n(self) -> int:
        return len(self.indices)

    @property
    def increments(self) -> list:
        els = self.measure.elements
        return [els[j] for j in self.indices]

    def position(self, k: int) -> GroupElement:
        """``w_k``, the product of the first ``k`` increments."""
        if not 0 <= k <= self.n:
            raise IndexError(k)
        return _compiled(self.measure).product(self.indices[:k])

    @cached_property
    def endpoint(self) -> GroupElement:
        return self.position(self.n)

    @cached_property
    def prefixes(self) -> list:
        comp = _compiled(self.measure)
        out = [self.measure.model.identity()]
        g = out[0]
        for j in self.indices:
            g = g * comp.elements[j]
            out.append(g)
        return out


def sample_path(mu: ProbabilityMeasure, n: int, seed: int, trial: int = 0, lane: int = 0) -> SamplePath:
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = trial_rng(seed, trial, lane)
    idx = _compiled(mu).draw(rng, n)
    return SamplePath(mu, seed, trial, tuple(idx.tolist()), lane)


def two_sided_path(mu: ProbabilityMeasure, n: int, seed: int, trial: int = 0) -> tuple[SamplePath, SamplePath]:
    """Forward walk for ``mu`` and backward walk for the reflected measure."""
    fwd = sample_path(mu, n, seed, trial, lane=0)
    bwd = sample_path(mu.reflected(), n, seed, trial, lane=1)
    return fwd, bwd


def displacement(g: GroupElement) -> float:
    """``d(x0, g x0)``."""
    if isinstance(g, Mat):
        return dist(PLANE_BASEPOINT, orbit_point(g))
    return len(g.word)


# ------------------------------------------------------------------- drift


@dataclass(frozen=True)
class DriftEstimate:
    n: int
    trials: int
    seed: int
    mean: float
    std: float
    ci95: tuple
    values: np.ndarray = field(repr=False, compare=False)


def _endpoint_distance(mu, n, seed, t):
    comp = _compiled(mu)
    idx = comp.draw(trial_rng(seed, t), n)
    if comp.kind == "word":
        return float(len(comp.word_stack(idx.tolist())))
    return float(displacement(comp.product(idx.tolist())))


def distance_samples(mu: ProbabilityMeasure, n: int, trials: int, seed: int, workers=None) -> np.ndarray:
    return np.array(map_trials(partial(_endpoint_distance, mu, n, seed), trials, workers))


def drift_estimate(mu: ProbabilityMeasure, n: int, trials: int, seed: int, workers=None) -> DriftEstimate:
    if trials < 2:
        raise ValueError("need at least two trials")
    if n < 1:
        raise ValueError("n must be positive")
    vals = distance_samples(mu, n, trials, seed, workers) / n
    mean = float(np.mean(vals))
    std = float(np.std(vals, ddof=1))
    half = 1.96 * std / math.sqrt(trials)
    return DriftEstimate(n, trials, seed, mean, std, (mean - half, mean + half), vals)


# -------------------------------------------------------------- decay fits


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    used: tuple
    counts: tuple

    @property
    def fitted(self) -> bool:
        return len(self.used) >= 2


def fit_decay(xs, counts, total: int, min_count: int = 30, fit_range=None) -> DecayFit:
    """Least squares of ``log(count / total)`` against ``x`` over well-populated bins."""
    xs = np.asarray(xs, dtype=float)
    counts = np.asarray(counts)
    keep = counts >= min_count
    if fit_range is not None:
        lo, hi = fit_range
        keep &= (xs >= lo) & (xs <= hi)
    x = xs[keep]
    if len(x) < 2:
        return DecayFit(math.nan, math.nan, math.nan, tuple(x.tolist()), tuple(counts.tolist()))
    y = np.log(counts[keep] / total)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(slope), float(intercept), r2, tuple(x.tolist()), tuple(counts.tolist()))


@dataclass(frozen=True)
class TailEstimate:
    xs: tuple
    counts: tuple
    trials: int
    fit: DecayFit

    @property
    def probabilities(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.trials

    def rows(self) -> list[dict]:
        return [
            dict(r_or_d=x, count=c, tail_prob=c / self.trials, fit_slope=self.fit.slope, fit_r2=self.fit.r_squared)
            for x, c in zip(self.xs, self.counts)
        ]


def _gromov_sample(mu, n, i, seed, t):
    comp = _compiled(mu)
    idx = comp.draw(trial_rng(seed, t), n).tolist()
    if comp.kind == "word":
        # gp(w_i x0; x0, w_n x0) = gp(x0; w_i^-1 x0, w_i^-1 w_n x0)
        head = comp.word_stack(idx[:i])
        tail = comp.word_stack(idx[i:])
        inv_head = [c ^ 1 for c in reversed(head)]
        k, m = 0, min(len(inv_head), len(tail))
        while k < m and inv_head[k] == tail[k]:
            k += 1
        return k
    wi, wn = comp.product(idx[:i]), comp.product(idx)
    return gromov_product(orbit_point(wi), PLANE_BASEPOINT, orbit_point(wn))


def gromov_tail(mu: ProbabilityMeasure, n: int, i: int, r_max: int, trials: int, seed: int,
                fit_range=None, min_count: int = 30, workers=None) -> TailEstimate:
    """Empirical ``P(gp(w_i x0; x0, w_n x0) >= r)`` for ``r = 0..r_max``."""
    if not 0 <= i <= n:
        raise ValueError("need 0 <= i <= n")
    vals = np.array(map_trials(partial(_gromov_sample, mu, n, i, seed), trials, workers))
    rs = np.arange(r_max + 1)
    counts = np.array([(vals >= r).sum() for r in rs])
    return TailEstimate(tuple(rs.tolist()), tuple(counts.tolist()), trials,
                        fit_decay(rs, counts, trials, min_count, fit_range))


def _endpoint_word(mu, n, seed, t):
    comp = _compiled(mu)
    return tuple(comp.word_stack(comp.draw(trial_rng(seed, t), n).tolist()))


def shadow_tail(mu: ProbabilityMeasure, n: int, R: float, target_distances: Sequence[int], trials: int,
                seed: int, direction: Word | None = None, min_count: int = 30, workers=None) -> TailEstimate:
    """Empirical ``P(w_n in S_{x0}(g x0, R))`` for targets ``g = direction**d``.

    ``direction`` must be cyclically reduced (default: the first generator),
    so that ``d(x0, g x0) = d * |direction|``; the fit is against that distance.
    """
    if isinstance(mu.model, HalfPlane):
        raise ValueError("shadow targets are powers of a tree word")
    if R < 0:
        raise ValueError("R must be nonnegative")
    u = direction if direction is not None else Word._trusted((0,))
    if len(u) > 1 and u.letters[0] ^ 1 == u.letters[-1]:
        raise ValueError("direction must be cyclically reduced")
    dmax = max(target_distances) if target_distances else 0
    far = Word._trusted(u.letters * dmax)
    ends = map_trials(partial(_endpoint_word, mu, n, seed), trials, workers)
    cps = np.array([common_prefix(far, Word._trusted(e)) for e in ends])
    xs, counts = [], []
    for d in target_distances:
        length = d * len(u)
        gp = np.minimum(cps, length)
        counts.append(int((gp >= length - R).sum()))
        xs.append(length)
    return TailEstimate(tuple(xs), tuple(counts), trials, fit_decay(xs, counts, trials, min_count))
