"""Metric primitives for the tree and half-plane models.

Tree distances are exact integers.  Concatenation estimates are reported
together with the hypotheses they rely on, so callers can tell a failed
bound from a bound that was never guaranteed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .exceptions import ModelMismatchError, NotHyperbolicError
from .models import GroupElement, Mat, PlanePoint, _mobius, word_part
from .words import IDENTITY, Word, concat, cyclic_reduce, invert

_GOLDEN = (math.sqrt(5) - 1) / 2
PLANE_BASEPOINT = PlanePoint(0.0, 1.0)


def _check_same(*pts):
    kinds = {type(p) for p in pts}
    if len(kinds) != 1 or not kinds <= {Word, PlanePoint}:
        raise ModelMismatchError(f"points from different models: {sorted(k.__name__ for k in kinds)}")


def _tree_dist(x: Word, y: Word) -> int:
    # |x^-1 y| = |x| + |y| - 2 * (common prefix)
    a, b = x.letters, y.letters
    n = min(len(a), len(b))
    k = 0
    while k < n and a[k] == b[k]:
        k += 1
    return len(a) + len(b) - 2 * k


def _plane_dist(p: PlanePoint, q: PlanePoint) -> float:
    h = math.hypot(p.x - q.x, p.y - q.y)
    return 2.0 * math.asinh(h / (2.0 * math.sqrt(p.y * q.y)))


def dist(x, y):
    _check_same(x, y)
    if isinstance(x, Word):
        return _tree_dist(x, y)
    return _plane_dist(x, y)


def common_prefix(x: Word, y: Word) -> int:
    a, b = x.letters, y.letters
    n = min(len(a), len(b))
    k = 0
    while k < n and a[k] == b[k]:
        k += 1
    return k


def gromov_product(base, x, y):
    _check_same(base, x, y)
    if isinstance(base, Word):
        if not base:
            return common_prefix(x, y)
        # tree distances make the numerator even
        return (dist(base, x) + dist(base, y) - dist(x, y)) // 2
    return 0.5 * (dist(base, x) + dist(base, y) - dist(x, y))


def in_shadow(y, base, x, R: float) -> bool:
    """Whether ``y`` lies in the shadow of ``x`` seen from ``base``."""
    return gromov_product(base, x, y) >= dist(base, x) - R


def basepoint_for(g: GroupElement):
    return PLANE_BASEPOINT if isinstance(g, Mat) else IDENTITY


def orbit_point(g: GroupElement, base=None):
    if isinstance(g, Mat):
        return _mobius(g, base or PLANE_BASEPOINT)
    if base is None:
        return g.word
    return concat(g.word, base)


# ---------------------------------------------------------------- geodesics


class Geodesic:
    """Unit-speed geodesic segment; call it with ``t`` in ``[0, length]``."""

    start: object
    end: object
    length: float

    def __call__(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class TreeGeodesic(Geodesic):
    start: Word
    end: Word
    path: Word = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "path", concat(invert(self.start), self.end))

    @property
    def length(self) -> int:
        return len(self.path)

    def __call__(self, t) -> Word:
        k = int(round(t))
        if abs(k - t) > 1e-9 or not 0 <= k <= len(self.path):
            raise ValueError(f"tree geodesics are evaluated at integer t in [0, {self.length}]")
        return concat(self.start, self.path[:k])

    def vertices(self) -> list[Word]:
        return [self(t) for t in range(self.length + 1)]


@dataclass(frozen=True)
class PlaneGeodesic(Geodesic):
    start: PlanePoint
    end: PlanePoint

    def __post_init__(self):
        p, q = self.start, self.end
        if abs(p.x - q.x) <= 1e-12 * max(1.0, abs(p.x)):
            vals = dict(vertical=True, center=p.x, radius=0.0, s0=math.log(p.y),
                        sign=1.0 if q.y >= p.y else -1.0)
        else:
            c = ((q.x ** 2 + q.y ** 2) - (p.x ** 2 + p.y ** 2)) / (2.0 * (q.x - p.x))
            r = math.hypot(p.x - c, p.y)
            sp = _arc_param(math.atan2(p.y, p.x - c))
            sq = _arc_param(math.atan2(q.y, q.x - c))
            vals = dict(vertical=False, center=c, radius=r, s0=sp, sign=1.0 if sq >= sp else -1.0)
        object.__setattr__(self, "_arc", vals)

    @property
    def length(self) -> float:
        return _plane_dist(self.start, self.end)

    def __call__(self, t) -> PlanePoint:
        if t < -1e-9 or t > self.length + 1e-9:
            raise ValueError("parameter outside the segment")
        a = self._arc
        s = a["s0"] + a["sign"] * t
        if a["vertical"]:
            return PlanePoint(a["center"], math.exp(s))
        theta = 2.0 * math.atan(math.exp(s))
        return PlanePoint(a["center"] + a["radius"] * math.cos(theta), a["radius"] * math.sin(theta))


def _arc_param(theta: float) -> float:
    # hyperbolic arc length along a semicircle: ds = dtheta / sin(theta)
    return math.log(math.tan(theta / 2.0))


def geodesic(x, y) -> Geodesic:
    _check_same(x, y)
    if isinstance(x, Word):
        return TreeGeodesic(x, y)
    return PlaneGeodesic(x, y)


def project(p, gamma: Geodesic, tol: float = 1e-9):
    """Nearest point of ``gamma`` to ``p`` and its parameter."""
    if isinstance(gamma, TreeGeodesic):
        if not isinstance(p, Word):
            raise ModelMismatchError("tree geodesic, plane point")
        # the projection is the branch point, at distance (p . end)_start
        t = gromov_product(gamma.start, p, gamma.end)
        return gamma(t), t
    if not isinstance(p, PlanePoint):
        raise ModelMismatchError("plane geodesic, tree point")
    lo, hi = 0.0, gamma.length
    f = lambda t: _plane_dist(p, gamma(t))
    a = hi - _GOLDEN * (hi - lo)
    b = lo + _GOLDEN * (hi - lo)
    fa, fb = f(a), f(b)
    while hi - lo > tol:
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - _GOLDEN * (hi - lo)
            fa = f(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + _GOLDEN * (hi - lo)
            fb = f(b)
    t = 0.5 * (lo + hi)
    # endpoints are not probed by the bracket
    best = min((f(t), t), (f(0.0), 0.0), (f(gamma.length), gamma.length))
    return gamma(best[1]), best[1]


def distance_to_geodesic(p, gamma: Geodesic):
    return dist(p, project(p, gamma)[0])


# --------------------------------------------------------- concatenations


@dataclass(frozen=True)
class PersistentSegment:
    start: object
    end: object
    p: object
    q: object
    p_param: float
    q_param: float
    length: float
    gp_start: float
    gp_end: float

    @property
    def persistent_length(self) -> float:
        return abs(self.q_param - self.p_param)

    @property
    def ordered(self) -> bool:
        """Whether ``p`` comes no later than ``q`` along the segment."""
        return self.q_param >= self.p_param

    @property
    def predicted(self) -> float:
        """Segment length minus the Gromov products at its two ends."""
        return self.length - self.gp_start - self.gp_end

    @property
    def residual(self) -> float:
        return self.persistent_length - self.predicted


@dataclass(frozen=True)
class PersistentDecomposition:
    points: tuple
    segments: tuple
    skipped: tuple = ()

    @property
    def persistent_lengths(self) -> list:
        return [s.persistent_length for s in self.segments]

    @property
    def residuals(self) -> list:
        return [s.residual for s in self.segments]

    @property
    def degenerate(self) -> bool:
        return bool(self.skipped)

    def total(self):
        return sum(self.persistent_lengths)


def persistent_decomposition(xs: Sequence) -> PersistentDecomposition:
    """Persistent subsegments of the piecewise geodesic through ``xs``.

    On segment ``[x_{i-1}, x_i]`` the marker ``p_i`` is the projection of
    ``x_{i-2}`` and ``q_i`` the projection of ``x_{i+1}``; the first ``p`` is
    ``x_0`` and the last ``q`` is the final point.  Repeated consecutive
    points are dropped and reported in ``skipped``.
    """
    if len(xs) < 2:
        raise ValueError("need at least two points")
    _check_same(*xs)
    pts = [xs[0]]
    skipped = []
    for i, x in enumerate(xs[1:], start=1):
        if dist(pts[-1], x) == 0:
            skipped.append(i)
        else:
            pts.append(x)
    if skipped:
        warnings.warn(f"dropped zero-length segments at indices {skipped}", stacklevel=2)
    k = len(pts) - 1
    segs = []
    for i in range(1, k + 1):
        a, b = pts[i - 1], pts[i]
        g = geodesic(a, b)
        if i == 1:
            p, tp, gp0 = a, 0, 0
        else:
            p, tp = project(pts[i - 2], g)
            gp0 = gromov_product(a, pts[i - 2], b)
        if i == k:
            q, tq, gp1 = b, g.length, 0
        else:
            q, tq = project(pts[i + 1], g)
            gp1 = gromov_product(b, a, pts[i + 1])
        segs.append(PersistentSegment(a, b, p, q, tp, tq, g.length, gp0, gp1))
    return PersistentDecomposition(tuple(pts), tuple(segs), tuple(skipped))


@dataclass(frozen=True)
class LengthBounds:
    lower: float
    upper: float
    hypothesis_met: bool
    segments: int

    def contains(self, value, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


def _persists(value, C) -> bool:
    # persistent pieces must be nonempty even when C = 0 (tree case)
    return value >= C and value > 0


def concat_length_bounds(dec: PersistentDecomposition, C: float = 0.0) -> LengthBounds:
    k = len(dec.segments)
    total = dec.total()
    ok = all(s.ordered and _persists(s.persistent_length, C) for s in dec.segments)
    return LengthBounds(total - 2 * C * k, total + 2 * C * k, ok, k)


@dataclass(frozen=True)
class TauBound:
    value: float
    hypothesis_met: bool
    terms: tuple

    def __float__(self):
        return float(self.value)


def junction_products(factors: Sequence[GroupElement]) -> list:
    """``gp(x0; g_i^-1 x0, g_{i+1} x0)`` for each cyclic junction ``i``."""
    n = len(factors)
    x0 = basepoint_for(factors[0])
    out = []
    for i in range(n):
        gi, gn = factors[i], factors[(i + 1) % n]
        out.append(gromov_product(x0, orbit_point(gi.inverse()), orbit_point(gn)))
    return out


def tau_lower_bound(factors: Sequence[GroupElement], C: float = 0.0) -> TauBound:
    """Lower bound on the translation length of ``g_1 ... g_n`` from the
    lengths of its factors and the Gromov products at the cyclic junctions."""
    if not factors:
        raise ValueError("need at least one factor")
    n = len(factors)
    x0 = basepoint_for(factors[0])
    jp = junction_products(factors)
    terms = []
    for i in range(n):
        d = dist(x0, orbit_point(factors[i]))
        terms.append(d - jp[i - 1] - jp[i] - C)
    ok = all(_persists(t + C, C) for t in terms)
    return TauBound(sum(terms), ok, tuple(terms))


# ------------------------------------------------------- translation length


def isometry_type(g: GroupElement) -> str:
    if isinstance(g, Mat):
        tr = abs(g.trace)
        if tr > 2:
            return "hyperbolic"
        if tr == 2:
            return "identity" if (g.b, g.c) == (0, 0) else "parabolic"
        return "elliptic"
    core = cyclic_reduce(word_part(g))[1]
    return "hyperbolic" if len(core) else ("identity" if not g.word else "elliptic")


def translation_length_exact(g: GroupElement) -> float:
    """Stable translation length; zero for non-hyperbolic elements."""
    if isinstance(g, Mat):
        tr = abs(g.trace)
        return 2.0 * math.acosh(tr / 2.0) if tr > 2 else 0.0
    return len(cyclic_reduce(word_part(g))[1])


def axis_segment(g: GroupElement, m: int) -> TreeGeodesic:
    """Axis piece from the conjugator vertex across ``m`` fundamental domains."""
    if isinstance(g, Mat):
        raise NotHyperbolicError("axis segments are provided for tree models only")
    conj, cyc = cyclic_reduce(word_part(g))
    if not len(cyc):
        raise NotHyperbolicError(f"{g} is not hyperbolic")
    core = cyc.core.letters
    return TreeGeodesic(conj, Word._trusted(conj.letters + core * m))
