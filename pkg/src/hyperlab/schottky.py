"""Ping-pong certificates for free generation, and the random subgroup audit.

A certificate for generators ``A = gens + inverses`` holds when every
``d(x0, a x0) >= 6K`` and every Gromov product ``gp(x0; a x0, b x0)`` over
distinct ``a, b`` is at most ``K``.  The rescaled Cayley graph then embeds
quasi-isometrically, with multiplicative constant 6.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

from .exceptions import BudgetExceeded, UnsupportedModelError
from .geometry import PLANE_BASEPOINT, dist, gromov_product, orbit_point
from .models import GroupElement, HalfPlane, Mat, word_part
from .walker import SamplePath, displacement
from .words import IDENTITY, Word, _cancellation, invert

WORD_BUDGET = 10 ** 6
QI_MULTIPLICATIVE = 6

PASS, FAIL, UNMET = "pass", "fail", "hypothesis_unmet"
DIRECT, INVERSE = "direct", "inverse"


def _x0(g):
    return PLANE_BASEPOINT if isinstance(g, Mat) else IDENTITY


def _threshold(g, model=None) -> float:
    if model is not None:
        return model.certification_threshold if isinstance(model, HalfPlane) else model.K0
    if isinstance(g, Mat):
        return HalfPlane().certification_threshold
    return g.model.K0 if hasattr(g, "model") else 1.0


def _slack(g, model=None) -> float:
    if isinstance(g, Mat):
        return 4 * (model.delta if model is not None else HalfPlane().delta)
    return 0.0


def symmetric_closure(gens: Sequence[GroupElement]) -> list[tuple[str, GroupElement]]:
    """``[("g1", g1), ("g1^-1", g1^-1), ...]``, rejecting coincidences."""
    out = []
    for i, g in enumerate(gens, start=1):
        out.append((f"g{i}", g))
        out.append((f"g{i}^-1", g.inverse()))
    for x in range(len(out)):
        for y in range(x + 1, len(out)):
            if out[x][1] == out[y][1]:
                raise ValueError(f"generators {out[x][0]} and {out[y][0]} coincide")
    return out


@dataclass(frozen=True)
class SchottkyCertificate:
    K: float
    K0: float
    generators: tuple
    lengths: tuple
    gromov_products: tuple
    status: str
    qi_multiplicative: int
    qi_additive: float
    elements: tuple = field(repr=False, compare=False, default=())

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def max_gromov_product(self) -> float:
        return max((v for _, _, v in self.gromov_products), default=0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("elements")
        d["pass"] = self.passed
        d["lengths"] = {name: v for name, v in self.lengths}
        d["gromov_products"] = {f"{x},{y}": v for x, y, v in self.gromov_products}
        d["generators"] = list(self.generators)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def check_conditions(gens: Sequence[GroupElement], K: float, model=None) -> SchottkyCertificate:
    if not gens:
        raise ValueError("need at least one generator")
    K0 = _threshold(gens[0], model)
    A = symmetric_closure(gens)
    x0 = _x0(gens[0])
    pts = [(name, orbit_point(a)) for name, a in A]
    lengths = tuple((name, dist(x0, p)) for name, p in pts)
    prods = []
    for x in range(len(pts)):
        for y in range(x + 1, len(pts)):
            prods.append((pts[x][0], pts[y][0], gromov_product(x0, pts[x][1], pts[y][1])))
    ok = all(v >= 6 * K for _, v in lengths) and all(v <= K for _, _, v in prods)
    status = UNMET if K < K0 else (PASS if ok else FAIL)
    return SchottkyCertificate(
        K, K0, tuple(str(g) for g in gens), lengths, tuple(prods), status,
        QI_MULTIPLICATIVE, 2 * K + _slack(gens[0], model), tuple(gens),
    )


# ------------------------------------------------------ generator words


def _guard(k: int, max_len: int):
    if max_len < 1:
        return
    need = 2 * k * (2 * k - 1) ** (max_len - 1)
    if need > WORD_BUDGET:
        raise BudgetExceeded(need, WORD_BUDGET, "lower max_word_len")


def evaluate(gens: Sequence[GroupElement], word: Word, identity=None) -> GroupElement:
    if identity is None:
        identity = gens[0] * gens[0].inverse()
    out = identity
    inv = [g.inverse() for g in gens]
    for c in word.letters:
        out = out * (inv[c >> 1] if c & 1 else gens[c >> 1])
    return out


def _walk_words(gens, max_len) -> Iterator[tuple[int, Word, GroupElement]]:
    """Depth-first: ``(length, generator word, value)`` for nonempty reduced words."""
    letters = []
    for g in gens:
        letters += [g, g.inverse()]
    ident = gens[0] * gens[0].inverse()
    stack = [((), ident)]
    while stack:
        w, val = stack.pop()
        if w:
            yield len(w), Word._trusted(w), val
        if len(w) == max_len:
            continue
        for c in reversed(range(len(letters))):
            if w and w[-1] == c ^ 1:
                continue
            stack.append((w + (c,), val * letters[c]))


def rescaled_distance(cert: SchottkyCertificate, word: Word) -> float:
    """Length of ``word`` in the Cayley graph with edge ``a`` weighted by ``d(x0, a x0)``."""
    if not cert.passed:
        raise ValueError("certificate did not pass")
    if not isinstance(word, Word):
        raise TypeError("expected a Word over the generator alphabet")
    for x in range(len(word) - 1):
        if word.letters[x] ^ 1 == word.letters[x + 1]:
            raise ValueError("generator word is not reduced")
    lengths = [v for _, v in cert.lengths]
    if word.rank_needed > len(lengths) // 2:
        raise ValueError("word uses unknown generators")
    return sum(lengths[c] for c in word.letters)


@dataclass(frozen=True)
class QIDeviation:
    worst_ratio: float
    worst_gap: float
    window_ok: bool
    words_checked: int
    lower_ok: bool = True


def qi_deviation(cert: SchottkyCertificate, max_word_len: int) -> QIDeviation:
    """Compare ``d_X`` with the rescaled distance on every generator word up to ``max_word_len``.

    ``window_ok`` records the displayed bound ``d_Gamma - 5 K k <= d_X`` with
    ``k`` the word length; ``lower_ok`` records ``d_Gamma / 6 <= d_X`` up to the
    certificate's additive constant.  ``d_X <= d_Gamma`` always holds by the
    triangle inequality and is asserted.
    """
    if not cert.passed:
        raise ValueError("certificate did not pass")
    gens = list(cert.elements)
    _guard(len(gens), max_word_len)
    lengths = [v for _, v in cert.lengths]
    ratio, gap, n = 1.0, 0.0, 0
    window = lower = True
    eps = 1e-9
    for k, w, val in _walk_words(gens, max_word_len):
        n += 1
        dg = sum(lengths[c] for c in w.letters)
        dx = displacement(val)
        assert dx <= dg + eps, "triangle inequality violated"
        gap = max(gap, dg - dx)
        ratio = max(ratio, dg / dx if dx > 0 else math.inf)
        if dg - 5 * cert.K * k > dx + eps:
            window = False
        if dg / QI_MULTIPLICATIVE - cert.qi_additive > dx + eps:
            lower = False
    return QIDeviation(ratio, gap, window, n, lower)


def freeness_oracle(gens: Sequence[GroupElement], max_word_len: int) -> bool:
    """Brute force: nonempty reduced generator words up to ``max_word_len`` give
    distinct nontrivial elements."""
    _guard(len(gens), max_word_len)
    ident = gens[0] * gens[0].inverse()
    seen = {ident}
    for _, _, val in _walk_words(list(gens), max_word_len):
        if val in seen:
            return False
        seen.add(val)
    return True


# ------------------------------------------------------------------- audit


@dataclass(frozen=True)
class SubgroupAudit:
    epsilon: float
    drifts: tuple
    Ln: float
    length_bounds: bool
    gromov_bounds: bool
    no_large_match: bool
    unmatched: bool
    witnesses: dict = field(default_factory=dict, compare=False)

    @property
    def all_pass(self) -> bool:
        return self.length_bounds and self.gromov_bounds and self.no_large_match and self.unmatched

    def flags(self) -> dict:
        return dict(length_bounds=self.length_bounds, gromov_bounds=self.gromov_bounds,
                    no_large_match=self.no_large_match, unmatched=self.unmatched)


def _geodesics(words: Sequence[Word]) -> list[tuple[int, Word]]:
    """``gamma_i`` for ``i`` in ``+-I``: the words and their inverses, signed 1-based."""
    out = []
    for i, w in enumerate(words, start=1):
        out += [(i, w), (-i, invert(w))]
    return out


def check_length_bounds(lengths, drifts, ns, eps) -> tuple[bool, list]:
    bad = [i for i, (d, L, n) in enumerate(zip(lengths, drifts, ns), start=1)
           if not (1 - eps) * L * n <= d <= (1 + eps) * L * n]
    return not bad, bad


def check_gromov_bounds(words: Sequence[Word], bound: float) -> tuple[bool, list]:
    gs = _geodesics(words)
    bad = []
    for x in range(len(gs)):
        for y in range(x + 1, len(gs)):
            v = gromov_product(IDENTITY, gs[x][1], gs[y][1])
            if v > bound:
                bad.append((gs[x][0], gs[y][0], v))
    return not bad, bad


def _contains(hay: Word, needle: Word) -> bool:
    if not needle:
        return True
    return needle.as_string() in hay.as_string()


def find_large_match(words: Sequence[Word], eL: float) -> list:
    """Pairs ``(j, i)`` of distinct generators where the middle of ``gamma_j``
    (``eL`` trimmed from both ends) occurs in ``gamma_i`` in either orientation."""
    found = []
    for j, wj in enumerate(words, start=1):
        lo = math.ceil(eL - 1e-9)
        hi = math.floor(len(wj) - eL + 1e-9)
        mid = wj[lo:hi] if hi > lo else IDENTITY
        for i, wi in enumerate(words, start=1):
            if i == j:
                continue
            if _contains(wi, mid) or _contains(wi, invert(mid)):
                found.append((j, i))
    return found


def _common_suffix(a: tuple, end_a: int, b: tuple, end_b: int, cap: int) -> int:
    k = 0
    while k < cap and k < end_a and k < end_b and a[end_a - 1 - k] == b[end_b - 1 - k]:
        k += 1
    return k


def find_unmatched_violations(words: Sequence[Word], K: int) -> list:
    """Witnesses ``(i, i', j, t, orientation)`` where some ``eta(i, i', K, l)``
    occurs in ``gamma_j`` starting at offset ``t <= K``.

    ``eta`` runs from the point ``l`` before the end of ``gamma_i`` to the
    point ``K`` along ``w_i gamma_{i'}``; its word is the reduced product of
    the last ``l`` letters of ``w_i`` and the first ``K`` of ``w_{i'}``.  Only
    ``l`` beyond the cancellation ``c`` is considered: for ``l <= c`` the
    segment lies inside ``gamma_{i'}`` itself.
    """
    K = int(math.floor(K))
    gs = _geodesics(words)
    out = []
    for i, wi in gs:
        a = wi.letters
        for ip, wip in gs:
            if i == -ip or K > len(wip):
                continue
            c = min(_cancellation(a, wip.letters), K)
            T = wip[c:K]  # common tail of every eta(i, i', K, l) with l > c
            S_end = len(a) - c  # eta's head is wi[len - l : S_end]
            if S_end < 1:
                continue
            Tinv = invert(T)
            for j, wj in gs:
                if abs(i) > abs(j) or abs(ip) > abs(j):
                    continue
                g = wj.letters
                hay = wj.as_string()
                # direct: T at m with a head of length m - t >= 1 matching before it
                needle = T.as_string()
                m = hay.find(needle, 1)
                while m != -1:
                    need = max(1, m - K)
                    if _common_suffix(g, m, a, S_end, need) >= need:
                        out.append((i, ip, j, min(K, m - 1), DIRECT))
                        break
                    m = hay.find(needle, m + 1)
                # inverse: T^-1 at t <= K followed by the start of wi^-1 beyond c
                needle = Tinv.as_string()
                ainv = invert(wi).letters
                t = hay.find(needle)
                while t != -1 and t <= K:
                    e = t + len(T)
                    if e < len(g) and c < len(ainv) and g[e] == ainv[c]:
                        out.append((i, ip, j, t, INVERSE))
                        break
                    t = hay.find(needle, t + 1)
    return out


def audit_random_subgroup(sample: Sequence, epsilon: float, drifts: Sequence[float]) -> SubgroupAudit:
    """Evaluate the four random-subgroup conditions on the walk endpoints.

    ``Ln`` is taken as ``min_i L_i n_i``; Gromov bounds use ``epsilon * Ln``,
    the match test trims ``epsilon * Ln`` and unmatching uses ``3 epsilon Ln``.
    """
    if not sample:
        raise ValueError("empty sample")
    if len(drifts) != len(sample):
        raise ValueError("need one drift per sample path")
    ends, ns = [], []
    for s in sample:
        if isinstance(s, SamplePath):
            if isinstance(s.measure.model, HalfPlane):
                raise UnsupportedModelError("audits run on tree models")
            ends.append(word_part(s.endpoint))
            ns.append(s.n)
        else:
            w, n = s
            ends.append(w)
            ns.append(n)
    Ln = min(L * n for L, n in zip(drifts, ns))
    eL = epsilon * Ln
    lb, lbw = check_length_bounds([len(w) for w in ends], drifts, ns, epsilon)
    gb, gbw = check_gromov_bounds(ends, eL)
    lm = find_large_match(ends, eL)
    um = find_unmatched_violations(ends, 3 * eL)
    wit = {}
    if lbw:
        wit["length_bounds"] = lbw
    if gbw:
        wit["gromov_bounds"] = gbw
    if lm:
        wit["large_match"] = lm
    if um:
        wit["unmatched"] = um
    return SubgroupAudit(epsilon, tuple(drifts), Ln, lb, gb, not lm, not um, wit)
