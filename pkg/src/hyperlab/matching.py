"""Matches between geodesic words in the tree models.

In a tree a translate of one subgeodesic lies at Hausdorff distance 0 from
another exactly when the two label sequences agree, read either in the same
direction or with one of them inverted.  So every match here is a subword
match and carries ``B = 0``.
"""

from __future__ import annotations

import math
import statistics
import warnings
from dataclasses import dataclass
from functools import partial
from typing import Sequence

from .exceptions import NotHyperbolicError, UnsupportedModelError
from .models import HalfPlane, Mat, word_part
from .walker import ProbabilityMeasure, _compiled, map_trials, trial_rng
from .words import Word, cyclic_reduce, invert

DIRECT = "direct"
INVERSE = "inverse"


class SuffixAutomaton:
    """Suffix automaton of an integer sequence.

    ``first[v]`` and ``last[v]`` are the smallest and largest end positions
    of the substrings represented by state ``v``.
    """

    def __init__(self, seq: Sequence[int]):
        nxt = [{}]
        link = [-1]
        length = [0]
        first = [-1]
        cloned = [False]
        last_state = 0
        for pos, c in enumerate(seq):
            cur = len(nxt)
            nxt.append({})
            link.append(0)
            length.append(length[last_state] + 1)
            first.append(pos)
            cloned.append(False)
            p = last_state
            while p != -1 and c not in nxt[p]:
                nxt[p][c] = cur
                p = link[p]
            if p != -1:
                q = nxt[p][c]
                if length[p] + 1 == length[q]:
                    link[cur] = q
                else:
                    cl = len(nxt)
                    nxt.append(dict(nxt[q]))
                    link.append(link[q])
                    length.append(length[p] + 1)
                    first.append(first[q])
                    cloned.append(True)
                    while p != -1 and nxt[p].get(c) == q:
                        nxt[p][c] = cl
                        p = link[p]
                    link[q] = cl
                    link[cur] = cl
            last_state = cur
        self.next, self.link, self.length, self.first = nxt, link, length, first
        self.n = len(seq)
        # last end position: propagate maxima up the suffix-link tree
        last = [-1 if cl else f for f, cl in zip(first, cloned)]
        for v in sorted(range(1, len(nxt)), key=length.__getitem__, reverse=True):
            u = link[v]
            if u > 0 and last[v] > last[u]:
                last[u] = last[v]
        self.last = last

    def __len__(self) -> int:
        return len(self.next)

    def longest_disjoint_repeat(self) -> tuple[int, int, int]:
        """``(length, start1, start2)`` of the longest factor with two
        non-overlapping occurrences."""
        best = (0, 0, 0)
        length, first, last = self.length, self.first, self.last
        for v in range(1, len(self.next)):
            m = min(length[v], last[v] - first[v])
            if m > best[0]:
                best = (m, first[v] - m + 1, last[v] - m + 1)
        return best

    def longest_common(self, other: Sequence[int]) -> tuple[int, int, int]:
        """``(length, start_in_self, start_in_other)`` of a longest common factor."""
        nxt, link, length, first = self.next, self.link, self.length, self.first
        v, cur = 0, 0
        best = (0, 0, 0)
        for j, c in enumerate(other):
            while v and c not in nxt[v]:
                v = link[v]
                cur = length[v]
            if c in nxt[v]:
                v = nxt[v][c]
                cur += 1
            if cur > best[0]:
                best = (cur, first[v] - cur + 1, j - cur + 1)
        return best


@dataclass(frozen=True)
class MatchReport:
    """An ``(A, B)``-match between subwords of ``u`` and ``v``.

    ``positions`` are offsets into ``u`` and ``v``.  For an inverse match the
    subword of ``v`` at the second offset is the inverse of the one in ``u``.
    """

    A: int
    positions: tuple
    orientation: str
    u: Word
    v: Word
    self_match: bool
    B: int = 0

    def __post_init__(self):
        if not self.verify():
            raise AssertionError(f"match report failed verification: {self}")

    @property
    def disjoint(self) -> bool:
        i, j = self.positions
        return not self.self_match or self.A == 0 or i + self.A <= j or j + self.A <= i

    def segments(self) -> tuple[Word, Word]:
        i, j = self.positions
        return self.u[i:i + self.A], self.v[j:j + self.A]

    def verify(self) -> bool:
        if self.A == 0:
            return True
        s, t = self.segments()
        if len(s) != self.A or len(t) != self.A:
            return False
        ok = s == (t if self.orientation == DIRECT else invert(t))
        return ok and self.disjoint

    def translator(self) -> Word:
        """Element carrying the matched piece of ``v x0`` onto that of ``u x0``."""
        i, j = self.positions
        start = self.v[:j] if self.orientation == DIRECT else self.v[:j + self.A]
        return self.u[:i] * invert(start)

    def __len__(self) -> int:
        return self.A


def _codes(w: Word) -> tuple:
    return w.letters


def longest_self_match(w: Word) -> MatchReport:
    """Longest factor occurring twice disjointly, or together with its inverse."""
    sam = SuffixAutomaton(w.letters)
    d, i, j = sam.longest_disjoint_repeat()
    # occurrences of s and s^-1 in a reduced word never overlap
    m, a, b = sam.longest_common(invert(w).letters)
    n = len(w)
    if m > d:
        return MatchReport(m, (a, n - b - m), INVERSE, w, w, True)
    return MatchReport(d, (i, j), DIRECT, w, w, True)


def longest_cross_match(u: Word, v: Word) -> MatchReport:
    sam = SuffixAutomaton(u.letters)
    d, i, j = sam.longest_common(v.letters)
    m, a, b = sam.longest_common(invert(v).letters)
    if m > d:
        return MatchReport(m, (a, len(v) - b - m), INVERSE, u, v, False)
    return MatchReport(d, (i, j), DIRECT, u, v, False)


def geodesic_axis_overlap(g) -> tuple[int, int]:
    """Overlap of ``[x0, g x0]`` with the axis of ``g``, and the length of ``g``."""
    if isinstance(g, Mat):
        raise UnsupportedModelError("axis overlap is computed in tree models only")
    w = word_part(g)
    conj, core = cyclic_reduce(w)
    if not len(core):
        raise NotHyperbolicError(f"{g} is not hyperbolic")
    return len(w) - 2 * len(conj), len(w)


# ------------------------------------------------------------- experiments


def _require_tree(mu: ProbabilityMeasure):
    if isinstance(mu.model, HalfPlane):
        raise UnsupportedModelError("matching experiments run on tree models")


def _end_word(mu, n, seed, t) -> Word:
    comp = _compiled(mu)
    return Word._trusted(tuple(comp.word_stack(comp.draw(trial_rng(seed, t), n).tolist())))


def _self_match_sample(mu, n, seed, t):
    w = _end_word(mu, n, seed, t)
    return longest_self_match(w).A, len(w)


@dataclass(frozen=True)
class MatchCurveRow:
    n: int
    epsilon: float
    trials: int
    p_match: float
    median_largest_match: float
    seed: int


def match_curve(mu: ProbabilityMeasure, n_values: Sequence[int], epsilon: float, trials: int,
                seed: int, workers=None) -> list[MatchCurveRow]:
    """Per ``n``: frequency of a self-match of length at least ``epsilon * |w_n|``."""
    _require_tree(mu)
    rows = []
    for n in n_values:
        res = map_trials(partial(_self_match_sample, mu, n, seed), trials, workers)
        hits = sum(1 for a, length in res if length > 0 and a >= epsilon * length)
        med = statistics.median(a for a, _ in res)
        rows.append(MatchCurveRow(n, epsilon, trials, hits / trials, float(med), seed))
    return rows


def axis_factors(g, L: int) -> set:
    """All length-``L`` factors of the periodic axis word of ``g`` and its inverse."""
    w = word_part(g)
    _, core = cyclic_reduce(w)
    c = core.core.letters
    if not c:
        raise NotHyperbolicError(f"{g} is not hyperbolic")
    reps = math.ceil((L + len(c)) / len(c))
    long = c * reps
    inv = invert(Word._trusted(long)).letters
    out = set()
    for i in range(len(c)):
        out.add(Word._trusted(long[i:i + L]).as_string())
        out.add(Word._trusted(inv[i:i + L]).as_string())
    return out


def _axis_sample(mu, factors, L, n, eps, seed, t):
    w = _end_word(mu, n, seed, t)
    trim = math.ceil(eps * len(w))
    mid = w[trim:len(w) - trim]
    if len(mid) < L:
        return False
    s = mid.as_string()
    return any(s[k:k + L] in factors for k in range(len(s) - L + 1))


def fixed_axis_match(mu: ProbabilityMeasure, g, L_target: int, n: int, trials: int, seed: int,
                     epsilon: float = 1 / 6, workers=None) -> float:
    """Frequency with which the middle of ``w_n`` matches ``L_target`` letters of the axis of ``g``."""
    _require_tree(mu)
    if g not in mu:
        warnings.warn(f"{g} is not in the support of the measure", stacklevel=2)
    if L_target < 1:
        raise ValueError("L_target must be positive")
    factors = axis_factors(g, L_target)
    hits = map_trials(partial(_axis_sample, mu, factors, L_target, n, epsilon, seed), trials, workers)
    return sum(hits) / trials
