"""Acceptance battery: one test per criterion, each printing a single PASS/FAIL line.

Thresholds are the published targets; none are relaxed to make a run green.
"""

import itertools
import math
import random
import statistics
import warnings
from fractions import Fraction

import numpy as np
import pytest

from hyperlab.asymmetry import Verdict, geometric_separation, k_stabilizer, weak_asymmetry_report
from hyperlab.geometry import concat_length_bounds, dist, persistent_decomposition, translation_length_exact
from hyperlab.labcli import schottky_trial, separation_trials
from hyperlab.matching import geodesic_axis_overlap, longest_cross_match, longest_self_match
from hyperlab.models import Asymmetry, FreeTree, FreeWord, SplitExtension, classify_asymmetry, is_hyperbolic
from hyperlab.walker import (
    ProbabilityMeasure,
    distance_samples,
    drift_estimate,
    gromov_tail,
    sample_path,
    shadow_tail,
)
from hyperlab.words import all_reduced_words, are_conjugate, parse_word
from oracles import (
    conjugates_within,
    cross_match_length,
    random_chain,
    random_word,
    self_match_length,
    stabilizer,
)

SEED = 42
F2 = FreeTree(2)
MU = ProbabilityMeasure.uniform(F2)


@pytest.fixture
def report(capsys):
    def _report(num, name, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {num:>2}] {'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, detail

    return _report


def test_01_drift(report):
    d = drift_estimate(MU, 2000, 1000, SEED)
    report(1, "drift", 0.48 <= d.mean <= 0.52, f"mean d(x0, w_n x0)/n = {d.mean:.4f}, target [0.48, 0.52]")


def test_02_sampler_exactness(report):
    gens = MU.elements
    exact = Fraction(sum(1 for g, h in itertools.product(gens, repeat=2) if g * h == F2.identity()), 16)
    mc = float(np.mean(distance_samples(MU, 2, 100_000, SEED) == 0))
    ok = exact == Fraction(1, 4) and abs(mc - 0.25) <= 0.01
    report(2, "sampler exactness", ok, f"exhaustive {exact}, Monte Carlo {mc:.4f} (target 1/4 +- 0.01)")


def test_03_gromov_tail(report):
    tail = gromov_tail(MU, 400, 200, 12, 5000, SEED, fit_range=(2, 12))
    monotone = all(a >= b for a, b in zip(tail.counts, tail.counts[1:]))
    fit = tail.fit
    ok = monotone and fit.fitted and fit.slope < 0 and fit.r_squared >= 0.9
    report(3, "Gromov product tail", ok,
           f"monotone={monotone}, slope {fit.slope:.3f}, r2 {fit.r_squared:.3f} over r in {list(fit.used)}")


def test_04_shadow_decay(report):
    tail = shadow_tail(MU, 200, 0, range(1, 11), 100_000, SEED)
    slope = tail.fit.slope
    target = math.log(1 / 3)
    ok = tail.fit.fitted and abs(slope - target) <= 0.15
    report(4, "shadow decay", ok,
           f"slope {slope:.4f} vs log(1/3) = {target:.4f} (+-0.15), bins {list(tail.fit.used)}")


def test_05_schottky_soundness(report):
    trials = [schottky_trial(MU, 200, 2, 1, 4, seed, 0) for seed in range(500)]
    rate = sum(t.passed for t in trials) / len(trials)
    oracle_bad = sum(1 for t in trials if t.passed and not t.oracle_free)
    qi_bad = sum(1 for t in trials if t.passed and not t.qi_window)
    ok = rate >= 0.95 and oracle_bad == 0 and qi_bad == 0
    report(5, "Schottky soundness", ok,
           f"pass rate {rate:.3f} (target >= 0.95), pass-but-not-free {oracle_bad}, qi window violations {qi_bad}")


def test_06_translation_length(report):
    ratios = []
    for t in range(500):
        g = sample_path(MU, 1000, SEED, t).endpoint
        if len(g.word):
            ratios.append(translation_length_exact(g) / len(g.word))
    med = statistics.median(ratios)
    ok = med >= 0.9 and max(ratios) <= 1 and len(ratios) == 500
    report(6, "tau close to |gamma_n|", ok, f"median tau/d = {med:.4f}, max {max(ratios):.4f}, samples {len(ratios)}")


def test_07_self_match_decay(report):
    def largest(n):
        out = []
        for t in range(1000):
            w = sample_path(MU, n, SEED, t).endpoint.word
            out.append((longest_self_match(w).A, len(w)))
        return out

    at = {n: largest(n) for n in (500, 1000, 2000)}
    p_n = sum(1 for a, _ in at[1000] if a >= 0.1 * 1000) / 1000
    p_gamma = sum(1 for a, length in at[1000] if a >= 0.1 * length) / 1000
    med = {n: statistics.median(a for a, _ in v) for n, v in at.items()}
    ratio = med[2000] / med[500]
    ok = p_n <= 0.01 and p_gamma <= 0.01 and ratio <= 2.5
    report(7, "self-match decay", ok,
           f"P(A >= 0.1 n) = {p_n:.3f}, P(A >= 0.1 |gamma_n|) = {p_gamma:.3f}, medians {med}, ratio {ratio:.3f}")


def test_08_axis_overlap(report):
    ratios = []
    for t in range(500):
        g = sample_path(MU, 1000, SEED, t).endpoint
        over, total = geodesic_axis_overlap(g)
        ratios.append(over / total)
    med = statistics.median(ratios)
    report(8, "axis overlap", med >= 0.9, f"median overlap ratio {med:.4f} (target >= 0.9)")


def test_09_weak_asymmetry(report):
    verified = contradictions = hyperbolic = 0
    for t in range(500):
        g = sample_path(MU, 200, SEED, t).endpoint
        if not is_hyperbolic(g):
            continue
        hyperbolic += 1
        try:
            r = weak_asymmetry_report(g, 2)
        except AssertionError:
            contradictions += 1
            continue
        verified += r.verdict is Verdict.VERIFIED_WEAK
        contradictions += r.verdict is Verdict.VERIFIED_WEAK and r.exact is Asymmetry.NOT_WEAK
    frac = verified / 500
    ok = frac >= 0.95 and contradictions == 0
    report(9, "weak asymmetry", ok,
           f"verified_weak {frac:.3f} of 500 ({hyperbolic} hyperbolic), contradictions {contradictions}")


def test_10_extension_probability(report):
    ext = SplitExtension(2, 3, (-1, 1))
    mu = ProbabilityMeasure.uniform(ext)
    fracs = {}
    for n in (100, 101):
        strong = 0
        for t in range(2000):
            g = sample_path(mu, n, SEED, t).endpoint
            strong += is_hyperbolic(g) and classify_asymmetry(g) is Asymmetry.STRONG
        fracs[n] = strong / 2000
    ok = all(0.45 <= f <= 0.55 for f in fracs.values())
    report(10, "extension probability", ok, f"strong fractions {fracs}, target [0.45, 0.55] (1/|phi(G)| = 1/2)")


def test_11_geometric_separation(report):
    H, trials = separation_trials(MU, 300, 2, 1, 2, (50, 100, 200), 100, 20, SEED)
    plateau = sum(t.plateau for t in trials) / len(trials)
    # the non-separated subgroup <a^2> with g = a
    Ds = (50, 100, 200)
    diam = [geometric_separation([parse_word("aa")], parse_word("a"), 2, D).diameter for D in Ds]
    slopes = [(diam[1] - diam[0]) / (Ds[1] - Ds[0]), (diam[2] - diam[1]) / (Ds[2] - Ds[1])]
    linear = slopes[0] > 0 and abs(slopes[1] - slopes[0]) <= 0.05 * slopes[0]
    ok = plateau >= 0.95 and len(trials) == 100 and linear
    report(11, "geometric separation", ok,
           f"plateau {plateau:.3f} over {len(trials)} elements (|H gens| {[len(h) for h in H]}); "
           f"<a^2>, g=a diameters {diam} (slopes {slopes})")


def test_12_oracle_suites(report):
    bad = {}
    # conjugacy on all pairs of words of length <= 6 sharing a conjugacy class, plus random pairs
    words = list(all_reduced_words(2, 6))
    conj = set()
    n = 0
    rng = random.Random(SEED)
    for u in words[::7]:
        cls = conjugates_within(u, words, 6)
        for v in cls:
            n += 1
            conj.add(are_conjugate(u, v) is True)
        for v in rng.sample(words, 10):
            n += 1
            conj.add(are_conjugate(u, v) == (v in cls))
    bad["conjugacy"] = int(False in conj)

    # persistent decomposition vs the distance oracle
    dbad = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(1000):
            xs = random_chain(rng, rng.randint(1, 5))
            dec = persistent_decomposition(xs)
            b = concat_length_bounds(dec, 0)
            d = dist(dec.points[0], dec.points[-1])
            if b.hypothesis_met and not (b.lower == d == b.upper):
                dbad += 1
    bad["decomposition"] = dbad

    sbad = scases = 0
    while scases < 300:
        p = random_word(rng, 0, 2)
        q = random_word(rng, 0, 10)
        if dist(p, q) > 8:
            continue
        scases += 1
        K = rng.randint(0, 3)
        got = {h.word for h in k_stabilizer(p, q, K).group_elements}
        sbad += got != stabilizer(p, q, K)
    bad["stabilizer"] = sbad

    mbad = 0
    for _ in range(1000):
        w = random_word(rng, 0, 24)
        mbad += longest_self_match(w).A != self_match_length(w)
    for _ in range(300):
        u, v = random_word(rng, 0, 16), random_word(rng, 0, 16)
        mbad += longest_cross_match(u, v).A != cross_match_length(u, v)
    bad["matcher"] = mbad

    report(12, "oracle suites", not any(bad.values()),
           f"discrepancies {bad} (conjugacy checks {n}, stabilizer cases {scases})")
