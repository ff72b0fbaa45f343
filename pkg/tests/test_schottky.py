import json
import math
import random

import pytest

from hyperlab.exceptions import BudgetExceeded
from hyperlab.models import FreeTree, HalfPlane, Mat, SplitExtension
from hyperlab.schottky import (
    FAIL,
    PASS,
    UNMET,
    audit_random_subgroup,
    check_conditions,
    check_gromov_bounds,
    evaluate,
    find_large_match,
    find_unmatched_violations,
    freeness_oracle,
    qi_deviation,
    rescaled_distance,
    symmetric_closure,
)
from hyperlab.walker import ProbabilityMeasure, sample_path
from hyperlab.words import IDENTITY, all_reduced_words, invert, parse_word, reduce

P = parse_word
F2 = FreeTree(2)
MU = ProbabilityMeasure.uniform(F2)
A6, B6 = F2.element("a" * 6), F2.element("b" * 6)


def walk_gens(seed, n=200, k=2):
    return [sample_path(MU, n, seed, trial=0, lane=i).endpoint for i in range(k)]


# -------------------------------------------------------------- certificates


def test_certificate_examples():
    c = check_conditions([A6, B6], 1)
    assert c.status == PASS and c.max_gromov_product == 0
    assert dict(c.lengths) == {"g1": 6, "g1^-1": 6, "g2": 6, "g2^-1": 6}
    bad = check_conditions([A6, F2.element("aaaaab")], 1)
    assert bad.status == FAIL and bad.max_gromov_product == 5


def test_duplicate_generators_rejected():
    with pytest.raises(ValueError):
        check_conditions([A6, A6], 1)
    with pytest.raises(ValueError):
        check_conditions([A6, A6.inverse()], 1)
    with pytest.raises(ValueError):
        check_conditions([], 1)
    assert [name for name, _ in symmetric_closure([A6])] == ["g1", "g1^-1"]


def test_threshold_gives_hypothesis_unmet():
    assert check_conditions([A6, B6], 0.5).status == UNMET
    sl = HalfPlane()
    m = [Mat(1, 2, 0, 1), Mat(1, 0, 2, 1)]
    c = check_conditions(m, 1, sl)
    assert c.status == UNMET and c.K0 == pytest.approx(12.0)
    assert c.qi_additive == pytest.approx(2 + 4 * sl.delta)
    ext = SplitExtension(2, 3, (-1, 1))
    assert check_conditions([ext.element("aaaaaa"), ext.element("bbbbbb", 1)], 1).status == PASS


def test_certificate_json_roundtrip():
    c = check_conditions([A6, B6], 1)
    d = json.loads(c.to_json())
    assert d["pass"] is True and d["K"] == 1 and d["qi_multiplicative"] == 6
    assert d["gromov_products"]["g1,g2"] == 0
    assert d["generators"] == ["aaaaaa", "bbbbbb"]


def test_rescaled_distance_examples():
    c = check_conditions([A6, B6], 1)
    assert rescaled_distance(c, P("ab")) == 12
    assert rescaled_distance(c, IDENTITY) == 0
    assert rescaled_distance(c, P("Aba")) == 18
    with pytest.raises(ValueError):
        rescaled_distance(c, P("abc"))
    with pytest.raises(ValueError):
        rescaled_distance(check_conditions([A6, F2.element("aaaaab")], 1), P("a"))


def test_qi_deviation_examples():
    c = check_conditions([A6, B6], 1)
    q = qi_deviation(c, 4)
    assert (q.worst_ratio, q.worst_gap, q.window_ok, q.lower_ok) == (1.0, 0.0, True, True)
    assert q.words_checked == 4 + 12 + 36 + 108
    single = qi_deviation(check_conditions([A6], 1), 5)
    assert single.worst_gap == 0 and single.words_checked == 5 * 2


def test_freeness_oracle_examples():
    a = F2.element("a")
    assert not freeness_oracle([a, F2.element("aa")], 3)
    assert freeness_oracle([A6, B6], 5)


def test_freeness_oracle_against_word_collisions():
    # <x, y> with x = ab, y = ba is free; x = ab, y = abab is not
    assert freeness_oracle([F2.element("ab"), F2.element("ba")], 6)
    assert not freeness_oracle([F2.element("ab"), F2.element("abab")], 2)


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        freeness_oracle([A6, B6], 13)
    c = check_conditions([A6, B6], 1)
    with pytest.raises(BudgetExceeded):
        qi_deviation(c, 13)


def test_evaluate_matches_direct_product():
    gens = [F2.element("ab"), F2.element("bbA")]
    for w in all_reduced_words(2, 4):
        direct = F2.identity()
        for c in w.letters:
            g = gens[c >> 1]
            direct = direct * (g.inverse() if c & 1 else g)
        assert evaluate(gens, w) == direct


def test_soundness_pairing_on_random_walks():
    passes = 0
    for seed in range(60):
        gens = walk_gens(seed)
        c = check_conditions(gens, 1)
        if c.passed:
            passes += 1
            assert freeness_oracle(gens, 4)
            q = qi_deviation(c, 4)
            assert q.window_ok and q.lower_ok
    assert passes > 20


def test_plane_certificate_is_sound():
    # fifth powers of two hyperbolic matrices with transverse axes
    sl = HalfPlane(K0=1.5)
    g, h = Mat(2, 1, 1, 1), Mat(2, -1, -1, 1)
    g5, h5 = g * g * g * g * g, h * h * h * h * h
    c = check_conditions([g5, h5], 1.5, sl)
    assert c.passed and c.max_gromov_product < 1
    assert freeness_oracle([g5, h5], 4)
    q = qi_deviation(c, 4)
    assert q.lower_ok and q.window_ok


# ------------------------------------------------------------------- audit


def test_audit_point_mass_length_bounds():
    pm = ProbabilityMeasure.point_mass(F2, F2.element("a"))
    a = audit_random_subgroup([sample_path(pm, 100, 0)], 0.1, [1.0])
    assert a.length_bounds and a.Ln == 100


def test_audit_duplicate_path_fails_large_match():
    p = sample_path(MU, 300, 5)
    a = audit_random_subgroup([p, p], 0.1, [0.5, 0.5])
    assert not a.no_large_match and not a.all_pass
    assert (1, 2) in a.witnesses["large_match"]


def test_audit_input_validation():
    with pytest.raises(ValueError):
        audit_random_subgroup([], 0.1, [])
    with pytest.raises(ValueError):
        audit_random_subgroup([(P("ab"), 4)], 0.1, [0.5, 0.5])


def test_audit_random_walks_mostly_pass():
    ok = 0
    for seed in range(20):
        paths = [sample_path(MU, 2000, seed, lane=i) for i in range(2)]
        a = audit_random_subgroup(paths, 0.1, [0.5, 0.5])
        ok += a.all_pass
    assert ok >= 16


def brute_gromov_bounds(words, bound):
    gs = [w for x in words for w in (x, invert(x))]
    for x in range(len(gs)):
        for y in range(x + 1, len(gs)):
            k = 0
            while k < min(len(gs[x]), len(gs[y])) and gs[x].letters[k] == gs[y].letters[k]:
                k += 1
            if k > bound:
                return False
    return True


def test_gromov_bounds_against_prefix_scan():
    rng = random.Random(1)
    for _ in range(300):
        ws = [reduce(rng.randrange(4) for _ in range(rng.randint(1, 10))) for _ in range(3)]
        ws = [w for w in ws if w]
        b = rng.randint(0, 4)
        assert check_gromov_bounds(ws, b)[0] == brute_gromov_bounds(ws, b)


def brute_large_match(words, eL):
    out = []
    for j, wj in enumerate(words, start=1):
        lo, hi = math.ceil(eL - 1e-9), math.floor(len(wj) - eL + 1e-9)
        mid = wj.letters[lo:hi] if hi > lo else ()
        for i, wi in enumerate(words, start=1):
            if i == j:
                continue
            for cand in (wi.letters, invert(wi).letters):
                if any(cand[s:s + len(mid)] == mid for s in range(len(cand) - len(mid) + 1)):
                    out.append((j, i))
                    break
    return out


def test_large_match_against_scan():
    rng = random.Random(2)
    for _ in range(400):
        base = reduce(rng.randrange(4) for _ in range(rng.randint(4, 14)))
        ws = [base, reduce(list(base.letters[2:]) + [rng.randrange(4) for _ in range(3)]),
              reduce(rng.randrange(4) for _ in range(rng.randint(1, 12)))]
        ws = [w for w in ws if w]
        eL = rng.choice([0.5, 1, 2, 3.5])
        assert sorted(find_large_match(ws, eL)) == sorted(brute_large_match(ws, eL))


def brute_unmatched(words, K):
    """Triples ``(i, i', j)`` for which some eta(i, i', K, l) with l beyond the
    cancellation occurs, either way round, in gamma_j starting at offset <= K."""
    gs = []
    for i, w in enumerate(words, start=1):
        gs += [(i, w), (-i, invert(w))]
    bad = set()
    for i, wi in gs:
        for ip, wip in gs:
            if i == -ip or K > len(wip):
                continue
            a, b = wi.letters, wip.letters
            cancel = 0
            while cancel < min(len(a), len(b)) and a[-1 - cancel] ^ 1 == b[cancel]:
                cancel += 1
            c = min(cancel, K)
            etas = []
            for ell in range(c + 1, len(a) + 1):
                eta = reduce(list(a[len(a) - ell:]) + list(b[:K]))
                etas += [eta.letters, invert(eta).letters]
            for j, wj in gs:
                if abs(i) > abs(j) or abs(ip) > abs(j):
                    continue
                g = wj.letters
                hit = any(g[t:t + len(e)] == e for e in etas for t in range(0, min(K, len(g) - len(e)) + 1))
                if hit:
                    bad.add((i, ip, j))
    return bad


def test_unmatched_against_eta_enumeration():
    rng = random.Random(3)
    hits = 0
    for _ in range(600):
        k = rng.choice([1, 2])
        ws = [reduce(rng.randrange(4) for _ in range(rng.randint(1, 9))) for _ in range(k)]
        ws = [w for w in ws if w]
        if not ws:
            continue
        K = rng.randint(0, 4)
        got = {(i, ip, j) for i, ip, j, _, _ in find_unmatched_violations(ws, K)}
        want = brute_unmatched(ws, K)
        assert got == want, (ws, K)
        hits += bool(want)
    assert hits > 50
