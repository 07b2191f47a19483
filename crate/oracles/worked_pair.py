#!/usr/bin/env python3
"""Exact-arithmetic oracle for the worked conversion pair.

Recomputes every golden value used by the Rust test suites with
`fractions.Fraction`, using brute-force definitions only:

* majorization by direct partial-sum comparison,
* meet by pointwise minimum of cumulative sums,
* join by an O(d^3) chord search for the least concave majorant,
* optimal probability and ratio ladder by exhaustive enumeration,
* measurement branches by the Born rule on squared Kraus diagonals.

Run: python3 oracles/worked_pair.py  (prints JSON; compare with
oracles/worked_pair.expected.json)
"""
import json
from fractions import Fraction as F

PSI = [F(1, 2), F(2, 5), F(1, 10)]
PHI = [F(3, 5), F(1, 5), F(1, 5)]


def cumsum(v):
    out, acc = [F(0)], F(0)
    for x in v:
        acc += x
        out.append(acc)
    return out


def tail(v):
    """E_l for l = 1..d."""
    return [sum(v[l:], F(0)) for l in range(len(v))]


def majorized_by(p, q):
    sp, sq = cumsum(p), cumsum(q)
    return all(sp[k] <= sq[k] for k in range(len(sp))) and sp[-1] == sq[-1]


def order(p, q):
    a, b = majorized_by(p, q), majorized_by(q, p)
    return {(True, True): "equivalent", (True, False): "precedes",
            (False, True): "succeeds", (False, False): "incomparable"}[(a, b)]


def diffs(s):
    return [s[k] - s[k - 1] for k in range(1, len(s))]


def meet(p, q):
    sp, sq = cumsum(p), cumsum(q)
    return diffs([min(a, b) for a, b in zip(sp, sq)])


def join(p, q):
    sp, sq = cumsum(p), cumsum(q)
    t = [max(a, b) for a, b in zip(sp, sq)]
    n = len(t)
    env = []
    for k in range(n):
        best = t[k]
        for a in range(0, k + 1):
            for b in range(k, n):
                if a == b:
                    continue
                val = t[a] + (t[b] - t[a]) * (k - a) / (b - a)
                best = max(best, val)
        env.append(best)
    return diffs(env)


def p_max(src, tgt):
    es, et = tail(src), tail(tgt)
    return min(es[l] / et[l] for l in range(len(src)) if et[l] > 0)


def ladder(src, tgt):
    d = len(src)
    es, et = tail(src) + [F(0)], tail(tgt) + [F(0)]
    prev, rungs = d + 1, []
    while prev != 1:
        cands = []
        for l in range(1, prev):
            den = et[l - 1] - et[prev - 1]
            if den > 0:
                cands.append(((es[l - 1] - es[prev - 1]) / den, l))
        best = min(c[0] for c in cands)
        l = min(c[1] for c in cands if c[0] == best)
        rungs.append((best, l))
        prev = l
    return rungs


def r_vector(rungs, d):
    r, prev = [None] * d, d + 1
    for ratio, l in rungs:
        for i in range(l - 1, prev - 1):
            r[i] = ratio
        prev = l
    return r


def two_outcome(state, m_sq):
    succ = [m * x for m, x in zip(m_sq, state)]
    fail = [(1 - m) * x for m, x in zip(m_sq, state)]
    p = sum(succ, F(0))
    return p, sorted([x / p for x in succ], reverse=True), \
        sorted([x / (1 - p) for x in fail], reverse=True)


def fl(v):
    return [float(x) for x in v] if isinstance(v, list) else float(v)


def main():
    d = len(PSI)
    rungs = ladder(PSI, PHI)
    r = r_vector(rungs, d)
    chi = [a * b for a, b in zip(r, PHI)]
    m_sq = [rungs[0][0] / x for x in r]
    ocr, ocp = meet(PSI, PHI), join(PSI, PHI)
    zeta = [a * b for a, b in zip(r, ocr)]
    p_chi, succ_chi, xi = two_outcome(chi, m_sq)
    p_zeta, succ_zeta, nu = two_outcome(zeta, m_sq)
    targets = [PHI, [F(7, 10), F(1, 5), F(1, 10)]]
    assert sorted(chi, reverse=True) == chi and sum(chi) == 1
    assert majorized_by(PSI, chi) and majorized_by(PHI, chi)
    assert succ_chi == PHI and succ_zeta == ocr
    assert ladder(PSI, ocr) == rungs
    out = {
        "order": order(PSI, PHI),
        "monotones_psi": fl(tail(PSI)),
        "monotones_phi": fl(tail(PHI)),
        "p_max": fl(p_max(PSI, PHI)),
        "ladder": [[float(x), l] for x, l in rungs],
        "r_vector": fl(r),
        "chi": fl(chi),
        "meet": fl(ocr),
        "join": fl(ocp),
        "zeta": fl(zeta),
        "m_diag_sq": fl(m_sq),
        "success_prob_chi": fl(p_chi),
        "success_prob_zeta": fl(p_zeta),
        "xi": fl(xi),
        "nu": fl(nu),
        "nu_vs_xi": order(nu, xi),
        "zeta_vs_chi": order(zeta, chi),
        "multi_target_prob": fl(min(p_max(PSI, t) for t in targets)),
        "p_max_psi_to_second_target": fl(p_max(PSI, targets[1])),
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
