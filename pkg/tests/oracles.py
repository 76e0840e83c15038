"""Reference computations kept independent of the library's fast paths.

``brute_force_leakage`` walks the full joint law with plain Python loops:
every Bob erasure pattern, every set assignment Bob could draw, both choice
bits, every channel input, every Eve erasure pattern and every pair of
strings, with full-length views. Only the public code and hash are read
from the library.
"""

from __future__ import annotations

import math
from collections import defaultdict
from itertools import product

import mpmath

LABELS = ("G", "GS", "B", "BS")


def binomial_tail_mp(n: int, eps: float, threshold: int, dps: int = 60) -> float:
    """P[Bin(n, eps) >= threshold] with arbitrary-precision arithmetic."""
    mpmath.mp.dps = dps
    e = mpmath.mpf(eps)
    total = mpmath.mpf(0)
    for k in range(max(threshold, 0), n + 1):
        total += mpmath.binomial(n, k) * e**k * (1 - e) ** (n - k)
    return float(total)


def _assignments(n: int, m: int, s: int):
    """All labelings of positions by G, GS, B, BS or nothing with the right set sizes."""
    sizes = {"G": m, "GS": s, "B": m, "BS": s}
    out = []
    for labels in product((None,) + LABELS, repeat=n):
        if all(labels.count(k) == v for k, v in sizes.items()):
            out.append(labels)
    return out


def _allowed(labels, erased, regime) -> bool:
    for i, lab in enumerate(labels):
        if lab is None:
            continue
        if lab in ("G", "GS") and erased[i]:
            return False
        if lab == "B" and not erased[i]:
            return False
        if lab == "BS":
            if regime in (None, "erased") and not erased[i]:
                return False
            if regime == "unerased" and erased[i]:
                return False
    return True


def _h(d) -> float:
    total = sum(d.values())
    return -sum(w / total * math.log2(w / total) for w in d.values() if w > 0)


def _cond_h(joint: dict) -> float:
    """H(A | B) for a dict {(a, b): p}, in units of the dict's total mass."""
    pb = defaultdict(float)
    for (_, b), w in joint.items():
        pb[b] += w
    return _h(joint) - _h(pb)


def brute_force_leakage(n, m, s, eps1, eps2, regime, provisioned, hash_rows, code_rows):
    """The four leakage quantities, conditioned on J = 1.

    ``hash_rows`` is the k x s hash matrix and ``code_rows`` the k x m
    generator, both as lists of 0/1 lists. ``regime`` is None for 2p mode.
    Every view contains the published sets L, so I(T; V) is assembled as
    H(T) - sum_L P(L) H(T | V, L) to keep the tables small.
    """
    k = len(hash_rows)
    labelings = _assignments(n, m, s)

    def pad(x, t_idx, s_idx):
        xs = [x[i] for i in s_idx]
        key = [sum(hash_rows[r][j] * xs[j] for j in range(s)) % 2 for r in range(k)]
        ext = [sum(key[r] * code_rows[r][j] for r in range(k)) % 2 for j in range(m)]
        return tuple((x[t] + e) % 2 for t, e in zip(t_idx, ext))

    strings = list(product((0, 1), repeat=m))
    p_j1 = 0.0
    by_L = defaultdict(list)
    for bp in product((False, True), repeat=n):
        num_e = sum(bp)
        if not provisioned(num_e):
            continue
        pb = eps1**num_e * (1 - eps1) ** (n - num_e)
        p_j1 += pb
        ok = [lab for lab in labelings if _allowed(lab, bp, regime)]
        for lab in ok:
            sets = {name: tuple(i for i in range(n) if lab[i] == name) for name in LABELS}
            for c in (0, 1):
                if c == 0:
                    L = (sets["G"], sets["GS"], sets["B"], sets["BS"])
                else:
                    L = (sets["B"], sets["BS"], sets["G"], sets["GS"])
                by_L[L].append((pb / len(ok) / 2, bp, lab, c))

    names = ("i_c_given_aliceview", "i_kcbar_given_bob_eve", "i_kcbar_given_bob", "i_keys_choice_given_eve")
    marginals = {name: defaultdict(float) for name in names}
    cond = dict.fromkeys(names, 0.0)
    for L, items in by_L.items():
        tables = {name: defaultdict(float) for name in names}
        for w0, bp, lab, c in items:
            w0 /= p_j1
            for x in product((0, 1), repeat=n):
                p0 = pad(x, L[0], L[1])
                p1 = pad(x, L[2], L[3])
                y = tuple(None if bp[i] else x[i] for i in range(n))
                wx = w0 / 2**n
                for ep in product((False, True), repeat=n):
                    ne = sum(ep)
                    we = wx * eps2**ne * (1 - eps2) ** (n - ne)
                    if we == 0.0:
                        continue
                    z = tuple(None if ep[i] else x[i] for i in range(n))
                    for k0 in strings:
                        for k1 in strings:
                            w = we / len(strings) ** 2
                            kt0 = tuple(a ^ b for a, b in zip(k0, p0))
                            kt1 = tuple(a ^ b for a, b in zip(k1, p1))
                            kcbar = k1 if c == 0 else k0
                            tables["i_c_given_aliceview"][(c, (k0, k1, x, kt0, kt1))] += w
                            tables["i_kcbar_given_bob_eve"][(kcbar, (c, lab, y, z, kt0, kt1))] += w
                            tables["i_kcbar_given_bob"][(kcbar, (c, lab, y, kt0, kt1))] += w
                            tables["i_keys_choice_given_eve"][((k0, k1, c), (z, kt0, kt1))] += w
        for name in names:
            mass = sum(tables[name].values())
            cond[name] += mass * _cond_h(tables[name])
            for (a, _), w in tables[name].items():
                marginals[name][a] += w
    out = {name: _h(marginals[name]) - cond[name] for name in names}
    out["p_j1"] = p_j1
    return out


def brute_force_for(p) -> dict:
    """Run :func:`brute_force_leakage` on a ``ProtocolParams``."""
    from wiretap_ot.protocol import public_parameters

    pub = public_parameters(p)
    regime = None if p.active_regime is None else p.active_regime.value
    return brute_force_leakage(
        p.n,
        p.m,
        p.s,
        p.eps.eps1,
        p.eps.eps2,
        regime,
        p.provisioned,
        pub.hash.matrix.tolist(),
        pub.code.generator.tolist(),
    )
