"""Leakage of the protocol views, exactly at toy size and by Monte Carlo.

Four quantities are reported, all conditioned on J = 1:

* ``i_c_given_aliceview``     I(C; U) with U = (K0, K1, X^n, F)
* ``i_kcbar_given_bob_eve``   I(K_Cbar; V, W) for colluding Bob and Eve
* ``i_kcbar_given_bob``       I(K_Cbar; V) for Bob alone
* ``i_keys_choice_given_eve`` I(K0, K1, C; W) with W = (Z^n, F)

Exact enumeration
-----------------
The joint law is a mixture over the published sets L. Given L, the channel
input and Eve's erasures outside the union of L are independent of every
target and every other view component, and Bob's erasures outside the union
only matter through L. The enumerator therefore walks Bob's erasure
patterns once to get the law of (L, C, Bob's pattern on the union), then for
each L enumerates X, Eve's pattern, K0 and K1 on the union and sums
conditional entropies. Nothing is approximated.

Monte Carlo
-----------
Given L and an erasure pattern, the pads T_i xor S~_i are linear in X, so
the key leakage of one trial is ``|seen T bits| - rank`` of a small GF(2)
matrix and is computed exactly per trial. What is left to estimate is the
dependence of C on the published sets, done with a plug-in estimator on a
coarse feature (``L_ORDER_V1``: the relative order of the smallest index of
each of the four sets, 24 cells). Coarsening can only lower that part.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .. import gf2
from ..channel import ERASED
from ..errors import TooLarge
from ..info import bootstrap_mi_stderr, conditional_entropy_of_keys, entropy_of_keys, plugin_mutual_information
from ..keymat import expand
from ..protocol import (
    OrderedSets,
    Privacy,
    ProtocolParams,
    Regime,
    alice_compute_ot_keys,
    alice_secret_keys,
    public_parameters,
    run_protocol,
    trial_inputs,
    trial_params,
)

EXACT = "ExactEnumeration"
MONTE_CARLO = "PlugInMonteCarlo"
COARSENING = "L_ORDER_V1"
N_MAX_EXACT = 8
ATOM_BUDGET = 1e9

FIELDS = ("i_c_given_aliceview", "i_kcbar_given_bob_eve", "i_kcbar_given_bob", "i_keys_choice_given_eve")


@dataclass(frozen=True)
class LeakageReport:
    i_c_given_aliceview: float
    i_kcbar_given_bob_eve: float
    i_kcbar_given_bob: float
    i_keys_choice_given_eve: float
    method: str
    n: int
    m: int
    trials: int | None = None
    p_j1: float | None = None
    j1_trials: int | None = None
    stderr: dict | None = None
    coarsening: str | None = None
    params: dict = field(default_factory=dict)

    def per_bit(self, name: str = "i_keys_choice_given_eve") -> float:
        return getattr(self, name) / self.n

    def to_dict(self) -> dict:
        return asdict(self)


def _clip(v: float) -> float:
    if not math.isfinite(v):
        raise ArithmeticError(f"non-finite leakage value {v}")
    if v < -1e-9:
        raise ArithmeticError(f"mutual information came out negative: {v}")
    # tiny negative values are floating-point noise of an exact zero
    return max(0.0, v)


# ---------------------------------------------------------------------------
# exact enumeration


def _disjoint(pool: tuple, sizes: list[int]):
    """Ordered tuples of disjoint sorted subsets of ``pool`` with the given sizes."""
    if not sizes:
        yield ()
        return
    for first in combinations(pool, sizes[0]):
        rest = tuple(i for i in pool if i not in first)
        for tail in _disjoint(rest, sizes[1:]):
            yield (first,) + tail


def set_tuples(erased: tuple, unerased: tuple, p: ProtocolParams):
    """Every (G, B, G_S, B_S) Bob can draw; he picks one uniformly."""
    m, s, n = p.m, p.s, p.n
    regime = p.active_regime
    if regime is Regime.UNERASED:
        for g, g_s, b_s in _disjoint(unerased, [m, s, s]):
            for (b,) in _disjoint(erased, [m]):
                yield g, b, g_s, b_s
    elif regime is Regime.MIXED:
        for g, g_s in _disjoint(unerased, [m, s]):
            for (b,) in _disjoint(erased, [m]):
                used = set(g) | set(g_s) | set(b)
                rest = tuple(i for i in range(n) if i not in used)
                for (b_s,) in _disjoint(rest, [s]):
                    yield g, b, g_s, b_s
    else:
        for g, g_s in _disjoint(unerased, [m, s]):
            for b, b_s in _disjoint(erased, [m, s]):
                yield g, b, g_s, b_s


def _order(t: tuple, c: int) -> tuple:
    g, b, g_s, b_s = t
    return (g, g_s, b, b_s) if c == 0 else (b, b_s, g, g_s)


def _core_distribution(p: ProtocolParams):
    """Law of (L, C, Bob's erasure flags on the union of L) given J = 1."""
    n, e1 = p.n, p.eps.eps1
    groups: dict[tuple, dict[tuple, float]] = defaultdict(lambda: defaultdict(float))
    p_j1 = 0.0
    for pattern in range(1 << n):
        erased = tuple(i for i in range(n) if pattern >> i & 1)
        unerased = tuple(i for i in range(n) if not pattern >> i & 1)
        if not p.provisioned(len(erased)):
            continue
        w = e1 ** len(erased) * (1 - e1) ** len(unerased)
        if w == 0.0:
            continue
        p_j1 += w
        tuples = list(set_tuples(erased, unerased, p))
        share = w / len(tuples)
        for t in tuples:
            for c in (0, 1):
                L = _order(t, c)
                union = sorted(i for part in L for i in part)
                flags = tuple(bool(pattern >> i & 1) for i in union)
                groups[L][(c, flags)] += share / 2
    return groups, p_j1


def _group_atoms(L: tuple, entries: dict, p: ProtocolParams, public):
    """Atom arrays for one L: targets and view keys with their weights."""
    m, n, e2 = p.m, p.n, p.eps.eps2
    union = np.array(sorted(i for part in L for i in part))
    u = union.size
    ordered = OrderedSets(*(np.array(part, dtype=np.int64) for part in L))

    xs = ((np.arange(1 << u)[:, None] >> np.arange(u)) & 1).astype(np.uint8)
    x_full = np.zeros((xs.shape[0], n), dtype=np.uint8)
    x_full[:, union] = xs
    t0, t1 = alice_compute_ot_keys(x_full, ordered)
    s0, s1 = alice_secret_keys(x_full, ordered, public)
    weights_m = 1 << np.arange(m)
    pad0 = ((t0 ^ expand(public.code, s0)).astype(np.int64) @ weights_m)
    pad1 = ((t1 ^ expand(public.code, s1)).astype(np.int64) @ weights_m)

    pow3 = 3 ** np.arange(u, dtype=np.int64)
    eve = ((np.arange(1 << u)[:, None] >> np.arange(u)) & 1).astype(bool)
    eve_w = e2 ** eve.sum(1) * (1 - e2) ** (u - eve.sum(1))
    z_code = np.where(eve[None, :, :], 2, xs[:, None, :]).astype(np.int64) @ pow3  # (X, E)

    km = 1 << m
    k0 = np.arange(km)[:, None]
    k1 = np.arange(km)[None, :]
    kt0 = k0[None] ^ pad0[:, None, None]  # (X, K0, 1)
    kt1 = k1[None] ^ pad1[:, None, None]  # (X, 1, K1)
    kt = (kt0 * km + kt1)  # (X, K0, K1)

    nx, ne = xs.shape[0], eve.shape[0]
    shape = (nx, ne, km, km)
    x_idx = np.broadcast_to(np.arange(nx)[:, None, None, None], shape)
    k0b = np.broadcast_to(k0[None, None], shape)
    k1b = np.broadcast_to(k1[None, None], shape)
    ktb = np.broadcast_to(kt[:, None], shape)
    zb = np.broadcast_to(z_code[:, :, None, None], shape)
    base_w = np.broadcast_to(eve_w[None, :, None, None], shape) / (nx * km * km)

    out = defaultdict(list)
    for (c, flags), w in entries.items():
        bob = np.array(flags, dtype=bool)
        y_code = np.where(bob[None, :], 2, xs).astype(np.int64) @ pow3
        yb = np.broadcast_to(y_code[:, None, None, None], shape)
        kcbar = k1b if c == 0 else k0b
        out["w"].append((base_w * w).ravel())
        out["c"].append(np.full(base_w.size, c, dtype=np.int64))
        out["kcbar"].append(kcbar.ravel())
        out["keys_c"].append(((k0b * km + k1b) * 2 + c).ravel())
        out["alice"].append(((x_idx * km + k0b) * km + k1b).ravel() * (km * km) + ktb.ravel())
        out["bob"].append(((c * 3**u + yb) * km * km + ktb).ravel())
        out["bob_eve"].append((((c * 3**u + yb) * 3**u + zb) * km * km + ktb).ravel())
        out["eve"].append((zb * km * km + ktb).ravel())
    return {k: np.concatenate(v) for k, v in out.items()}


def exact_leakage(
    p: ProtocolParams, n_max_exact: int = N_MAX_EXACT, budget: float = ATOM_BUDGET
) -> LeakageReport:
    """Exact leakage by enumerating the full joint law conditioned on J = 1.

    Public code and hash are fixed by ``p``'s public seed; all private
    randomness, channel noise, C, K0 and K1 are averaged over.

    Raises
    ------
    TooLarge
        If ``n > n_max_exact``, ``m > 2`` or the atom count exceeds ``budget``.
    """
    if p.n > n_max_exact:
        raise TooLarge(f"n = {p.n} exceeds the exact-enumeration limit {n_max_exact}")
    if p.m > 2:
        raise TooLarge(f"string length m = {p.m} exceeds 2")
    public = public_parameters(p)
    groups, p_j1 = _core_distribution(p)
    if p_j1 == 0.0:
        raise ValueError("J = 1 has probability zero for these parameters")

    km = 1 << p.m
    u = 2 * (p.m + p.s)
    atoms = sum(len(e) for e in groups.values()) * (4**u) * km * km
    if atoms > budget:
        raise TooLarge(f"{atoms:.3g} atoms exceed the budget {budget:.3g}")

    targets = {"c": 2, "kcbar": km, "keys_c": km * km * 2}
    marg = {name: np.zeros(size) for name, size in targets.items()}
    cond = dict.fromkeys(FIELDS, 0.0)
    pairs = {
        "i_c_given_aliceview": ("c", "alice"),
        "i_kcbar_given_bob_eve": ("kcbar", "bob_eve"),
        "i_kcbar_given_bob": ("kcbar", "bob"),
        "i_keys_choice_given_eve": ("keys_c", "eve"),
    }
    for L in sorted(groups):
        entries = groups[L]
        a = _group_atoms(L, entries, p, public)
        wg = a["w"].sum()
        for name, size in targets.items():
            marg[name] += np.bincount(a[name], weights=a["w"], minlength=size) / p_j1
        for fname, (tname, vname) in pairs.items():
            h = conditional_entropy_of_keys(a[tname], a[vname], a["w"], targets[tname])
            cond[fname] += wg / p_j1 * h

    def h(mass):
        return entropy_of_keys(np.arange(mass.size), mass)

    values = {f: _clip(float(h(marg[pairs[f][0]]) - cond[f])) for f in FIELDS}
    return LeakageReport(
        **values, method=EXACT, n=p.n, m=p.m, trials=None, p_j1=p_j1, params=p.to_dict()
    )


# ---------------------------------------------------------------------------
# Monte Carlo


def pad_leak(lt: np.ndarray, ls: np.ndarray, known: np.ndarray, pad_rows: np.ndarray) -> int:
    """Bits of information an observer of ``known`` positions has about one pad.

    The pad is ``x[lt] xor x[ls] @ pad_rows`` with ``lt`` and ``ls`` sorted.
    """
    seen_t = known[lt]
    hidden_s = ~known[ls]
    sub = pad_rows[hidden_s][:, seen_t]
    return int(seen_t.sum()) - (gf2.rank(sub) if sub.size else 0)


def l_order_feature(L: OrderedSets) -> int:
    """``L_ORDER_V1``: rank pattern of the four sets' smallest indices, 0..23."""
    mins = [int(part.min()) for part in L.as_tuple()]
    perm = np.argsort(mins, kind="stable")
    code, pool = 0, list(range(4))
    for v in perm:
        i = pool.index(int(v))
        code = code * len(pool) + i
        pool.pop(i)
    return code


def monte_carlo_leakage(
    p: ProtocolParams, trials: int, bootstrap: int = 200
) -> LeakageReport:
    """Monte Carlo estimates with standard errors; deterministic given ``p.seed``.

    Trial t runs with :func:`trial_params` and :func:`trial_inputs`, so the
    public code and hash are shared by all trials.
    """
    if trials < 1000:
        raise ValueError("Monte Carlo leakage needs at least 1000 trials")
    public = public_parameters(p)
    rows = public.pad_rows
    q_eve, q_bob_eve, q_bob, cs, feats = [], [], [], [], []
    for t in range(trials):
        c, k0, k1 = trial_inputs(p, t)
        out = run_protocol(trial_params(p, t), c, k0, k1, public)
        if out.J == 0:
            continue
        L = out.ordered
        eve_known = out.views.eve.z != ERASED
        bob_known = out.views.bob.y != ERASED
        q_eve.append(pad_leak(L.L00, L.L01, eve_known, rows) + pad_leak(L.L10, L.L11, eve_known, rows))
        lt, ls = (L.L10, L.L11) if c == 0 else (L.L00, L.L01)
        q_bob_eve.append(pad_leak(lt, ls, eve_known | bob_known, rows))
        q_bob.append(pad_leak(lt, ls, bob_known, rows))
        cs.append(c)
        feats.append(l_order_feature(L))

    j1 = len(cs)
    rng = np.random.default_rng(np.random.SeedSequence([p.seed, 0x5EED]))

    def mean_se(v):
        if j1 == 0:
            return 0.0, 0.0
        arr = np.asarray(v, dtype=float)
        return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(j1)) if j1 > 1 else 0.0

    if j1:
        i_c = max(0.0, plugin_mutual_information(np.array(cs), np.array(feats)))
        se_c = bootstrap_mi_stderr(np.array(cs), np.array(feats), rng, bootstrap)
    else:
        i_c, se_c = 0.0, 0.0
    eve_mean, eve_se = mean_se(q_eve)
    be_mean, be_se = mean_se(q_bob_eve)
    b_mean, b_se = mean_se(q_bob)
    return LeakageReport(
        i_c_given_aliceview=i_c,
        i_kcbar_given_bob_eve=be_mean,
        i_kcbar_given_bob=b_mean,
        i_keys_choice_given_eve=i_c + eve_mean,
        method=MONTE_CARLO,
        n=p.n,
        m=p.m,
        trials=trials,
        p_j1=j1 / trials,
        j1_trials=j1,
        stderr={
            "i_c_given_aliceview": se_c,
            "i_kcbar_given_bob_eve": be_se,
            "i_kcbar_given_bob": b_se,
            "i_keys_choice_given_eve": math.hypot(se_c, eve_se),
        },
        coarsening=COARSENING,
        params=p.to_dict(),
    )
