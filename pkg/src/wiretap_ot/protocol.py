"""1-of-2 string oblivious transfer over the wiretapped erasure channel.

One run: Alice sends i.i.d. uniform bits, Bob sorts positions into a good
set G and secret-key set G_S (unerased for him) and a bad set B and bad
secret-key set B_S, then reveals them to Alice in an order fixed by his choice
bit C. Alice pads each string with the channel bits of one set and with an
expanded secret key hashed from the bits of another, and publishes both
ciphertexts. Bob knows the pads on the C side only.

In 1-privacy mode the location of B_S depends on the channel regime; see
:func:`regime_for`. Failure to provision the sets (J = 0) aborts the run.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache

import numpy as np

from . import transcript as tx
from .channel import ERASED, ChannelParams, as_bits, erasure_partition, transmit_broadcast
from .errors import InsufficientErasures, InsufficientUnerasures, ProvisioningError
from .keymat import (
    HashSpec,
    KeyMaterial,
    LinearCode,
    build_key_material,
    cached_code,
    decrypt_string,
    derive_secret_key,
    expand,
)

# real-valued set sizes are rounded up; the slack keeps e.g. 2000 * 0.2 at 400
_CEIL_SLACK = 1e-9


def _ceil(x: float) -> int:
    return int(math.ceil(x - _CEIL_SLACK))


class Privacy(str, enum.Enum):
    TWO = "2p"
    ONE = "1p"


class Regime(str, enum.Enum):
    """Where Bob draws B_S from in 1-privacy mode."""

    UNERASED = "unerased"  # eps1 < eps2 / 2
    MIXED = "mixed"  # eps2 / 2 <= eps1 < 1 / 2
    ERASED = "erased"  # eps1 >= 1 / 2


def regime_for(eps: ChannelParams) -> Regime:
    if eps.eps1 < eps.eps2 / 2:
        return Regime.UNERASED
    if eps.eps1 < 0.5:
        return Regime.MIXED
    return Regime.ERASED


@dataclass(frozen=True)
class ProtocolParams:
    """Blocklength, rate and slack of one protocol instance.

    ``seed`` drives the private randomness of Alice, Bob and the channel;
    ``public_seed`` (defaulting to ``seed``) fixes the public code and hash.
    ``regime`` overrides the automatic 1-privacy regime.
    """

    n: int
    r: float
    delta: float
    eps: ChannelParams
    mode: Privacy = Privacy.TWO
    seed: int = 0
    public_seed: int | None = None
    regime: Regime | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Privacy(self.mode))
        if self.regime is not None:
            object.__setattr__(self, "regime", Regime(self.regime))
        if self.n < 1:
            raise ValueError("blocklength n must be positive")
        if not self.r > 0:
            raise ValueError("rate r must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.eps.eps2 <= 0:
            raise ValueError("eps2 must be positive: no secret key is possible when Eve sees everything")
        if self.m > self.n:
            raise ValueError(f"string length {self.m} exceeds blocklength {self.n}")

    @property
    def eps2_tilde(self) -> float:
        return self.eps.eps2 * (1 - self.delta)

    @property
    def m(self) -> int:
        """String length, ceil(n r)."""
        return _ceil(self.n * self.r)

    @property
    def s(self) -> int:
        """Size of each secret-key index set, ceil(n r (1 - e~2) / e~2)."""
        et = self.eps2_tilde
        return _ceil(self.n * self.r * (1 - et) / et)

    @property
    def k(self) -> int:
        """Secret-key length, ceil(n r (1 - e~2))."""
        return _ceil(self.n * self.r * (1 - self.eps2_tilde))

    @property
    def active_regime(self) -> Regime | None:
        if self.mode is Privacy.TWO:
            return None
        return self.regime if self.regime is not None else regime_for(self.eps)

    @property
    def effective_public_seed(self) -> int:
        return self.seed if self.public_seed is None else self.public_seed

    def required_pools(self) -> tuple[int, int, int]:
        """Minimum (erased, unerased, total) counts Bob needs."""
        m, s = self.m, self.s
        regime = self.active_regime
        if regime is Regime.UNERASED:
            return m, m + 2 * s, 2 * m + 2 * s
        if regime is Regime.MIXED:
            return m, m + s, 2 * m + 2 * s
        return m + s, m + s, 2 * m + 2 * s

    def provisioned(self, num_erased: int) -> bool:
        """The indicator J as a function of how many positions Bob saw erased."""
        need_e, need_u, need_total = self.required_pools()
        return num_erased >= need_e and self.n - num_erased >= need_u and self.n >= need_total

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "delta": self.delta,
            "eps1": self.eps.eps1,
            "eps2": self.eps.eps2,
            "mode": self.mode.value,
            "seed": self.seed,
            "public_seed": self.public_seed,
            "regime": None if self.regime is None else self.regime.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolParams":
        return cls(
            n=int(d["n"]),
            r=float(d["r"]),
            delta=float(d["delta"]),
            eps=ChannelParams(d["eps1"], d["eps2"]),
            mode=Privacy(d.get("mode", "2p")),
            seed=int(d.get("seed", 0)),
            public_seed=None if d.get("public_seed") is None else int(d["public_seed"]),
            regime=None if d.get("regime") is None else Regime(d["regime"]),
        )


@dataclass(frozen=True)
class PublicParameters:
    """Code and hash known to all parties, plus the seeds that produced them."""

    code: LinearCode
    hash: HashSpec
    code_seed: int
    hash_seed: int

    @cached_property
    def pad_rows(self) -> np.ndarray:
        """``s x m`` matrix whose row t is the expanded hash of unit vector e_t.

        The secret-key part of a pad is ``x_restricted @ pad_rows``.
        """
        return expand(self.code, self.hash.matrix.T)


@lru_cache(maxsize=64)
def _public_parameters(m: int, s: int, k: int, public_seed: int) -> PublicParameters:
    code_seed, hash_seed = (
        int(v) for v in np.random.SeedSequence(public_seed).generate_state(2, dtype=np.uint64)
    )
    return PublicParameters(cached_code(k, m, code_seed), HashSpec(k, s, hash_seed), code_seed, hash_seed)


def public_parameters(p: ProtocolParams) -> PublicParameters:
    return _public_parameters(p.m, p.s, p.k, p.effective_public_seed)


@dataclass(frozen=True)
class IndexSets:
    G: np.ndarray
    B: np.ndarray
    G_S: np.ndarray
    B_S: np.ndarray

    def as_tuple(self) -> tuple[np.ndarray, ...]:
        return self.G, self.B, self.G_S, self.B_S


@dataclass(frozen=True)
class OrderedSets:
    L00: np.ndarray
    L01: np.ndarray
    L10: np.ndarray
    L11: np.ndarray

    def as_tuple(self) -> tuple[np.ndarray, ...]:
        return self.L00, self.L01, self.L10, self.L11

    def as_index_sets(self) -> IndexSets:
        """Read (L00, L01, L10, L11) back as (G, G_S, B, B_S)."""
        return IndexSets(G=self.L00, G_S=self.L01, B=self.L10, B_S=self.L11)


def _draw(pool: np.ndarray, sizes: list[int], rng: np.random.Generator) -> list[np.ndarray]:
    perm = rng.permutation(pool)
    out, start = [], 0
    for size in sizes:
        out.append(np.sort(perm[start : start + size]))
        start += size
    return out


def bob_select_sets(
    y: np.ndarray,
    p: ProtocolParams,
    regime: Regime | None = None,
    rng: np.random.Generator | None = None,
) -> IndexSets:
    """Draw G, B, G_S, B_S uniformly without replacement from their pools.

    Raises
    ------
    InsufficientErasures, InsufficientUnerasures
        When a pool is too small; this is the J = 0 event.
    """
    y = np.asarray(y)
    if y.size != p.n:
        raise ValueError(f"received string has length {y.size}, expected {p.n}")
    if rng is None:
        rng = np.random.default_rng(p.seed)
    if p.mode is Privacy.ONE and regime is None:
        regime = p.active_regime
    if p.mode is Privacy.TWO:
        regime = None
    m, s = p.m, p.s
    erased, unerased = erasure_partition(y)

    def need(pool, count, exc):
        if pool.size < count:
            raise exc(f"need {count} positions, Bob has {pool.size}")

    if regime is Regime.UNERASED:
        need(erased, m, InsufficientErasures)
        need(unerased, m + 2 * s, InsufficientUnerasures)
        g, g_s, b_s = _draw(unerased, [m, s, s], rng)
        (b,) = _draw(erased, [m], rng)
    elif regime is Regime.MIXED:
        need(erased, m, InsufficientErasures)
        need(unerased, m + s, InsufficientUnerasures)
        if p.n - 2 * m - s < s:
            raise InsufficientErasures(f"fewer than {s} positions left for B_S")
        g, g_s = _draw(unerased, [m, s], rng)
        (b,) = _draw(erased, [m], rng)
        used = np.zeros(p.n, dtype=bool)
        used[np.concatenate([g, g_s, b])] = True
        (b_s,) = _draw(np.flatnonzero(~used), [s], rng)
    else:
        need(erased, m + s, InsufficientErasures)
        need(unerased, m + s, InsufficientUnerasures)
        g, g_s = _draw(unerased, [m, s], rng)
        b, b_s = _draw(erased, [m, s], rng)
    return IndexSets(G=g, B=b, G_S=g_s, B_S=b_s)


def bob_order_sets(sets: IndexSets, c: int) -> OrderedSets:
    """C = 0 publishes (G, G_S, B, B_S); C = 1 publishes (B, B_S, G, G_S)."""
    if c == 0:
        return OrderedSets(sets.G, sets.G_S, sets.B, sets.B_S)
    if c == 1:
        return OrderedSets(sets.B, sets.B_S, sets.G, sets.G_S)
    raise ValueError(f"choice bit must be 0 or 1, got {c}")


def alice_compute_ot_keys(x: np.ndarray, L: OrderedSets) -> tuple[np.ndarray, np.ndarray]:
    """OT keys T0 = x on L00 and T1 = x on L10 (ascending index order)."""
    x = np.asarray(x, dtype=np.uint8)
    return x[..., np.sort(L.L00)], x[..., np.sort(L.L10)]


def alice_secret_keys(
    x: np.ndarray, L: OrderedSets, public: PublicParameters
) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.uint8)
    h = public.hash
    return (
        derive_secret_key(x[..., np.sort(L.L01)], h.rows, h),
        derive_secret_key(x[..., np.sort(L.L11)], h.rows, h),
    )


@dataclass(frozen=True)
class AliceView:
    k0: np.ndarray
    k1: np.ndarray
    randomness: np.ndarray  # X^n
    transcript: tx.Transcript


@dataclass(frozen=True)
class BobView:
    c: int
    randomness: IndexSets | None  # the sets Bob drew; None when provisioning failed
    transcript: tx.Transcript
    y: np.ndarray


@dataclass(frozen=True)
class EveView:
    transcript: tx.Transcript
    z: np.ndarray


@dataclass(frozen=True)
class Views:
    alice: AliceView
    bob: BobView
    eve: EveView


@dataclass(frozen=True)
class ProtocolOutcome:
    J: int
    khat_c: np.ndarray | None  # None is the abort outcome
    views: Views
    keymat: KeyMaterial | None = None
    ordered: OrderedSets | None = None
    public: PublicParameters | None = field(default=None, repr=False)

    @property
    def aborted(self) -> bool:
        return self.khat_c is None


def _private_rngs(seed: int) -> tuple[np.random.Generator, ...]:
    alice, channel, bob = np.random.SeedSequence(seed).spawn(3)
    return (
        np.random.default_rng(alice),
        np.random.default_rng(channel),
        np.random.default_rng(bob),
    )


def run_protocol(
    p: ProtocolParams,
    c: int,
    k0,
    k1,
    public: PublicParameters | None = None,
) -> ProtocolOutcome:
    """Run the protocol once; the outcome depends only on the arguments."""
    if c not in (0, 1):
        raise ValueError(f"choice bit must be 0 or 1, got {c}")
    k0 = as_bits(k0, p.m)
    k1 = as_bits(k1, p.m)
    public = public_parameters(p) if public is None else public
    alice_rng, channel_rng, bob_rng = _private_rngs(p.seed)

    x = alice_rng.integers(0, 2, size=p.n, dtype=np.uint8)
    y, z = transmit_broadcast(x, p.eps, channel_rng)

    transcript = tx.Transcript()
    transcript.append(
        tx.ALICE,
        tx.encode_public_header(p.n, p.m, p.s, p.k, public.code_seed, public.hash_seed),
    )

    try:
        sets = bob_select_sets(y, p, rng=bob_rng)
    except ProvisioningError:
        transcript.append(tx.BOB, tx.ABORT_PAYLOAD)
        views = Views(
            AliceView(k0, k1, x, transcript),
            BobView(c, None, transcript, y),
            EveView(transcript, z),
        )
        return ProtocolOutcome(0, None, views, public=public)

    L = bob_order_sets(sets, c)
    transcript.append(tx.BOB, tx.encode_ordered_sets(L.as_tuple()))

    t0, t1 = alice_compute_ot_keys(x, L)
    s0, s1 = alice_secret_keys(x, L, public)
    keymat = build_key_material(t0, t1, s0, s1, public.code, k0, k1)
    transcript.append(tx.ALICE, tx.encode_bits(keymat.Ktilde0))
    transcript.append(tx.ALICE, tx.encode_bits(keymat.Ktilde1))

    khat = bob_decode(y, sets, c, transcript, public)
    views = Views(
        AliceView(k0, k1, x, transcript),
        BobView(c, sets, transcript, y),
        EveView(transcript, z),
    )
    return ProtocolOutcome(1, khat, views, keymat, L, public)


def bob_decode(
    y: np.ndarray, sets: IndexSets, c: int, transcript: tx.Transcript, public: PublicParameters
) -> np.ndarray:
    """Bob's estimate of K_C from his received bits and the two ciphertexts."""
    ktilde, _ = tx.decode_bits(transcript[2 + c].payload)
    t_c = y[sets.G]
    bits_s = y[sets.G_S]
    if np.any(t_c == ERASED) or np.any(bits_s == ERASED):
        raise AssertionError("Bob's good sets contain erased positions")
    s_c = derive_secret_key(bits_s.astype(np.uint8), public.hash.rows, public.hash)
    return decrypt_string(ktilde, t_c.astype(np.uint8), expand(public.code, s_c))


def trial_params(p: ProtocolParams, trial: int) -> ProtocolParams:
    """Parameters of trial ``trial`` of an experiment seeded by ``p.seed``.

    Trials share the experiment's public code and hash and get independent
    private streams.
    """
    trial_seed = int(np.random.SeedSequence([p.seed, trial]).generate_state(1, dtype=np.uint64)[0])
    return replace(p, seed=trial_seed, public_seed=p.effective_public_seed)


def trial_inputs(p: ProtocolParams, trial: int) -> tuple[int, np.ndarray, np.ndarray]:
    """Uniform (C, K0, K1) for trial ``trial``, independent of protocol randomness."""
    rng = np.random.default_rng(np.random.SeedSequence([p.seed, trial, 1]))
    c = int(rng.integers(0, 2))
    k0 = rng.integers(0, 2, size=p.m, dtype=np.uint8)
    k1 = rng.integers(0, 2, size=p.m, dtype=np.uint8)
    return c, k0, k1


def run_record(p: ProtocolParams, c: int, k0, k1, outcome: ProtocolOutcome) -> dict:
    """JSON-ready record of a run, sufficient for :func:`replay_record`."""
    return {
        "schema_version": 1,
        "params": p.to_dict(),
        "c": int(c),
        "k0": tx.encode_bits(as_bits(k0)).hex(),
        "k1": tx.encode_bits(as_bits(k1)).hex(),
        "J": outcome.J,
        "khat_c": None if outcome.khat_c is None else tx.encode_bits(outcome.khat_c).hex(),
        "transcript": outcome.views.eve.transcript.to_list(),
    }


def replay_record(record: dict) -> tuple[bool, str]:
    """Re-run a recorded protocol and check transcript and decoding.

    Returns ``(ok, reason)``.
    """
    p = ProtocolParams.from_dict(record["params"])
    c = int(record["c"])
    k0, _ = tx.decode_bits(bytes.fromhex(record["k0"]))
    k1, _ = tx.decode_bits(bytes.fromhex(record["k1"]))
    outcome = run_protocol(p, c, k0, k1)
    recorded = tx.Transcript.from_list(record["transcript"])
    if recorded.to_json() != outcome.views.eve.transcript.to_json():
        return False, "transcript differs from re-run"
    if outcome.J != int(record["J"]):
        return False, "provisioning indicator differs"
    if outcome.J == 1:
        if not np.array_equal(outcome.khat_c, (k0, k1)[c]):
            return False, "decoded string differs from K_C"
        if record.get("khat_c") is not None:
            khat, _ = tx.decode_bits(bytes.fromhex(record["khat_c"]))
            if not np.array_equal(khat, outcome.khat_c):
                return False, "recorded output differs from re-run"
    return True, "ok"
