"""OT capacities of the wiretapped erasure channel and their outer bounds.

Closed forms hold for the two-BEC setup. The outer bounds are information
functionals of a general broadcast channel maximised over the input
distribution; for the two-BEC channel they reproduce the closed forms.
All quantities are in bits per channel use.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .channel import ChannelParams, DiscreteBroadcastChannel, bec_pair_as_broadcast
from .errors import DimensionMismatch, NonConvergence, WiretapOTError
from .info import entropy_bits

BINARY_TOL = 1e-9
GENERAL_TOL = 1e-6
MAX_ITER = 100_000


def c2p(eps: ChannelParams) -> float:
    """2-private capacity, eps2 * min(eps1, 1 - eps1)."""
    return eps.eps2 * min(eps.eps1, 1 - eps.eps1)


def c1p(eps: ChannelParams) -> float:
    """1-private capacity (piecewise in eps1 against eps2 / 2 and 1 / 2)."""
    e1, e2 = eps.eps1, eps.eps2
    if e1 < e2 / 2:
        return e1
    if e1 < 0.5:
        return e2 / 2
    return e2 * (1 - e1)


def validate_input_distribution(px, input_size: int | None = None) -> np.ndarray:
    px = np.asarray(px, dtype=float)
    if input_size is not None and px.shape[-1] != input_size:
        raise DimensionMismatch(f"input distribution has {px.shape[-1]} entries, channel has {input_size}")
    if np.any(px < 0) or np.any(np.abs(px.sum(axis=-1) - 1.0) > 1e-12):
        raise ValueError("input distribution must be nonnegative and sum to 1")
    return px


def _marginal_tables(px: np.ndarray, ch: DiscreteBroadcastChannel):
    """Joint tables p(x, (y,z)), p(x, y), p(x, z); batched over leading axes of px."""
    px = np.asarray(px, dtype=float)
    if px.shape[-1] != ch.input_size:
        raise DimensionMismatch(f"input distribution has {px.shape[-1]} entries, channel has {ch.input_size}")
    joint = px[..., :, None] * ch.pmf
    to_y, to_z = ch.label_indicators
    return joint, joint @ to_y, joint @ to_z


def _cond_entropy(joint_x_other: np.ndarray) -> np.ndarray:
    """H(X | other) from a table with X on axis -2."""
    flat = joint_x_other.reshape(joint_x_other.shape[:-2] + (-1,))
    return entropy_bits(flat) - entropy_bits(joint_x_other.sum(axis=-2))


def conditional_mutual_information(px, ch: DiscreteBroadcastChannel) -> np.ndarray:
    """I(X; Y | Z) = H(X | Z) - H(X | Y, Z)."""
    joint, _, xz = _marginal_tables(px, ch)
    return np.maximum(_cond_entropy(xz) - _cond_entropy(joint), 0.0)


def conditional_entropy_given_pair(px, ch: DiscreteBroadcastChannel) -> np.ndarray:
    """H(X | Y, Z)."""
    joint, _, _ = _marginal_tables(px, ch)
    return np.maximum(_cond_entropy(joint), 0.0)


def conditional_entropy_given_Y(px, ch: DiscreteBroadcastChannel) -> np.ndarray:
    """H(X | Y)."""
    _, xy, _ = _marginal_tables(px, ch)
    return np.maximum(_cond_entropy(xy), 0.0)


FUNCTIONALS: dict[str, Callable] = {
    "I_XY_given_Z": conditional_mutual_information,
    "H_X_given_YZ": conditional_entropy_given_pair,
    "H_X_given_Y": conditional_entropy_given_Y,
}


@dataclass(frozen=True)
class MaxResult:
    px: np.ndarray
    value: float
    converged: bool
    iterations: int

    def __iter__(self):
        return iter((self.px, self.value))


def _golden_binary(f: Callable, tol: float, max_iter: int) -> MaxResult:
    # coarse scan picks the bracket so multimodal functionals do not trap the search
    grid = np.linspace(0.0, 1.0, 201)
    vals = f(np.stack([grid, 1 - grid], axis=-1))
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best_p, best_v = grid[i], float(vals[i])

    def g(p: float) -> float:
        return float(f(np.array([p, 1 - p])))

    invphi = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c_, d_ = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = g(c_), g(d_)
    it = 0
    while b - a > tol and it < max_iter:
        it += 1
        if fc >= fd:
            b, d_, fd = d_, c_, fc
            c_ = b - invphi * (b - a)
            fc = g(c_)
        else:
            a, c_, fc = c_, d_, fd
            d_ = a + invphi * (b - a)
            fd = g(d_)
    for p, v in ((c_, fc), (d_, fd), ((a + b) / 2, g((a + b) / 2))):
        if v > best_v:
            best_p, best_v = p, v
    return MaxResult(np.array([best_p, 1 - best_p]), best_v, b - a <= tol, it)


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, v.size + 1)
    rho = np.nonzero(u - (css - 1) / ks > 0)[0][-1]
    theta = (css[rho] - 1) / (rho + 1)
    return np.maximum(v - theta, 0.0)


def _simplex_grid(dim: int, resolution: int) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0]])
    pts = []

    def rec(prefix, remaining, left):
        if left == 1:
            pts.append(prefix + [remaining])
            return
        for i in range(remaining + 1):
            rec(prefix + [i], remaining - i, left - 1)

    rec([], resolution, dim)
    return np.array(pts, dtype=float) / resolution


def _ascend(f: Callable, start: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, float, bool, int]:
    p = project_to_simplex(start)
    fp = float(f(p))
    step, h = 0.5, 1e-7
    dim = p.size
    for it in range(1, max_iter + 1):
        shifts = np.eye(dim) * h
        grad = (f(np.clip(p + shifts, 0, None)) - f(np.clip(p - shifts, 0, None))) / (2 * h)
        grad = grad - grad.mean()
        improved = False
        while step > 1e-14:
            cand = project_to_simplex(p + step * grad)
            fc = float(f(cand))
            if fc > fp:
                moved = float(np.abs(cand - p).max())
                gain = fc - fp
                p, fp = cand, fc
                step *= 1.5
                improved = True
                break
            step *= 0.5
        if not improved or (gain < tol * 1e-3 and moved < tol):
            return p, fp, True, it
    return p, fp, False, max_iter


def maximize_over_input(
    functional: Callable | str,
    ch: DiscreteBroadcastChannel,
    tol: float | None = None,
    max_iter: int = MAX_ITER,
    starts: int = 8,
    seed: int = 0,
) -> MaxResult:
    """Maximise an information functional over input distributions.

    Binary inputs use a grid-bracketed golden-section search (default tolerance
    1e-9). Larger alphabets use multi-start projected gradient ascent with a
    simplex-grid fallback for up to three inputs (default tolerance 1e-6).
    Hitting ``max_iter`` emits a :class:`NonConvergence` warning and returns
    the best point found with ``converged=False``.
    """
    if isinstance(functional, str):
        functional = FUNCTIONALS[functional]

    def f(px):
        return functional(px, ch)

    if ch.input_size == 1:
        return MaxResult(np.array([1.0]), float(f(np.array([1.0]))), True, 0)
    if ch.input_size == 2:
        res = _golden_binary(f, BINARY_TOL if tol is None else tol, max_iter)
    else:
        tol = GENERAL_TOL if tol is None else tol
        rng = np.random.default_rng(seed)
        dim = ch.input_size
        inits = [np.full(dim, 1.0 / dim)]
        inits += [0.1 / (dim - 1) + np.eye(dim)[i] * (0.9 - 0.1 / (dim - 1)) for i in range(dim)]
        inits += list(rng.dirichlet(np.ones(dim), size=starts))
        if dim <= 3:
            grid = _simplex_grid(dim, 60)
            inits.append(grid[int(np.argmax(f(grid)))])
        best = None
        for init in inits:
            p, v, ok, it = _ascend(f, init, tol, max_iter)
            if best is None or v > best.value:
                best = MaxResult(p, v, ok, it)
        res = best
    if not res.converged:
        warnings.warn(NonConvergence(f"optimizer stopped after {res.iterations} iterations"))
    return res


@dataclass(frozen=True)
class CapacityReport:
    eps1: float
    eps2: float
    c2p: float
    c1p: float
    bound_IXY_given_Z: float
    bound_HX_given_YZ: float
    bound_HX_given_Y: float
    bound_half_eps2: float | None

    def to_dict(self) -> dict:
        return asdict(self)


class InvariantViolation(WiretapOTError, AssertionError):
    pass


def outer_bounds(ch: DiscreteBroadcastChannel, tol: float | None = None) -> dict:
    """The three input-maximised functionals for a general broadcast channel.

    The eps2 / 2 bound relies on the erasure structure and is not evaluated
    here; the result flags it as omitted.
    """
    out = {}
    for name, key in (
        ("I_XY_given_Z", "bound_IXY_given_Z"),
        ("H_X_given_YZ", "bound_HX_given_YZ"),
        ("H_X_given_Y", "bound_HX_given_Y"),
    ):
        res = maximize_over_input(name, ch, tol)
        out[key] = res.value
        out[key + "_argmax"] = res.px.tolist()
    out["bound_half_eps2"] = None
    out["half_eps2_omitted"] = True
    return out


def capacity_report(eps: ChannelParams, tol: float | None = None, slack: float = 1e-9) -> CapacityReport:
    """Closed-form capacities next to numerically evaluated outer bounds.

    Raises :class:`InvariantViolation` if a capacity exceeds one of its
    bounds by more than ``slack`` plus the optimizer tolerance.
    """
    ch = bec_pair_as_broadcast(eps)
    ixyz = maximize_over_input("I_XY_given_Z", ch, tol).value
    hxyz = maximize_over_input("H_X_given_YZ", ch, tol).value
    hxy = maximize_over_input("H_X_given_Y", ch, tol).value
    rep = CapacityReport(eps.eps1, eps.eps2, c2p(eps), c1p(eps), ixyz, hxyz, hxy, eps.eps2 / 2)
    margin = slack + (BINARY_TOL if tol is None else tol)
    checks = {
        "c2p <= I(X;Y|Z)": rep.c2p <= ixyz + margin,
        "c2p <= H(X|Y,Z)": rep.c2p <= hxyz + margin,
        "c1p <= I(X;Y|Z)": rep.c1p <= ixyz + margin,
        "c1p <= H(X|Y)": rep.c1p <= hxy + margin,
        "c1p <= eps2/2": rep.c1p <= rep.bound_half_eps2 + margin,
        "c2p <= c1p": rep.c2p <= rep.c1p + margin,
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise InvariantViolation(f"capacity invariants violated at {eps}: {failed}")
    return rep
