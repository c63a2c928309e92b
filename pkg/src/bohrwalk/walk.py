"""Finite-support measures on the unimodular group and their torus dynamics.

Exact rational convolution and pushforward cover the small-support regime;
beyond that a Monte Carlo sampler simulates the k-step walk on the residue
torus.  The sampler is a pure function of (seed, k, sample count): a single
counter-based stream supplies one 64-bit word per start draw and one per
step, laid out as an (n_samples, k+1) table whose rows can be partitioned
across shards, so shard boundaries and worker counts never change the
result.

Arithmetic runs vectorized in int64 whenever the documented overflow bounds
hold (entry_bound * (Q-1) within int64 after per-term reduction) and falls
back to exact Python integers otherwise; both paths consume the same random
words and produce identical residues.
"""

from __future__ import annotations

import cmath
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .intmat import (
    CoordVector,
    Rows,
    UnimodularMatrix,
    adjoint_matrix,
    conjugate,
    coords_of,
    coords_to,
    mat_mul,
    mat_transpose,
)
from .torus import TorusPointQ, act, character

DEFAULT_SUPPORT_CAP = 100_000

_INT64_MAX = 2**63 - 1
_TWO64 = 1 << 64


class SupportCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"support grew to {size} atoms, above the cap of {cap}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class FiniteSupportMeasure:
    """Probability measure with finitely many unimodular atoms, exact weights."""

    atoms: tuple[tuple[UnimodularMatrix, Fraction], ...]

    def __post_init__(self) -> None:
        atoms = tuple((g, Fraction(w)) for g, w in self.atoms)
        if not atoms:
            raise ValueError("measure needs at least one atom")
        if any(w <= 0 for _, w in atoms):
            raise ValueError("weights must be positive")
        total = sum(w for _, w in atoms)
        if total != 1:
            raise ValueError(f"weights must sum to 1 exactly, got {total}")
        seen = set()
        for g, _ in atoms:
            if g.entries in seen:
                raise ValueError("atom matrices must be pairwise distinct")
            seen.add(g.entries)
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def uniform(cls, matrices: Sequence[UnimodularMatrix]) -> "FiniteSupportMeasure":
        w = Fraction(1, len(matrices))
        return cls(tuple((g, w) for g in matrices))

    @classmethod
    def delta(cls, g: UnimodularMatrix) -> "FiniteSupportMeasure":
        return cls(((g, Fraction(1)),))

    @property
    def d(self) -> int:
        return self.atoms[0][0].d

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class AtomicTorusMeasure:
    """Probability measure on the torus with finitely many point atoms."""

    atoms: tuple[tuple[TorusPointQ, Fraction], ...]

    def __post_init__(self) -> None:
        atoms = tuple((x, Fraction(w)) for x, w in self.atoms)
        if not atoms:
            raise ValueError("measure needs at least one atom")
        if any(w <= 0 for _, w in atoms):
            raise ValueError("weights must be positive")
        total = sum(w for _, w in atoms)
        if total != 1:
            raise ValueError(f"weights must sum to 1 exactly, got {total}")
        d = atoms[0][0].d
        q = atoms[0][0].modulus
        if any(x.d != d or x.modulus != q for x, _ in atoms):
            raise ValueError("all atoms must share d and the modulus")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def delta(cls, x: TorusPointQ) -> "AtomicTorusMeasure":
        return cls(((x, Fraction(1)),))

    @property
    def d(self) -> int:
        return self.atoms[0][0].d

    @property
    def modulus(self) -> int:
        return self.atoms[0][0].modulus

    def __len__(self) -> int:
        return len(self.atoms)


def convolve_group(
    m1: FiniteSupportMeasure,
    m2: FiniteSupportMeasure,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> FiniteSupportMeasure:
    """Exact convolution; atoms at equal matrices merge."""
    acc: dict[Rows, Fraction] = {}
    for g1, w1 in m1.atoms:
        for g2, w2 in m2.atoms:
            prod = mat_mul(g1.entries, g2.entries)
            acc[prod] = acc.get(prod, Fraction(0)) + w1 * w2
            if len(acc) > cap:
                raise SupportCapExceeded(len(acc), cap)
    return FiniteSupportMeasure(
        tuple((UnimodularMatrix.from_rows(rows), w) for rows, w in acc.items())
    )


def convolve_power(
    mu: FiniteSupportMeasure, k: int, cap: int = DEFAULT_SUPPORT_CAP
) -> FiniteSupportMeasure:
    """k-fold convolution of mu with itself; k = 0 gives the identity atom."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = FiniteSupportMeasure.delta(UnimodularMatrix.identity(mu.d))
    for _ in range(k):
        out = convolve_group(out, mu, cap)
    return out


def pushforward_exact(
    mu: FiniteSupportMeasure,
    nu: AtomicTorusMeasure,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> AtomicTorusMeasure:
    """Exact atomic image of nu under the mu-averaged torus action."""
    if mu.d != nu.d:
        raise ValueError("measures live in different dimensions")
    acc: dict[TorusPointQ, Fraction] = {}
    for g, wg in mu.atoms:
        op = adjoint_matrix(g)
        for x, wx in nu.atoms:
            y = act(op, x)
            acc[y] = acc.get(y, Fraction(0)) + wg * wx
            if len(acc) > cap:
                raise SupportCapExceeded(len(acc), cap)
    return AtomicTorusMeasure(tuple(acc.items()))


def nu_hat(nu: AtomicTorusMeasure, h: CoordVector | tuple[int, ...]) -> complex:
    """Fourier coefficient of the atomic measure at frequency h."""
    return sum(float(w) * character(x, h) for x, w in nu.atoms)


@dataclass(eq=False)
class EmpiricalCloud:
    """Sampled torus points plus the provenance needed to reproduce them."""

    d: int
    modulus: int
    residues: np.ndarray  # (n, d*d-1); int64 when the modulus fits, else object
    meta: dict

    def __post_init__(self) -> None:
        self.residues.flags.writeable = False

    @property
    def n(self) -> int:
        return int(self.residues.shape[0])

    def points(self) -> list[TorusPointQ]:
        return [
            TorusPointQ(self.d, self.modulus, tuple(int(v) for v in row))
            for row in self.residues
        ]

    @classmethod
    def from_points(cls, pts: Sequence[TorusPointQ], meta: dict | None = None) -> "EmpiricalCloud":
        if not pts:
            raise ValueError("cloud needs at least one point")
        d, q = pts[0].d, pts[0].modulus
        if any(p.d != d or p.modulus != q for p in pts):
            raise ValueError("all points must share d and the modulus")
        dtype = np.int64 if q - 1 <= _INT64_MAX else object
        arr = np.array([p.residues for p in pts], dtype=dtype)
        return cls(d, q, arr, dict(meta or {}))


def _choice_boundaries(weights: Sequence[Fraction]) -> np.ndarray:
    """Cumulative weight boundaries scaled to 2^64, exclusive of the final 2^64.

    Atom j is selected iff boundary[j-1] <= u < boundary[j] for a uniform
    64-bit word u; floor rounding biases each atom by less than 2^-64, which
    only the Monte Carlo paths ever see.
    """
    cum = Fraction(0)
    bounds = []
    for w in weights[:-1]:
        cum += w
        bounds.append((cum.numerator << 64) // cum.denominator)
    return np.array(bounds, dtype=np.uint64)


def _raw_words(seed: int, n: int, k: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=seed % (1 << 128)))
    return rng.integers(0, _TWO64, size=(n, k + 1), dtype=np.uint64)


def _int64_eligible(step_mats: Sequence[Rows], modulus: int) -> bool:
    if modulus - 1 > _INT64_MAX:
        return False
    bound = max(max(abs(v) for row in m for v in row) for m in step_mats)
    return bound * (modulus - 1) <= _INT64_MAX


def _apply_rows_int64(state: np.ndarray, mat: np.ndarray, q: int) -> np.ndarray:
    # per-term reduction keeps every intermediate below 2 * q <= int64 max
    n, dim = state.shape
    out = np.empty_like(state)
    for c in range(dim):
        acc = (state[:, 0] * mat[0, c]) % q
        for l in range(1, dim):
            acc = (acc + (state[:, l] * mat[l, c]) % q) % q
        out[:, c] = acc
    return out


def _sample_rows(
    seed: int,
    k: int,
    n_total: int,
    lo: int,
    hi: int,
    start_bounds: np.ndarray,
    start_res: tuple[tuple[int, ...], ...],
    step_bounds: np.ndarray,
    step_mats: tuple[Rows, ...],
    modulus: int,
    use_int64: bool,
) -> np.ndarray:
    raw = _raw_words(seed, n_total, k)[lo:hi]
    start_idx = np.searchsorted(start_bounds, raw[:, 0], side="right")
    if use_int64:
        starts = np.array(start_res, dtype=np.int64)
        state = starts[start_idx]
        mats = [np.array(m, dtype=np.int64) for m in step_mats]
        for t in range(k):
            col = np.searchsorted(step_bounds, raw[:, t + 1], side="right")
            new = np.empty_like(state)
            for j, mat in enumerate(mats):
                sel = col == j
                if sel.any():
                    new[sel] = _apply_rows_int64(state[sel], mat, modulus)
            state = new
        return state
    # exact big-integer path: same choices, Python arithmetic
    dim = len(start_res[0])
    rows = []
    for r in range(raw.shape[0]):
        state = start_res[int(start_idx[r])]
        for t in range(k):
            j = int(np.searchsorted(step_bounds, raw[r, t + 1], side="right"))
            mat = step_mats[j]
            state = tuple(
                sum(mat[l][c] * state[l] for l in range(dim)) % modulus
                for c in range(dim)
            )
        rows.append(state)
    dtype = np.int64 if modulus - 1 <= _INT64_MAX else object
    return np.array(rows, dtype=dtype)


def sample_walk(
    mu: FiniteSupportMeasure,
    k: int,
    start: AtomicTorusMeasure,
    n_samples: int,
    seed: int,
    *,
    workers: int = 1,
    use_int64: bool | None = None,
) -> EmpiricalCloud:
    """Monte Carlo surrogate for the k-step pushforward of `start` under mu.

    Each sample draws its start atom and k step atoms from the seed-keyed
    word table and applies the precomputed transposed conjugation matrices
    one step at a time.  Results are bit-identical for any worker count.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if mu.d != start.d:
        raise ValueError("measure and start point dimensions differ")
    q = start.modulus
    step_mats = tuple(mat_transpose(adjoint_matrix(g).matrix) for g, _ in mu.atoms)
    step_bounds = _choice_boundaries([w for _, w in mu.atoms])
    start_res = tuple(x.residues for x, _ in start.atoms)
    start_bounds = _choice_boundaries([w for _, w in start.atoms])
    if use_int64 is None:
        use_int64 = _int64_eligible(step_mats, q)
    elif use_int64 and not _int64_eligible(step_mats, q):
        raise ValueError("int64 path requested but overflow bounds do not hold")

    args = (seed, k, n_samples)
    shared = (start_bounds, start_res, step_bounds, step_mats, q, use_int64)
    if workers <= 1:
        out = _sample_rows(*args, 0, n_samples, *shared)
    else:
        cuts = np.linspace(0, n_samples, workers + 1, dtype=int)
        jobs = [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(_shard_entry, [(args, lo, hi, shared) for lo, hi in jobs])
            )
        out = np.vstack(parts)
    meta = {"k": k, "n": n_samples, "seed": seed}
    return EmpiricalCloud(mu.d, q, out, meta)


def _shard_entry(payload: tuple) -> np.ndarray:
    (seed, k, n_total), lo, hi, shared = payload
    return _sample_rows(seed, k, n_total, lo, hi, *shared)


def frequency_box(rank: int, sup_bound: int) -> Iterator[tuple[int, ...]]:
    """All nonzero integer vectors with sup-norm at most sup_bound."""
    for h in itertools.product(range(-sup_bound, sup_bound + 1), repeat=rank):
        if any(h):
            yield h


@dataclass(frozen=True)
class WeylReport:
    """Empirical Fourier coefficients of a cloud over a sup-norm frequency box."""

    sup_bound: int
    coefficients: Mapping[tuple[int, ...], complex]
    max_modulus: float
    argmax: tuple[int, ...]


def weyl_report(cloud: EmpiricalCloud, sup_bound: int) -> WeylReport:
    """Average character values per frequency, one pass over the points.

    Phase indices accumulate exactly (mod Q) before the only floating step,
    the final complex exponential.  The zero frequency is excluded: it would
    contribute exactly 1.
    """
    if sup_bound < 1:
        raise ValueError("frequency bound must be at least 1")
    q = cloud.modulus
    res = cloud.residues
    dim = res.shape[1]
    n = res.shape[0]
    fast = (
        res.dtype == np.int64
        and q - 1 <= _INT64_MAX
        and sup_bound * (q - 1) <= _INT64_MAX
    )
    coefficients: dict[tuple[int, ...], complex] = {}
    best = -1.0
    best_h: tuple[int, ...] = ()
    for h in frequency_box(dim, sup_bound):
        if fast:
            s = (res[:, 0] * h[0]) % q
            for i in range(1, dim):
                s = (s + (res[:, i] * h[i]) % q) % q
            coef = complex(np.exp(2j * np.pi * (s / q)).mean())
        else:
            total = 0j
            for row in res:
                s = sum(int(r) * c for r, c in zip(row, h)) % q
                total += cmath.exp(2j * cmath.pi * (s / q))
            coef = total / n
        coefficients[h] = coef
        if abs(coef) > best:
            best = abs(coef)
            best_h = h
    return WeylReport(
        sup_bound=sup_bound,
        coefficients=coefficients,
        max_modulus=best,
        argmax=best_h,
    )


@dataclass(frozen=True)
class FourierCheck:
    lhs: complex
    rhs: complex

    @property
    def error(self) -> float:
        return abs(self.lhs - self.rhs)


def fourier_convolution_check(
    mu: FiniteSupportMeasure,
    nu: AtomicTorusMeasure,
    h: CoordVector,
    k: int,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> FourierCheck:
    """Compare two routes to the Fourier coefficient of the k-step pushforward.

    The left side transports nu exactly and reads off the coefficient at h;
    the right side sums nu's coefficients along the conjugation orbit of h
    weighted by the convolution power.  Both use exact phase indices, so
    agreement is limited only by the final complex summation.
    """
    muk = convolve_power(mu, k, cap)
    pushed = pushforward_exact(muk, nu, cap)
    lhs = sum(float(w) * character(x, h) for x, w in pushed.atoms)
    rhs = 0j
    target = coords_to(h)
    for g, w in muk.atoms:
        moved = coords_of(conjugate(g, target))
        rhs += float(w) * nu_hat(nu, moved)
    return FourierCheck(lhs=lhs, rhs=rhs)
