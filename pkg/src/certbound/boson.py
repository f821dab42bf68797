"""Boson-sampling distributions and the concentration machinery behind their flatness.

Distributions are exact (permanent-based) over the full mode-occupation
sample space at desk scale; the tail/concentration bounds are evaluated as
fully explicit formulas.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .distvec import ProbVec
from .errors import InvalidParameterError, ResourceLimitError, MAX_OUTCOMES
from .rng import stream_rng


@dataclass(frozen=True)
class ModeOccupation:
    """Occupation numbers of m modes holding n photons in total."""

    s: tuple

    def __post_init__(self):
        s = tuple(int(x) for x in self.s)
        if len(s) < 1 or any(x < 0 for x in s):
            raise InvalidParameterError("occupations must be non-negative integers")
        object.__setattr__(self, "s", s)

    @property
    def m(self) -> int:
        return len(self.s)

    @property
    def n(self) -> int:
        return sum(self.s)

    @property
    def collision_free(self) -> bool:
        return all(x <= 1 for x in self.s)

    def __str__(self) -> str:
        return "".join(str(x) for x in self.s) if max(self.s) <= 9 else ",".join(map(str, self.s))


@dataclass(frozen=True)
class BosonInstance:
    """n photons entering the first n of m modes of an m x m interferometer."""

    n: int
    m: int
    U: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= self.m:
            raise InvalidParameterError("need m >= n >= 1")
        U = np.asarray(self.U, dtype=np.complex128)
        if U.shape != (self.m, self.m):
            raise InvalidParameterError("U must be m x m")
        if np.max(np.abs(U.conj().T @ U - np.eye(self.m))) > 1e-10:
            raise InvalidParameterError("U is not unitary to 1e-10")
        U = U.copy()
        U.flags.writeable = False
        object.__setattr__(self, "U", U)

    @staticmethod
    def haar(n: int, m: int, seed_or_rng) -> "BosonInstance":
        from .qsim import haar_unitary

        return BosonInstance(n=n, m=m, U=haar_unitary(m, seed_or_rng))

    def to_json(self) -> str:
        interleaved = np.empty(2 * self.m * self.m)
        interleaved[0::2] = self.U.real.ravel()
        interleaved[1::2] = self.U.imag.ravel()
        return json.dumps({"n": self.n, "m": self.m, "U_re_im": interleaved.tolist()})

    @staticmethod
    def from_json(text: str) -> "BosonInstance":
        data = json.loads(text)
        m = int(data["m"])
        flat = np.asarray(data["U_re_im"], dtype=np.float64)
        U = (flat[0::2] + 1j * flat[1::2]).reshape(m, m)
        return BosonInstance(n=int(data["n"]), m=m, U=U)


def enumerate_phi(m: int, n: int, collision_free_only: bool = False) -> list[ModeOccupation]:
    """All length-m occupation sequences summing to n, largest-first-mode order.

    |Phi| = C(m+n-1, n); the collision-free subset has size C(m, n) and is
    empty (not an error) when n > m.
    """
    if m < 1 or n < 0:
        raise InvalidParameterError("need m >= 1 and n >= 0")
    out: list[ModeOccupation] = []

    def rec(prefix, remaining_modes, remaining_photons):
        if remaining_modes == 1:
            out.append(ModeOccupation(prefix + (remaining_photons,)))
            return
        top = min(remaining_photons, 1) if collision_free_only else remaining_photons
        for k in range(top, -1, -1):
            if collision_free_only and remaining_photons - k > remaining_modes - 1:
                continue
            rec(prefix + (k,), remaining_modes - 1, remaining_photons - k)

    if collision_free_only and n > m:
        return []
    rec((), m, n)
    return out


def permanent(x: np.ndarray, method: str = "ryser") -> complex:
    """Permanent of a square matrix.

    'naive' sums over all n! permutations (the definition; oracle use only),
    'ryser' is the O(n 2^n) inclusion-exclusion formula with Gray-code
    updates of the running row sums.
    """
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidParameterError("permanent requires a square matrix")
    if method == "naive":
        return _permanent_naive(x)
    if method == "ryser":
        return _permanent_ryser(x)
    raise InvalidParameterError(f"unknown method {method!r}")


def _permanent_naive(x: np.ndarray) -> complex:
    n = x.shape[0]
    rows = np.arange(n)
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        total += np.prod(x[rows, perm])
    return complex(total)


def _permanent_ryser(x: np.ndarray) -> complex:
    n = x.shape[0]
    if n == 0:
        return complex(1.0)
    rowsums = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    size = 0
    for k in range(1, 2**n):
        bit = (k & -k).bit_length() - 1  # index flipped by the Gray code
        if ((k ^ (k >> 1)) >> bit) & 1:
            rowsums += x[bit]
            size += 1
        else:
            rowsums -= x[bit]
            size -= 1
        sign = -1.0 if size % 2 else 1.0
        total += sign * np.prod(rowsums)
    return complex(total * (-1.0 if n % 2 else 1.0))


def submatrix(inst: BosonInstance, occ: ModeOccupation) -> np.ndarray:
    """U_S: first n columns of U, then s_j copies of row j, in mode order."""
    if occ.m != inst.m or occ.n != inst.n:
        raise InvalidParameterError("occupation does not match the instance")
    cols = inst.U[:, : inst.n]
    return np.repeat(cols, occ.s, axis=0)


def boson_distribution(inst: BosonInstance) -> tuple[ProbVec, list[ModeOccupation]]:
    """Exact output distribution P(S) = |Perm(U_S)|^2 / prod_j s_j! over all of Phi."""
    size = math.comb(inst.m + inst.n - 1, inst.n)
    if size > MAX_OUTCOMES:
        raise ResourceLimitError(f"|Phi| = {size} exceeds the cap of {MAX_OUTCOMES}")
    outcomes = enumerate_phi(inst.m, inst.n)
    probs = np.empty(len(outcomes))
    for i, occ in enumerate(outcomes):
        us = submatrix(inst, occ)
        denom = 1.0
        for sj in occ.s:
            denom *= math.factorial(sj)
        probs[i] = abs(_permanent_ryser(us)) ** 2 / denom
    return ProbVec(probs), outcomes


def collision_weight(inst: BosonInstance) -> float:
    """Probability weight outside the collision-free subspace."""
    p, outcomes = boson_distribution(inst)
    mask = np.array([not occ.collision_free for occ in outcomes])
    return float(math.fsum(p.entries[mask].tolist()))


def gaussian_repeated_sample(s, n: int, sigma: float, seed_or_rng) -> np.ndarray:
    """One draw of the row-repeated complex Gaussian measure for occupation s.

    An |S-tilde| x n matrix of i.i.d. complex Gaussians (real and imaginary
    parts mean 0, s.d. sigma) has row j repeated s-tilde_j times, where
    S-tilde drops the zero occupations of s.
    """
    if sigma <= 0:
        raise InvalidParameterError("sigma must be > 0")
    occ = s if isinstance(s, ModeOccupation) else ModeOccupation(tuple(s))
    if occ.n != n:
        raise InvalidParameterError("occupation must sum to n")
    tilde = [x for x in occ.s if x > 0]
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else stream_rng(int(seed_or_rng))
    base = sigma * (rng.standard_normal((len(tilde), n)) + 1j * rng.standard_normal((len(tilde), n)))
    return np.repeat(base, tilde, axis=0)


def gaussian_concentration_bound(n: int, sigma: float, xi: float) -> float:
    """Pr[max entry magnitude >= xi] <= 1 - (1 - erfc(xi / (sqrt(2) sigma)))^(n^2)."""
    if xi < 0:
        raise InvalidParameterError("xi must be >= 0")
    if sigma <= 0 or n < 1:
        raise InvalidParameterError("need sigma > 0 and n >= 1")
    e = float(erfc(xi / (math.sqrt(2.0) * sigma)))
    return 1.0 - (1.0 - e) ** (n * n)


def trivial_permanent_bound(x: np.ndarray) -> float:
    """(n!)^2 (max |x_jk|)^(2n), an elementary bound on |Perm(x)|^2."""
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidParameterError("need a square matrix")
    n = x.shape[0]
    return math.factorial(n) ** 2 * float(np.max(np.abs(x))) ** (2 * n)


def bs_flatness_tail_bound(n: int, m: int, c: float = 1.0, C: float = 0.0) -> float:
    """Explicit upper bound on Pr[exists S with P(S) >= 2^(-2n)] for m = c n^nu modes.

    Combines the union bound over the sample space, the elementary permanent
    bound, Gaussian concentration with erfc(x) <= exp(-x^2), and a
    geometric-series bound valid when n^2 e^(-x^2+1) <= 1/2; returns +inf
    when that convergence condition fails.
    """
    if m < n:
        raise InvalidParameterError("need m >= n")
    if n < 2:
        raise InvalidParameterError("need n >= 2 to infer nu")
    if c <= 0 or C < 0:
        raise InvalidParameterError("need c > 0 and C >= 0")
    nu = math.log(m / c) / math.log(n)
    # x^2 = (c/2) eps^(1/n) e^(-2/n+2) n^(nu-2-1/n) with eps = 2^(-2n)
    eps_root = 2.0**-2.0  # (2^-2n)^(1/n)
    x2 = (c / 2.0) * eps_root * math.exp(-2.0 / n + 2.0) * n ** (nu - 2.0 - 1.0 / n)
    series_term = n * n * math.exp(-x2 + 1.0)
    if series_term > 0.5:
        return math.inf
    log_bound = (
        math.log(1.0 + C)
        + n * math.log(2.0 * (c + 1.0) * math.e)
        + (nu - 1.0) * n * math.log(n)
        + math.log(2.0 * n * n)
        + (-x2 + 1.0)
    )
    if log_bound > 700:
        return math.inf
    return math.exp(log_bound)


def phi_size_bound(n: int, nu: float, c: float) -> float:
    """(2 (c+1) e)^n n^((nu-1) n), the closed-form cap on |Phi| used by the tail bound."""
    if n < 1 or c < 0:
        raise InvalidParameterError("need n >= 1 and c >= 0")
    log_val = n * math.log(2.0 * (c + 1.0) * math.e) + (nu - 1.0) * n * math.log(n)
    return math.exp(log_val) if log_val <= 700 else math.inf


@dataclass(frozen=True)
class BosonEnsemble:
    """Ensemble of Haar-interferometer boson-sampling instances at fixed (n, m)."""

    n: int
    m: int
    seed: int
    kind: str = "boson"

    @property
    def sample_space_size(self) -> int:
        return math.comb(self.m + self.n - 1, self.n)

    def instance(self, i: int) -> BosonInstance:
        return BosonInstance.haar(self.n, self.m, stream_rng(self.seed, i))

    def instance_distribution(self, i: int) -> ProbVec:
        return boson_distribution(self.instance(i))[0]
