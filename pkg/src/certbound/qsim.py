"""Qubit-ensemble output distributions: IQP circuits, Haar states, local random circuits.

All distributions are returned as ProbVec over the 2^n computational-basis
outcomes, indexed by the integer value of the bit string (qubit 0 is the
most significant bit).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .distvec import ProbVec
from .errors import InvalidParameterError, ResourceLimitError, MAX_QUBITS
from .rng import stream_rng

DEFAULT_ANGLE_SET = tuple(k * math.pi / 8 for k in range(8))

CIRCUIT_KINDS = ("iqp", "haar_state", "local_random")


@dataclass(frozen=True)
class IqpWeights:
    """A symmetric n x n angle matrix defining one commuting-gate circuit.

    Diagonal entries are vertex weights, off-diagonal entries edge weights;
    all are drawn from the finite angle set.
    """

    n: int
    angle_set: tuple
    w: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError("n must be >= 1")
        w = np.asarray(self.w, dtype=np.float64)
        if w.shape != (self.n, self.n):
            raise InvalidParameterError("w must be an n x n matrix")
        if not np.array_equal(w, w.T):
            raise InvalidParameterError("w must be symmetric")
        angles = np.asarray(self.angle_set, dtype=np.float64)
        if not np.all(np.isin(w, angles)):
            raise InvalidParameterError("every weight must belong to angle_set")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "angle_set", tuple(float(a) for a in angles))

    @staticmethod
    def random(n: int, rng: np.random.Generator, angle_set=DEFAULT_ANGLE_SET) -> "IqpWeights":
        angles = np.asarray(angle_set, dtype=np.float64)
        w = angles[rng.integers(0, angles.size, size=(n, n))]
        w = np.triu(w) + np.triu(w, 1).T
        return IqpWeights(n=n, angle_set=tuple(angles.tolist()), w=w)

    def to_json(self) -> str:
        upper = [float(self.w[i, j]) for i in range(self.n) for j in range(i, self.n)]
        return json.dumps({"n": self.n, "angle_set": list(self.angle_set), "upper_triangle": upper})

    @staticmethod
    def from_json(text: str) -> "IqpWeights":
        data = json.loads(text)
        n = int(data["n"])
        upper = data["upper_triangle"]
        w = np.zeros((n, n))
        k = 0
        for i in range(n):
            for j in range(i, n):
                w[i, j] = w[j, i] = upper[k]
                k += 1
        return IqpWeights(n=n, angle_set=tuple(data["angle_set"]), w=w)


@dataclass(frozen=True)
class CircuitEnsemble:
    """Descriptor for a random-circuit ensemble at fixed qubit count."""

    kind: str
    n: int
    seed: int
    depth: int = 0
    angle_set: tuple = field(default=DEFAULT_ANGLE_SET)

    def __post_init__(self):
        if self.kind not in CIRCUIT_KINDS:
            raise InvalidParameterError(f"unknown ensemble kind {self.kind!r}")
        _check_qubits(self.n)
        if self.depth < 0:
            raise InvalidParameterError("depth must be >= 0")

    @property
    def sample_space_size(self) -> int:
        return 2**self.n

    def instance_distribution(self, instance: int) -> ProbVec:
        """Output distribution of the `instance`-th member (reproducible)."""
        rng = stream_rng(self.seed, instance)
        if self.kind == "iqp":
            return iqp_output_distribution(IqpWeights.random(self.n, rng, self.angle_set))
        if self.kind == "haar_state":
            return haar_state_distribution(self.n, rng)
        return local_random_circuit_distribution(self.n, self.depth, rng)


def _check_qubits(n: int, max_qubits: int = MAX_QUBITS):
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if n > max_qubits:
        raise ResourceLimitError(f"n = {n} exceeds the configured maximum of {max_qubits} qubits")


def _as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return stream_rng(int(seed_or_rng))


def fwht(a: np.ndarray) -> np.ndarray:
    """In-place-free fast Walsh-Hadamard transform (unnormalized)."""
    a = a.copy()
    h = 1
    n = a.size
    while h < n:
        a = a.reshape(-1, 2, h)
        top = a[:, 0, :] + a[:, 1, :]
        bot = a[:, 0, :] - a[:, 1, :]
        a = np.stack([top, bot], axis=1).reshape(n)
        h *= 2
    return a


def iqp_output_distribution(w: IqpWeights) -> ProbVec:
    """Exact output distribution P(S) = |<S| U_W |0^n>|^2 of a commuting-gate circuit.

    U_W is diagonal in the X basis with phases
    theta(x) = sum_{i<j} w_ij chi_i(x) chi_j(x) + sum_i w_ii chi_i(x),
    chi_i(x) = (-1)^(x_i), so the amplitudes are the Walsh-Hadamard
    transform of the phase vector exp(i theta) divided by 2^n.
    """
    n = w.n
    _check_qubits(n)
    dim = 2**n
    x = np.arange(dim, dtype=np.uint64)
    # chi[i] over all outcomes; qubit 0 = most significant bit
    chi = np.empty((n, dim))
    for i in range(n):
        bits = (x >> np.uint64(n - 1 - i)) & np.uint64(1)
        chi[i] = 1.0 - 2.0 * bits.astype(np.float64)
    theta = np.zeros(dim)
    for i in range(n):
        theta += w.w[i, i] * chi[i]
        for j in range(i + 1, n):
            theta += w.w[i, j] * chi[i] * chi[j]
    amps = fwht(np.exp(1j * theta)) / dim
    probs = np.abs(amps) ** 2
    return ProbVec(probs / probs.sum())


def haar_unitary(d: int, seed_or_rng) -> np.ndarray:
    """Haar-random d x d unitary via QR of a complex Ginibre matrix.

    The diagonal of R is rephased to positive reals, which makes the QR map
    measurable and the resulting Q exactly Haar-distributed.
    """
    if d < 1:
        raise InvalidParameterError("d must be >= 1")
    rng = _as_rng(seed_or_rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases


def haar_state_distribution(n: int, seed_or_rng) -> ProbVec:
    """|<S|psi>|^2 for a Haar-random state on 2^n dimensions.

    Drawn directly as a normalized complex Gaussian vector, which has the
    same distribution as the first column of a Haar unitary.
    """
    _check_qubits(n)
    rng = _as_rng(seed_or_rng)
    dim = 2**n
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    probs = np.abs(psi) ** 2
    return ProbVec(probs / probs.sum())


def local_random_circuit_distribution(n: int, depth: int, seed_or_rng) -> ProbVec:
    """Output distribution of `depth` Haar two-qubit gates on random 1-D neighbor pairs."""
    _check_qubits(n)
    if depth < 0:
        raise InvalidParameterError("depth must be >= 0")
    rng = _as_rng(seed_or_rng)
    dim = 2**n
    psi = np.zeros(dim, dtype=np.complex128)
    psi[0] = 1.0
    if n == 1:
        for _ in range(depth):
            psi = haar_unitary(2, rng) @ psi
    else:
        for _ in range(depth):
            q = int(rng.integers(0, n - 1))  # acts on neighbors (q, q+1)
            gate = haar_unitary(4, rng)
            psi = _apply_two_qubit_gate(psi, gate, q, n)
    probs = np.abs(psi) ** 2
    return ProbVec(probs / probs.sum())


def _apply_two_qubit_gate(psi: np.ndarray, gate: np.ndarray, q: int, n: int) -> np.ndarray:
    """Apply a 4x4 gate on adjacent qubits (q, q+1); qubit 0 is the most significant bit."""
    left = 2**q
    right = 2 ** (n - q - 2)
    psi = psi.reshape(left, 4, right)
    psi = np.einsum("ab,ibj->iaj", gate, psi)
    return np.ascontiguousarray(psi).reshape(-1)


def sample_outcomes(p: ProbVec, count: int, seed_or_rng) -> np.ndarray:
    """Draw `count` i.i.d. outcome indices by inverse CDF; reproducible given the seed."""
    if not p.normalized:
        raise InvalidParameterError("sample_outcomes requires a normalized distribution")
    if count < 0:
        raise InvalidParameterError("count must be >= 0")
    rng = _as_rng(seed_or_rng)
    cdf = np.cumsum(p.entries)
    cdf[-1] = 1.0
    u = rng.random(count)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)
