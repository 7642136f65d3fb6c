"""Random-state ensembles: CUE columns, eigenvectors of intermediate unitary
matrices, central eigenstates of a disordered spin Hamiltonian, and
exchangeable fixed-moduli states.

Determinism contract: a stream is fully determined by the ensemble spec.  The
RNG of realization ``r`` is ``numpy.random.default_rng(SeedSequence(seed,
spawn_key=(r,)))``, so serial and parallel runs produce identical samples.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError, NumericError

KINDS = ("cue", "intermediate", "manybody", "exchangeable")


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one realization of a seeded stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _parse_gamma(gamma) -> Fraction:
    if isinstance(gamma, Fraction):
        return gamma
    if isinstance(gamma, str):
        return Fraction(gamma)
    raise InvalidArgumentError(
        f"gamma must be an exact rational string like '1/3', got {gamma!r}"
    )


@dataclass(frozen=True)
class IntermediateSpec:
    """Parameters of the intermediate unitary ensemble."""

    size: int
    gamma: Fraction
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gamma", _parse_gamma(self.gamma))
        if (self.size * self.gamma).denominator == 1:
            raise InvalidArgumentError(
                f"N*gamma = {self.size * self.gamma} must not be an integer"
            )


@dataclass(frozen=True)
class ManyBodySpec:
    """Disordered spin system: z-fields plus random pairwise xx couplings.

    Level spacings Gamma_i are uniform in [delta0 - disorder/2, delta0 +
    disorder/2]; couplings J_ij uniform in [-coupling, coupling].
    """

    n_r: int
    delta0: float = 1.0
    disorder: float = 1.0
    coupling: float = 1.5
    seed: int = 0

    def __post_init__(self):
        if self.disorder < 0 or self.coupling < 0:
            raise InvalidArgumentError("disorder width and coupling bound must be >= 0")


def sample_cue_state(n_r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector of length 2**n_r.

    A normalized vector of i.i.d. standard complex Gaussians has the same
    distribution as a column of a CUE matrix, at O(N) cost.
    """
    if n_r < 2:
        raise InvalidArgumentError(f"n_r must be >= 2, got {n_r}")
    return _cue_batch(2**n_r, 1, rng)[0]


def _cue_batch(size: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((count, size)) + 1j * rng.standard_normal((count, size))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def intermediate_matrix(spec: IntermediateSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """Random unitary with intermediate spectral statistics and multifractal eigenvectors.

    U_kl = (e^{i phi_k} / N) (1 - e^{2 i pi N gamma}) / (1 - e^{2 i pi (k - l + N gamma)/N})
    with phi_k i.i.d. uniform on [0, 2 pi).
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    size = spec.size
    gamma = float(spec.gamma)
    phases = rng.uniform(0.0, 2.0 * np.pi, size)
    k = np.arange(size)[:, None]
    l = np.arange(size)[None, :]
    numer = 1.0 - np.exp(2j * np.pi * size * gamma)
    denom = 1.0 - np.exp(2j * np.pi * (k - l + size * gamma) / size)
    return np.exp(1j * phases)[:, None] / size * numer / denom


def eigenbasis_unitary(u: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases and orthonormal eigenvectors of a unitary matrix.

    Uses the complex Schur form (diagonal for normal matrices, with orthonormal
    columns by construction).  Returns (thetas, vectors) with vectors[:, i]
    the eigenvector for e^{i theta_i}; residuals are verified against ``tol``.
    """
    u = np.asarray(u, dtype=complex)
    size = u.shape[0]
    if np.max(np.abs(u.conj().T @ u - np.eye(size))) > tol:
        raise InvalidArgumentError("matrix is not unitary within tolerance")
    t, z = scipy.linalg.schur(u, output="complex")
    evals = np.diag(t)
    residual = np.max(np.abs(u @ z - z * evals[None, :]))
    if residual > tol:
        raise NumericError(
            f"unitary eigendecomposition residual {residual:.3e} exceeds {tol:.1e}"
        )
    thetas = np.angle(evals)
    vectors = z / np.linalg.norm(z, axis=0, keepdims=True)
    return thetas, vectors


def manybody_hamiltonian(spec: ManyBodySpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """Dense Hamiltonian sum_i Gamma_i sz_i + sum_{i<j} J_ij sx_i sx_j.

    Computational basis with qubit 1 = most significant bit; real symmetric
    and traceless.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n_r = spec.n_r
    size = 2**n_r
    gammas = rng.uniform(spec.delta0 - spec.disorder / 2, spec.delta0 + spec.disorder / 2, n_r)
    couplings = rng.uniform(-spec.coupling, spec.coupling, (n_r, n_r))
    h = np.zeros((size, size))
    idx = np.arange(size)
    diag = np.zeros(size)
    for i in range(n_r):
        bit = (idx >> (n_r - 1 - i)) & 1
        diag += gammas[i] * (1 - 2 * bit)  # bit 0 -> +Gamma, bit 1 -> -Gamma
    h[idx, idx] = diag
    for i in range(n_r):
        for j in range(i + 1, n_r):
            mask = (1 << (n_r - 1 - i)) | (1 << (n_r - 1 - j))
            h[idx, idx ^ mask] += couplings[i, j]
    return h


def central_eigenstates(h: np.ndarray, count: int) -> np.ndarray:
    """The ``count`` eigenvectors centered on the median of the sorted spectrum.

    Rows are eigenvectors; ranks floor(N/2) - floor(count/2) up to (exclusive)
    that plus count.
    """
    h = np.asarray(h)
    size = h.shape[0]
    if count < 1 or count > size:
        raise InvalidArgumentError(f"count must be in 1..{size}, got {count}")
    _, vectors = np.linalg.eigh(h)
    lo = size // 2 - count // 2
    return vectors[:, lo:lo + count].T.astype(complex)


def symmetrize_state(psi: np.ndarray, mode: str, rng: np.random.Generator) -> np.ndarray:
    """Shuffle components, randomize their phases, or both (shuffle first)."""
    if mode not in ("shuffle", "phases", "both"):
        raise InvalidArgumentError(f"mode must be shuffle/phases/both, got {mode!r}")
    out = np.asarray(psi, dtype=complex)
    if mode in ("shuffle", "both"):
        out = out[rng.permutation(out.shape[0])]
    if mode in ("phases", "both"):
        out = out * np.exp(2j * np.pi * rng.random(out.shape[0]))
    return out


def exchangeable_state(moduli: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """State with |psi_i|^2 a random permutation of ``moduli`` and i.i.d. phases."""
    moduli = np.asarray(moduli, dtype=float)
    if np.any(moduli < 0):
        raise InvalidArgumentError("moduli must be nonnegative")
    if abs(moduli.sum() - 1.0) > 1e-12:
        raise InvalidArgumentError(f"moduli must sum to 1, got {moduli.sum()}")
    amps = np.sqrt(moduli[rng.permutation(moduli.shape[0])])
    return amps * np.exp(2j * np.pi * rng.random(moduli.shape[0]))


@dataclass(frozen=True)
class EnsembleSpec:
    """Fully deterministic description of a sample stream.

    ``kind`` selects the generator; ``shuffle`` / ``randomize_phases`` are
    applied to every sample after generation.  ``moduli`` is required for the
    exchangeable kind, ``gamma`` (exact rational string) for the intermediate
    one.  ``vectors_per_matrix`` limits how many eigenvectors each matrix
    realization contributes (default: all for intermediate, N/16 central for
    manybody).
    """

    kind: str
    n_r: int
    seed: int = 0
    gamma: str | None = None
    delta0: float = 1.0
    disorder: float = 1.0
    coupling: float = 1.5
    moduli: tuple[float, ...] | None = None
    shuffle: bool = False
    randomize_phases: bool = False
    vectors_per_matrix: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown ensemble kind {self.kind!r}")
        if self.n_r < 2:
            raise InvalidArgumentError(f"n_r must be >= 2, got {self.n_r}")
        if self.kind == "intermediate":
            IntermediateSpec(self.size, _parse_gamma(self.gamma))
        if self.kind == "exchangeable":
            if self.moduli is None or len(self.moduli) != self.size:
                raise InvalidArgumentError(
                    f"exchangeable ensemble needs {self.size} moduli values"
                )
            object.__setattr__(self, "moduli", tuple(float(x) for x in self.moduli))

    @property
    def size(self) -> int:
        return 2**self.n_r

    def batch_size(self) -> int:
        """Samples contributed by one realization."""
        if self.kind in ("cue", "exchangeable"):
            return min(self.size * 16, 4096)
        if self.vectors_per_matrix is not None:
            return self.vectors_per_matrix
        if self.kind == "manybody":
            return max(1, self.size // 16)
        return self.size

    def realization(self, index: int) -> np.ndarray:
        """Batch of states (rows) for realization ``index``."""
        rng = realization_rng(self.seed, index)
        size = self.size
        if self.kind == "cue":
            batch = _cue_batch(size, self.batch_size(), rng)
        elif self.kind == "exchangeable":
            count = self.batch_size()
            moduli = np.asarray(self.moduli)
            perm_keys = rng.random((count, size)).argsort(axis=1)
            batch = np.sqrt(np.take(moduli, perm_keys)) * np.exp(
                2j * np.pi * rng.random((count, size))
            )
        elif self.kind == "intermediate":
            spec = IntermediateSpec(size, self.gamma, self.seed)
            u = intermediate_matrix(spec, rng)
            _, vectors = eigenbasis_unitary(u)
            batch = vectors.T[: self.batch_size()]
        else:  # manybody
            spec = ManyBodySpec(self.n_r, self.delta0, self.disorder, self.coupling, self.seed)
            h = manybody_hamiltonian(spec, rng)
            batch = central_eigenstates(h, self.batch_size())
        return self._postprocess(batch, rng)

    def _postprocess(self, batch: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        count, size = batch.shape
        if self.shuffle:
            perms = rng.random((count, size)).argsort(axis=1)
            batch = np.take_along_axis(batch, perms, axis=1)
        if self.randomize_phases:
            batch = batch * np.exp(2j * np.pi * rng.random((count, size)))
        return batch

    def sample_batches(self, max_samples: int) -> Iterator[np.ndarray]:
        """Deterministic stream of batches totalling exactly ``max_samples`` states."""
        produced = 0
        index = 0
        while produced < max_samples:
            batch = self.realization(index)
            if produced + batch.shape[0] > max_samples:
                batch = batch[: max_samples - produced]
            produced += batch.shape[0]
            index += 1
            yield batch

    def realizations_needed(self, max_samples: int) -> int:
        per = self.batch_size()
        return (max_samples + per - 1) // per

    def to_json(self) -> str:
        data = asdict(self)
        data["moduli"] = list(self.moduli) if self.moduli is not None else None
        return json.dumps(data)

    @classmethod
    def from_json(cls, text: str) -> "EnsembleSpec":
        data = json.loads(text)
        if data.get("moduli") is not None:
            data["moduli"] = tuple(data["moduli"])
        return cls(**data)


def load_moduli_csv(path) -> np.ndarray:
    """Moduli profile from a one-value-per-line CSV file."""
    values = np.loadtxt(path, dtype=float, ndmin=1)
    return values
