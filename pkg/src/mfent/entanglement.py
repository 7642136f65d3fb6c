"""Exact bipartite entanglement measures of pure states.

States are 1-D complex numpy arrays of length 2**n_r, unit norm.  Qubit 1 is
the most significant bit of the computational index; the default bipartition
keeps the first (most significant) qubits in subsystem A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

LN2 = math.log(2.0)
EIG_TOL = 1e-12


@dataclass(frozen=True)
class Bipartition:
    """A cut of ``n_r`` qubits into subsystem A (``subset_a``) and the rest.

    Qubit indices are 1-based, qubit 1 = most significant bit.  Requires
    dim H_A <= dim H_B, i.e. len(subset_a) <= n_r / 2.
    """

    n_r: int
    subset_a: tuple[int, ...]

    def __post_init__(self):
        subset = tuple(sorted(set(self.subset_a)))
        object.__setattr__(self, "subset_a", subset)
        if not subset:
            raise InvalidArgumentError("subset_a must be nonempty")
        if any(q < 1 or q > self.n_r for q in subset):
            raise InvalidArgumentError(f"qubit indices must be in 1..{self.n_r}, got {subset}")
        if len(subset) > self.n_r - len(subset):
            raise InvalidArgumentError(
                f"subsystem A must not exceed half the qubits: nu={len(subset)}, n_r={self.n_r}"
            )

    @classmethod
    def first(cls, n_r: int, nu: int) -> "Bipartition":
        """The (nu, n_r - nu) cut keeping the nu most significant qubits."""
        return cls(n_r, tuple(range(1, nu + 1)))

    @property
    def nu(self) -> int:
        return len(self.subset_a)

    @property
    def dim_a(self) -> int:
        return 2 ** self.nu

    @property
    def dim_b(self) -> int:
        return 2 ** (self.n_r - self.nu)

    @property
    def is_leading(self) -> bool:
        """True when subsystem A is the leading (most significant) qubits."""
        return self.subset_a == tuple(range(1, self.nu + 1))

    def index_order(self) -> np.ndarray:
        """Permutation p with p[j * dim_b + c] = global index of (A=j, B=c)."""
        g = np.arange(2 ** self.n_r)
        comp = [q for q in range(1, self.n_r + 1) if q not in self.subset_a]
        j = np.zeros_like(g)
        for q in self.subset_a:
            j = (j << 1) | ((g >> (self.n_r - q)) & 1)
        c = np.zeros_like(g)
        for q in comp:
            c = (c << 1) | ((g >> (self.n_r - q)) & 1)
        order = np.empty_like(g)
        order[j * self.dim_b + c] = g
        return order


def check_state(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate unit norm and power-of-two length."""
    psi = np.asarray(psi, dtype=complex)
    size = psi.shape[0]
    if psi.ndim != 1 or size < 2 or size & (size - 1):
        raise InvalidArgumentError(f"state must be a 1-D array of power-of-two length, got shape {psi.shape}")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > 100 * tol:
        raise InvalidArgumentError(f"state norm^2 = {norm2}, expected 1")
    return psi


def split_state(psi: np.ndarray, b: Bipartition) -> np.ndarray:
    """Split components by subsystem-A bit values: rows are the 2^nu vectors psi^(j)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[0] != 2 ** b.n_r:
        raise InvalidArgumentError(f"state length {psi.shape[0]} does not match n_r={b.n_r}")
    if b.is_leading:
        return psi.reshape(b.dim_a, b.dim_b)
    return psi[b.index_order()].reshape(b.dim_a, b.dim_b)


def reduced_density_matrix(psi: np.ndarray, b: Bipartition) -> np.ndarray:
    """Reduced density matrix of subsystem A: the Gram matrix of the split vectors."""
    v = split_state(psi, b)
    return v @ v.conj().T


def density_eigenvalues(rho: np.ndarray, tol: float = EIG_TOL) -> np.ndarray:
    """Eigenvalues of a density matrix, validated and clipped to [0, 1].

    Eigenvalues in [-tol, 0) are numerical noise and clipped to 0; anything
    more negative is an error rather than silently fixed.
    """
    rho = np.asarray(rho)
    if not np.allclose(rho, rho.conj().T, atol=1e-12):
        raise InvalidArgumentError("density matrix is not Hermitian within 1e-12")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -tol:
        raise InvalidArgumentError(f"density matrix has eigenvalue {evals.min()} < -{tol}")
    if abs(evals.sum() - 1.0) > 1e-10:
        raise InvalidArgumentError(f"density matrix trace {evals.sum()} != 1")
    return np.clip(evals, 0.0, 1.0)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-tr(rho log2 rho) in bits, with 0 log 0 = 0."""
    evals = density_eigenvalues(rho)
    positive = evals[evals > 0]
    return float(-np.sum(positive * np.log2(positive)))


def linear_entropy(psi: np.ndarray, b: Bipartition) -> float:
    """d/(d-1) (1 - tr rho_A^2), normalized to [0, 1]."""
    rho = reduced_density_matrix(psi, b)
    purity = float(np.sum(np.abs(rho) ** 2))
    d = b.dim_a
    value = d / (d - 1) * (1.0 - purity)
    return min(max(value, 0.0), 1.0)


def tangle(psi: np.ndarray, qubit: int = 1) -> float:
    """4 det rho_A for the (1, n_r - 1) bipartition at the given qubit."""
    psi = np.asarray(psi, dtype=complex)
    n_r = psi.shape[0].bit_length() - 1
    if n_r < 2:
        raise InvalidArgumentError("tangle requires at least two qubits")
    rho = reduced_density_matrix(psi, Bipartition(n_r, (qubit,)))
    det = (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real
    return min(max(4.0 * float(det), 0.0), 1.0)


def _binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entropy_from_tangle(tau: float) -> float:
    """Entanglement entropy of any 2 x M pure state with tangle tau, in bits."""
    if tau < -1e-12 or tau > 1.0 + 1e-12:
        raise InvalidArgumentError(f"tangle must lie in [0, 1], got {tau}")
    tau = min(max(tau, 0.0), 1.0)
    return _binary_entropy((1.0 + math.sqrt(1.0 - tau)) / 2.0)


def truncated_entropy_series(tau: float, m: int) -> float:
    """Order-m truncation of the entropy series in powers of (1 - tau).

    S_m = 1 - (1/ln 2) sum_{n=1}^{m} (1-tau)^n / (2n(2n-1)); an upper bound
    on the exact entropy, nonincreasing in m.
    """
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    if tau < -1e-12 or tau > 1.0 + 1e-12:
        raise InvalidArgumentError(f"tangle must lie in [0, 1], got {tau}")
    tau = min(max(tau, 0.0), 1.0)
    one_minus = 1.0 - tau
    total = 0.0
    for n in range(1, m + 1):
        total += one_minus**n / (2 * n * (2 * n - 1))
    return 1.0 - total / LN2


def entropy_expansion_mixed(rho: np.ndarray, order: int) -> float:
    """Entropy expansion around the maximally mixed state, truncated at ``order``.

    S = nu + (1/ln 2) sum_{n=1}^{order} (-d)^n / (n(n+1)) tr((rho - 1/d)^{n+1})
    with d = 2^nu.  Converges to the exact entropy when every eigenvalue
    satisfies |d lambda - 1| < 1 (see :func:`mixed_expansion_converges`).
    """
    if order < 1:
        raise InvalidArgumentError(f"order must be >= 1, got {order}")
    evals = density_eigenvalues(rho)
    d = evals.shape[0]
    nu = d.bit_length() - 1
    if 2**nu != d:
        raise InvalidArgumentError(f"density matrix dimension {d} is not a power of two")
    delta = evals - 1.0 / d
    total = 0.0
    for n in range(1, order + 1):
        total += (-d) ** n / (n * (n + 1)) * float(np.sum(delta ** (n + 1)))
    return nu + total / LN2


def mixed_expansion_converges(rho: np.ndarray) -> bool:
    """Whether the mixed-state expansion converges for this spectrum."""
    evals = density_eigenvalues(rho)
    d = evals.shape[0]
    return bool(np.max(np.abs(d * evals - 1.0)) < 1.0)
