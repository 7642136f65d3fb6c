"""Closed-form predictions from mean wavefunction moments.

Everything here maps a moment table (means of p_2, p_3, p_4, p_2^2, ...) to
predicted ensemble averages: mean tangle and its powers, mean linear entropy
for any cut, first and second-order mean entropy, and the exact CUE average.
"""

from __future__ import annotations

import math

from . import partitions
from .entanglement import LN2
from .errors import InvalidArgumentError


def _check_p2(size: int, p2: float) -> None:
    if not (1.0 / size - 1e-12 <= p2 <= 1.0 + 1e-12):
        raise InvalidArgumentError(f"<p_2> = {p2} outside [1/N, 1] for N = {size}")


def check_moments(size: int, moments) -> None:
    """Admissibility of a moment table: p2 in [1/N, 1] and p4 <= p3 <= p2."""
    p2 = moments[(2,)]
    _check_p2(size, p2)
    try:
        p3, p4 = moments[(3,)], moments[(4,)]
    except KeyError:
        return
    if not (p4 <= p3 + 1e-12 and p3 <= p2 + 1e-12):
        raise InvalidArgumentError(
            f"moments must be nonincreasing in q: p2={p2}, p3={p3}, p4={p4}"
        )


def mean_tangle_pred(size: int, p2: float) -> float:
    """<tau> = (N-2)/(N-1) (1 - <p_2>)."""
    if size < 4 or size % 2:
        raise InvalidArgumentError(f"N must be even and >= 4, got {size}")
    _check_p2(size, p2)
    return (size - 2) / (size - 1) * (1.0 - p2)


def mean_linear_entropy_pred(size: int, nu: int, p2: float) -> float:
    """<S_L> = (N - 2^nu)(1 - <p_2>)/(N - 1) for a (nu, n_r - nu) cut."""
    n_r = size.bit_length() - 1
    if 2**n_r != size:
        raise InvalidArgumentError(f"N must be a power of two, got {size}")
    if nu < 1 or nu > n_r - nu:
        raise InvalidArgumentError(f"nu must satisfy 1 <= nu <= n_r - nu, got nu={nu}, n_r={n_r}")
    _check_p2(size, p2)
    return (size - 2**nu) * (1.0 - p2) / (size - 1)


def first_order_entropy_pred(size: int, nu: int, p2: float) -> float:
    """First-order mean entropy: nu - (2^nu - 1)/(2 ln 2) (1 - <S_L>pred)."""
    sl = mean_linear_entropy_pred(size, nu, p2)
    return nu - (2**nu - 1) / (2.0 * LN2) * (1.0 - sl)


def mean_tangle_sq_pred(size: int, moments) -> float:
    """<tau^2> from the three four-point correlators.

    N(N-2)(N^2-6N+16) c_1111 + 4N(N-2)(N-4) c_211 + 4N(N-2) c_22, with each
    c expressed through <p_2>, <p_3>, <p_4> and <p_2^2>.
    """
    if size < 4 or size % 2:
        raise InvalidArgumentError(f"N must be even and >= 4, got {size}")
    c22 = (moments[(2, 2)] - moments[(4,)]) / (size * (size - 1))
    c211 = (
        moments[(2,)] - moments[(2, 2)] - 2.0 * moments[(3,)] + 2.0 * moments[(4,)]
    ) / (size * (size - 1) * (size - 2))
    c1111 = (
        1.0
        - 6.0 * moments[(2,)]
        + 8.0 * moments[(3,)]
        + 3.0 * moments[(2, 2)]
        - 6.0 * moments[(4,)]
    ) / (size * (size - 1) * (size - 2) * (size - 3))
    return (
        size * (size - 2) * (size**2 - 6 * size + 16) * c1111
        + 4 * size * (size - 2) * (size - 4) * c211
        + 4 * size * (size - 2) * c22
    )


def mean_tangle_power_pred(n: int, size: int, moments, n_max: int = partitions.DEFAULT_MAX_POWER) -> float:
    """<tau^n> via the exact coefficient table over partitions of 2n."""
    coeffs = partitions.tangle_power_coefficients(n, size, n_max=n_max)
    total = 0.0
    for lam, c in coeffs.items():
        if c:
            total += c * partitions.correlator_from_moments(lam, moments, size)
    return total


def second_order_entropy_pred(size: int, moments, variant: str = "exact-p2sq") -> float:
    """Second-order mean entropy for a single-qubit cut.

    1 - (1/ln 2)[(1 - <tau>)/2 + (1 - 2<tau> + <tau^2>)/12]; the ``factorized``
    variant replaces <p_2^2> by <p_2>^2 inside the correlators (less accurate,
    never a silent fallback).
    """
    if variant not in ("exact-p2sq", "factorized"):
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    if variant == "factorized":
        moments = _factorized(moments)
    mean_tau = mean_tangle_pred(size, moments[(2,)])
    mean_tau2 = mean_tangle_sq_pred(size, moments)
    return 1.0 - ((1.0 - mean_tau) / 2.0 + (1.0 - 2.0 * mean_tau + mean_tau2) / 12.0) / LN2


def _factorized(moments):
    if hasattr(moments, "with_factorized_p2sq"):
        return moments.with_factorized_p2sq()
    out = dict(moments)
    out[(2, 2)] = out[(2,)] ** 2
    return out


def first_order_entropy_from_table(size: int, nu: int, moments) -> float:
    return first_order_entropy_pred(size, nu, moments[(2,)])


def page_entropy(size: int) -> float:
    """Exact CUE mean entanglement entropy for a (1, n_r - 1) cut, in bits.

    (1/ln 2) * sum_{k=N/2+1}^{N-1} 1/k; the empty sum at N = 2 gives 0.
    """
    if size < 2 or size % 2:
        raise InvalidArgumentError(f"N must be even and >= 2, got {size}")
    return math.fsum(1.0 / k for k in range(size // 2 + 1, size)) / LN2
