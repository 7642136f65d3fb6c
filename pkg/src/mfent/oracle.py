"""Brute-force exact phase/permutation averages for small vectors.

Validates the coefficient tables and correlator algebra by a route that never
touches them: tangle powers are expanded with explicit indices, phase-averaged
term by term, and permutation-averaged via symmetric sums.  Works with floats
or, for small sizes, exact ``Fraction`` moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import CapacityError, InvalidArgumentError

MAX_SIZE = 16
MAX_POWER = 3


@dataclass(frozen=True)
class OracleProblem:
    """Moduli-squared profile plus the tangle power to average.

    ``moduli`` are the squared amplitudes x_i >= 0 with sum 1; the vector
    length must be even (the single-qubit cut splits it in half).  After
    permutation averaging the result is independent of which qubit is traced
    out, so no qubit index is needed beyond the half/half split.
    """

    moduli: tuple
    n: int

    def __post_init__(self):
        size = len(self.moduli)
        if size > MAX_SIZE:
            raise CapacityError(f"oracle supports at most {MAX_SIZE} components, got {size}")
        if size < 4 or size % 2 != 0:
            raise InvalidArgumentError(f"vector length must be even and >= 4, got {size}")
        if self.n < 1 or self.n > MAX_POWER:
            raise CapacityError(f"tangle power must be in 1..{MAX_POWER}, got {self.n}")
        if any(x < 0 for x in self.moduli):
            raise InvalidArgumentError("moduli must be nonnegative")
        total = sum(self.moduli)
        if not isinstance(total, Fraction) and abs(total - 1.0) > 1e-12:
            raise InvalidArgumentError(f"moduli must sum to 1, got {total}")
        if isinstance(total, Fraction) and total != 1:
            raise InvalidArgumentError(f"moduli must sum to 1, got {total}")


@lru_cache(maxsize=None)
def _set_partitions(n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All set partitions of {0..n-1}, as tuples of blocks."""
    if n == 0:
        return ((),)
    out = []
    for smaller in _set_partitions(n - 1):
        elt = n - 1
        for i, block in enumerate(smaller):
            out.append(smaller[:i] + (block + (elt,),) + smaller[i + 1:])
        out.append(smaller + ((elt,),))
    return tuple(out)


def exact_exchangeable_correlator(parts, moduli):
    """Exact c_lambda for a fixed moduli profile under uniform permutations.

    Average of prod_j x_{i_j}^{lambda_j} over distinct indices, computed by
    Moebius inversion over set partitions of the lambda slots (symmetric sums
    of the moduli), never by enumerating permutations.  Exact when the moduli
    are Fractions.
    """
    parts = tuple(parts)
    size = len(moduli)
    ell = len(parts)
    if ell > size:
        raise InvalidArgumentError(f"partition length {ell} exceeds vector size {size}")
    if ell == 0:
        return 1.0 if not _is_exact(moduli) else Fraction(1)
    exact = _is_exact(moduli)

    def power_sum(q):
        terms = [x**q for x in moduli]
        return sum(terms) if exact else math.fsum(terms)

    pieces = []
    for blocks in _set_partitions(ell):
        coeff = 1
        for block in blocks:
            coeff *= (-1) ** (len(block) - 1) * math.factorial(len(block) - 1)
        term = coeff if exact else float(coeff)
        for block in blocks:
            term *= power_sum(sum(parts[j] for j in block))
        pieces.append(term)
    ordered_sum = sum(pieces) if exact else math.fsum(pieces)
    count = math.perm(size, ell)
    return ordered_sum / Fraction(count) if exact else ordered_sum / count


def _is_exact(moduli) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in moduli)


@lru_cache(maxsize=None)
def _surviving_terms(n: int, half: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Phase-surviving monomials of tau^n / 4^n with explicit half-range indices.

    Each entry is (exponent pattern sorted desc, integer coefficient); the
    pattern collects the exponents of all touched components (x and y halves).
    Obtained by expanding (AB - D)^n index by index and keeping, inside each
    power of the overlap D, only index tuples whose phases cancel.
    """
    accum: dict[tuple[int, ...], int] = {}
    for k in range(n + 1):
        t = n - k
        sign = (-1) ** t * math.comb(n, k)
        for utup in product(range(half), repeat=k):
            for vtup in product(range(half), repeat=k):
                for itup in product(range(half), repeat=t):
                    # phases cancel only when the conjugated index multiset
                    # matches; each match contributes one permutation of it
                    mult: dict[int, int] = {}
                    for i in itup:
                        mult[i] = mult.get(i, 0) + 1
                    perms = math.factorial(t)
                    for m in mult.values():
                        perms //= math.factorial(m)
                    ex = [0] * (2 * half)
                    for a in utup:
                        ex[a] += 1
                    for b in vtup:
                        ex[half + b] += 1
                    for i, m in mult.items():
                        ex[i] += m
                        ex[half + i] += m
                    pattern = tuple(sorted((e for e in ex if e), reverse=True))
                    accum[pattern] = accum.get(pattern, 0) + sign * perms
    return tuple(accum.items())


def exact_phase_average_tangle_power(problem: OracleProblem):
    """Exact <tau^n> over i.i.d. uniform phases and uniform moduli permutations."""
    moduli = problem.moduli
    half = len(moduli) // 2
    exact = _is_exact(moduli)
    pieces = []
    for pattern, coeff in _surviving_terms(problem.n, half):
        if coeff == 0:
            continue
        c = exact_exchangeable_correlator(pattern, moduli)
        pieces.append(coeff * c if exact else float(coeff) * c)
    total = sum(pieces) if exact else math.fsum(pieces)
    return 4**problem.n * total
