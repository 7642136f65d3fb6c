"""Integer partitions and the symmetric-function algebra behind phase-averaged correlators.

A partition is represented as a tuple of positive integers sorted in
nonincreasing order, e.g. ``(2, 1, 1)``.  All coefficient arithmetic is exact
(Python integers / fractions), so tables remain valid at any matrix size.
"""

from __future__ import annotations

import json
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod

from .errors import CapacityError, InvalidArgumentError, MissingMomentError

Parts = tuple[int, ...]

#: largest tangle power for which coefficient tables are built by default
DEFAULT_MAX_POWER = 4


def check_partition(parts: Parts) -> Parts:
    """Validate and return a partition tuple (nonincreasing, all parts >= 1)."""
    parts = tuple(parts)
    if any(p < 1 for p in parts):
        raise InvalidArgumentError(f"partition parts must be >= 1, got {parts}")
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise InvalidArgumentError(f"partition must be nonincreasing, got {parts}")
    return parts


def weight(parts: Parts) -> int:
    return sum(parts)


def multiplicities(parts: Parts) -> dict[int, int]:
    """Multiplicity of each distinct part value."""
    mult: dict[int, int] = {}
    for p in parts:
        mult[p] = mult.get(p, 0) + 1
    return mult


def union(a: Parts, b: Parts) -> Parts:
    """Multiset union of two partitions, re-sorted nonincreasing."""
    return tuple(sorted(a + b, reverse=True))


@lru_cache(maxsize=None)
def enumerate_partitions(n: int) -> tuple[Parts, ...]:
    """All partitions of ``n`` in reverse lexicographic (canonical) order.

    The empty partition is the unique partition of 0.
    """
    if n < 0:
        raise InvalidArgumentError(f"n must be >= 0, got {n}")

    def gen(rest: int, maxpart: int):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, maxpart), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return tuple(gen(n, n))


def monomial_term_count(parts: Parts, nvars: int) -> int:
    """Number of distinct monomials of the monomial symmetric polynomial m_parts
    in ``nvars`` variables: nvars! / ((nvars-l)! * prod of multiplicity factorials).
    """
    parts = check_partition(parts)
    ell = len(parts)
    if nvars < ell:
        raise InvalidArgumentError(
            f"need at least {ell} variables for partition {parts}, got {nvars}"
        )
    return _distinct_monomials(parts, nvars)


def _distinct_monomials(parts: Parts, nvars: int) -> int:
    """Like :func:`monomial_term_count` but returns 0 when the partition is too long."""
    ell = len(parts)
    if nvars < ell:
        return 0
    count = 1
    for i in range(ell):
        count *= nvars - i
    return count // prod(factorial(m) for m in multiplicities(parts).values())


def _multiply_power_sum(expansion: dict[Parts, int], r: int) -> dict[Parts, int]:
    """Multiply an m-basis expansion by the power sum p_r, exactly.

    Rule: m_mu * p_r = sum over nu obtained by appending r as a new part or by
    adding r to one distinct part value of mu; the coefficient picked up is the
    multiplicity of the new/incremented value in nu.
    """
    out: dict[Parts, int] = defaultdict(int)
    for mu, coeff in expansion.items():
        nu = tuple(sorted(mu + (r,), reverse=True))
        out[nu] += coeff * nu.count(r)
        for a in set(mu):
            lst = list(mu)
            lst.remove(a)
            nu = tuple(sorted(lst + [a + r], reverse=True))
            out[nu] += coeff * nu.count(a + r)
    return dict(out)


@lru_cache(maxsize=None)
def power_sum_to_monomial(parts: Parts) -> dict[Parts, int]:
    """Expansion of the power-sum product p_parts in the monomial basis.

    Returns the row {mu: L[parts, mu]} of the integer transition matrix, valid
    in any number of variables >= weight(parts).
    """
    parts = check_partition(parts)
    if not parts:
        raise InvalidArgumentError("partition must be nonempty")
    expansion: dict[Parts, int] = {(): 1}
    for r in parts:
        expansion = _multiply_power_sum(expansion, r)
    return expansion


@lru_cache(maxsize=None)
def monomial_in_power_sums(parts: Parts) -> dict[Parts, Fraction]:
    """Expansion of m_parts as a rational combination of power-sum products.

    Obtained by inverting the lower-triangular transition matrix restricted to
    partitions of weight(parts) in canonical order.
    """
    parts = check_partition(parts)
    n = weight(parts)
    order = enumerate_partitions(n)
    idx = {lam: i for i, lam in enumerate(order)}
    size = len(order)
    # Augmented Gaussian elimination over Fractions; L is lower triangular
    # with nonzero diagonal in this order, so no pivoting is needed.
    mat = [[Fraction(0)] * size for _ in range(size)]
    for i, lam in enumerate(order):
        for mu, c in power_sum_to_monomial(lam).items():
            mat[i][idx[mu]] = Fraction(c)
    # Solve x^T L = e_parts^T, i.e. express m_parts via rows p_lambda.
    target = idx[parts]
    # Back-substitution on the transposed triangular system.  Column j of L is
    # nonzero only for rows i <= j in canonical order (lower triangular).
    coeffs = [Fraction(0)] * size
    for j in range(size - 1, -1, -1):
        rhs = Fraction(1) if j == target else Fraction(0)
        acc = sum((coeffs[i] * mat[i][j] for i in range(j + 1, size)), Fraction(0))
        coeffs[j] = (rhs - acc) / mat[j][j]
    return {order[j]: coeffs[j] for j in range(size) if coeffs[j] != 0}


def strip_ones(parts: Parts) -> Parts:
    """Drop parts equal to 1 (p_1 = 1 for normalized states)."""
    return tuple(p for p in parts if p > 1)


def product_moment(moments, mu: Parts) -> float:
    """Look up the ensemble average of the power-sum product p_mu.

    ``moments`` is any mapping keyed by partitions with all parts >= 2 (1s are
    stripped since p_1 = 1).
    """
    key = strip_ones(mu)
    try:
        return moments[key]
    except KeyError:
        raise MissingMomentError(key) from None


def correlator_from_moments(parts: Parts, moments, nvars: int) -> float:
    """Phase-averaged correlator c_parts of distinct components from mean moments.

    Inverts the power-sum/monomial relation and divides by the number of
    distinct monomials in ``nvars`` variables.
    """
    parts = check_partition(parts)
    if not parts:
        return 1.0
    if nvars < len(parts):
        raise InvalidArgumentError(
            f"nvars={nvars} too small for partition {parts}"
        )
    total = 0.0
    for mu, coeff in monomial_in_power_sums(parts).items():
        total += float(coeff) * product_moment(moments, mu)
    return total / monomial_term_count(parts, nvars)


# ---------------------------------------------------------------------------
# Coefficients of <tau^n> as an integer combination of correlators.
#
# tau = 4 (A B - D) with A = sum |u_i|^2, B = sum |v_i|^2 and
# D = |<u|v>|^2 over the half-size index range 1..M, M = N/2.  After phase
# averaging, every surviving term is a sum over distinct indices of products
# x_i^a y_i^b (x, y = moduli squared of the two halves).  We track such terms
# as multisets of exponent pairs (a, b) and expand the binomial in k exactly.
# ---------------------------------------------------------------------------

PairPattern = tuple[tuple[int, int], ...]  # sorted desc multiset of (a, b) pairs


def _pattern_multiply_single(terms: dict[PairPattern, int], which: int) -> dict[PairPattern, int]:
    """Multiply a pair-pattern expansion by a plain sum over one half (x or y).

    Same rule as :func:`_multiply_power_sum`, with pair values in place of
    integer parts.  ``which`` = 0 increments the x exponent, 1 the y exponent.
    """
    unit = (1, 0) if which == 0 else (0, 1)
    out: dict[PairPattern, int] = defaultdict(int)
    for pat, coeff in terms.items():
        new = tuple(sorted(pat + (unit,), reverse=True))
        out[new] += coeff * new.count(unit)
        for pair in set(pat):
            inc = (pair[0] + 1, pair[1]) if which == 0 else (pair[0], pair[1] + 1)
            lst = list(pat)
            lst.remove(pair)
            new = tuple(sorted(lst + [inc], reverse=True))
            out[new] += coeff * new.count(inc)
    return dict(out)


def _phase_averaged_overlap_power(t: int) -> dict[PairPattern, int]:
    """Pair-pattern expansion of the phase average of |<u|v>|^(2t).

    Surviving index tuples are grouped by the multiplicity partition rho of
    the chosen indices; each contributes (t!/prod rho_j!)^2 monomials
    prod (x_i y_i)^rho_j over distinct indices.
    """
    out: dict[PairPattern, int] = {}
    for rho in enumerate_partitions(t):
        perms = factorial(t) // prod(factorial(p) for p in rho)
        pattern = tuple(sorted(((p, p) for p in rho), reverse=True))
        out[pattern] = perms * perms
    return out


def _pattern_exponents(pat: PairPattern) -> Parts:
    """Correlator partition of a pair pattern: all nonzero exponents, sorted."""
    exps = [e for pair in pat for e in pair if e > 0]
    return tuple(sorted(exps, reverse=True))


def _pattern_count(pat: PairPattern, half: int) -> int:
    """Number of distinct index assignments of a pair pattern over ``half`` indices."""
    ell = len(pat)
    if ell > half:
        return 0
    count = 1
    for i in range(ell):
        count *= half - i
    mult: dict[tuple[int, int], int] = {}
    for pair in pat:
        mult[pair] = mult.get(pair, 0) + 1
    return count // prod(factorial(m) for m in mult.values())


@lru_cache(maxsize=None)
def _tangle_power_patterns(n: int) -> tuple[tuple[int, PairPattern, int], ...]:
    """Size-independent expansion of the phase average of tau^n.

    Returns (k, pattern, coefficient) triples; the N dependence enters only
    through the distinct-assignment counts over N/2 indices.
    """
    triples: list[tuple[int, PairPattern, int]] = []
    for k in range(n + 1):
        sign = (-1) ** (n - k) * comb(n, k)
        terms = _phase_averaged_overlap_power(n - k)
        for _ in range(k):
            terms = _pattern_multiply_single(terms, 0)
        for _ in range(k):
            terms = _pattern_multiply_single(terms, 1)
        for pat, coeff in terms.items():
            triples.append((k, pat, sign * coeff))
    return tuple(triples)


def tangle_power_coefficients(n: int, size: int, n_max: int = DEFAULT_MAX_POWER) -> dict[Parts, int]:
    """Exact integer coefficients T such that <tau^n> = sum_lam T[lam] * c_lam.

    ``size`` is the full vector length N (even, >= 4); the sum runs over
    partitions of 2n.  Partitions whose coefficient vanishes at this N are
    included with value 0.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if n > n_max:
        raise CapacityError(f"tangle power n={n} exceeds cap n_max={n_max}")
    if size < 4 or size % 2 != 0:
        raise InvalidArgumentError(f"size must be even and >= 4, got {size}")
    half = size // 2
    out: dict[Parts, int] = {lam: 0 for lam in enumerate_partitions(2 * n)}
    for _k, pat, coeff in _tangle_power_patterns(n):
        count = _pattern_count(pat, half)
        if count:
            out[_pattern_exponents(pat)] += coeff * count
    return {lam: 4**n * c for lam, c in out.items()}


# ---------------------------------------------------------------------------
# JSON serialization of coefficient maps (partition as list, value as string
# so arbitrary-precision integers survive the round trip).
# ---------------------------------------------------------------------------

def coefficients_to_json(coeffs: dict[Parts, int]) -> str:
    entries = [[list(lam), str(c)] for lam, c in sorted(coeffs.items(), reverse=True)]
    return json.dumps(entries)


def coefficients_from_json(text: str) -> dict[Parts, int]:
    entries = json.loads(text)
    return {tuple(lam): int(c) for lam, c in entries}
