import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from mfent import theory
from mfent.errors import CapacityError, InvalidArgumentError
from mfent.oracle import (
    OracleProblem,
    exact_exchangeable_correlator,
    exact_phase_average_tangle_power,
)

UNIFORM4 = (0.25, 0.25, 0.25, 0.25)


def brute_force_correlator(parts, moduli):
    """Direct average over explicit distinct index tuples (small sizes only)."""
    size = len(moduli)
    total = 0.0
    count = 0
    for tup in itertools.permutations(range(size), len(parts)):
        total += math.prod(moduli[i] ** p for i, p in zip(tup, parts))
        count += 1
    return total / count


class TestExchangeableCorrelator:
    def test_uniform_pair(self):
        assert exact_exchangeable_correlator((1, 1), UNIFORM4) == pytest.approx(1 / 16, abs=1e-15)

    def test_uniform_squares(self):
        assert exact_exchangeable_correlator((2, 2), UNIFORM4) == pytest.approx(1 / 256, abs=1e-15)

    def test_single_part_any_moduli(self):
        moduli = (0.5, 0.3, 0.15, 0.05)
        assert exact_exchangeable_correlator((1,), moduli) == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("parts", [(1,), (2,), (1, 1), (2, 1), (2, 2), (1, 1, 1), (3, 2, 1)])
    def test_matches_brute_force(self, parts):
        rng = np.random.default_rng(3)
        for _ in range(5):
            moduli = rng.random(6)
            moduli = tuple(moduli / moduli.sum())
            assert exact_exchangeable_correlator(parts, moduli) == pytest.approx(
                brute_force_correlator(parts, moduli), rel=1e-12
            )

    def test_exact_rational(self):
        moduli = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8))
        c = exact_exchangeable_correlator((1, 1), moduli)
        assert isinstance(c, Fraction)
        # (p1^2 - p2) / (N(N-1)) with p2 = 1/4 + 1/16 + 2/64
        assert c == (1 - Fraction(11, 32)) / 12

    def test_too_long_rejected(self):
        with pytest.raises(InvalidArgumentError):
            exact_exchangeable_correlator((1,) * 5, UNIFORM4)


class TestTanglePowerOracle:
    def test_uniform_first_power(self):
        assert exact_phase_average_tangle_power(OracleProblem(UNIFORM4, 1)) == pytest.approx(0.5)

    def test_uniform_second_power(self):
        assert exact_phase_average_tangle_power(OracleProblem(UNIFORM4, 2)) == pytest.approx(0.375)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_basis_state(self, n):
        moduli = (1.0, 0.0, 0.0, 0.0)
        assert exact_phase_average_tangle_power(OracleProblem(moduli, n)) == pytest.approx(0.0, abs=1e-15)

    def test_first_power_matches_closed_form(self):
        rng = np.random.default_rng(11)
        for size in (4, 6, 8):
            for _ in range(5):
                moduli = rng.random(size)
                moduli = tuple(moduli / moduli.sum())
                p2 = sum(x**2 for x in moduli)
                expected = theory.mean_tangle_pred(size, p2)
                got = exact_phase_average_tangle_power(OracleProblem(moduli, 1))
                assert got == pytest.approx(expected, abs=1e-12)

    def test_exact_rational_mode(self):
        moduli = (Fraction(1, 4),) * 4
        assert exact_phase_average_tangle_power(OracleProblem(moduli, 2)) == Fraction(3, 8)

    def test_monte_carlo_agreement(self):
        # sampled exchangeable states converge to the oracle value
        from mfent.ensembles import EnsembleSpec
        from mfent.statistics import ensemble_average

        rng = np.random.default_rng(2)
        moduli = rng.random(8)
        moduli = tuple(moduli / moduli.sum())
        spec = EnsembleSpec("exchangeable", 3, seed=9, moduli=moduli)
        stats = ensemble_average(spec, ("tau", "tau2"), 40000)
        for label, n in (("tau", 1), ("tau2", 2)):
            exact = exact_phase_average_tangle_power(OracleProblem(moduli, n))
            assert abs(stats[label].mean - exact) < 3 * stats[label].stderr + 1e-9


class TestProblemValidation:
    def test_size_cap(self):
        with pytest.raises(CapacityError):
            OracleProblem(tuple([1.0 / 18] * 18), 1)

    def test_power_cap(self):
        with pytest.raises(CapacityError):
            OracleProblem(UNIFORM4, 4)

    def test_odd_length(self):
        with pytest.raises(InvalidArgumentError):
            OracleProblem((0.5, 0.25, 0.25), 1)

    def test_negative_moduli(self):
        with pytest.raises(InvalidArgumentError):
            OracleProblem((0.5, 0.7, -0.1, -0.1), 1)

    def test_unnormalized(self):
        with pytest.raises(InvalidArgumentError):
            OracleProblem((0.5, 0.25, 0.25, 0.25), 1)
