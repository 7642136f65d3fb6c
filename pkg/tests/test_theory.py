import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfent import theory
from mfent.errors import InvalidArgumentError, MissingMomentError
from mfent.statistics import MomentTable, Stat

LOCALIZED = {(): 1.0, (2,): 1.0, (3,): 1.0, (4,): 1.0, (2, 2): 1.0}


def random_table(size, seed):
    rng = np.random.default_rng(seed)
    moduli = rng.random(size)
    return MomentTable.from_moduli(moduli / moduli.sum())


class TestMeanTangle:
    def test_localized(self):
        assert theory.mean_tangle_pred(8, 1.0) == pytest.approx(0.0)

    def test_uniform_four(self):
        assert theory.mean_tangle_pred(4, 0.25) == pytest.approx(0.5)

    def test_delocalized_limit(self):
        assert theory.mean_tangle_pred(2**20, 2 ** -20.0) == pytest.approx(1.0, abs=1e-5)

    def test_out_of_range_moment(self):
        with pytest.raises(InvalidArgumentError):
            theory.mean_tangle_pred(8, 0.05)  # below 1/N
        with pytest.raises(InvalidArgumentError):
            theory.mean_tangle_pred(8, 1.5)

    def test_odd_size(self):
        with pytest.raises(InvalidArgumentError):
            theory.mean_tangle_pred(7, 0.5)


class TestMeanLinearEntropy:
    def test_reduces_to_tangle_at_single_qubit(self):
        for size, p2 in [(8, 0.2), (16, 0.125), (64, 0.03)]:
            assert theory.mean_linear_entropy_pred(size, 1, p2) == pytest.approx(
                theory.mean_tangle_pred(size, p2), abs=1e-15
            )

    def test_example(self):
        assert theory.mean_linear_entropy_pred(16, 2, 0.125) == pytest.approx(0.7)

    def test_localized(self):
        assert theory.mean_linear_entropy_pred(16, 2, 1.0) == pytest.approx(0.0)

    def test_invalid_nu(self):
        with pytest.raises(InvalidArgumentError):
            theory.mean_linear_entropy_pred(16, 3, 0.125)  # nu > n_r - nu
        with pytest.raises(InvalidArgumentError):
            theory.mean_linear_entropy_pred(16, 0, 0.125)


class TestFirstOrderEntropy:
    def test_approaches_nu_for_large_sizes(self):
        # as the linear-entropy prediction approaches 1 the value approaches nu
        size, nu = 2**20, 2
        assert theory.first_order_entropy_pred(size, nu, 1 / size) == pytest.approx(nu, abs=1e-4)

    def test_examples(self):
        assert theory.first_order_entropy_pred(256, 1, 2 / 257) == pytest.approx(0.991580, abs=1e-6)
        assert theory.first_order_entropy_pred(16, 2, 0.125) == pytest.approx(1.350787, abs=1e-6)

    def test_consistency_with_tangle_series(self):
        # at nu = 1: 1 - (1 - <tau>)/(2 ln 2) exactly
        for size, p2 in [(8, 0.3), (64, 0.05)]:
            tau = theory.mean_tangle_pred(size, p2)
            assert theory.first_order_entropy_pred(size, 1, p2) == pytest.approx(
                1.0 - (1.0 - tau) / (2.0 * math.log(2)), abs=1e-15
            )


class TestMeanTangleSquared:
    def test_uniform_four(self):
        assert theory.mean_tangle_sq_pred(4, MomentTable.uniform(4)) == pytest.approx(0.375)

    def test_localized(self):
        assert theory.mean_tangle_sq_pred(8, LOCALIZED) == pytest.approx(0.0, abs=1e-12)

    def test_missing_moment(self):
        with pytest.raises(MissingMomentError):
            theory.mean_tangle_sq_pred(8, MomentTable({(2,): Stat(0.2, 0.0, 0)}))

    @pytest.mark.parametrize("size", [4, 8, 16, 64])
    def test_matches_general_power_route(self, size):
        table = random_table(size, size)
        assert theory.mean_tangle_power_pred(2, size, table) == pytest.approx(
            theory.mean_tangle_sq_pred(size, table), rel=1e-10
        )

    def test_variance_nonnegative(self):
        for seed in range(5):
            table = random_table(16, seed)
            tau = theory.mean_tangle_pred(16, table[(2,)])
            assert theory.mean_tangle_sq_pred(16, table) >= tau**2 - 1e-10


class TestMeanTanglePower:
    @pytest.mark.parametrize("size", [4, 8, 16])
    def test_first_power_matches_closed_form(self, size):
        table = random_table(size, size + 1)
        assert theory.mean_tangle_power_pred(1, size, table) == pytest.approx(
            theory.mean_tangle_pred(size, table[(2,)]), rel=1e-12
        )

    def test_third_power_matches_oracle(self):
        from mfent.oracle import OracleProblem, exact_phase_average_tangle_power

        size = 8
        table = MomentTable.uniform(size)
        oracle = exact_phase_average_tangle_power(
            OracleProblem(tuple([1.0 / size] * size), 3)
        )
        assert theory.mean_tangle_power_pred(3, size, table) == pytest.approx(oracle, rel=1e-10)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 3))
    def test_in_unit_interval(self, seed, n):
        table = random_table(8, seed)
        value = theory.mean_tangle_power_pred(n, 8, table)
        assert -1e-10 <= value <= 1.0 + 1e-10


class TestSecondOrderEntropy:
    def test_uniform_four(self):
        assert theory.second_order_entropy_pred(4, MomentTable.uniform(4)) == pytest.approx(
            0.594243, abs=1e-6
        )

    def test_deterministic_maximal_tangle(self):
        # <tau> = <tau^2> = 1 makes both series terms vanish, giving exactly 1
        value = 1.0 - ((1.0 - 1.0) / 2.0 + (1.0 - 2.0 + 1.0) / 12.0) / math.log(2)
        assert value == pytest.approx(1.0)

    def test_never_exceeds_first_order(self):
        for seed in range(5):
            table = random_table(16, seed)
            s1 = theory.first_order_entropy_pred(16, 1, table[(2,)])
            s2 = theory.second_order_entropy_pred(16, table)
            assert s2 <= s1 + 1e-12

    def test_factorized_variant(self):
        table = random_table(16, 3)
        exact = theory.second_order_entropy_pred(16, table, "exact-p2sq")
        fact = theory.second_order_entropy_pred(16, table, "factorized")
        # for a deterministic moduli profile <p2^2> = <p2>^2, so they agree
        assert fact == pytest.approx(exact, rel=1e-12)

    def test_factorized_differs_with_fluctuating_p2(self):
        table = MomentTable(
            {
                (2,): Stat(0.2, 0.0, 0),
                (3,): Stat(0.06, 0.0, 0),
                (4,): Stat(0.02, 0.0, 0),
                (2, 2): Stat(0.05, 0.0, 0),  # > 0.04 = <p2>^2
            }
        )
        exact = theory.second_order_entropy_pred(16, table, "exact-p2sq")
        fact = theory.second_order_entropy_pred(16, table, "factorized")
        assert exact != pytest.approx(fact, abs=1e-6)

    def test_unknown_variant(self):
        with pytest.raises(InvalidArgumentError):
            theory.second_order_entropy_pred(16, MomentTable.uniform(16), "fancy")


class TestPageEntropy:
    def test_values(self):
        assert theory.page_entropy(2) == pytest.approx(0.0)
        assert theory.page_entropy(4) == pytest.approx(0.480898, abs=1e-6)
        assert theory.page_entropy(8) == pytest.approx(0.735087, abs=1e-6)
        assert theory.page_entropy(64) == pytest.approx(0.966275, abs=1e-6)

    def test_approaches_one(self):
        assert theory.page_entropy(2**16) == pytest.approx(1.0, abs=1e-3)

    def test_odd_rejected(self):
        with pytest.raises(InvalidArgumentError):
            theory.page_entropy(5)


class TestCheckMoments:
    def test_valid(self):
        theory.check_moments(16, random_table(16, 0))

    def test_invalid_ordering(self):
        table = MomentTable(
            {(2,): Stat(0.2, 0.0, 0), (3,): Stat(0.3, 0.0, 0), (4,): Stat(0.1, 0.0, 0)}
        )
        with pytest.raises(InvalidArgumentError):
            theory.check_moments(16, table)
