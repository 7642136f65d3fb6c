
import pytest

from mfent import experiments, theory
from mfent.ensembles import EnsembleSpec


@pytest.fixture(scope="module")
def small_fig2():
    return experiments.fig2_pipeline("1/3", (4, 5, 6), samples=4000, seed=0)


class TestFig2:
    def test_report_shape(self, small_fig2):
        assert small_fig2.sizes == (4, 5, 6)
        assert [r.n_r for r in small_fig2.results] == [4, 5, 6]
        for r in small_fig2.results:
            assert set(experiments.FIG2_OBSERVABLES) <= set(r.stats)

    def test_predictions_follow_from_measured_moments(self, small_fig2):
        for r in small_fig2.results:
            size = 2**r.n_r
            p2 = r.stats["p2"].mean
            assert r.s1_pred == pytest.approx(
                theory.first_order_entropy_pred(size, 1, p2), abs=1e-12
            )
            # second order always lies at or below first order
            assert r.s2_pred <= r.s1_pred + 1e-12
            assert r.s2_pred_factorized <= r.s1_pred + 1e-12

    def test_deviations_positive_and_shrinking(self, small_fig2):
        devs = [r.deviation("s1") for r in small_fig2.results]
        assert all(d > 0 for d in devs)
        assert devs[-1] < devs[0]

    def test_second_order_closer_than_first(self, small_fig2):
        for r in small_fig2.results:
            s = r.mean_entropy
            assert abs(r.s2_pred - s) < abs(r.s1_pred - s)

    def test_fits_present(self, small_fig2):
        assert small_fig2.s1_fit.slope < 0
        assert small_fig2.p2sq_fit.slope < 0

    def test_deterministic(self):
        a = experiments.fig2_pipeline("1/3", (4, 5, 6), samples=500, seed=3)
        b = experiments.fig2_pipeline("1/3", (4, 5, 6), samples=500, seed=3)
        assert [r.stats for r in a.results] == [r.stats for r in b.results]


class TestFig1:
    def test_points_cover_requested_cuts(self):
        points = experiments.fig1_pipeline("cue", (4, 6), samples=400, seed=1)
        got = {(p.n_r, p.nu) for p in points}
        assert got == {(4, 1), (4, 2), (6, 1), (6, 2), (6, 3)}

    def test_cue_first_order_close(self):
        points = experiments.fig1_points(EnsembleSpec("cue", 6, seed=2), 20000, (1,))
        (p,) = points
        # CUE states are nearly maximally entangled; first order is accurate
        assert abs(p.deviation) < 0.01
        assert p.mean_entropy.mean == pytest.approx(theory.page_entropy(64), abs=3 * p.mean_entropy.stderr + 1e-9)

    def test_shared_moments_across_cuts(self):
        spec = EnsembleSpec("intermediate", 5, seed=4, gamma="1/3", shuffle=True)
        points = experiments.fig1_points(spec, 2000, (1, 2))
        assert points[0].mean_p2 == points[1].mean_p2
        assert points[0].mean_ipr == points[1].mean_ipr

    def test_prediction_formula(self):
        spec = EnsembleSpec("manybody", 4, seed=5, shuffle=True)
        points = experiments.fig1_points(spec, 64, (2,))
        (p,) = points
        assert p.s1_pred == pytest.approx(
            theory.first_order_entropy_pred(16, 2, p.mean_p2.mean), abs=1e-12
        )

    def test_ipr_consistent_with_p2(self):
        points = experiments.fig1_points(EnsembleSpec("cue", 4, seed=6), 1000, (1,))
        (p,) = points
        # Jensen: <1/p2> >= 1/<p2>
        assert p.mean_ipr.mean >= 1.0 / p.mean_p2.mean - 1e-9


class TestValidateOracle:
    def test_small_sweep_is_exact(self):
        cases, failures = experiments.validate_oracle(
            sizes=(4, 6), powers=(1, 2), trials=4, seed=1
        )
        assert len(cases) == 2 * 4 * 2
        assert failures == []
        assert max(c.relative_error for c in cases) < 1e-10

    def test_relative_error_metric(self):
        case = experiments.ValidationCase(4, 1, 0, oracle=0.5, predicted=0.5005)
        assert case.relative_error == pytest.approx(0.001)
