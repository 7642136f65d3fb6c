"""Reproducible experiment pipelines: moment/entropy scans, the two scaling
figures, and the oracle-versus-theory validation sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import theory
from .ensembles import EnsembleSpec
from .entanglement import Bipartition
from .oracle import OracleProblem, exact_phase_average_tangle_power
from .statistics import (
    MomentTable,
    ScalingFit,
    Stat,
    _batch_observables,
    ensemble_average,
    fit_scaling,
    moment_table_from_stats,
)

FIG2_OBSERVABLES = ("p2", "p3", "p4", "p2sq", "tau", "S", "S1", "S2")


@dataclass(frozen=True)
class Fig2SizeResult:
    n_r: int
    stats: dict[str, Stat]
    s1_pred: float
    s2_pred: float
    s2_pred_factorized: float

    @property
    def mean_entropy(self) -> float:
        return self.stats["S"].mean

    def deviation(self, which: str) -> float:
        """Relative difference <S_m>/<S> - 1 for which in {s1, s2, s2f}.

        The truncations are upper bounds on the entropy, so this is the
        positive magnitude of 1 - <S_m>/<S>.
        """
        pred = {"s1": self.s1_pred, "s2": self.s2_pred, "s2f": self.s2_pred_factorized}[which]
        return pred / self.mean_entropy - 1.0


@dataclass(frozen=True)
class Fig2Report:
    gamma: str
    samples: int
    sizes: tuple[int, ...]
    results: tuple[Fig2SizeResult, ...]
    s1_fit: ScalingFit | None
    s2_fit: ScalingFit | None
    p2sq_fit: ScalingFit


def fig2_size(spec: EnsembleSpec, samples: int) -> Fig2SizeResult:
    """Single-size measurement plus moment-based entropy predictions."""
    stats = ensemble_average(spec, FIG2_OBSERVABLES, samples)
    table = moment_table_from_stats(stats)
    size = spec.size
    return Fig2SizeResult(
        n_r=spec.n_r,
        stats=stats,
        s1_pred=theory.first_order_entropy_pred(size, 1, table[(2,)]),
        s2_pred=theory.second_order_entropy_pred(size, table, "exact-p2sq"),
        s2_pred_factorized=theory.second_order_entropy_pred(size, table, "factorized"),
    )


def fig2_pipeline(
    gamma: str,
    sizes,
    samples: int,
    seed: int,
    shuffle: bool = True,
) -> Fig2Report:
    """Entropy-versus-truncation scaling for the intermediate ensemble.

    Measures per-size moments and exact mean entropy, evaluates the first and
    second-order predictions from the measured moments, and fits the scaling
    of the relative deviations 1 - <S_m>/<S> and of <p_2^2> with size.
    """
    sizes = tuple(sizes)
    results = []
    for n_r in sizes:
        spec = EnsembleSpec("intermediate", n_r, seed=seed, gamma=gamma, shuffle=shuffle)
        results.append(fig2_size(spec, samples))
    # deviations can dip below zero at low sample counts; a log-log fit then
    # has no meaning, so it is omitted rather than forced
    dev1 = [r.deviation("s1") for r in results]
    dev2 = [r.deviation("s2") for r in results]
    s1_fit = fit_scaling(sizes, dev1) if all(d > 0 for d in dev1) else None
    s2_fit = fit_scaling(sizes, dev2) if all(d > 0 for d in dev2) else None
    p2sq_fit = fit_scaling(sizes, [r.stats["p2sq"].mean for r in results])
    return Fig2Report(gamma, samples, sizes, tuple(results), s1_fit, s2_fit, p2sq_fit)


@dataclass(frozen=True)
class Fig1Point:
    n_r: int
    nu: int
    mean_entropy: Stat
    mean_p2: Stat
    mean_ipr: Stat
    s1_pred: float

    @property
    def deviation(self) -> float:
        """Relative difference s1_pred/<S> - 1 (positive when the first-order
        prediction lies above the exact mean entropy)."""
        return self.s1_pred / self.mean_entropy.mean - 1.0


def fig1_points(spec: EnsembleSpec, samples: int, nus) -> list[Fig1Point]:
    """Exact mean entropy per cut plus the first-order prediction, one pass.

    ``nus`` lists subsystem sizes; each uses the leading-qubit cut.
    """
    nus = sorted(set(nus))
    bips = {nu: Bipartition.first(spec.n_r, nu) for nu in nus}
    sums = {"p2": 0.0, "xi": 0.0}
    sumsq = {"p2": 0.0, "xi": 0.0}
    s_sums = {nu: 0.0 for nu in nus}
    s_sumsq = {nu: 0.0 for nu in nus}
    total = 0
    for batch in spec.sample_batches(samples):
        base = _batch_observables(batch, ("p2", "xi"), bips[nus[0]])
        for lbl in ("p2", "xi"):
            sums[lbl] += float(np.sum(base[lbl]))
            sumsq[lbl] += float(np.sum(base[lbl] ** 2))
        for nu in nus:
            s = _batch_observables(batch, ("S",), bips[nu])["S"]
            s_sums[nu] += float(np.sum(s))
            s_sumsq[nu] += float(np.sum(s**2))
        total += batch.shape[0]

    def stat(total_sum, total_sumsq):
        mean = total_sum / total
        var = max(total_sumsq - total * mean * mean, 0.0) / (total - 1)
        return Stat(mean, math.sqrt(var / total), total)

    p2 = stat(sums["p2"], sumsq["p2"])
    ipr = stat(sums["xi"], sumsq["xi"])
    points = []
    for nu in nus:
        points.append(
            Fig1Point(
                n_r=spec.n_r,
                nu=nu,
                mean_entropy=stat(s_sums[nu], s_sumsq[nu]),
                mean_p2=p2,
                mean_ipr=ipr,
                s1_pred=theory.first_order_entropy_pred(spec.size, nu, p2.mean),
            )
        )
    return points


def fig1_pipeline(kind: str, sizes, samples: int, seed: int, gamma: str = "1/3") -> list[Fig1Point]:
    """Fig. 1 overlay data for the intermediate or many-body ensemble.

    Cuts nu in {1, 2, floor(n_r/2)}; components are shuffled as in the source
    protocol (many-body eigenvectors stay real, no phase randomization).
    """
    points = []
    for n_r in sizes:
        spec = EnsembleSpec(
            kind,
            n_r,
            seed=seed,
            gamma=gamma if kind == "intermediate" else None,
            shuffle=kind in ("intermediate", "manybody"),
        )
        nus = sorted({1, 2, n_r // 2})
        points.extend(fig1_points(spec, samples, nus))
    return points


# ---------------------------------------------------------------------------
# Oracle-versus-theory validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationCase:
    size: int
    n: int
    trial: int
    oracle: float
    predicted: float

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.oracle), 1e-300)
        return abs(self.predicted - self.oracle) / scale


def validate_oracle(
    sizes=(4, 6, 8),
    powers=(1, 2, 3),
    trials: int = 20,
    seed: int = 0,
    tolerance: float = 1e-10,
) -> tuple[list[ValidationCase], list[ValidationCase]]:
    """Compare coefficient-table predictions against the brute-force oracle.

    Returns (all cases, failures beyond tolerance) over random moduli
    profiles; the prediction side uses the exact moment table of each profile.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for size in sizes:
        for trial in range(trials):
            moduli = rng.random(size)
            moduli /= moduli.sum()
            table = MomentTable.from_moduli(moduli)
            profile = tuple(float(x) for x in moduli)
            for n in powers:
                oracle_value = exact_phase_average_tangle_power(OracleProblem(profile, n))
                predicted = theory.mean_tangle_power_pred(n, size, table)
                cases.append(ValidationCase(size, n, trial, oracle_value, predicted))
    failures = [c for c in cases if c.relative_error >= tolerance]
    return cases, failures
