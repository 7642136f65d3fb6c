"""Wavefunction moments, ensemble averaging with error bars, and scaling fits."""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from . import partitions
from .ensembles import EnsembleSpec
from .entanglement import LN2, Bipartition
from .errors import InvalidArgumentError, MissingMomentError

#: labels accepted by ensemble_average
OBSERVABLES = ("p2", "p3", "p4", "p2sq", "xi", "tau", "tau2", "tau3", "S", "S_L", "S1", "S2")

_TAU_BASED = {"tau", "tau2", "tau3", "S1", "S2"}


@dataclass(frozen=True)
class Stat:
    mean: float
    stderr: float
    count: int


class MomentTable(Mapping):
    """Mean power-sum product moments keyed by partitions with parts >= 2.

    The key () is the trivial moment 1 (any power of p_1); key (2,) is <p_2>,
    (2, 2) is <p_2^2>, and so on.  Lookups return the mean; per-entry errors
    are available through :meth:`stat`.
    """

    def __init__(self, entries: dict[tuple[int, ...], Stat]):
        self._entries = dict(entries)
        self._entries.setdefault((), Stat(1.0, 0.0, 0))

    def __getitem__(self, key):
        key = partitions.strip_ones(tuple(key))
        try:
            return self._entries[key].mean
        except KeyError:
            raise MissingMomentError(key) from None

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def stat(self, key) -> Stat:
        return self._entries[partitions.strip_ones(tuple(key))]

    @classmethod
    def from_moduli(cls, moduli, max_weight: int = 8) -> "MomentTable":
        """Exact table for a fixed moduli-squared profile under permutations.

        The moments p_q are permutation invariant, so every product moment is
        just the corresponding product of deterministic sums.
        """
        moduli = np.asarray(moduli, dtype=float)
        entries = {}
        for w in range(max_weight + 1):
            for mu in partitions.enumerate_partitions(w):
                key = partitions.strip_ones(mu)
                if key in entries or key != mu:
                    continue
                value = 1.0
                for q in key:
                    value *= float(np.sum(moduli**q))
                entries[key] = Stat(value, 0.0, 0)
        return cls(entries)

    @classmethod
    def uniform(cls, size: int, max_weight: int = 8) -> "MomentTable":
        """Exchangeable-uniform table: p_q = N^(1-q) deterministically."""
        return cls.from_moduli(np.full(size, 1.0 / size))

    def with_factorized_p2sq(self) -> "MomentTable":
        """Copy with <p_2^2> replaced by <p_2>^2 (the factorized variant)."""
        entries = dict(self._entries)
        p2 = entries[(2,)].mean
        entries[(2, 2)] = Stat(p2 * p2, 0.0, 0)
        return MomentTable(entries)


def moments(psi: np.ndarray, qs) -> np.ndarray:
    """Moments p_q = sum_i |psi_i|^(2q) for each q in ``qs``."""
    x = np.abs(np.asarray(psi)) ** 2
    return np.array([float(np.sum(x**q)) for q in qs])


def participation_ratio(psi: np.ndarray) -> float:
    """Inverse participation ratio xi = 1/p_2, between 1 and N."""
    x = np.abs(np.asarray(psi)) ** 2
    return 1.0 / float(np.sum(x**2))


def _batch_observables(batch: np.ndarray, labels, b: Bipartition) -> dict[str, np.ndarray]:
    """Per-sample observable values for a batch of states (rows)."""
    labels = list(labels)
    out: dict[str, np.ndarray] = {}
    x = np.abs(batch) ** 2
    if any(lbl in ("p2", "p2sq", "xi") for lbl in labels):
        p2 = np.sum(x**2, axis=1)
    for lbl in labels:
        if lbl == "p2":
            out[lbl] = p2
        elif lbl == "p3":
            out[lbl] = np.sum(x**3, axis=1)
        elif lbl == "p4":
            out[lbl] = np.sum(x**4, axis=1)
        elif lbl == "p2sq":
            out[lbl] = p2**2
        elif lbl == "xi":
            out[lbl] = 1.0 / p2

    if any(lbl in _TAU_BASED or lbl == "S" for lbl in labels):
        if b.nu == 1 and (set(labels) & _TAU_BASED or "S" in labels):
            tau = _batch_tangle(batch, b)
        if set(labels) & _TAU_BASED:
            if b.nu != 1:
                raise InvalidArgumentError("tangle observables require a single-qubit cut")
            for lbl in labels:
                if lbl == "tau":
                    out[lbl] = tau
                elif lbl == "tau2":
                    out[lbl] = tau**2
                elif lbl == "tau3":
                    out[lbl] = tau**3
                elif lbl == "S1":
                    out[lbl] = 1.0 - (1.0 - tau) / (2.0 * LN2)
                elif lbl == "S2":
                    om = 1.0 - tau
                    out[lbl] = 1.0 - (om / 2.0 + om**2 / 12.0) / LN2
        if "S" in labels:
            if b.nu == 1:
                arg = (1.0 + np.sqrt(np.clip(1.0 - tau, 0.0, 1.0))) / 2.0
                out["S"] = _binary_entropy_vec(arg)
            else:
                out["S"] = _batch_entropy(batch, b)
    if "S_L" in labels:
        out["S_L"] = _batch_linear_entropy(batch, b)
    unknown = [lbl for lbl in labels if lbl not in out]
    if unknown:
        raise InvalidArgumentError(f"unknown observables: {unknown}")
    return out


def _batch_split(batch: np.ndarray, b: Bipartition) -> np.ndarray:
    count = batch.shape[0]
    if b.is_leading:
        return batch.reshape(count, b.dim_a, b.dim_b)
    return batch[:, b.index_order()].reshape(count, b.dim_a, b.dim_b)


def _batch_tangle(batch: np.ndarray, b: Bipartition) -> np.ndarray:
    v = _batch_split(batch, b)
    a = np.sum(np.abs(v[:, 0]) ** 2, axis=1)
    c = np.sum(np.abs(v[:, 1]) ** 2, axis=1)
    overlap = np.abs(np.sum(v[:, 0].conj() * v[:, 1], axis=1)) ** 2
    return np.clip(4.0 * (a * c - overlap), 0.0, 1.0)


def _batch_rho(batch: np.ndarray, b: Bipartition) -> np.ndarray:
    v = _batch_split(batch, b)
    return np.einsum("sij,skj->sik", v, v.conj())


def _batch_linear_entropy(batch: np.ndarray, b: Bipartition) -> np.ndarray:
    rho = _batch_rho(batch, b)
    purity = np.sum(np.abs(rho) ** 2, axis=(1, 2))
    d = b.dim_a
    return np.clip(d / (d - 1) * (1.0 - purity), 0.0, 1.0)


def _batch_entropy(batch: np.ndarray, b: Bipartition) -> np.ndarray:
    rho = _batch_rho(batch, b)
    evals = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(evals > 0.0, evals * np.log2(np.where(evals > 0, evals, 1.0)), 0.0)
    return -np.sum(terms, axis=1)


def _binary_entropy_vec(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)
        bb = np.where(x < 1, (1 - x) * np.log2(np.where(x < 1, 1 - x, 1.0)), 0.0)
    return -(a + bb)


def ensemble_average(
    spec: EnsembleSpec,
    observables,
    samples: int,
    bipartition: Bipartition | None = None,
) -> dict[str, Stat]:
    """Mean and standard error of each observable over ``samples`` draws.

    Accumulation follows the realization order of the spec's stream, so the
    result is bit-identical for a given (spec, samples) pair.
    """
    if samples < 2:
        raise InvalidArgumentError(f"need at least 2 samples, got {samples}")
    labels = list(observables)
    for lbl in labels:
        if lbl not in OBSERVABLES:
            raise InvalidArgumentError(f"unknown observable {lbl!r}; registry: {OBSERVABLES}")
    if bipartition is None:
        bipartition = Bipartition.first(spec.n_r, 1)
    sums = {lbl: 0.0 for lbl in labels}
    sumsq = {lbl: 0.0 for lbl in labels}
    for batch in spec.sample_batches(samples):
        values = _batch_observables(batch, labels, bipartition)
        for lbl in labels:
            sums[lbl] += float(np.sum(values[lbl]))
            sumsq[lbl] += float(np.sum(values[lbl] ** 2))
    out = {}
    for lbl in labels:
        mean = sums[lbl] / samples
        var = max(sumsq[lbl] - samples * mean * mean, 0.0) / (samples - 1)
        out[lbl] = Stat(mean, math.sqrt(var / samples), samples)
    return out


def moment_table_from_stats(stats: dict[str, Stat]) -> MomentTable:
    """Moment table built from measured p2/p3/p4/p2sq statistics."""
    keymap = {"p2": (2,), "p3": (3,), "p4": (4,), "p2sq": (2, 2)}
    entries = {}
    for lbl, key in keymap.items():
        if lbl in stats:
            entries[key] = stats[lbl]
    return MomentTable(entries)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of log2(value) against qubit count."""

    sizes: tuple[int, ...]
    slope: float
    intercept: float
    slope_stderr: float
    residuals: tuple[float, ...]


def fit_scaling(sizes, values, errors=None, weighted: bool = False) -> ScalingFit:
    """Fit log2(value) = slope * n_r + intercept.

    The slope is the exponent of N = 2^n_r.  Unweighted by default; pass
    ``weighted=True`` with per-point errors to weight by 1/stderr^2 (errors are
    propagated onto log2 via err/(value ln 2)).
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if sizes.shape[0] < 3:
        raise InvalidArgumentError("need at least 3 sizes for a scaling fit")
    if np.any(values <= 0):
        raise InvalidArgumentError("values must be positive for a log-log fit")
    y = np.log2(values)
    if weighted:
        if errors is None:
            raise InvalidArgumentError("weighted fit requires errors")
        w = (np.asarray(errors, dtype=float) / (values * LN2)) ** -2
    else:
        w = np.ones_like(y)
    sw = w.sum()
    xbar = (w * sizes).sum() / sw
    ybar = (w * y).sum() / sw
    sxx = (w * (sizes - xbar) ** 2).sum()
    slope = (w * (sizes - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = y - (slope * sizes + intercept)
    dof = sizes.shape[0] - 2
    rss = (w * resid**2).sum()
    stderr = math.sqrt(max(rss, 0.0) / dof / sxx) if dof > 0 else float("nan")
    return ScalingFit(
        tuple(int(s) for s in sizes),
        float(slope),
        float(intercept),
        float(stderr),
        tuple(float(r) for r in resid),
    )


def fractal_dimension(q: float, fit: ScalingFit) -> float:
    """D_q = -slope / (q - 1) for a fit of <p_q> against size."""
    if q == 1:
        raise InvalidArgumentError("fractal dimension is undefined at q = 1")
    return -fit.slope / (q - 1)


# ---------------------------------------------------------------------------
# Result export (long-format CSV and JSON); header is part of the contract.
# ---------------------------------------------------------------------------

CSV_HEADER = ["n_r", "observable", "mean", "stderr", "samples"]


def write_csv(path, rows) -> None:
    """Rows of (n_r, observable, mean, stderr, samples)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row)


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            {
                "n_r": int(row["n_r"]),
                "observable": row["observable"],
                "mean": float(row["mean"]),
                "stderr": float(row["stderr"]),
                "samples": int(row["samples"]),
            }
            for row in reader
        ]


def write_json(path, rows) -> None:
    data = [dict(zip(CSV_HEADER, row)) for row in rows]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
