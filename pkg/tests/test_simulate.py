import csv

import numpy as np
import pytest

from destake.metrics import gini
from destake.model import WeightScheme, compute_weights
from destake.simulate import (
    SimulationConfig,
    run_compounding,
    sample_proposers,
    write_proposers_csv,
    write_trace_csv,
)

from _helpers import make_snapshot, random_stakes


def _config(scheme, epochs=20, inflation=0.091, rounds=0, seed=0):
    return SimulationConfig(
        epochs=epochs,
        annual_inflation=inflation,
        epochs_per_year=365,
        scheme=scheme,
        proposer_rounds=rounds,
        seed=seed,
    )


class TestCompounding:
    def test_zero_inflation_is_identity(self):
        snap = make_snapshot([10, 20, 30])
        trace = run_compounding(snap, _config(WeightScheme.srsw(), epochs=5, inflation=0.0))
        assert np.array_equal(trace.stakes[0], trace.stakes[-1])
        assert np.all(trace.gini_series == trace.gini_series[0])

    def test_uniform_stays_uniform(self):
        snap = make_snapshot([1000] * 8)
        for scheme in (WeightScheme.linear(), WeightScheme.srsw(), WeightScheme.lsw()):
            trace = run_compounding(snap, _config(scheme, epochs=30))
            assert np.all(trace.gini_series == 0.0)

    def test_linear_gini_constant_scale_invariance(self):
        rng = np.random.default_rng(1)
        snap = make_snapshot(random_stakes(rng, 40, "pareto"))
        trace = run_compounding(snap, _config(WeightScheme.linear(), epochs=100))
        drift = np.max(np.abs(trace.gini_series - trace.gini_series[0]))
        assert drift < 1e-12

    def test_stakes_strictly_increase(self):
        rng = np.random.default_rng(2)
        snap = make_snapshot(random_stakes(rng, 20, "lognormal"))
        trace = run_compounding(snap, _config(WeightScheme.lsw(), epochs=10))
        assert np.all(np.diff(trace.stakes, axis=0) > 0)

    def test_scheme_orderings_per_epoch(self):
        rng = np.random.default_rng(3)
        snap = make_snapshot(random_stakes(rng, 50, "pareto"))
        series = {}
        for name, scheme in (("linear", WeightScheme.linear()),
                             ("srsw", WeightScheme.srsw()),
                             ("lsw", WeightScheme.lsw())):
            series[name] = run_compounding(snap, _config(scheme, epochs=30)).gini_series
        assert np.all(series["lsw"] <= series["srsw"] + 1e-12)
        assert np.all(series["srsw"] <= series["linear"] + 1e-12)

    def test_deterministic(self):
        snap = make_snapshot([5, 9, 14, 200])
        a = run_compounding(snap, _config(WeightScheme.srsw(), rounds=500, seed=4))
        b = run_compounding(snap, _config(WeightScheme.srsw(), rounds=500, seed=4))
        assert np.array_equal(a.stakes, b.stakes)
        assert np.array_equal(a.gini_series, b.gini_series)
        assert np.array_equal(a.proposer_counts, b.proposer_counts)

    def test_ratio_uses_lower_median(self):
        snap = make_snapshot([1, 2, 4, 8])
        trace = run_compounding(snap, _config(WeightScheme.linear(), epochs=1))
        assert trace.richest_median_ratio[0] == 8 / 2

    def test_config_validation(self):
        with pytest.raises(ValueError):
            _config(WeightScheme.linear(), epochs=0)
        with pytest.raises(ValueError):
            SimulationConfig(1, 0.05, 0, WeightScheme.linear())
        with pytest.raises(ValueError):
            _config(WeightScheme.linear(), inflation=-0.1)
        with pytest.raises(ValueError):
            _config(WeightScheme.linear(), rounds=-1)


class TestProposerSampling:
    def test_symmetric_pair_within_three_sigma(self):
        wv = compute_weights(make_snapshot([1, 1]), WeightScheme.linear())
        counts = sample_proposers(wv, rounds=10_000, seed=5)
        assert counts.sum() == 10_000
        assert abs(counts[0] - 5000) <= 3 * np.sqrt(10_000 * 0.25)

    def test_three_to_one_ratio(self):
        wv = compute_weights(make_snapshot([3, 1]), WeightScheme.linear())
        counts = sample_proposers(wv, rounds=100_000, seed=6)
        ratio = counts[0] / counts[1]
        assert abs(ratio - 3.0) / 3.0 < 0.05

    def test_zero_rounds(self):
        wv = compute_weights(make_snapshot([2, 3]), WeightScheme.linear())
        assert sample_proposers(wv, rounds=0, seed=0).tolist() == [0, 0]

    def test_counts_total(self):
        rng = np.random.default_rng(8)
        wv = compute_weights(make_snapshot(random_stakes(rng, 30, "pareto")),
                             WeightScheme.srsw())
        counts = sample_proposers(wv, rounds=7777, seed=1)
        assert counts.sum() == 7777

    def test_top_decile_share_ordering(self):
        rng = np.random.default_rng(9)
        stakes = random_stakes(rng, 50, "pareto")
        snap = make_snapshot(stakes)
        top = np.argsort(stakes)[::-1][: int(np.ceil(50 / 10))]
        shares = {}
        for name, scheme in (("linear", WeightScheme.linear()),
                             ("srsw", WeightScheme.srsw()),
                             ("lsw", WeightScheme.lsw())):
            wv = compute_weights(snap, scheme)
            counts = sample_proposers(wv, rounds=100_000, seed=10)
            shares[name] = counts[top].sum() / 100_000
        assert shares["lsw"] <= shares["srsw"] + 0.01
        assert shares["srsw"] <= shares["linear"] + 0.01


class TestTraceFiles:
    def test_trace_csv(self, tmp_path):
        snap = make_snapshot([10, 40])
        trace = run_compounding(snap, _config(WeightScheme.linear(), epochs=3))
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["epoch", "gini", "richest_median_ratio"]
        assert len(rows) == 5  # header + epochs 0..3
        assert float(rows[1][1]) == pytest.approx(gini([10.0, 40.0]))

    def test_proposers_csv(self, tmp_path):
        snap = make_snapshot([10, 40], ids=["a", "b"])
        trace = run_compounding(snap, _config(WeightScheme.linear(), epochs=1,
                                              rounds=100, seed=3))
        path = tmp_path / "proposers.csv"
        write_proposers_csv(trace, path)
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["id", "count"]
        assert [r[0] for r in rows[1:]] == ["a", "b"]
        assert sum(int(r[1]) for r in rows[1:]) == 100
