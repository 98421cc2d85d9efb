"""Benchmark harness protocol and report formats (desk-scale runs)."""

import numpy as np

from collegeapp import bench
from collegeapp.heterogeneous import SaParams


class TestExperiment1:
    def test_rows_and_protocol(self):
        report = bench.experiment1(sizes=(8, 16), instances=3, reps=2, seed=1)
        assert len(report.rows) == 4  # two sizes x two strategies
        for row in report.rows:
            assert row.n == 3
            assert row.mean_ms >= 0
        csv = report.to_csv()
        assert csv.splitlines()[0] == "experiment,m,algorithm,params,mean_ms,std_ms,n"
        assert "strategy=list" in csv and "strategy=heap" in csv
        assert "\r" not in csv  # LF endings, dot decimal separator
        for line in csv.splitlines()[1:]:
            float(line.split(",")[4])

    def test_single_instance_single_rep_has_zero_std(self):
        report = bench.experiment1(sizes=(8,), instances=1, reps=1, seed=2)
        assert all(row.std_ms == 0.0 for row in report.rows)


class TestExperiment2:
    def test_bnb_omitted_above_limit(self):
        report = bench.experiment2(sizes=(8, 40), instances=2, reps=1, seed=3)
        algos_small = {r.algorithm for r in report.rows if r.m == 8}
        algos_large = {r.algorithm for r in report.rows if r.m == 40}
        assert "bnb" in algos_small
        assert "bnb" not in algos_large
        assert {"dp", "fptas"} <= algos_large

    def test_fptas_rows_carry_epsilon(self):
        report = bench.experiment2(sizes=(8,), instances=2, reps=1, seed=4)
        eps = {r.params for r in report.rows if r.algorithm == "fptas"}
        assert eps == {"epsilon=0.5", "epsilon=0.05"}


class TestExperiment3:
    def test_ratios_valid_and_csv_shape(self):
        report = bench.experiment3(
            count=20, m_range=(8, 32), sa_params=SaParams(), seed=5
        )
        assert len(report.points) == 20
        ratios = report.ratios
        assert np.all(ratios <= 1.0 + 1e-12)
        assert np.all(ratios > 0)
        lines = report.to_csv().splitlines()
        assert lines[0] == "m,ratio"
        assert len(lines) == 21

    def test_sizes_within_range(self):
        report = bench.experiment3(count=30, m_range=(8, 64), seed=6)
        ms = [m for m, _ in report.points]
        assert min(ms) >= 8 and max(ms) <= 64


class TestBackendExperiment:
    def test_rows_per_backend(self):
        from collegeapp import kernels

        report = bench.experiment_backends(sizes=(16,), instances=2, reps=1, seed=7)
        backends = {b for b in kernels.available_backends()}
        seen = {r.params.split(";")[0].split("=")[1] for r in report.rows}
        assert seen == backends


class TestDeterminism:
    def test_experiment3_points_reproducible(self):
        a = bench.experiment3(count=8, m_range=(8, 16), seed=9)
        b = bench.experiment3(count=8, m_range=(8, 16), seed=9)
        assert a.points == b.points
