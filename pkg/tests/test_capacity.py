import pytest

from ebv import (
    CapacityQuery,
    bisect_capacity,
    head_parameter_counts,
    max_num_upper_bound,
    probe,
    sqrt2n_heuristic,
    verify,
)
from ebv.capacity import derived_probe_seed


class TestSqrt2nHeuristic:
    def test_frozen_values(self):
        assert sqrt2n_heuristic(1000) == 45
        assert sqrt2n_heuristic(2) == 2
        assert sqrt2n_heuristic(100000) == 448

    def test_exact_squares(self):
        assert sqrt2n_heuristic(8) == 4  # sqrt(16) exactly

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            sqrt2n_heuristic(1)


class TestHeadParameterCounts:
    def test_reference_configuration(self):
        ebv_params, fc_params = head_parameter_counts(512, 100, 1000)
        assert ebv_params == 51200
        assert fc_params == 512000
        assert fc_params / ebv_params == 10.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            head_parameter_counts(0, 10, 10)


class TestDerivedSeeds:
    def test_stable_and_distinct(self):
        a = derived_probe_seed(7, 100, 0)
        assert a == derived_probe_seed(7, 100, 0)
        assert a != derived_probe_seed(7, 100, 1)
        assert a != derived_probe_seed(7, 101, 0)
        assert 0 <= a < 2**64


class TestProbe:
    def test_planted_orthonormal_at_dim(self):
        assert probe(16, CapacityQuery(alpha=0.01, dim=16)) is True

    def test_below_dim_is_planted_too(self):
        assert probe(5, CapacityQuery(alpha=0.0, dim=16)) is True

    def test_orthogonal_overpacking_impossible(self):
        assert probe(17, CapacityQuery(alpha=0.0, dim=16)) is False

    def test_two_times_dim_at_point_two(self):
        # Welch floor sqrt(16/(16*31)) ~ 0.1796 leaves room below 0.2 + tol
        assert probe(32, CapacityQuery(alpha=0.2, dim=16, seed=0)) is True

    def test_rejects_tiny_num(self):
        with pytest.raises(ValueError):
            probe(1, CapacityQuery(alpha=0.1, dim=4))


class TestBisectCapacity:
    def test_orthogonal_capacity_equals_dimension(self):
        for dim in (3, 8):
            result = bisect_capacity(CapacityQuery(alpha=0.0, dim=dim))
            assert result.max_num_found == dim
            assert result.analytic_upper == dim
            assert result.ceiling_limited
            assert (dim, True) in result.probes

    def test_bracketed_search_with_budgeted_probes(self):
        query = CapacityQuery(alpha=0.1, dim=50, attempt_budget=2, max_iters=3000)
        result = bisect_capacity(query)
        assert 50 <= result.max_num_found <= 99
        assert result.analytic_upper == 99
        successes = {num for num, ok in result.probes if ok}
        failures = {num for num, ok in result.probes if not ok}
        assert result.max_num_found in successes
        if not result.ceiling_limited:
            assert result.max_num_found + 1 in failures
        assert result.best_frame is not None
        assert verify(result.best_frame, query.alpha, query.tol)

    def test_capacity_below_analytic_bound(self):
        result = bisect_capacity(
            CapacityQuery(alpha=0.1, dim=16, attempt_budget=2, max_iters=4000)
        )
        assert result.max_num_found <= max_num_upper_bound(0.1, 16)

    def test_probe_trace_is_ordered_and_typed(self):
        result = bisect_capacity(CapacityQuery(alpha=0.0, dim=4))
        for num, ok in result.probes:
            assert isinstance(num, int) and isinstance(ok, bool)


class TestCapacityQuery:
    def test_probe_iters_default_scales(self):
        q = CapacityQuery(alpha=0.1, dim=8)
        assert q.probe_iters(100) == 20000
        assert q.probe_iters(100000) == 2_000_000

    def test_probe_iters_override(self):
        q = CapacityQuery(alpha=0.1, dim=8, max_iters=500)
        assert q.probe_iters(100) == 500

    def test_validation(self):
        with pytest.raises(ValueError):
            CapacityQuery(alpha=1.2, dim=8)
        with pytest.raises(ValueError):
            CapacityQuery(alpha=0.1, dim=0)
        with pytest.raises(ValueError):
            CapacityQuery(alpha=0.1, dim=8, attempt_budget=0)
