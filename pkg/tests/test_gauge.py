import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rpgauge import MarketStatistics
from rpgauge.gauge import (CharacteristicSet, GaugeError, PolyhedralGauge, dual_infimum, eval_P,
                           eval_Q, eval_Q_many, ray_boundary_point, superdifferential,
                           verify_blocking, verify_rationalization)

from oracles import grid_dual, random_gauge

G1 = PolyhedralGauge([1, 1], [[1, 2], [2, 1]])
SINGLE = PolyhedralGauge([1], [[1, 1]])

positive = arrays(np.float64, 2, elements=st.floats(0.01, 10))


@st.composite
def gauges(draw, n=2):
    k = draw(st.integers(1, 5))
    seed = draw(st.integers(0, 2**32 - 1))
    lam, P = random_gauge(np.random.default_rng(seed), k, n)
    return PolyhedralGauge(lam, P)


class TestEvalQ:
    def test_examples(self):
        assert eval_Q(G1, [2, 1]) == 4.0
        assert eval_Q(G1, [0, 0]) == 0.0
        assert eval_Q(SINGLE, [3.5, 1.25]) == 4.75

    def test_many(self):
        np.testing.assert_array_equal(eval_Q_many(G1, [[2, 1], [1, 1]]), [4, 3])

    def test_negative_rejected(self):
        with pytest.raises(GaugeError):
            eval_Q(G1, [-1, 1])

    @given(gauges(), positive, st.floats(0.01, 100))
    def test_homogeneous(self, G, q, c):
        assert eval_Q(G, c * q) == pytest.approx(c * eval_Q(G, q), rel=1e-13)

    @given(gauges(), positive, positive)
    def test_concave(self, G, q, r):
        assert eval_Q(G, (q + r) / 2) >= (eval_Q(G, q) + eval_Q(G, r)) / 2 - 1e-12


class TestSuperdifferential:
    def test_unique(self):
        sd = superdifferential(G1, [2, 1])
        assert sd.active_set == (0,)
        np.testing.assert_array_equal(sd.generators, [[1, 2]])

    def test_tie(self):
        assert superdifferential(G1, [1, 1]).active_set == (0, 1)

    def test_single(self):
        assert superdifferential(SINGLE, [0.3, 7]).active_set == (0,)

    def test_zero_rejected(self):
        with pytest.raises(GaugeError):
            superdifferential(G1, [0, 0])

    @given(gauges(3), arrays(np.float64, 3, elements=st.floats(0.01, 10)))
    def test_euler_identity(self, G, q):
        Qq = eval_Q(G, q)
        for g in superdifferential(G, q).generators:
            assert g @ q == pytest.approx(Qq, rel=1e-9)


class TestEvalP:
    def test_e1(self):
        assert eval_P(G1, [1, 1]) == pytest.approx(2 / 3, abs=1e-9)
        assert grid_dual(G1.generators, [1, 1]) == pytest.approx(2 / 3, abs=1e-3)

    @pytest.mark.parametrize("p", [(1, 1), (2, 5), (7, 0.5), (0, 1)])
    def test_single_price(self, p):
        assert eval_P(SINGLE, p) == pytest.approx(min(p), abs=1e-12)

    def test_zero(self):
        assert eval_P(G1, [0, 0]) == 0.0

    def test_generators_have_unit_value(self):
        for g in G1.generators:
            assert eval_P(G1, g) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=60)
    @given(gauges(), positive)
    def test_matches_grid_oracle(self, G, p):
        P = eval_P(G, p)
        # the grid infimum can only overshoot, by O(step) relative
        assert grid_dual(G.generators, p) == pytest.approx(P, rel=2e-3)
        assert grid_dual(G.generators, p) >= P * (1 - 1e-12)

    @settings(max_examples=60)
    @given(gauges(3), arrays(np.float64, 3, elements=st.floats(0.01, 10)))
    def test_duality_involution(self, G, q):
        assert dual_infimum(G, q) == pytest.approx(eval_Q(G, q), rel=1e-9, abs=1e-12)

    @settings(max_examples=30)
    @given(gauges(), positive)
    def test_sampled_infimum_bounds_Q(self, G, q):
        # inf over p of q.p / P(p) is at least Q(q) on any sample, and attained at a generator
        ps = np.vstack([G.generators, np.random.default_rng(1).uniform(0.01, 5, (20, 2))])
        vals = np.array([q @ p / eval_P(G, p) for p in ps])
        assert vals.min() == pytest.approx(eval_Q(G, q), rel=1e-9)


class TestRayAndSet:
    def test_ray_boundary_point(self):
        np.testing.assert_allclose(ray_boundary_point(G1, [2, 1]), [0.5, 0.25])
        np.testing.assert_allclose(ray_boundary_point(G1, [1, 1]), [1 / 3, 1 / 3])
        q = np.array([0.5, 0.25])
        np.testing.assert_array_equal(ray_boundary_point(G1, q), q)

    def test_degenerate_ray(self):
        with pytest.raises(GaugeError):
            ray_boundary_point(G1, [1, 0])

    @given(gauges(), positive)
    def test_ray_property(self, G, x):
        chi = CharacteristicSet.of(G)
        s = chi.ray_entry(x)
        assert s == pytest.approx(1 / eval_Q(G, x), rel=1e-12)
        assert not chi.contains((1 - 1e-9) * s * x)[0]
        for f in (1 + 1e-9, 2.0, 50.0):
            assert chi.contains(f * s * x)[0]


class TestBlocking:
    def test_examples(self):
        assert verify_blocking(G1, [[2, 1], [1, 1]])
        rep = verify_blocking(SINGLE, np.random.default_rng(0).uniform(0.1, 3, (20, 2)))
        assert rep.ok and rep.checked == 20

    @settings(max_examples=40)
    @given(gauges(), st.integers(0, 2**32 - 1))
    def test_random(self, G, seed):
        rng = np.random.default_rng(seed)
        rep = verify_blocking(G, rng.uniform(0.01, 5, (5, 2)),
                              probe_ps=rng.uniform(0.01, 5, (10, 2)))
        assert rep.ok, rep.failures


class TestRationalization:
    def test_e1(self):
        S = MarketStatistics([[1, 2], [2, 1]], [[2, 1], [1, 2]])
        rep = verify_rationalization(G1, S)
        assert rep.ok
        np.testing.assert_allclose(rep.optima, [4, 4])

    def test_single(self):
        S = MarketStatistics([[2, 3]], [[1, 1]])
        assert verify_rationalization(PolyhedralGauge([0.5], [[2, 3]]), S)

    def test_forced_lambda_fails(self):
        S = MarketStatistics([[1, 2], [2, 1]], [[2, 1], [1, 2]])
        rep = verify_rationalization(PolyhedralGauge([2, 1], S.prices), S)
        assert not rep.ok and rep.failures


class TestSerialization:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(json.dumps(G1.to_json()))
        G = PolyhedralGauge.load(str(path))
        np.testing.assert_array_equal(G.generators, G1.generators)

    @pytest.mark.parametrize("doc", [{}, {"lambda": [1]}, {"lambda": [1, 2], "prices": [[1, 1]]},
                                     {"lambda": [0], "prices": [[1, 1]]},
                                     {"lambda": [1], "prices": [[0, 0]]}])
    def test_invalid(self, doc):
        with pytest.raises(GaugeError):
            PolyhedralGauge.from_json(doc)
