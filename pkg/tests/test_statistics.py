import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rpgauge.statistics import (MarketStatistics, StatisticsError, cross_matrix,
                                load_statistics, parse_statistics)

from conftest import data_path


E1_CSV = "t,p1,p2,q1,q2\n1,1,2,2,1\n2,2,1,1,2\n"


def fsum_cross(P, Q):
    # independent oracle: exactly rounded sums, one entry at a time
    T = len(P)
    return np.array([[math.fsum(a * b for a, b in zip(P[t], Q[u])) for u in range(T)]
                     for t in range(T)])


class TestParse:
    def test_e1_csv(self):
        S = parse_statistics(E1_CSV, "csv")
        assert (S.T, S.n) == (2, 2)
        np.testing.assert_array_equal(S.prices, [[1, 2], [2, 1]])
        np.testing.assert_array_equal(S.quantities, [[2, 1], [1, 2]])

    def test_bytes_and_stream(self):
        a = parse_statistics(E1_CSV.encode(), "csv")
        b = parse_statistics(io.BytesIO(E1_CSV.encode()), "csv")
        np.testing.assert_array_equal(a.prices, b.prices)

    def test_json_single_good(self):
        S = parse_statistics('{"n": 1, "observations": [{"p": [3], "q": [2]}]}', "json")
        assert (S.T, S.n) == (1, 1)

    def test_files_agree(self):
        a, b = load_statistics(data_path("e1.csv")), load_statistics(data_path("e1.json"))
        np.testing.assert_array_equal(a.prices, b.prices)
        np.testing.assert_array_equal(a.quantities, b.quantities)

    def test_zero_expenditure(self):
        with pytest.raises(StatisticsError, match="zero expenditure"):
            parse_statistics("t,p1,p2,q1,q2\n1,1,2,0,0\n", "csv")

    def test_zero_price_coordinate_allowed(self):
        S = parse_statistics("t,p1,p2,q1,q2\n1,0,2,1,1\n", "csv")
        assert S.prices[0, 0] == 0

    @pytest.mark.parametrize("text, match", [
        ("t,p1,p2,q1,q2\n1,1,-2,1,1\n", "negative"),
        ("t,p1,p2,q1,q2\n1,1,x,1,1\n", "malformed"),
        ("t,p1,q1,q2\n1,1,1,1\n", "malformed"),
        ("t,p1,p2,q1,q2\n1,1,2,1\n", "dimension mismatch"),
        ("", "malformed"),
        ("t,p1,q1\n", "malformed"),
    ])
    def test_csv_errors(self, text, match):
        with pytest.raises(StatisticsError, match=match):
            parse_statistics(text, "csv")

    @pytest.mark.parametrize("text, match", [
        ("{", "malformed"),
        ('{"n": 2}', "malformed"),
        ('{"n": 2, "observations": [{"p": [1, 2]}]}', "malformed"),
        ('{"n": 2, "observations": [{"p": [1, 2], "q": [1]}]}', "dimension mismatch"),
        ('{"n": 1, "observations": [{"p": [1], "q": [-1]}]}', "negative"),
    ])
    def test_json_errors(self, text, match):
        with pytest.raises(StatisticsError, match=match):
            parse_statistics(text, "json")

    def test_unknown_format(self):
        with pytest.raises(StatisticsError, match="unknown format"):
            parse_statistics(E1_CSV, "xml")

    def test_csv_round_trip(self, rng):
        P, Q = rng.uniform(0.1, 10, (5, 3)), rng.uniform(0.1, 10, (5, 3))
        S = MarketStatistics(P, Q)
        R = parse_statistics(S.to_csv(), "csv")
        np.testing.assert_array_equal(R.prices, P)
        np.testing.assert_array_equal(R.quantities, Q)


class TestCrossMatrix:
    def test_e1(self):
        A = cross_matrix(parse_statistics(E1_CSV))
        np.testing.assert_array_equal(A, [[4, 5], [5, 4]])
        np.testing.assert_array_equal(A, fsum_cross([[1, 2], [2, 1]], [[2, 1], [1, 2]]))

    def test_single(self):
        np.testing.assert_array_equal(cross_matrix(MarketStatistics([[3]], [[2]])), [[6]])

    def test_all_ones(self):
        S = MarketStatistics(np.ones((4, 3)), np.ones((4, 3)))
        np.testing.assert_array_equal(cross_matrix(S), np.full((4, 4), 3.0))

    def test_read_only(self):
        A = cross_matrix(parse_statistics(E1_CSV))
        with pytest.raises(ValueError):
            A[0, 0] = 1.0

    @given(arrays(np.float64, (4, 3), elements=st.floats(0.5, 10)),
           arrays(np.float64, (4, 3), elements=st.floats(0.5, 10)),
           st.permutations(range(4)))
    def test_permutation_equivariance(self, P, Q, perm):
        perm = list(perm)
        A = cross_matrix(MarketStatistics(P, Q))
        B = cross_matrix(MarketStatistics(P[perm], Q[perm]))
        np.testing.assert_array_equal(B, A[np.ix_(perm, perm)])

    @given(arrays(np.float64, (3, 2), elements=st.floats(0.5, 10)),
           arrays(np.float64, (3, 2), elements=st.floats(0.5, 10)),
           st.integers(0, 2), st.floats(0.1, 10))
    def test_price_scaling_scales_one_row(self, P, Q, t, c):
        A = cross_matrix(MarketStatistics(P, Q))
        P2 = P.copy()
        P2[t] *= c
        B = cross_matrix(MarketStatistics(P2, Q))
        np.testing.assert_allclose(B[t], c * A[t], rtol=1e-14)
        np.testing.assert_array_equal(np.delete(B, t, 0), np.delete(A, t, 0))

    @given(arrays(np.float64, (3, 4), elements=st.floats(0.0, 10)),
           arrays(np.float64, (3, 4), elements=st.floats(0.5, 10)))
    def test_matches_fsum_oracle(self, P, Q):
        P[:, 0] += 0.5  # keep own expenditure positive
        A = cross_matrix(MarketStatistics(P, Q))
        np.testing.assert_allclose(A, fsum_cross(P.tolist(), Q.tolist()), rtol=1e-14)
