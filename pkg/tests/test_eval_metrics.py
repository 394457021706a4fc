import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pdrmm.errors import EmptyInputError, ParseError, UndefinedRatioError
from pdrmm.eval_metrics import (
    ErrorStats,
    empirical_cdf,
    evaluate,
    export_cdf,
    read_cdf,
    read_trajectory_csv,
    reduction_ratio,
    write_trajectory_csv,
)
from pdrmm.map_model import RouteMap, rectangle
from pdrmm.pdr_core import TrackPoint

points = arrays(float, st.tuples(st.integers(1, 40), st.just(2)), elements=st.floats(-50, 50))


def stats(mean):
    return ErrorStats(np.array([mean]), mean, 0.0, mean, ((mean, 1.0),), None)


def test_on_route_is_zero():
    route = rectangle(10, 4)
    s = evaluate([(0, 0), (5, 0), (10, 2), (3, 4), (0, 0)], route)
    assert s.mean == s.std == s.max == 0.0
    assert s.loop_gap == 0.0


def test_single_point():
    s = evaluate([(5, 2)], RouteMap(((0, 0), (10, 0))))
    assert s.mean == 2.0 and s.std == 0.0 and s.max == 2.0
    assert s.cdf == ((2.0, 1.0),)
    assert s.loop_gap is None


def test_loop_gap_uses_origin():
    s = evaluate([(1, 0), (2, 0), (3, 0)], rectangle(4, 4), origin=(0, 0))
    assert s.loop_gap == 3.0


@pytest.mark.parametrize(
    "pdr, matched, expect",
    [(22.4, 0.7, 0.96875), (3.0, 3.0, 0.0), (5.0, 0.0, 1.0), (1.0, 2.0, -1.0)],
)
def test_reduction_ratio(pdr, matched, expect):
    assert reduction_ratio(stats(pdr), stats(matched)) == pytest.approx(expect, abs=1e-12)


def test_reduction_ratio_undefined():
    with pytest.raises(UndefinedRatioError):
        reduction_ratio(stats(0.0), stats(0.0))


def test_empty_trajectory():
    with pytest.raises(EmptyInputError):
        evaluate(np.zeros((0, 2)), rectangle(1, 1))


def test_cdf_single_point_export():
    buf = io.StringIO()
    export_cdf(evaluate([(5, 2)], RouteMap(((0, 0), (10, 0)))), buf)
    assert buf.getvalue().splitlines() == ["error_m,cum_fraction", "2.0,1.0"]


def test_cdf_distinct_and_tied_values():
    cdf = empirical_cdf([3.0, 1.0, 2.0, 2.0])
    assert cdf == ((1.0, 0.25), (2.0, 0.75), (3.0, 1.0))


@given(points)
def test_cdf_round_trip_is_monotone(xy):
    s = evaluate(xy, rectangle(20, 10))
    buf = io.StringIO()
    export_cdf(s, buf)
    rows = read_cdf(buf.getvalue())
    assert len(rows) == len(np.unique(s.per_point))
    errs, fracs = zip(*rows)
    assert all(a < b for a, b in zip(errs, errs[1:]))
    assert all(a < b for a, b in zip(fracs, fracs[1:]))
    assert fracs[-1] == 1.0
    assert rows == list(s.cdf)


def test_read_cdf_errors():
    with pytest.raises(ParseError, match="line 1"):
        read_cdf("err,frac\n")
    with pytest.raises(ParseError, match="line 3"):
        read_cdf("error_m,cum_fraction\n1,0.5\nx,1\n")


@given(points)
def test_mean_std_two_pass_oracle(xy):
    s = evaluate(xy, rectangle(20, 10))
    e = [float(v) for v in s.per_point]
    mean = math.fsum(e) / len(e)
    var = math.fsum((v - mean) ** 2 for v in e) / len(e)
    assert s.mean == pytest.approx(mean, rel=1e-12, abs=1e-12)
    assert s.std == pytest.approx(math.sqrt(var), rel=1e-9, abs=1e-9)
    assert s.max == max(e)


@given(points, st.floats(-math.pi, math.pi), st.floats(-100, 100), st.floats(-100, 100))
def test_rigid_transform_invariance(xy, a, tx, ty):
    route = rectangle(20, 10)
    rot = np.array([[math.cos(a), math.sin(a)], [-math.sin(a), math.cos(a)]])
    moved_route = RouteMap(tuple(tuple(c) for c in (np.array(route.corners) @ rot + (tx, ty))), True)
    s1 = evaluate(xy, route)
    s2 = evaluate(xy @ rot + (tx, ty), moved_route, origin=np.array(route.start) @ rot + (tx, ty))
    assert s2.mean == pytest.approx(s1.mean, abs=1e-9)
    assert s2.max == pytest.approx(s1.max, abs=1e-9)
    assert s2.loop_gap == pytest.approx(s1.loop_gap, abs=1e-9)


def test_trajectory_csv_round_trip():
    pts = [TrackPoint(1, 0.1, -2.5, 0.3333333333333333), TrackPoint(2, 1e-17, 4.0, -7.0)]
    buf = io.StringIO()
    write_trajectory_csv(pts, buf)
    assert read_trajectory_csv(buf.getvalue()) == pts


@pytest.mark.parametrize(
    "text, line",
    [
        ("a,b\n", 1),
        ("k,x,y,phi\n1,2,3\n", 2),
        ("k,x,y,phi\n1,0,0,0\n2,nan,0,0\n", 3),
        ("k,x,y,phi\n1,0,zero,0\n", 2),
    ],
)
def test_trajectory_csv_errors(text, line):
    with pytest.raises(ParseError, match=f"line {line}"):
        read_trajectory_csv(text)


def test_trajectory_csv_empty():
    with pytest.raises(EmptyInputError):
        read_trajectory_csv("k,x,y,phi\n")
