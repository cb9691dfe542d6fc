import random

import pytest

from evdenoise.baselines import Bs1Filter, Bs2Filter, Bs3Filter, PassAll, passed, run_filter, verdicts
from evdenoise.events import Event, Label, SensorGeometry

from oracles import bs1_oracle, bs2_oracle, bs3_oracle, random_geometry, random_stream

R, N = Label.REAL, Label.NOISE
G = SensorGeometry(16, 16)


@pytest.mark.parametrize("make", [lambda: Bs1Filter(G, 1000), lambda: Bs2Filter(G, 1000, 2), lambda: Bs3Filter(G, 1000)])
def test_first_event_is_noise(make):
    assert make().check(Event(0, 3, 3)) is N


@pytest.mark.parametrize(
    "second,expected",
    [(Event(100, 6, 5), R), (Event(2000, 6, 5), N)],
)
def test_bs1_pairs(second, expected):
    assert verdicts(Bs1Filter(G, 1000), [Event(0, 5, 5), second]) == [N, expected]


def test_bs1_isolated_pixel_never_self_supports():
    ev = [Event(i * 10, 4, 4) for i in range(20)]
    assert set(verdicts(Bs1Filter(G, 1000), ev)) == {N}


def test_bs1_threshold_is_strict():
    assert verdicts(Bs1Filter(G, 1000), [Event(0, 5, 5), Event(1000, 5, 6)])[1] is N
    assert verdicts(Bs1Filter(G, 1000), [Event(0, 5, 5), Event(999, 5, 6)])[1] is R


def test_bs1_corner_pixels():
    g = SensorGeometry(4, 4)
    assert verdicts(Bs1Filter(g, 10), [Event(0, 0, 0), Event(1, 1, 1), Event(2, 3, 3), Event(3, 2, 2)]) == [N, R, N, R]


def test_bs1_crafted_stream_matches_oracle():
    s = [Event(0, 5, 5), Event(10, 5, 5), Event(20, 6, 6), Event(5000, 7, 6)]
    assert verdicts(Bs1Filter(G, 1000), s) == [N, N, R, N]
    assert bs1_oracle(s, 1000) == [N, N, R, N]


@pytest.mark.parametrize("second,expected", [(Event(10, 1, 1), R), (Event(10, 5, 5), N)])
def test_bs2_groups(second, expected):
    assert verdicts(Bs2Filter(G, 1000, 2), [Event(0, 0, 0), second]) == [N, expected]


def test_bs2_state_size():
    f = Bs2Filter(SensorGeometry(15, 9), 1000, 4)
    assert f.last_ts.shape == (3, 4)
    assert f.state_cells == 12


@pytest.mark.parametrize("second,expected", [(Event(10, 6, 5), R), (Event(10, 9, 5), N)])
def test_bs3_rows(second, expected):
    assert verdicts(Bs3Filter(G, 1000), [Event(0, 5, 5), second]) == [N, expected]


def test_bs3_column_support_and_state_size():
    f = Bs3Filter(SensorGeometry(20, 12), 1000)
    assert f.state_cells == 32
    assert verdicts(f, [Event(0, 3, 7), Event(5, 3, 8)]) == [N, R]
    assert (int(f.col_ts[3]), int(f.col_row[3])) == (5, 8)
    assert (int(f.row_ts[8]), int(f.row_col[8])) == (5, 3)


@pytest.mark.parametrize("cls", [Bs1Filter, Bs2Filter, Bs3Filter])
def test_out_of_bounds_raises(cls):
    with pytest.raises(ValueError):
        cls(G).check(Event(0, 16, 0))


def test_run_filter_contract():
    assert run_filter(Bs1Filter(G), []) == []
    ev = [Event(i, i % 16, 0) for i in range(30)]
    lab = run_filter(PassAll(G), ev)
    assert [le.event for le in lab] == ev
    assert all(le.label is R for le in lab)
    assert passed(lab) == ev


def test_filters_only_drop_events():
    rng = random.Random(11)
    ev = random_stream(rng, G, 300)
    for f in (Bs1Filter(G), Bs2Filter(G), Bs3Filter(G)):
        out = passed(run_filter(f, ev))
        it = iter(ev)
        assert all(any(e is x for x in it) for e in out)  # ordered subsequence


@pytest.mark.parametrize("seed", range(40))
def test_oracle_equivalence_sample(seed):
    rng = random.Random(seed)
    g = random_geometry(rng, 16)
    ev = random_stream(rng, g, rng.randint(0, 200))
    dt = rng.choice([1, 50, 300, 1000, 5000])
    s = rng.randint(1, 4)
    assert verdicts(Bs1Filter(g, dt), ev) == bs1_oracle(ev, dt)
    assert verdicts(Bs2Filter(g, dt, s), ev) == bs2_oracle(ev, dt, s)
    assert verdicts(Bs3Filter(g, dt), ev) == bs3_oracle(ev, dt)


def test_reset_clears_state():
    f = Bs1Filter(G, 1000)
    f.check(Event(0, 5, 5))
    f.reset()
    assert f.check(Event(1, 6, 5)) is N
