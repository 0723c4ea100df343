import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.errors import IndexOutOfRange, WindowOutOfRange
from app.gf2ring import SparsePoly, shift
from app.spectrum import (
    compute_spectrum,
    distance,
    gathering_weight,
    longest_run,
    mspec,
    multiplicities,
)
from strategies import sparse_polys

H = SparsePoly(11, (0, 1, 8, 9))


def test_distance_is_symmetric_cyclic():
    assert distance(0, 1, 11) == 1
    assert distance(1, 0, 11) == 1
    assert distance(0, 8, 11) == 3
    assert distance(2, 2, 11) == 0


def test_distance_out_of_range():
    with pytest.raises(IndexOutOfRange):
        distance(0, 11, 11)


def test_worked_example_multiplicities():
    report = compute_spectrum(H)
    assert report.mu == {1: 2, 2: 1, 3: 2, 4: 1, 5: 0}
    assert report.spec == [(1, 2), (2, 1), (3, 2), (4, 1), (5, 0)]


def test_worked_example_full_spectrum():
    assert compute_spectrum(H).full_spectrum == [1, 1, 2, 3, 3, 4]


def test_worked_example_gamma_and_mspec():
    report = compute_spectrum(H)
    assert report.gamma[0] == 1
    assert report.gamma[1] == 2
    assert report.gamma[2] == 2
    assert report.gamma[3] == 0
    assert mspec(report) == [(1, 2), (2, 2), (3, 0)]


def test_mspec_appends_full_multiplicity_only_when_present():
    # weight 2 at distance 1: gamma(2) = 0 is dropped, gamma(1) = 1
    report = compute_spectrum(SparsePoly(7, (0, 1)))
    assert mspec(report) == [(1, 1)]


def test_gathering_weight_example():
    assert gathering_weight(H, 4) == 3
    assert gathering_weight(H, 11) == 4
    assert gathering_weight(H, 1) == 1


def test_gathering_window_range():
    with pytest.raises(WindowOutOfRange):
        gathering_weight(H, 0)
    with pytest.raises(WindowOutOfRange):
        gathering_weight(H, 12)


def test_longest_run():
    # 8, 9 and 0, 1 are two runs of length 2 that do not join across 10
    assert longest_run(H) == 2
    assert longest_run(SparsePoly(11, (0, 1, 9, 10))) == 4
    assert longest_run(SparsePoly(5, ())) == 0


def test_empty_and_singleton_spectra():
    assert sum(compute_spectrum(SparsePoly(13, ())).mu.values()) == 0
    assert compute_spectrum(SparsePoly(13, (4,))).full_spectrum == []


@given(sparse_polys(min_r=2))
def test_multiplicities_count_every_pair(h):
    assert int(multiplicities(h).sum()) == h.weight * (h.weight - 1) // 2
    assert len(compute_spectrum(h).full_spectrum) == h.weight * (h.weight - 1) // 2


@given(sparse_polys(min_r=2))
def test_gamma_counts_every_distance(h):
    report = compute_spectrum(h)
    assert sum(report.gamma.values()) == h.r // 2
    assert sum(m * count for m, count in report.gamma.items()) == h.weight * (h.weight - 1) // 2


@given(sparse_polys(), st.integers(min_value=-50, max_value=50))
def test_spectrum_is_shift_invariant(h, k):
    assert compute_spectrum(shift(h, k)).mu == compute_spectrum(h).mu


@given(sparse_polys(min_r=2), st.data())
def test_gathering_weight_matches_window_scan(h, data):
    m = data.draw(st.integers(min_value=1, max_value=h.r))
    best = max(sum(1 for e in h.support if (e - a) % h.r < m) for a in range(h.r))
    assert gathering_weight(h, m) == best
