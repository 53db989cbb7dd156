import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antinorm.majorization import RELATIONS, relation_check, wlog_weaker_witness
from antinorm.spectral import SpectralScale

int_vectors = st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 20), min_size=n, max_size=n),
                        st.lists(st.integers(0, 20), min_size=n, max_size=n)))


def classical(a, b, relation):
    """Partial sums of sorted vectors (the textbook finite-dimensional definitions)."""
    a, b = sorted(a, reverse=True), sorted(b, reverse=True)
    heads = [sum(a[:k]) <= sum(b[:k]) for k in range(1, len(a) + 1)]
    tails = [sum(a[k:]) >= sum(b[k:]) for k in range(len(a))]
    if relation == "sub_w":
        return all(heads)
    if relation == "maj":
        return all(heads) and sum(a) == sum(b)
    if relation == "super_w":
        return all(tails)
    la = [math.log(x) if x > 0 else -math.inf for x in a]
    lb = [math.log(x) if x > 0 else -math.inf for x in b]
    return all(_tail_ge(la[k:], lb[k:]) for k in range(len(a)))


def _tail_ge(x, y):
    sx, sy = sum(x), sum(y)
    return sx >= sy - 1e-12 * max(1.0, abs(sy) if math.isfinite(sy) else 1.0) or sx == sy


@given(int_vectors, st.sampled_from(RELATIONS))
def test_matches_partial_sum_definition(pair, relation):
    a, b = pair
    if relation == "super_wlog" and (0 in a or 0 in b):
        return
    got = relation_check(SpectralScale.from_values(a), SpectralScale.from_values(b), relation)
    assert got.holds == classical(a, b, relation)


def _head(s, t):
    return sum(max(Fraction(0), min(t, hi) - lo) * Fraction(v)
               for (lo, hi), v in zip(zip(s.edges, s.edges[1:]), s.values))


def exact_slacks(a, b, relation, ts):
    """Slack at each ``t`` in exact rational arithmetic."""
    if relation == "sub_w":
        return [_head(b, t) - _head(a, t) for t in ts]
    total_a, total_b = _head(a, Fraction(1)), _head(b, Fraction(1))
    return [(total_a - _head(a, t)) - (total_b - _head(b, t)) for t in ts]


def test_mixed_breakpoints_against_dense_grid():
    rng = np.random.default_rng(4)
    dense = [Fraction(k, 600) for k in range(601)]
    for _ in range(30):
        wa = [Fraction(int(k), 12) for k in rng.multinomial(12 - 3, [1 / 3] * 3) + 1]
        wb = [Fraction(int(k), 10) for k in rng.multinomial(10 - 2, [1 / 2] * 2) + 1]
        a = SpectralScale(zip(wa, sorted(rng.integers(1, 9, 3), reverse=True)))
        b = SpectralScale(zip(wb, sorted(rng.integers(1, 9, 2), reverse=True)))
        breaks = sorted(set(a.edges) | set(b.edges))
        for rel in ("sub_w", "super_w"):
            got = relation_check(a, b, rel)
            # the empty integral at the trivial endpoint is excluded
            nontrivial = breaks[1:] if rel == "sub_w" else breaks[:-1]
            assert got.margin == pytest.approx(float(min(exact_slacks(a, b, rel, nontrivial))), abs=1e-12)
            # piecewise linearity: no grid point dips below the breakpoint minimum
            assert float(min(exact_slacks(a, b, rel, dense))) >= min(got.margin, 0.0) - 1e-12
            assert got.holds == (min(exact_slacks(a, b, rel, dense)) >= 0)


def test_majorization_example():
    flat, spread = SpectralScale.from_values([1, 1]), SpectralScale.from_values([2, 0])
    assert relation_check(flat, spread, "maj").holds
    assert not relation_check(spread, flat, "maj").holds
    assert not relation_check(SpectralScale.from_values([1, 0.5]), spread, "maj").holds


def test_worst_t_points_at_failure():
    a = SpectralScale.from_values([1.0, 1.0, 0.1])
    b = SpectralScale.from_values([1.0, 1.0, 1.0])
    rep = relation_check(a, b, "super_wlog")
    # every tail that contains the low step is equally short of the target
    assert not rep.holds and rep.worst_t <= 2 / 3 + 1e-12
    assert rep.margin == pytest.approx(math.log(0.1) / 3)


def test_zero_values_in_log_relation():
    a = SpectralScale.from_values([1.0, 0.0])
    b = SpectralScale.from_values([1.0, 0.0])
    assert relation_check(a, b, "super_wlog").holds
    assert not relation_check(a, SpectralScale.from_values([1.0, 0.5]), "super_wlog").holds


def test_unknown_relation():
    a = SpectralScale.constant(1.0)
    with pytest.raises(ValueError):
        relation_check(a, a, "strong")


@pytest.mark.parametrize("seed", [0, 1, 2, 99])
def test_wlog_weaker_witness(seed):
    a, b = wlog_weaker_witness(seed)
    assert relation_check(a, b, "super_wlog").holds
    assert not relation_check(a, b, "super_w").holds
    assert (a, b) == wlog_weaker_witness(seed)


def test_wlog_weaker_fallback_pair_is_certified():
    a, b = wlog_weaker_witness(seed=0, trials=0)
    assert b.values.tolist() == [4.0, 0.25]
    assert relation_check(a, b, "super_wlog").holds and not relation_check(a, b, "super_w").holds


def test_report_json():
    a = SpectralScale.constant(1.0)
    out = relation_check(a, a, "sub_w").to_json()
    assert out["holds"] is True and out["relation"] == "sub_w"
