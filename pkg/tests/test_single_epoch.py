import math
import random

import pytest

from flowright import (
    ChannelParams,
    NotEnoughEnergy,
    energy_for_duration,
    min_power,
    rate_strong,
    rate_weak,
    tmin_one_epoch,
)


def test_exact_root(params):
    # at T=1 the proportional pair is (1,1) and g(1,1) = 3/0.5 + 3*4 = 18
    t = tmin_one_epoch(18.0, 1.0, 1.0, 10.0, params)
    assert t == pytest.approx(1.0, rel=1e-9)


def test_zero_bits(params):
    assert tmin_one_epoch(5.0, 0.0, 0.0, 10.0, params) == 0.0


def test_fine_grid_scan_agreement(params):
    # independent oracle: scan the energy curve on a fine grid and locate
    # where it crosses the budget
    energy = 36.0
    lo, hi, step = 0.5, 1.5, 1e-5
    crossing = None
    t = lo
    while t < hi:
        if energy_for_duration(params, 1.0, 1.0, t) <= energy:
            crossing = t
            break
        t += step
    assert crossing is not None
    assert 0.7 < crossing < 0.8
    t_solved = tmin_one_epoch(energy, 1.0, 1.0, 10.0, params)
    assert t_solved == pytest.approx(crossing, abs=2 * step)


def test_not_enough_energy_within_window(params):
    with pytest.raises(NotEnoughEnergy):
        tmin_one_epoch(1.0, 5.0, 5.0, 0.5, params)


def test_open_window_below_asymptotic_floor(params):
    floor = 2.0 * math.log(2.0) * (1.0 / 1.0 + 1.0 / 0.5)
    with pytest.raises(NotEnoughEnergy):
        tmin_one_epoch(floor * 0.999, 1.0, 1.0, None, params)
    # just above the floor a (long) solution exists
    t = tmin_one_epoch(floor * 1.01, 1.0, 1.0, None, params)
    assert t > 10.0


def test_energy_balance_and_bit_proportionality(params):
    rng = random.Random(3)
    for _ in range(100):
        b1 = rng.uniform(0.0, 4.0)
        b2 = rng.uniform(0.1, 4.0)
        energy = rng.uniform(1.2, 50.0) * 2.0 * math.log(2.0) * (b1 + 2 * b2)
        t = tmin_one_epoch(energy, b1, b2, None, params, tol=1e-12)
        spent = energy_for_duration(params, b1, b2, t)
        assert abs(spent - energy) <= 1e-9 * energy
        # the implied rates are proportional to the bit demands by construction
        r1, r2 = b1 / t, b2 / t
        assert min_power(params, (r1, r2)) * t == pytest.approx(energy, rel=1e-9)


def test_monotone_in_energy(params):
    rng = random.Random(4)
    for _ in range(100):
        b1, b2 = rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0)
        e1 = rng.uniform(1.5, 40.0) * 2.0 * math.log(2.0) * (b1 + 2 * b2)
        e2 = e1 * rng.uniform(1.01, 3.0)
        t1 = tmin_one_epoch(e1, b1, b2, None, params, tol=1e-12)
        t2 = tmin_one_epoch(e2, b1, b2, None, params, tol=1e-12)
        assert t2 <= t1 * (1 + 1e-9)


def _golden_section_tmin(params, energy, b1, b2, t):
    """Independent route: at fixed power E/t, minimize max(b1/r1, b2/r2)
    over the boundary by golden-section on the strong user's rate."""
    power = energy / t
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 1e-12, rate_strong(params, power, 0.0) - 1e-12

    def finish_time(r1):
        r2 = rate_weak(params, power, r1)
        t1 = b1 / r1 if r1 > 0 else math.inf
        t2 = b2 / r2 if r2 > 0 else math.inf
        return max(t1, t2)

    a, b = lo, hi
    c, d = b - gr * (b - a), a + gr * (b - a)
    for _ in range(200):
        if finish_time(c) < finish_time(d):
            b, d = d, c
            c = b - gr * (b - a)
        else:
            a, c = c, d
            d = a + gr * (b - a)
    return finish_time(0.5 * (a + b))


def test_agrees_with_contour_minimization(params):
    # the bisection's fixed point must equal the direct minimization of
    # max(b1/r1, b2/r2) over the power boundary at the solved power level
    rng = random.Random(9)
    for _ in range(100):
        b1 = rng.uniform(0.05, 3.0)
        b2 = rng.uniform(0.05, 3.0)
        energy = rng.uniform(1.3, 30.0) * 2.0 * math.log(2.0) * (b1 + 2 * b2)
        t = tmin_one_epoch(energy, b1, b2, None, params, tol=1e-12)
        t_direct = _golden_section_tmin(params, energy, b1, b2, t)
        assert t_direct == pytest.approx(t, rel=1e-6)


def test_varied_channels(params):
    rng = random.Random(21)
    for _ in range(50):
        s2 = math.exp(rng.uniform(math.log(0.05), math.log(2.0)))
        p = ChannelParams(s2 * rng.uniform(1.1, 20.0), s2, math.exp(rng.uniform(-1.5, 1.5)))
        b1, b2 = rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0)
        floor = 2.0 * math.log(2.0) * p.sigma2 * (b1 / p.s1 + b2 / p.s2)
        energy = floor * rng.uniform(1.2, 20.0)
        t = tmin_one_epoch(energy, b1, b2, None, p, tol=1e-12)
        assert abs(energy_for_duration(p, b1, b2, t) - energy) <= 1e-9 * energy
