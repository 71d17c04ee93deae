import math

import numpy as np
from pytest import approx, raises, mark


def test_make_schedule_defaults_and_errors():
    from wavemask.errors import InvalidArgumentError
    from wavemask.masking import make_schedule

    sched = make_schedule()
    assert sched.T == 1000
    assert sched.lower_bound == 0.3

    for T, l in [(0, 0.3), (2.5, 0.3), (10, -0.1), (10, 1.5)]:
        with raises(InvalidArgumentError):
            make_schedule(T, l)


def test_mask_threshold_ties():
    from wavemask.masking import make_schedule, mask_at

    sched = make_schedule(1000, 0.3)
    a = np.full((2, 2), 0.5)
    assert np.all(mask_at(a, sched, 800).mask == 1)
    assert np.all(mask_at(a, sched, 801).mask == 0)

    zero = np.zeros((3, 3))
    assert np.all(mask_at(zero, sched, 300).mask == 1)
    assert np.all(mask_at(zero, sched, 301).mask == 0)

    high = np.array([[0.7, 0.9], [1.0, 0.75]])
    for t in (1, 500, 999, 1000):
        assert np.all(mask_at(high, sched, t).mask == 1)


def test_mask_values_are_binary(np_rng):
    from wavemask.masking import make_schedule, mask_at
    from wavemask.saliency import saliency_from_latent

    s = saliency_from_latent(np_rng.normal(size=(2, 8, 8)))
    m = mask_at(s, make_schedule(100, 0.3), 57)
    assert m.t == 57
    assert m.mask.shape == (8, 8)
    assert set(np.unique(m.mask)) <= {0.0, 1.0}
    assert m.fraction == np.mean(m.mask)


@mark.parametrize("t", [0, 11, 3.5])
def test_mask_at_rejects_bad_timestep(t):
    from wavemask.errors import InvalidArgumentError
    from wavemask.masking import make_schedule, mask_at

    with raises(InvalidArgumentError):
        mask_at(np.zeros((2, 2)), make_schedule(10, 0.3), t)


def test_tau_to_timestep():
    from wavemask.errors import InvalidArgumentError
    from wavemask.masking import tau_to_timestep

    assert tau_to_timestep(0.0, 1000) == 1
    assert tau_to_timestep(1.0, 1000) == 1000
    assert tau_to_timestep(0.8, 1000) == 800
    assert tau_to_timestep(0.8001, 1000) == 801
    with raises(InvalidArgumentError):
        tau_to_timestep(1.1, 10)


def test_mask_at_tau_matches_discrete(np_rng):
    from wavemask.masking import make_schedule, mask_at, mask_at_tau

    sched = make_schedule(50, 0.2)
    a = np_rng.uniform(size=(4, 4))
    for tau in (0.0, 0.13, 0.5, 0.99, 1.0):
        t = max(1, math.ceil(tau * 50))
        assert np.array_equal(mask_at_tau(a, sched, tau).mask, mask_at(a, sched, t).mask)


def test_monotonicity(np_rng):
    from wavemask.masking import make_schedule, mask_sequence

    sched = make_schedule(40, 0.3)
    a = np.sort(np_rng.uniform(size=16)).reshape(1, 16)
    masks = mask_sequence(a, sched, range(1, 41))
    for m in masks:
        # saliency grows along the row
        assert np.all(np.diff(m.mask[0]) >= 0)
    for early, late in zip(masks, masks[1:]):
        assert np.all(early.mask >= late.mask)


@mark.parametrize("lower_bound", [i / 10 for i in range(11)])
def test_floor_property(np_rng, lower_bound):
    from wavemask.masking import make_schedule, mask_at

    T = 200
    sched = make_schedule(T, lower_bound)
    a = np_rng.uniform(size=(5, 5))
    a[0, 0] = 0.0
    for t in range(1, math.floor(T * lower_bound) + 1):
        assert np.all(mask_at(a, sched, t).mask == 1)


@mark.parametrize("T", [1, 7, 100, 1000])
def test_exhaustive_coverage(np_rng, T):
    from wavemask.masking import coverage_fraction, make_schedule, mask_at, supervised_steps

    sched = make_schedule(T, 0.3)
    a = np_rng.uniform(size=(6, 6))
    a[0, :3] = [0.0, 0.7, 1.0]
    counts = np.zeros_like(a)
    for t in range(1, T + 1):
        counts += mask_at(a, sched, t).mask
    assert np.array_equal(counts, supervised_steps(a, sched))
    assert np.all(np.abs(counts / T - coverage_fraction(a, sched)) <= 1 / T + 1e-12)


def test_coverage_fraction():
    from wavemask.masking import coverage_fraction, make_schedule

    sched = make_schedule(1000, 0.3)
    out = coverage_fraction(np.array([[0.0, 1.0, 0.45]]), sched)
    assert out[0, 0] == 0.3
    assert out[0, 1] == 1.0
    assert out[0, 2] == approx(0.75, abs=1e-15)


def test_accepts_saliency_map():
    from wavemask.masking import coverage_fraction, make_schedule
    from wavemask.saliency import saliency_from_latent

    s = saliency_from_latent(np.ones((1, 4, 4)))
    assert np.all(coverage_fraction(s, make_schedule(10, 0.25)) == 0.25)
