from fractions import Fraction

import numpy as np
import pytest

from gfixlab.errors import OutOfDomainError, TruncationBudgetError
from gfixlab.maps import (ALL_POINTS, AlphaSequence, AveragedRotation, Contraction,
                          Identity, MonotoneAverage, Rotation, SelfMap, SquareShift,
                          known_fixed_points)
from gfixlab.vecspace import Ball, BallPlusPoint, Box, row_norms


def half_ball(d=16):
    extra = np.zeros(d)
    extra[0] = 1.0
    return BallPlusPoint(np.zeros(d), 0.5, extra)


def test_square_shift_squares_the_head():
    f = SquareShift(0.9, half_ball())
    x = np.zeros(16)
    x[0] = 0.5
    out = f.apply(x)
    want = np.zeros(16)
    want[1] = 0.25
    assert np.array_equal(out, want)


def test_square_shift_fixes_zero():
    f = SquareShift(0.9, half_ball())
    assert np.array_equal(f.apply(np.zeros(16)), np.zeros(16))


def test_contraction_scaling():
    K = Ball(np.zeros(2), 2.0)
    T = Contraction(0.5, np.zeros(2), K)
    assert np.array_equal(T.apply(np.array([1.0, 1.0])), np.array([0.5, 0.5]))


def test_apply_rejects_points_off_domain():
    f = SquareShift(0.9, half_ball())
    bad = np.zeros(16)
    bad[1] = 1.0  # norm 1, neither in the ball nor the extra point
    with pytest.raises(OutOfDomainError) as err:
        f.apply(bad)
    assert err.value.distance > 0


def test_iterate_identity_large_n():
    K = Ball(np.zeros(2), 1.0)
    x0 = np.array([0.3, -0.4])
    assert np.array_equal(Identity(K).iterate(x0, 10 ** 6), x0)


def test_iterate_contraction_geometric():
    K = Ball(np.zeros(2), 2.0)
    T = Contraction(0.5, np.zeros(2), K)
    assert np.array_equal(T.iterate(np.array([1.0, 0.0]), 3), np.array([0.125, 0.0]))


def _square_shift_reference(coords, b):
    """Independent composition oracle in exact rational arithmetic."""
    out = [Fraction(0)] * len(coords)
    out[1] = coords[0] * coords[0]
    for k in range(2, len(coords)):
        out[k] = b[k] * coords[k - 1]
    return out


def test_iterate_square_shift_matches_symbolic_composition():
    d = 16
    f = SquareShift(1.0, half_ball(d), check_invariance=True)
    x0 = np.zeros(d)
    x0[0] = 0.5
    got = f.iterate(x0, 2)
    ref = [Fraction(1, 2)] + [Fraction(0)] * (d - 1)
    b = [Fraction(1)] * d
    ref = _square_shift_reference(_square_shift_reference(ref, b), b)
    assert np.array_equal(got, np.array([float(v) for v in ref]))
    want = np.zeros(d)
    want[2] = 0.25
    assert np.array_equal(got, want)


def test_iterate_respects_truncation_budget():
    d = 8
    f = SquareShift(0.9, half_ball(d))
    x0 = np.zeros(d)
    x0[2] = 0.3  # support through slot 3 -> budget d - 3 = 5
    assert f.iteration_budget(x0) == 5
    f.iterate(x0, 5)
    with pytest.raises(TruncationBudgetError):
        f.iterate(x0, 6)


def test_budget_unlimited_for_zero_start():
    f = SquareShift(0.9, half_ball(8))
    assert f.iteration_budget(np.zeros(8)) is None


def test_known_fixed_points_catalog():
    d = 4
    K = Ball(np.zeros(d), 2.0)
    assert np.array_equal(known_fixed_points(SquareShift(0.9, half_ball()))[0], np.zeros(16))
    assert np.array_equal(known_fixed_points(Contraction(0.5, np.array([1.0, 0, 0, 0]), K))[0],
                          np.array([1.0, 0, 0, 0]))
    box = Box(np.zeros(2), np.ones(2) * 3)
    assert np.array_equal(known_fixed_points(MonotoneAverage(np.array([1.0, 2.0]), box))[0],
                          np.array([1.0, 2.0]))
    assert known_fixed_points(Identity(K)) is ALL_POINTS


def test_fixed_points_are_fixed_to_machine_precision():
    d = 6
    K = Ball(np.zeros(d), 1.0)
    maps = [
        SquareShift(0.9, half_ball()),
        Contraction(0.7, np.zeros(d), K),
        Rotation(0.4, (0, 1), K),
        AveragedRotation(0.4, (0, 1), K),
        MonotoneAverage(np.ones(2) * 0.5, Box(np.zeros(2), np.ones(2))),
    ]
    for T in maps:
        for z in T.fixed_points():
            assert np.linalg.norm(T.raw_step(z) - z) <= 1e-14


def test_semigroup_property_bitwise():
    rng = np.random.default_rng(3)
    K = Ball(np.zeros(4), 1.0)
    maps = [Contraction(0.6, np.zeros(4), K), AveragedRotation(0.5, (1, 3), K),
            Identity(K)]
    for T in maps:
        for _ in range(20):
            x = K.sample(rng, 1)[0]
            m, n = int(rng.integers(0, 6)), int(rng.integers(0, 6))
            whole = T.iterate(x, m + n)
            split = T.iterate(T.iterate(x, m), n)
            assert np.array_equal(whole, split)


def test_square_shift_nonexpansive_inside_half_ball():
    rng = np.random.default_rng(12)
    K = half_ball()
    f = SquareShift(0.9, K)
    X = K.sample(rng, 10000)
    Y = K.sample(rng, 10000)
    base = row_norms(X - Y)
    mapped = row_norms(f.raw_step(X) - f.raw_step(Y))
    assert np.all(mapped <= base + 1e-12)


def test_construction_rejects_maps_leaving_their_domain():
    with pytest.raises(ValueError):
        # a box is not rotation invariant
        Rotation(0.7, (0, 1), Box(np.zeros(2), np.ones(2)))
    with pytest.raises(ValueError):
        # anchor outside the ball
        Contraction(0.5, np.array([5.0, 0.0]), Ball(np.zeros(2), 1.0))


def test_square_shift_needs_three_dims():
    with pytest.raises(ValueError):
        SquareShift(0.9, Ball(np.zeros(2), 0.5))


def test_alpha_sequence_validation():
    with pytest.raises(ValueError):
        AlphaSequence(np.array([]))
    with pytest.raises(ValueError):
        AlphaSequence(np.array([0.5, -0.1]))
    seq = AlphaSequence(np.array([1.0, 0.9]))
    assert seq.claimed_limit == 1.0


def test_custom_map_can_skip_invariance_check():
    class Doubling(SelfMap):
        kind = "doubling"

        def raw_step(self, x):
            return 2.0 * np.asarray(x, dtype=float)

    T = Doubling(Ball(np.zeros(2), 1.0), check_invariance=False)
    assert np.array_equal(T.apply(np.array([0.2, 0.0])), np.array([0.4, 0.0]))
