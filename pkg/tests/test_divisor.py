"""Total-order divisors, the per-sphere boundary kernel, and counting functions.

The counting identities are checked by dual routes: the integrated form
against the closed-form unintegrated representation, and the angular term
against both of its integral representations.  Random-divisor property
tests drive all routes through the same gate.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quatnev.quat_core import Quaternion, SliceComplex
from quatnev.star_poly import LeftPoly, RealPoly, SemiregularRational, as_rational, star_mul
from quatnev.divisor import (
    BoundaryDivisor,
    SphereDivisor,
    N_integrated,
    N_via_unintegrated,
    a_count,
    a_re_count,
    analytic_characterization_check,
    angular_identity_check,
    angular_term,
    jensen_kernel,
    n_count,
    signed_kernel_sum,
    total_order_divisor,
)

IDENTITY_TOL = 1e-9
SLACK_TOL = 1e-12

J_GOLDEN_I_AT_2 = 1.630647180560  # log 2 + 15/16 for the unit imaginary sphere at R = 2


# ---------------------------------------------------------------------------
# Divisor extraction
# ---------------------------------------------------------------------------


def entries_of(f):
    d = total_order_divisor(f)
    return {(sphere.re, sphere.im): ordt for sphere, ordt in d.entries}, d.origin_order


def test_divisor_of_q_squared_plus_one():
    spheres, m0 = entries_of(RealPoly([1.0, 0.0, 1.0]))
    assert spheres == {(0.0, 1.0): 2}, f"q²+1 must carry S_i with total order 2: {spheres}"
    assert m0 == 0


def test_divisor_of_double_real_root():
    spheres, m0 = entries_of(RealPoly([0.25, -1.0, 1.0]))
    assert spheres == {(0.5, 0.0): 2}, f"(q−1/2)² carries the real point 1/2 twice: {spheres}"
    assert m0 == 0


def test_divisor_of_linear_nonreal():
    f = LeftPoly([[-0.5, -0.7, 0, 0], [1, 0, 0, 0]])
    spheres, m0 = entries_of(f)
    assert spheres == {(0.5, 0.7): 1}
    assert m0 == 0


def test_divisor_of_rational_with_poles():
    f = SemiregularRational(RealPoly([1.0, 0.0, 1.0]), RealPoly([0.25, -1.0, 1.0]))
    spheres, m0 = entries_of(f)
    assert spheres == {(0.0, 1.0): 2, (0.5, 0.0): -2}, f"unexpected divisor: {spheres}"
    assert m0 == 0


def test_origin_order_enters_divisor():
    f = LeftPoly([[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]])
    _, m0 = entries_of(f)
    assert m0 == 2


def test_star_product_divisors_add():
    a = LeftPoly([[0, -1, 0, 0], [1, 0, 0, 0]])            # q − i
    b = LeftPoly([[0, 0, -1, 0], [1, 0, 0, 0]])            # q − j
    spheres, _ = entries_of(star_mul(a, b))
    assert spheres == {(0.0, 1.0): 2}, f"(q−i)*(q−j) has total order 2 on S_i: {spheres}"


def test_sphere_divisor_json_roundtrip():
    d = SphereDivisor.build([(SliceComplex(0.5, 0.7), 1), (SliceComplex(1.0, 0.0), -2)], 3)
    back = SphereDivisor.from_json(d.to_json())
    assert back.origin_order == 3
    assert {(sphere.re, sphere.im, ordt) for sphere, ordt in back.entries} == {
        (0.5, 0.7, 1),
        (1.0, 0.0, -2),
    }


# ---------------------------------------------------------------------------
# Boundary kernel
# ---------------------------------------------------------------------------


def test_kernel_golden_value():
    got = jensen_kernel(SliceComplex(0.0, 1.0), 2.0)
    assert abs(got - J_GOLDEN_I_AT_2) <= 1e-9, f"J(i, 2) = {got}"
    assert abs(got - (math.log(2.0) + 15.0 / 16.0)) <= 1e-12


@given(
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
    st.floats(min_value=0.0, max_value=2.0, allow_nan=False),
)
@settings(max_examples=200)
def test_kernel_vanishes_on_its_own_radius(xi, eta):
    s = SliceComplex(xi, eta)
    if s.modulus() < 1e-3:
        return
    got = jensen_kernel(s, s.modulus())
    assert abs(got) <= 1e-12, f"J(ζ, |ζ|) = {got} ≠ 0 for ζ = {s}"


def test_kernel_growth_sign_follows_the_angle():
    # purely imaginary spheres push the kernel up like +r²/4, real ones down
    assert jensen_kernel(SliceComplex(0.0, 1.0), 50.0) > 100.0
    assert jensen_kernel(SliceComplex(1.0, 0.0), 50.0) < -100.0


def test_signed_kernel_sum_conventions():
    d = SphereDivisor.build(
        [(SliceComplex(0.0, 1.0), 2), (SliceComplex(0.5, 0.0), 1)], 0
    )
    R = 2.0
    corrected = signed_kernel_sum(d, R, "corrected")
    doubled = signed_kernel_sum(d, R, "doubled")
    j_im = jensen_kernel(SliceComplex(0.0, 1.0), R)
    assert abs((doubled - corrected) - 2 * j_im) <= 1e-12, (
        "factor-2 convention must double exactly the nonreal-sphere share"
    )


def test_boundary_sphere_raises():
    d = SphereDivisor.build([(SliceComplex(0.0, 1.0), 1)], 0)
    with pytest.raises(BoundaryDivisor):
        signed_kernel_sum(d, 1.0, "corrected")


# ---------------------------------------------------------------------------
# Counting functions: step counts and dual-route identities
# ---------------------------------------------------------------------------


def random_divisor(rng) -> SphereDivisor:
    pairs = []
    for _ in range(int(rng.integers(1, 6))):
        xi = float(rng.uniform(-1.5, 1.5))
        eta = float(rng.uniform(0.0, 1.5))
        if math.hypot(xi, eta) < 0.05:
            xi += 0.2
        ordt = int(rng.integers(1, 4)) * (1 if rng.random() < 0.7 else -1)
        pairs.append((SliceComplex(xi, eta), ordt))
    return SphereDivisor.build(pairs, int(rng.integers(0, 3)))


def test_n_count_is_a_step_function():
    d = SphereDivisor.build(
        [(SliceComplex(0.0, 1.0), 2), (SliceComplex(1.2, 0.0), 1)], 1
    )
    assert n_count(d, "zero", 0.5) == 1          # origin order only
    assert n_count(d, "zero", 1.1) == 3
    assert n_count(d, "zero", 2.0) == 4
    assert n_count(d, "pole", 2.0) == 0


def test_a_count_and_a_re_count_cut_by_modulus_and_real_part():
    d = SphereDivisor.build(
        [(SliceComplex(0.6, 0.8), 1), (SliceComplex(0.0, 2.0), 3)], 0
    )
    assert a_count(d, "zero", 3.0, 1.5) == 4        # both spheres qualify
    assert a_count(d, "zero", 3.0, 0.5) == 3        # |Re ζ| = 0.6 cut away
    assert a_count(d, "zero", 1.5, 1.5) == 1        # |ζ| = 2 cut away
    got = a_re_count(d, "zero", 3.0, 1.5)
    assert abs(got - (0.6**2 * 1 + 0.0 * 3)) <= 1e-12


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_integrated_counting_dual_routes(seed):
    rng = np.random.default_rng(seed)
    d = random_divisor(rng)
    for r in (0.7, 1.3, 2.6):
        for side in ("zero", "pole"):
            direct = N_integrated(d, side, r)
            via = N_via_unintegrated(d, side, r)
            assert abs(direct - via) <= IDENTITY_TOL * (1.0 + abs(direct)), (
                f"seed {seed} side {side} r {r}: {direct} ≠ {via}"
            )


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_angular_term_dual_representations(seed):
    rng = np.random.default_rng(seed)
    d = random_divisor(rng)
    for r in (0.7, 1.3, 2.6):
        for side in ("zero", "pole"):
            err1, err2 = angular_identity_check(d, side, r)
            assert err1 <= IDENTITY_TOL, f"seed {seed}: first representation off by {err1}"
            assert err2 <= IDENTITY_TOL, f"seed {seed}: second representation off by {err2}"


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_analytic_characterization_and_lower_bound(seed):
    rng = np.random.default_rng(seed)
    d = random_divisor(rng)
    for r in (0.7, 1.3, 2.6):
        for side in ("zero", "pole"):
            err1, err2, slack = analytic_characterization_check(d, side, r)
            assert err1 <= IDENTITY_TOL, f"seed {seed}: equality route 1 off by {err1}"
            assert err2 <= IDENTITY_TOL, f"seed {seed}: equality route 2 off by {err2}"
            assert slack >= -SLACK_TOL, f"seed {seed}: lower-bound slack {slack} < 0"


def test_angular_term_is_nonpositive():
    rng = np.random.default_rng(123)
    for _ in range(40):
        d = random_divisor(rng)
        # restrict to zero-side-only divisors so the sign claim is clean
        pos = [(sphere, abs(ordt)) for sphere, ordt in d.entries]
        d2 = SphereDivisor.build(pos, d.origin_order)
        val = angular_term(d2, "zero", 3.0)
        assert val <= 1e-12, f"angular term must be ≤ 0, got {val}"


def test_integrated_counting_equals_kernel_sum():
    """N is the per-sphere kernel sum plus the origin term, route-for-route."""
    d = SphereDivisor.build([(SliceComplex(0.0, 1.0), 2)], 0)
    assert abs(N_integrated(d, "zero", 2.0) - 2 * jensen_kernel(SliceComplex(0.0, 1.0), 2.0)) <= 1e-12
    d2 = SphereDivisor.build([(SliceComplex(0.5, 0.7), 1)], 2)
    want = jensen_kernel(SliceComplex(0.5, 0.7), 2.0) + 2 * math.log(2.0)
    assert abs(N_integrated(d2, "zero", 2.0) - want) <= 1e-12
