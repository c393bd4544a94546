"""Seeded spherical Monte-Carlo means: reproducibility, schemes, rejection.

The estimator contract under test: bitwise determinism for a fixed
(seed, stream), prefix stability in the sample count, exact antithetic
cancellation of odd columns, honest standard errors, and hard failure
when the rejection budget is exhausted.
"""

import math

import numpy as np
import pytest

from quatnev.quat_core import Quaternion, SphereSampler
from quatnev.star_poly import LeftPoly, RealPoly
from quatnev.sph_integral import (
    IntegratorConfig,
    SphericalMean,
    TooManyRejections,
    mean_columns,
    mean_log_abs,
    mean_weil,
    paired_reflection_mean,
)
from quatnev.nevanlinna import WeilFunction

CFG = IntegratorConfig(samples=20_000, seed=2026)


def identity_columns(pts):
    ok = np.ones(len(pts), dtype=bool)
    return pts.copy(), ok


# ---------------------------------------------------------------------------
# Determinism and prefix behavior
# ---------------------------------------------------------------------------


def test_same_config_is_bitwise_reproducible():
    a = mean_columns(identity_columns, 1.7, CFG)[0]
    b = mean_columns(identity_columns, 1.7, CFG)[0]
    assert a.value == b.value and a.std_error == b.std_error


def test_streams_and_seeds_decorrelate():
    a = mean_columns(identity_columns, 1.7, CFG, stream_index=0)[0]
    b = mean_columns(identity_columns, 1.7, CFG, stream_index=1)[0]
    c = mean_columns(identity_columns, 1.7, IntegratorConfig(samples=20_000, seed=1))[0]
    assert a.value != b.value
    assert a.value != c.value


def test_sample_prefix_is_shared_between_sizes():
    seen = {}

    def capture(pts):
        seen.setdefault("first", pts[:1000].copy())
        return pts[:, :1], np.ones(len(pts), dtype=bool)

    mean_columns(capture, 2.0, IntegratorConfig(samples=1000, seed=9))
    first_small = seen.pop("first")
    mean_columns(capture, 2.0, IntegratorConfig(samples=50_000, seed=9))
    first_large = seen.pop("first")
    assert np.array_equal(first_small, first_large[:1000]), (
        "the first 1000 draws must not depend on the total sample count"
    )


# ---------------------------------------------------------------------------
# Exact means
# ---------------------------------------------------------------------------


def test_constant_column_has_zero_error():
    def const(pts):
        return np.full((len(pts), 1), 3.25), np.ones(len(pts), dtype=bool)

    m = mean_columns(const, 1.0, CFG)[0]
    assert m.value == 3.25 and m.std_error == 0.0
    assert m.effective_samples == CFG.samples and m.rejected == 0


def test_log_abs_of_identity_is_log_radius():
    f = RealPoly([0.0, 1.0])                      # f(q) = q, |f| = r on the sphere
    m = mean_log_abs(f, 2.5, CFG)
    assert abs(m.value - math.log(2.5)) <= 1e-12
    assert m.std_error <= 1e-12


def test_antithetic_pairs_cancel_odd_columns_exactly():
    cfg = IntegratorConfig(samples=10_000, seed=3, scheme="antithetic_pair")

    def odd(pts):
        return pts[:, 1:2].copy(), np.ones(len(pts), dtype=bool)

    m = mean_columns(odd, 1.0, cfg)[0]
    assert m.value == 0.0, "conjugate pairing must cancel odd columns bitwise"
    assert m.std_error == 0.0


def test_scheme_changes_nothing_for_sphere_symmetric_columns():
    f = RealPoly([1.0, 0.0, 1.0])
    plain = mean_log_abs(f, 2.0, IntegratorConfig(samples=20_000, seed=6))
    anti = mean_log_abs(f, 2.0, IntegratorConfig(samples=20_000, seed=6, scheme="antithetic_pair"))
    assert plain.value == pytest.approx(anti.value, abs=0.0), (
        "log|f| is conjugation-symmetric for real coefficients, so pairing is a no-op"
    )


def test_mean_matches_closed_form_within_gate():
    # mean of log|q − 5| over |q| = 2: no zeros inside, harmonic mean value log 5
    f = LeftPoly([[-5, 0, 0, 0], [1, 0, 0, 0]])
    m = mean_log_abs(f, 2.0, IntegratorConfig(samples=200_000, seed=12))
    # the 4D mean carries the radius-2 defect of log|f^s|/2: for an empty
    # divisor, mean log|f| = log|f(0)| − H(f, 0, r) with H the series defect
    from quatnev.nevanlinna import harmonic_remainder

    want = math.log(5.0) - harmonic_remainder(f, Quaternion(0, 0, 0, 0), 2.0)
    assert abs(m.value - want) <= 3 * m.std_error + 1e-12, (
        f"mean {m.value} vs closed form {want} beyond 3σ = {3 * m.std_error}"
    )


# ---------------------------------------------------------------------------
# Standard errors
# ---------------------------------------------------------------------------


def test_std_error_shrinks_like_root_n():
    f = RealPoly([1.0, 0.0, 1.0])
    small = mean_log_abs(f, 2.0, IntegratorConfig(samples=4_000, seed=8))
    large = mean_log_abs(f, 2.0, IntegratorConfig(samples=64_000, seed=8))
    ratio = small.std_error / large.std_error
    assert 2.5 <= ratio <= 6.5, f"expected ≈4x shrink at 16x samples, got {ratio:.2f}"


def test_three_sigma_property():
    f = RealPoly([1.0, 0.0, 1.0])
    m = mean_log_abs(f, 2.0, CFG)
    assert m.three_sigma == pytest.approx(3.0 * m.std_error, abs=0.0)


# ---------------------------------------------------------------------------
# Rejection handling
# ---------------------------------------------------------------------------


def test_sparse_rejections_are_tolerated_and_counted():
    def flaky(pts):
        ok = np.ones(len(pts), dtype=bool)
        ok[::4096] = False                        # well under the 0.1% budget
        return pts[:, :1], ok

    m = mean_columns(flaky, 1.0, CFG)[0]
    assert m.rejected > 0
    assert m.effective_samples == CFG.samples


def test_mass_rejection_raises():
    def broken(pts):
        ok = pts[:, 0] > 0.0                      # rejects half of all draws
        return pts[:, :1], ok

    with pytest.raises(TooManyRejections):
        mean_columns(broken, 1.0, CFG)


def test_weil_guard_rejects_near_singularity():
    # target on the integration sphere itself: the weight is singular there,
    # but only a vanishing fraction of draws lands inside the guard
    f = RealPoly([0.0, 1.0])
    weil = WeilFunction.analytic(Quaternion(1.0, 0, 0, 0))
    m = mean_weil(f, weil, 1.0, CFG)
    assert math.isfinite(m.value)
    assert m.rejected <= 0.001 * CFG.samples


# ---------------------------------------------------------------------------
# Paired reflection
# ---------------------------------------------------------------------------


def test_paired_reflection_is_bitwise_equal_for_real_coefficients():
    f = RealPoly([1.0, 0.5, 1.0])
    first, second = paired_reflection_mean(f, 1.5, CFG)
    assert first.value == second.value, (
        "log|f(w)| and log|f(w̄)| share every sample for slice-preserving f"
    )


def test_paired_reflection_differs_for_generic_coefficients():
    f = LeftPoly([[1, 1, 0, 0], [1, 1, 0, 0], [1, 0, 0, 0]])
    first, second = paired_reflection_mean(f, 1.5, CFG)
    assert first.value != second.value
