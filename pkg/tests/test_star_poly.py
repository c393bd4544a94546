"""Left polynomials, the *-product, symmetrization, and rational closures.

Covers the noncommutative product algebra (associativity, conjugation,
symmetrization multiplicativity), the *-evaluation identity, stem
evaluation against direct Horner evaluation, spherical value/derivative
decomposition, Blaschke modulus, and the 2x2 transform group.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from quatnev.quat_core import Quaternion, SliceComplex, SphereSampler, sphere_of
from quatnev.star_poly import (
    DegenerateTransform,
    EvalAtPole,
    GL2H,
    LeftPoly,
    RealPoly,
    SemiregularRational,
    UndefinedAtZeroPole,
    as_rational,
    blaschke,
    corollary_decomposition_check,
    linear_fractional,
    spherical_conjugate,
    spherical_derivative,
    spherical_value,
    star_eval_identity_check,
    star_mul,
    star_power,
)

ATOL = 1e-9
COMPONENT = st.floats(
    min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False, width=64
)


def quats():
    return st.builds(Quaternion, COMPONENT, COMPONENT, COMPONENT, COMPONENT)


def polys(max_degree: int = 3):
    return st.lists(
        st.tuples(COMPONENT, COMPONENT, COMPONENT, COMPONENT),
        min_size=1,
        max_size=max_degree + 1,
    ).map(lambda rows: LeftPoly([list(r) for r in rows]))


ONE = Quaternion(1, 0, 0, 0)
Q_IDENT = LeftPoly.identity()


# ---------------------------------------------------------------------------
# *-product algebra
# ---------------------------------------------------------------------------


@given(polys(), polys(), polys())
@settings(max_examples=100)
def test_star_product_is_associative(f, g, h):
    lhs = star_mul(star_mul(f, g), h)
    rhs = star_mul(f, star_mul(g, h))
    scale = max(lhs.coeff_scale(), rhs.coeff_scale(), 1.0)
    assert lhs.equals(rhs, ATOL * scale), "(f*g)*h ≠ f*(g*h)"


@given(polys(), polys(), polys())
@settings(max_examples=100)
def test_star_product_distributes(f, g, h):
    lhs = star_mul(f, g + h)
    rhs = star_mul(f, g) + star_mul(f, h)
    scale = max(lhs.coeff_scale(), rhs.coeff_scale(), 1.0)
    assert lhs.equals(rhs, ATOL * scale), "f*(g+h) ≠ f*g + f*h"


@given(polys(), polys())
@settings(max_examples=100)
def test_conjugate_reverses_star_products(f, g):
    lhs = star_mul(f, g).conjugate()
    rhs = star_mul(g.conjugate(), f.conjugate())
    scale = max(lhs.coeff_scale(), 1.0)
    assert lhs.equals(rhs, ATOL * scale), "(f*g)^c ≠ g^c * f^c"


@given(polys(), polys())
@settings(max_examples=100)
def test_symmetrization_is_real_and_multiplicative(f, g):
    fs = f.symmetrize()
    assert fs.is_real, "f^s must have real coefficients"
    prod_s = star_mul(f, g).symmetrize()
    split_s = star_mul(fs, g.symmetrize())
    scale = max(prod_s.coeff_scale(), 1.0)
    assert prod_s.equals(split_s, ATOL * scale), "(f*g)^s ≠ f^s · g^s"


@given(polys().filter(lambda f: abs(f(Quaternion(0, 0, 0, 0))) > 0.05), quats())
@settings(max_examples=150)
def test_star_evaluation_identity(f, q):
    """f*g evaluated at q equals f(q) · g(f(q)⁻¹ q f(q)) whenever f(q) ≠ 0."""
    g = Q_IDENT + LeftPoly.constant(Quaternion(0.3, -0.1, 0.2, 0.0))
    if abs(f(q)) < 1e-6:
        return
    residual = star_eval_identity_check(f, g, q)
    scale = 1.0 + abs(f(q)) * (1.0 + abs(q))
    assert residual <= 1e-8 * scale, f"*-evaluation identity residual {residual}"


def test_star_power_matches_repeated_product():
    f = LeftPoly([[0.5, 0.2, 0, 0], [1, 0, 0, 0], [0, 0, 0.3, 0]])
    p3 = star_power(f, 3)
    byhand = star_mul(star_mul(f, f), f)
    assert p3.equals(byhand, 1e-12 * byhand.coeff_scale())
    assert star_power(f, 1).equals(f, 0.0)
    with pytest.raises(ValueError):
        star_power(f, 0)


# ---------------------------------------------------------------------------
# Pointwise modulus factorization |f^s| = |f| · |f ∘ S_f|
# ---------------------------------------------------------------------------


@given(polys())
@settings(max_examples=100)
def test_symmetrization_modulus_splits(f):
    rng = np.random.default_rng(17)
    pts = SphereSampler(1.3, seed=9).sample(32)
    se = f.stems(pts, 1e-12)
    fs = f.symmetrize()
    vals_s = np.array([abs(fs(Quaternion.from_array(p))) for p in pts])
    twisted, _, ok = se.twisted(None, max(f.degree, 1))
    lhs = np.abs(se_norm(se.value())) * np.abs(se_norm(twisted))
    mask = ok & se.ok
    scale = 1.0 + vals_s[mask]
    assert np.all(np.abs(lhs[mask] - vals_s[mask]) <= 1e-8 * scale), (
        "|f|·|f∘S_f| must equal |f^s| pointwise"
    )


def se_norm(arr):
    return np.linalg.norm(arr, axis=1)


def test_real_polynomial_is_sphere_symmetric_bitwise():
    f = RealPoly([1.0, 0.0, 1.0])
    pts = SphereSampler(2.0, seed=4).sample(512)
    se = f.stems(pts, 0.0)
    la = se.log_abs()
    lat, ok = se.log_abs_twisted(None, f.degree)
    assert np.array_equal(la, lat), "slice-preserving twist must be bitwise exact"


# ---------------------------------------------------------------------------
# Stems agree with direct evaluation
# ---------------------------------------------------------------------------


@given(polys())
@settings(max_examples=100)
def test_stem_values_match_horner(f):
    pts = SphereSampler(1.7, seed=21).sample(16)
    se = f.stems(pts, 0.0)
    vals = se.value()
    for i, p in enumerate(pts):
        want = f(Quaternion.from_array(p))
        got = Quaternion.from_array(vals[i])
        scale = 1.0 + abs(want)
        assert abs(got - want) <= 1e-9 * scale, f"stem row {i}: {got} ≠ {want}"


# ---------------------------------------------------------------------------
# Series head, origin order, deflation
# ---------------------------------------------------------------------------


def test_series_head_is_value_and_derivatives():
    f = LeftPoly([[1, 1, 0, 0], [0, 0, 2, 0], [0.5, 0, 0, 1], [3, 0, 0, 0]])
    a0, a1, a2twice = f.series_head()
    assert a0.isclose(f.coefficient(0), 0.0)
    assert a1.isclose(f.coefficient(1), 0.0)
    assert a2twice.isclose(f.coefficient(2) * 2.0, 0.0), "third slot is f″(0) = 2a₂"


def test_origin_order_and_deflation():
    f = LeftPoly([[0, 0, 0, 0], [0, 0, 0, 0], [2, 1, 0, 0], [0, 0, 1, 0]])
    assert f.origin_order() == 2
    base, m0 = f.deflate_origin()
    assert m0 == 2
    assert base.coefficient(0).isclose(Quaternion(2, 1, 0, 0), 0.0)
    assert base.origin_order() == 0


# ---------------------------------------------------------------------------
# Spherical value / derivative decomposition
# ---------------------------------------------------------------------------


@given(polys(), quats().filter(lambda q: q.abs_im() > 0.1))
@settings(max_examples=150)
def test_spherical_decomposition(f, q):
    try:
        residual = corollary_decomposition_check(f, q)
    except UndefinedAtZeroPole:
        assume(False)  # q landed on the zero set of f^s, where S_f is undefined
        return
    scale = 1.0 + abs(f(q))
    assert residual <= 1e-8 * scale, f"f ≠ f°_s + Im(q)·f'_s at {q} (residual {residual})"


@given(polys(), quats().filter(lambda q: q.abs_im() > 0.1))
@settings(max_examples=150)
def test_spherical_parts_are_constant_on_the_sphere(f, q):
    qc = q.conj()
    assert spherical_value(f, q).isclose(spherical_value(f, qc), 1e-8 * (1 + abs(f(q))))
    assert spherical_derivative(f, q).isclose(
        spherical_derivative(f, qc), 1e-8 * (1 + abs(f(q)))
    )


def test_spherical_conjugate_compensates():
    """|f(S_f(q))| · |f(q)| = |f^s(q)| with S_f evaluated directly."""
    f = LeftPoly([[0.2, 0.5, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0.4]])
    fs = f.symmetrize()
    for seed in range(4):
        q = Quaternion.from_array(SphereSampler(1.4, seed=seed).sample(1)[0])
        sq = spherical_conjugate(f, q)
        lhs = abs(f(q)) * abs(f(sq))
        rhs = abs(fs(q))
        assert abs(lhs - rhs) <= 1e-8 * (1.0 + rhs), f"seed {seed}: {lhs} ≠ {rhs}"


# ---------------------------------------------------------------------------
# Blaschke factors
# ---------------------------------------------------------------------------


@given(
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
    st.floats(min_value=0.2, max_value=1.0, allow_nan=False),
)
@settings(max_examples=100)
def test_blaschke_has_unit_modulus_on_the_boundary(xi, eta):
    sphere = SliceComplex(xi, eta)
    rho = 2.0
    if sphere.modulus() >= rho - 1e-6:
        return
    for seed in range(3):
        q = Quaternion.from_array(SphereSampler(rho, seed=seed).sample(1)[0])
        b = blaschke(sphere, rho, q)
        assert abs(abs(b) - 1.0) <= 1e-9, f"|B(q)| = {abs(b)} ≠ 1 on |q| = ρ"


def test_blaschke_strips_zeros_with_poles_on_its_sphere():
    """The factor is the zero-stripping form: poles on S_ζ, zeros on the
    mirror sphere ρ²ζ⁻¹, so multiplying f by B removes the S_ζ divisor."""
    sphere = SliceComplex(0.3, 0.4)
    with pytest.raises(EvalAtPole):
        blaschke(sphere, 2.0, Quaternion(0.3, 0.4, 0.0, 0.0))
    # zero on the mirror sphere: ρ²ζ⁻¹ = (4·0.3, 4·0.4)/|ζ|² with |ζ|² = 0.25
    mirror = Quaternion(4.0 * 0.3 / 0.25, 4.0 * 0.4 / 0.25, 0.0, 0.0)
    assert abs(blaschke(sphere, 2.0, mirror)) <= 1e-9


# ---------------------------------------------------------------------------
# Rational closure and 2x2 transforms
# ---------------------------------------------------------------------------


def test_rational_evaluates_as_left_quotient():
    num = LeftPoly([[1, 0, 0, 0], [0, 1, 0, 0]])          # 1 + q i
    den = RealPoly([1.0, 0.0, 1.0])                        # q² + 1
    f = SemiregularRational(num, den)
    q = Quaternion(0.5, 0.25, -0.1, 0.0)
    # value = den_s(q)⁻¹ · (num * den^c)(q), with the slice-preserving
    # denominator acting from the left
    eff = star_mul(num, den.conjugate())
    dens = den.symmetrize()
    want = dens(q).inverse() * eff(q)
    got = f(q)
    assert got.isclose(want, 1e-10 * (1 + abs(want))), f"{got} ≠ {want}"


def test_rational_shift_and_origin_order():
    f = as_rational(RealPoly([1.0, 0.0, 1.0]))
    g = f.shift(Quaternion(1, 0, 0, 0))                    # q² + 1 − 1 = q²
    assert g.origin_order() == 2


def test_star_reciprocal_swaps_zero_and_pole_orders():
    f = as_rational(RealPoly([1.0, 0.0, 1.0]))
    rec = f.star_reciprocal()
    from quatnev.divisor import total_order_divisor

    d = total_order_divisor(rec)
    spheres = {(sphere.re, sphere.im): ordt for sphere, ordt in d.entries}
    assert spheres == {(0.0, 1.0): -2}, f"reciprocal divisor wrong: {spheres}"


def test_gl2h_dieudonne_and_compose():
    t = GL2H(ONE, Quaternion(0, 1, 0, 0), Quaternion(0, 0, 0, 0), ONE)
    ident = GL2H.identity()
    assert t.compose(ident).dieudonne() == pytest.approx(t.dieudonne(), abs=1e-12)
    assert ident.dieudonne() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DegenerateTransform):
        GL2H(ONE, ONE, ONE, ONE).require_invertible()


def test_linear_fractional_with_zero_c_is_affine():
    t = GL2H(Quaternion(2, 0, 0, 0), Quaternion(1, 0, 0, 0), Quaternion(0, 0, 0, 0), ONE)
    f = RealPoly([0.0, 1.0])                               # f(q) = q
    phi = linear_fractional(t, f)
    q = Quaternion(0.3, 0.2, 0.1, 0.0)
    want = Quaternion(2, 0, 0, 0) * q + Quaternion(1, 0, 0, 0)
    assert phi(q).isclose(want, 1e-10), f"(2f+1)(q) = {phi(q)} ≠ {want}"


def test_json_roundtrips():
    f = LeftPoly([[1, 2, 0, 0], [0, 0, 1, 0.5]])
    assert LeftPoly.from_json(f.to_json()).equals(f, 0.0)
    r = as_rational(f)
    rt = SemiregularRational.from_json(r.to_json())
    assert rt.num.equals(r.num, 0.0) and rt.den.equals(r.den, 0.0)
