"""Left polynomials and semiregular rationals under the *-product.

The function model: left polynomials f(q) = Σ_k q^k a_k (quaternion
coefficients on the right of the powers), their *-products, conjugates
f^c, symmetrizations f^s, slice derivatives, spherical value/derivative,
the spherical conjugate point map S_f, Blaschke factors, and linear
fractional transforms; plus semiregular rationals f = g * h^{-*}.

Batch evaluation runs through *stems*: at a point q = u + Iv the complex
powers z^n = (u + iv)^n = c_n + i s_n are shared by every slice, so
f(u + Iv) = P + I Q with P = Σ c_n a_n and Q = Σ s_n a_n.  All derived
quantities (value at q̄, value composed with S_f, norms of slice-preserving
functions) reuse the same (P, Q), which is what makes reflection and
spherical-conjugation identities exact at machine level instead of merely
approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quat_core import (
    Quaternion,
    SliceComplex,
    qconj,
    qinv,
    qmul,
    qnorm,
    slice_coords,
)

__all__ = [
    "LeftPoly",
    "RealPoly",
    "SemiregularRational",
    "GL2H",
    "StemEval",
    "EvalAtPole",
    "SymmetrizationNotReal",
    "RealPointDegenerate",
    "UndefinedAtZeroPole",
    "ZeroCenter",
    "DegenerateTransform",
    "ZeroFunctionReciprocal",
    "star_mul",
    "star_power",
    "star_eval_identity_check",
    "spherical_value",
    "spherical_derivative",
    "spherical_conjugate",
    "corollary_decomposition_check",
    "blaschke",
    "linear_fractional",
    "as_rational",
]


class EvalAtPole(ArithmeticError):
    """Evaluation point is numerically on a pole sphere (|h^s(q)| below pole_tol)."""


class SymmetrizationNotReal(ArithmeticError):
    """f * f^c produced coefficients with non-negligible imaginary residue (arithmetic bug)."""


class RealPointDegenerate(ValueError):
    """Spherical derivative requested on the real axis, where Im(q)^{-1} is undefined."""


class UndefinedAtZeroPole(ArithmeticError):
    """Spherical conjugate requested at a zero or pole of f^s."""


class ZeroCenter(ValueError):
    """Blaschke factor / Jensen kernel centered at zero is undefined."""


class DegenerateTransform(ValueError):
    """GL(2, H) matrix with (numerically) vanishing Dieudonné determinant."""


class ZeroFunctionReciprocal(ZeroDivisionError):
    """*-reciprocal of the identically-zero function."""


ZERO_DEGREE = -1  # sentinel degree of the identically-zero polynomial


# ---------------------------------------------------------------------------
# stem power helpers
# ---------------------------------------------------------------------------


def _complex_powers(u: np.ndarray, v: np.ndarray, degree: int):
    """c_n, s_n with (u + iv)^n = c_n + i s_n, as (degree+1, n_pts) arrays."""
    npts = u.shape[0]
    c = np.empty((degree + 1, npts))
    s = np.empty((degree + 1, npts))
    c[0] = 1.0
    s[0] = 0.0
    for k in range(degree):
        c[k + 1] = c[k] * u - s[k] * v
        s[k + 1] = c[k] * v + s[k] * u
    return c, s


@dataclass(frozen=True)
class StemEval:
    """Stem data of one function on one batch of points.

    P, Q are quaternion (n, 4) arrays with f(u + Iv) = P + I·Q and
    f(u − Iv) = P − I·Q; ``ok`` masks points where the evaluation is
    defined (it excludes numerical pole hits for rationals).  ``log_den``
    is the log of the real denominator modulus (0 for polynomials), kept
    separate so log|f| can be assembled without forming the quotient.
    """

    u: np.ndarray
    v: np.ndarray
    I: np.ndarray
    near_real: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    ok: np.ndarray
    log_den: np.ndarray
    real_stems: tuple | None = None  # (P_real, Q_real, log_den) for slice-preserving f

    def value(self) -> np.ndarray:
        """f(q) as an (n, 4) array."""
        return self.P + qmul(self.I, self.Q)

    def value_conj_point(self) -> np.ndarray:
        """f(q̄) as an (n, 4) array (same stems, I → −I)."""
        return self.P - qmul(self.I, self.Q)

    def log_abs(self) -> np.ndarray:
        """log|f(q)| (−inf where the numerator vanishes; mask with ok)."""
        if self.real_stems is not None:
            pr, qr, ld = self.real_stems
            num = np.hypot(pr, qr)
        else:
            num = qnorm(self.value())
            ld = self.log_den
        with np.errstate(divide="ignore"):
            return np.log(num) - ld

    def log_abs_conj_point(self) -> np.ndarray:
        """log|f(q̄)|; bitwise equal to log_abs() for slice-preserving f."""
        if self.real_stems is not None:
            pr, qr, ld = self.real_stems
            num = np.hypot(pr, qr)
        else:
            num = qnorm(self.value_conj_point())
            ld = self.log_den
        with np.errstate(divide="ignore"):
            return np.log(num) - ld

    def abs_value(self) -> np.ndarray:
        """|f(q)|."""
        if self.real_stems is not None:
            pr, qr, ld = self.real_stems
            return np.hypot(pr, qr) * np.exp(-ld)
        return qnorm(self.value()) * np.exp(-self.log_den)

    def twisted(self, shift, deg_tol_poly_degree: int):
        """Value f(S_{f−a}(q)) and a definedness mask.

        shift is the constant a (Quaternion or None for a = 0): the twist
        point map is S_{f−a}(q) = d q̄ d^{-1} with d = (f−a)'_s(q)·(f(q)−a)^{-1};
        since (f−a)'_s = f'_s ∝ Q, the direction of d is Q·(f(q)−a)^{-1},
        and f(S(q)) = P + J·Q with J = −unit(Im(d I d^{-1})) on the *same*
        slice coordinates (u, v).  Degenerate points (spherical derivative
        below tolerance, or numerically real q) take the reflection branch
        J = −I, i.e. S(q) = q̄.

        Returns (value (n,4), J (n,4), ok (n,)).
        """
        val = self.value()
        if shift is not None:
            val = val.copy()
            val[:, 0] -= shift.w
            val[:, 1] -= shift.x
            val[:, 2] -= shift.y
            val[:, 3] -= shift.z
        ok = self.ok.copy()
        scale = (1.0 + np.hypot(self.u, self.v)) ** max(deg_tol_poly_degree, 1)
        vmag = qnorm(val)
        qmag = qnorm(self.Q)
        degenerate = self.near_real | (qmag < 1e-10 * (scale / (1.0 + np.hypot(self.u, self.v))) * self.v)
        usable = vmag > 0.0
        ok &= usable
        safe_val = np.where(usable[:, None], val, np.array([1.0, 0.0, 0.0, 0.0]))
        d = qmul(self.Q, qinv(safe_val))
        dmag = qnorm(d)
        degenerate |= dmag < 1e-300
        safe_d = np.where(degenerate[:, None], np.array([1.0, 0.0, 0.0, 0.0]), d)
        rot = qmul(qmul(safe_d, self.I), qinv(safe_d))
        rot[:, 0] = 0.0
        rmag = qnorm(rot)
        degenerate |= rmag < 1e-300
        J = np.where(
            degenerate[:, None],
            -self.I,
            -rot / np.where(degenerate, 1.0, rmag)[:, None],
        )
        return self.P + qmul(J, self.Q), J, ok

    def log_abs_twisted(self, shift, deg_tol_poly_degree: int):
        """log|f(S_{f−a}(q))| and mask; exact hypot route for slice-preserving f.

        For slice-preserving f the value at any point of the sphere S_q has
        norm hypot(P, Q) independent of the slice direction — the exact
        slice-coordinate formula — so the twisted log-modulus is computed
        from the shared stems directly and is bitwise equal to log|f(q)|.
        """
        if self.real_stems is not None:
            pr, qr, ld = self.real_stems
            with np.errstate(divide="ignore"):
                return np.log(np.hypot(pr, qr)) - ld, self.ok.copy()
        tv, _, ok = self.twisted(shift, deg_tol_poly_degree)
        with np.errstate(divide="ignore"):
            return np.log(qnorm(tv)) - self.log_den, ok


# ---------------------------------------------------------------------------
# LeftPoly
# ---------------------------------------------------------------------------


class LeftPoly:
    """Left polynomial f(q) = Σ_k q^k a_k with quaternion coefficients a_k.

    Coefficients are stored lowest-degree first as an (n, 4) float array;
    trailing zero coefficients are trimmed so the representation is
    canonical.  The zero polynomial has empty coefficients and degree −1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs) -> None:
        arr = _coeff_array(coeffs)
        nz = np.nonzero(np.any(arr != 0.0, axis=1))[0]
        self.coeffs = arr[: nz[-1] + 1].copy() if nz.size else np.empty((0, 4))
        self.coeffs.setflags(write=False)

    # -- construction helpers ----------------------------------------------

    @staticmethod
    def constant(a) -> "LeftPoly":
        return LeftPoly([_as_quat(a).to_array()])

    @staticmethod
    def identity() -> "LeftPoly":
        """The polynomial f(q) = q."""
        return LeftPoly([[0, 0, 0, 0], [1, 0, 0, 0]])

    @staticmethod
    def from_json(data) -> "LeftPoly":
        return LeftPoly(data)

    def to_json(self):
        return [list(map(float, row)) for row in self.coeffs]

    # -- basic structure ----------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; ZERO_DEGREE (= −1) for the zero polynomial."""
        return self.coeffs.shape[0] - 1 if self.coeffs.shape[0] else ZERO_DEGREE

    @property
    def is_zero(self) -> bool:
        return self.coeffs.shape[0] == 0

    @property
    def is_real(self) -> bool:
        return self.is_zero or not np.any(self.coeffs[:, 1:])

    def coefficient(self, k: int) -> Quaternion:
        if 0 <= k < self.coeffs.shape[0]:
            return Quaternion.from_array(self.coeffs[k])
        return Quaternion()

    def coeff_scale(self) -> float:
        """max |a_k|, a natural scale for relative tolerances (0 for the zero poly)."""
        return float(qnorm(self.coeffs).max()) if self.coeffs.shape[0] else 0.0

    def equals(self, other: "LeftPoly", tol: float = 0.0) -> bool:
        a, b = self.coeffs, other.coeffs
        n = max(a.shape[0], b.shape[0])
        pa = np.zeros((n, 4))
        pb = np.zeros((n, 4))
        pa[: a.shape[0]] = a
        pb[: b.shape[0]] = b
        return bool(np.all(qnorm(pa - pb) <= tol))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(degree={self.degree})"

    # -- algebra --------------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self.coeffs.shape[0], other.coeffs.shape[0])
        out = np.zeros((n, 4))
        out[: self.coeffs.shape[0]] += self.coeffs
        out[: other.coeffs.shape[0]] += other.coeffs
        return _poly_preserving_reality(out)

    __radd__ = __add__

    def __neg__(self):
        return _poly_preserving_reality(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        """*-product (coefficient convolution, left factors' coefficients left)."""
        return star_mul(self, _as_poly(other))

    def __rmul__(self, other):
        return star_mul(_as_poly(other), self)

    def scale_left(self, a) -> "LeftPoly":
        """Constant *-multiplication from the left: coefficients a·a_k."""
        a = _as_quat(a)
        if self.is_zero:
            return LeftPoly([])
        return _poly_preserving_reality(qmul(a.to_array(), self.coeffs))

    def conjugate(self) -> "LeftPoly":
        """f^c: coefficientwise quaternion conjugation."""
        return _poly_preserving_reality(qconj(self.coeffs)) if not self.is_zero else LeftPoly([])

    def symmetrize(self) -> "RealPoly":
        """f^s = f * f^c, projected to its (provably real) coefficients.

        Raises SymmetrizationNotReal if the imaginary residue exceeds
        1e-9 times the coefficient scale, which would indicate an
        arithmetic bug rather than rounding noise.
        """
        if self.is_zero:
            return RealPoly([])
        prod = star_mul(self, self.conjugate())
        residue = float(np.abs(prod.coeffs[:, 1:]).max()) if prod.coeffs.size else 0.0
        scale = max(self.coeff_scale() ** 2, 1e-300)
        if residue > 1e-9 * scale:
            raise SymmetrizationNotReal(
                f"imaginary residue {residue:.3e} exceeds 1e-9·scale ({scale:.3e})"
            )
        return RealPoly(prod.coeffs[:, 0])

    def derivative(self, order: int = 1) -> "LeftPoly":
        """Slice derivative ∂f/∂q = Σ_k k q^{k−1} a_k, iterated ``order`` times."""
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        c = self.coeffs
        for _ in range(order):
            if c.shape[0] <= 1:
                c = np.empty((0, 4))
                break
            c = c[1:] * np.arange(1, c.shape[0])[:, None]
        return _poly_preserving_reality(c)

    def series_head(self):
        """(a0, a1, 2·a2) as Quaternions: f(0), f′(0), f″(0)."""
        return (
            self.coefficient(0),
            self.coefficient(1),
            self.coefficient(2) * 2.0,
        )

    def origin_order(self) -> int:
        """Multiplicity of the zero at q = 0 (0 if f(0) ≠ 0; 0 for f ≡ 0 by convention)."""
        if self.is_zero:
            return 0
        nz = np.nonzero(np.any(self.coeffs != 0.0, axis=1))[0]
        return int(nz[0])

    def deflate_origin(self) -> tuple["LeftPoly", int]:
        """Divide out q^m at the origin; returns (f / q^m, m)."""
        m = self.origin_order()
        return (_poly_preserving_reality(self.coeffs[m:]), m) if m else (self, 0)

    # -- evaluation -------------------------------------------------------------

    def __call__(self, q) -> Quaternion:
        """Horner evaluation with powers on the left: a_0 + q(a_1 + q(a_2 + …))."""
        q = _as_quat(q)
        if self.is_zero:
            return Quaternion()
        acc = Quaternion.from_array(self.coeffs[-1])
        for k in range(self.coeffs.shape[0] - 2, -1, -1):
            acc = q * acc + Quaternion.from_array(self.coeffs[k])
        return acc

    def stems(self, pts: np.ndarray, reject_tol: float = 0.0) -> StemEval:
        """Stem evaluation on an (n, 4) batch of points.

        For a polynomial ok is all-True (there is no denominator); the
        reject_tol parameter is accepted for interface uniformity and
        ignored here.
        """
        pts = np.asarray(pts, dtype=float)
        u, v, I, near_real = slice_coords(pts)
        deg = max(self.degree, 0)
        c, s = _complex_powers(u, v, deg)
        if self.is_zero:
            P = np.zeros((u.shape[0], 4))
            Q = np.zeros((u.shape[0], 4))
        else:
            P = np.tensordot(c, self.coeffs, axes=(0, 0))
            Q = np.tensordot(s, self.coeffs, axes=(0, 0))
        ok = np.ones(u.shape[0], dtype=bool)
        zeros = np.zeros(u.shape[0])
        return StemEval(u, v, I, near_real, P, Q, ok, zeros, None)

    def eval_batch(self, pts: np.ndarray) -> np.ndarray:
        return self.stems(pts).value()

    def pole_tol(self, q_norm: float) -> float:
        return 0.0  # polynomials have no poles

    @property
    def den_s_degree(self) -> int:
        return 0

    @property
    def growth_degree(self) -> int:
        """Net power growth of |f| at large |q| (degree for polynomials)."""
        return max(self.degree, 0)


def _coeff_array(coeffs) -> np.ndarray:
    if isinstance(coeffs, LeftPoly):
        return np.array(coeffs.coeffs, dtype=float)
    arr = np.asarray(
        [(_as_quat(c).to_array() if not np.shape(c) else np.asarray(c, dtype=float)) for c in coeffs],
        dtype=float,
    )
    if arr.size == 0:
        return np.empty((0, 4))
    if arr.ndim == 1:
        arr = np.stack([arr, np.zeros_like(arr), np.zeros_like(arr), np.zeros_like(arr)], axis=1)
    if arr.shape[1] != 4:
        raise ValueError("coefficients must be scalars or [w,x,y,z] quadruples")
    return arr


def _as_quat(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float)):
        return Quaternion(float(v))
    if isinstance(v, complex):
        return Quaternion.from_complex(v)
    return Quaternion.from_array(v)


def _as_poly(v) -> "LeftPoly":
    if isinstance(v, LeftPoly):
        return v
    if isinstance(v, (int, float, complex, Quaternion)):
        return LeftPoly.constant(v)
    return LeftPoly(v)


def _poly_preserving_reality(coeffs: np.ndarray) -> "LeftPoly":
    """Build LeftPoly, downcasting to RealPoly when all coefficients are real."""
    arr = np.asarray(coeffs, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 4 and (arr.size == 0 or not np.any(arr[:, 1:])):
        return RealPoly(arr[:, 0])
    return LeftPoly(arr)


# ---------------------------------------------------------------------------
# RealPoly
# ---------------------------------------------------------------------------


class RealPoly(LeftPoly):
    """Left polynomial with real coefficients — the slice-preserving class.

    Values lie in the slice of the argument: f(u + Iv) = A + I B with real
    A, B, so f(q̄) = conj(f(q)) and |f| is constant on every sphere S_q;
    the *-product with any slice function coincides with the pointwise
    product.  Stem evaluation carries the real pair (A, B) explicitly,
    making sphere-symmetric quantities exact at machine level.
    """

    __slots__ = ("real_coeffs",)

    def __init__(self, coeffs) -> None:
        arr = np.asarray(coeffs, dtype=float)
        if arr.ndim == 2:
            if arr.shape[0] and np.any(arr[:, 1:]):
                raise ValueError("RealPoly requires real coefficients")
            arr = arr[:, 0] if arr.shape[0] else np.empty(0)
        nz = np.nonzero(arr != 0.0)[0]
        real = arr[: nz[-1] + 1].copy() if nz.size else np.empty(0)
        quad = np.zeros((real.shape[0], 4))
        quad[:, 0] = real
        super().__init__(quad)
        self.real_coeffs = real
        self.real_coeffs.setflags(write=False)

    @staticmethod
    def from_roots_conjugate_pair(sphere) -> "RealPoly":
        """(q − ζ)^s = q² − 2·Re(ζ)·q + |ζ|² for the sphere key ζ = (re, im)."""
        return RealPoly([sphere.re**2 + sphere.im**2, -2.0 * sphere.re, 1.0])

    def real_stems(self, u: np.ndarray, v: np.ndarray):
        """Real stem pair (A, B) with f(u + Iv) = A + I B."""
        deg = max(self.degree, 0)
        c, s = _complex_powers(u, v, deg)
        if self.is_zero:
            return np.zeros_like(u), np.zeros_like(u)
        A = np.tensordot(c, self.real_coeffs, axes=(0, 0))
        B = np.tensordot(s, self.real_coeffs, axes=(0, 0))
        return A, B

    def stems(self, pts: np.ndarray, reject_tol: float = 0.0) -> StemEval:
        pts = np.asarray(pts, dtype=float)
        u, v, I, near_real = slice_coords(pts)
        A, B = self.real_stems(u, v)
        P = np.zeros((u.shape[0], 4))
        P[:, 0] = A
        Q = np.zeros((u.shape[0], 4))
        Q[:, 0] = B
        ok = np.ones(u.shape[0], dtype=bool)
        zeros = np.zeros(u.shape[0])
        return StemEval(u, v, I, near_real, P, Q, ok, zeros, (A, B, zeros))

    def eval_complex(self, z: np.ndarray) -> np.ndarray:
        """Evaluate as a complex polynomial (for root/divisor work)."""
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros_like(z)
        acc = np.full_like(z, complex(self.real_coeffs[-1]))
        for k in range(self.real_coeffs.shape[0] - 2, -1, -1):
            acc = acc * z + self.real_coeffs[k]
        return acc

    def conjugate(self) -> "RealPoly":
        return self

    def symmetrize(self) -> "RealPoly":
        """f^s = f² for real coefficients."""
        if self.is_zero:
            return RealPoly([])
        return RealPoly(np.convolve(self.real_coeffs, self.real_coeffs))

    def __mul__(self, other):
        other_p = _as_poly(other)
        if isinstance(other_p, RealPoly):
            if self.is_zero or other_p.is_zero:
                return RealPoly([])
            return RealPoly(np.convolve(self.real_coeffs, other_p.real_coeffs))
        return star_mul(self, other_p)


# ---------------------------------------------------------------------------
# *-product and pointwise identities
# ---------------------------------------------------------------------------


def star_mul(f: LeftPoly, g: LeftPoly) -> LeftPoly:
    """*-product: coefficient convolution c_n = Σ_{i+j=n} a_i·b_j (a on the left)."""
    if f.is_zero or g.is_zero:
        return RealPoly([])
    if isinstance(f, RealPoly) and isinstance(g, RealPoly):
        return RealPoly(np.convolve(f.real_coeffs, g.real_coeffs))
    a, b = f.coeffs, g.coeffs
    out = np.zeros((a.shape[0] + b.shape[0] - 1, 4))
    for i in range(a.shape[0]):
        out[i : i + b.shape[0]] += qmul(a[i], b)
    return _poly_preserving_reality(out)


def star_power(f: LeftPoly, n: int) -> LeftPoly:
    """n-fold *-power f^{n*}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = f
    for _ in range(n - 1):
        out = star_mul(out, f)
    return out


def star_eval_identity_check(f: LeftPoly, g: LeftPoly, q) -> float:
    """Residual of (f*g)(q) = f(q)·g(f(q)^{-1} q f(q)).

    When f(q) = 0 the *-product value must itself vanish, so the residual
    returned is |(f*g)(q)|.
    """
    q = _as_quat(q)
    prod_val = star_mul(f, g)(q)
    fq = f(q)
    if fq.norm() == 0.0:
        return prod_val.norm()
    twisted = fq.inverse() * q * fq
    return (prod_val - fq * g(twisted)).norm()


def spherical_value(f, q) -> Quaternion:
    """f°_s(q) = ½(f(q) + f(q̄)); constant on the sphere S_q."""
    q = _as_quat(q)
    return (f(q) + f(q.conj())) * 0.5


def spherical_derivative(f, q) -> Quaternion:
    """f′_s(q) = ½·Im(q)^{-1}·(f(q) − f(q̄)); undefined on the real axis."""
    q = _as_quat(q)
    if q.abs_im() == 0.0:
        raise RealPointDegenerate("spherical derivative needs a nonreal point")
    return q.im.inverse() * (f(q) - f(q.conj())) * 0.5


def spherical_conjugate(f, q) -> Quaternion:
    """The point S_f(q) = f′_s(q)·f(q)^{-1}·q̄·f(q)·f′_s(q)^{-1}.

    Degenerate branch (q real, or |f′_s(q)| below the scale-aware
    tolerance 1e-10·(1+|q|)^{deg−1}): S_f(q) = q̄.  Raises
    UndefinedAtZeroPole on the zero/pole set of f^s, where the map is not
    defined.
    """
    q = _as_quat(q)
    fs = _function_symmetrization_abs(f, q)
    deg = _den_s_degree(f) + _num_s_degree(f)
    if fs < 1e-12 * (1.0 + q.norm()) ** max(deg, 1):
        raise UndefinedAtZeroPole(f"S_f undefined at {q}: |f^s(q)| = {fs:.3e}")
    if q.abs_im() == 0.0:
        return q
    fq = f(q)
    ds = spherical_derivative(f, q)
    deg_f = _value_degree(f)
    if ds.norm() < 1e-10 * (1.0 + q.norm()) ** max(deg_f - 1, 0):
        return q.conj()
    x = ds * fq.inverse()
    return x * q.conj() * x.inverse()


def corollary_decomposition_check(f, q) -> float:
    """Residual of log|f^s(q)| = log|f(q)| + log|f(S_f(q))|."""
    q = _as_quat(q)
    fs_abs = _function_symmetrization_abs(f, q)
    s = spherical_conjugate(f, q)
    return abs(math.log(fs_abs) - math.log(f(q).norm()) - math.log(f(s).norm()))


def _function_symmetrization_abs(f, q: Quaternion) -> float:
    if isinstance(f, SemiregularRational):
        num = f.num.symmetrize()(q).norm()
        den = f.den.symmetrize()(q).norm()
        if den == 0.0:
            raise EvalAtPole(f"f^s has a pole at {q}")
        return num / den
    return f.symmetrize()(q).norm()


def _den_s_degree(f) -> int:
    return f.den_s.degree if isinstance(f, SemiregularRational) else 0


def _num_s_degree(f) -> int:
    if isinstance(f, SemiregularRational):
        return 2 * max(f.num.degree, 0)
    return 2 * max(f.degree, 0)


def _value_degree(f) -> int:
    if isinstance(f, SemiregularRational):
        return max(f.num.degree, f.den.degree, 1)
    return max(f.degree, 1)


# ---------------------------------------------------------------------------
# SemiregularRational
# ---------------------------------------------------------------------------


class SemiregularRational:
    """Semiregular rational f = g * h^{-*} (left polynomials g, h, h ≢ 0).

    Since h^{-*} = (1/h^s)·h^c with slice-preserving 1/h^s, evaluation uses
    the real-denominator form f(q) = h^s(q)^{-1}·(g*h^c)(q): the
    slice-preserving factor acts from the left, which is the order forced
    by the stem algebra.  Poles live on the zero set of h^s.
    """

    __slots__ = ("num", "den", "num_eff", "den_s")

    def __init__(self, num, den) -> None:
        self.num = _as_poly(num)
        self.den = _as_poly(den)
        if self.den.is_zero:
            raise ZeroDivisionError("denominator polynomial must be nonzero")
        self.num_eff = star_mul(self.num, self.den.conjugate())
        self.den_s = self.den.symmetrize()

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def is_real(self) -> bool:
        return self.num.is_real and self.den.is_real

    @property
    def den_s_degree(self) -> int:
        return self.den_s.degree

    @property
    def growth_degree(self) -> int:
        """Net power growth of |f| = |g*h^c|/|h^s| at large |q|."""
        return max(self.num_eff.degree, 0) - max(self.den_s.degree, 0)

    def coeff_scale(self) -> float:
        return max(self.num.coeff_scale(), 1e-300) / max(self.den.coeff_scale(), 1e-300)

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data) -> "SemiregularRational":
        return SemiregularRational(LeftPoly(data["num"]), LeftPoly(data["den"]))

    def __repr__(self) -> str:
        return f"SemiregularRational(num_degree={self.num.degree}, den_degree={self.den.degree})"

    # -- algebra -------------------------------------------------------------

    def conjugate(self) -> "SemiregularRational":
        """f^c = (h*g^c)·(1/h^s); satisfies (f^c)^s = f^s."""
        return SemiregularRational(star_mul(self.den, self.num.conjugate()), self.den_s)

    def symmetrize(self) -> "SemiregularRational":
        """f^s = g^s * (h^s)^{-*} as a ratio of real polynomials."""
        return SemiregularRational(self.num.symmetrize(), self.den_s)

    def star_reciprocal(self) -> "SemiregularRational":
        """f^{-*} = h * g^{-*}: swap numerator and denominator."""
        if self.num.is_zero:
            raise ZeroFunctionReciprocal("reciprocal of the zero function")
        return SemiregularRational(self.den, self.num)

    def shift(self, a) -> "SemiregularRational":
        """f − a = (g − a*h) * h^{-*} for a constant a."""
        a = _as_quat(a)
        return SemiregularRational(self.num - self.den.scale_left(a), self.den)

    def __add__(self, other):
        other = as_rational(other)
        num = star_mul(self.num_eff, other.den_s) + star_mul(other.num_eff, self.den_s)
        return SemiregularRational(num, self.den_s * other.den_s)

    def __sub__(self, other):
        return self + (-as_rational(other))

    def __neg__(self):
        return SemiregularRational(-self.num, self.den)

    def __mul__(self, other):
        """*-product; real denominators h₁^s h₂^s commute past everything."""
        other = as_rational(other)
        return SemiregularRational(
            star_mul(self.num_eff, other.num_eff), self.den_s * other.den_s
        )

    # -- evaluation ------------------------------------------------------------

    def pole_tol(self, q_norm: float) -> float:
        """EvalAtPole threshold 1e-12·(1+|q|)^{deg h^s}."""
        return 1e-12 * (1.0 + q_norm) ** max(self.den_s.degree, 1)

    def __call__(self, q) -> Quaternion:
        q = _as_quat(q)
        u, vq = q.w, q.abs_im()
        z = complex(u, vq)
        hs = self.den_s.eval_complex(np.array([z]))[0]
        if abs(hs) < self.pole_tol(q.norm()):
            raise EvalAtPole(f"|h^s({q})| = {abs(hs):.3e} below pole tolerance")
        if vq == 0.0:
            hs_q = Quaternion(hs.real)
        else:
            I = q.im * (1.0 / vq)
            hs_q = Quaternion(hs.real) + I * hs.imag
        return hs_q.inverse() * self.num_eff(q)

    def stems(self, pts: np.ndarray, reject_tol: float = 1e-12) -> StemEval:
        """Stem evaluation of the quotient.

        With real denominator stems (A, B) and numerator stems (P_n, Q_n):
        P = (A·P_n + B·Q_n)/(A²+B²), Q = (A·Q_n − B·P_n)/(A²+B²); points
        with |h^s| below the scale-aware tolerance are masked out.
        """
        pts = np.asarray(pts, dtype=float)
        base = self.num_eff.stems(pts)
        A, B = self.den_s.real_stems(base.u, base.v)
        mod2 = A * A + B * B
        radius = np.hypot(base.u, base.v)
        tol = reject_tol * (1.0 + radius) ** max(self.den_s.degree, 1)
        ok = mod2 >= tol * tol
        safe = np.where(ok, mod2, 1.0)
        with np.errstate(divide="ignore"):
            log_den = 0.5 * np.log(safe)
        if self.is_real:
            An, Bn = base.real_stems[0], base.real_stems[1]
            Pr = (A * An + B * Bn) / safe
            Qr = (A * Bn - B * An) / safe
            P = np.zeros((base.u.shape[0], 4))
            P[:, 0] = Pr
            Q = np.zeros((base.u.shape[0], 4))
            Q[:, 0] = Qr
            return StemEval(
                base.u, base.v, base.I, base.near_real, P, Q, ok,
                np.zeros_like(log_den), (Pr, Qr, np.zeros_like(log_den)),
            )
        P = (A[:, None] * base.P + B[:, None] * base.Q) / safe[:, None]
        Q = (A[:, None] * base.Q - B[:, None] * base.P) / safe[:, None]
        return StemEval(base.u, base.v, base.I, base.near_real, P, Q, ok,
                        np.zeros_like(log_den), None)

    def eval_batch(self, pts: np.ndarray) -> np.ndarray:
        return self.stems(pts).value()

    # -- series at the origin ---------------------------------------------------

    def origin_order(self) -> int:
        """Total order at q = 0: ord₀(g) − ord₀(h) (zeros positive, poles negative)."""
        if self.num.is_zero:
            return 0
        return self.num.origin_order() - self.den.origin_order()

    def series_head(self):
        """(d0, d1, 2·d2) of the Laurent-deflated series at 0.

        Divides num_eff and den_s by their exact origin powers and then
        performs three-term series division by the real denominator.
        """
        num, m_num = self.num_eff.deflate_origin()
        den, m_den = self.den_s.deflate_origin()
        n0, n1, n2 = (num.coefficient(k).to_array() for k in range(3))
        s = den.real_coeffs
        s0 = s[0]
        s1 = s[1] if s.shape[0] > 1 else 0.0
        s2 = s[2] if s.shape[0] > 2 else 0.0
        d0 = n0 / s0
        d1 = (n1 - d0 * s1) / s0
        d2 = (n2 - d0 * s2 - d1 * s1) / s0
        return (
            Quaternion.from_array(d0),
            Quaternion.from_array(d1),
            Quaternion.from_array(2.0 * d2),
        )


def as_rational(f) -> SemiregularRational:
    """Promote a polynomial (or constant) to a SemiregularRational."""
    if isinstance(f, SemiregularRational):
        return f
    return SemiregularRational(_as_poly(f), RealPoly([1.0]))


# ---------------------------------------------------------------------------
# Blaschke factor and linear fractional transforms
# ---------------------------------------------------------------------------


def blaschke(sphere, rho: float, q) -> Quaternion:
    """Blaschke factor B_{S_ζ,ρ}(q) = (ρ²(q−ζ)^s(q))^{-1}·(q − ρ²ζ^{-1})^s(q)·|ζ|².

    ζ is the sphere key (re, im) ≠ 0; |B| = 1 on |q| = ρ.  Both
    symmetrized factors are slice-preserving, so their values commute and
    the quotient is unambiguous.
    """
    zeta_mod2 = sphere.re**2 + sphere.im**2
    if zeta_mod2 == 0.0:
        raise ZeroCenter("Blaschke factor needs a nonzero center sphere")
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    q = _as_quat(q)
    s1 = RealPoly.from_roots_conjugate_pair(sphere)
    # ρ²ζ^{-1} has real part ρ²·Re(ζ)/|ζ|² and modulus ρ²/|ζ|
    mirror = SliceComplex(rho**2 * sphere.re / zeta_mod2, rho**2 * sphere.im / zeta_mod2)
    s2 = RealPoly.from_roots_conjugate_pair(mirror)
    v1 = s1(q)
    if v1.norm() < 1e-12 * (1.0 + q.norm()) ** 2:
        raise EvalAtPole(f"Blaschke factor has a pole on S_ζ at {q}")
    return v1.inverse() * s2(q) * (zeta_mod2 / rho**2)


@dataclass(frozen=True)
class GL2H:
    """Invertible 2×2 quaternionic matrix [[A, B], [C, D]] acting as
    Φ(q) = (Aq + B)*(Cq + D)^{-*}."""

    A: Quaternion
    B: Quaternion
    C: Quaternion
    D: Quaternion

    def dieudonne(self) -> float:
        """Dieudonné determinant |A|·|D − C·A^{-1}·B| (|B|·|C| when A = 0)."""
        if self.A.norm() == 0.0:
            return self.B.norm() * self.C.norm()
        return self.A.norm() * (self.D - self.C * self.A.inverse() * self.B).norm()

    def require_invertible(self) -> None:
        scale = max(self.A.norm(), self.B.norm(), self.C.norm(), self.D.norm(), 1e-300)
        if self.dieudonne() < 1e-12 * scale**2:
            raise DegenerateTransform(f"Dieudonné determinant {self.dieudonne():.3e} ≈ 0")

    def compose(self, other: "GL2H") -> "GL2H":
        """Matrix product; linear_fractional(self∘other, f) = self(other(f))."""
        return GL2H(
            self.A * other.A + self.B * other.C,
            self.A * other.B + self.B * other.D,
            self.C * other.A + self.D * other.C,
            self.C * other.B + self.D * other.D,
        )

    @staticmethod
    def identity() -> "GL2H":
        one, zero = Quaternion(1.0), Quaternion()
        return GL2H(one, zero, zero, one)


def linear_fractional(t: GL2H, f) -> SemiregularRational:
    """Φ(f) = (A*f + B)*(C*f + D)^{-*}.

    Writing f = g*h^{-*}, both affine images share the right factor
    h^{-*}, which cancels: Φ(f) = (A*g + B*h)*(C*g + D*h)^{-*}.
    """
    t.require_invertible()
    f = as_rational(f)
    num = f.num.scale_left(t.A) + f.den.scale_left(t.B)
    den = f.num.scale_left(t.C) + f.den.scale_left(t.D)
    if den.is_zero:
        raise DegenerateTransform("transform denominator collapsed to zero")
    return SemiregularRational(num, den)
