"""Nevanlinna value-distribution functions over the quaternions.

Implements the integrated counting function N, the mean proximity
function m (with pluggable Weil-type singularity weights), the harmonic
remainder H, the characteristic T, and the verification harness for the
sphere-corrected Jensen formula, the First Main Theorem envelope, and
the algebra of T — all on deterministic Monte-Carlo spherical means.

Targets ``a`` may be passed as a Quaternion (or any scalar/complex value
coercible to one) or as the point at infinity, written ``None``,
``math.inf``, or the string ``"inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .quat_core import Quaternion, SliceComplex, qnorm
from .star_poly import (
    LeftPoly,
    RealPoly,
    SemiregularRational,
    as_rational,
    _as_quat,
)
from .divisor import (
    N_integrated,
    SphereDivisor,
    angular_term,
    jensen_kernel,
    signed_kernel_sum,
    total_order_divisor,
)
from .sph_integral import IntegratorConfig, SphericalMean, mean_columns, mean_weil

__all__ = [
    "ArbiterReport",
    "CenterIsZeroOrPole",
    "JensenReport",
    "NevanlinnaProfile",
    "WeilFunction",
    "admissible_radii",
    "characteristic",
    "characteristic_algebra_suite",
    "counting_arbiter",
    "harmonic_remainder",
    "mpb_defect",
    "n_bound_check",
    "o1_summary",
    "proximity",
    "verify_fmt",
    "verify_jensen",
]

# shared-stream gate for identities that are exact up to rounding
_EQUALITY_TOL = 1e-9
# |best-fit slope in log r| below which an O(1) claim is called consistent
_SLOPE_GATE = 0.01
# admissible radii keep |r − modulus| > clearance·r from divisor spheres
_RADIUS_CLEARANCE = 1e-6

_CONVENTION_NAMES = {
    "corrected": ("corrected", "corrected_factor1"),
    "corrected_factor1": ("corrected", "corrected_factor1"),
    "doubled": ("doubled", "doubled_factor2"),
    "doubled_factor2": ("doubled", "doubled_factor2"),
}


class CenterIsZeroOrPole(ArithmeticError):
    """The series center q = 0 is a zero or pole; deflate before use."""


def _is_infinity(a) -> bool:
    """True when ``a`` denotes the point at infinity."""
    if a is None:
        return True
    if isinstance(a, str):
        return a.strip().lower() in ("inf", "infinity")
    if isinstance(a, (int, float)):
        return math.isinf(a)
    return False


def _shifted(f, a: Quaternion):
    """f − a with the representation kept evaluable (poly or rational)."""
    if isinstance(f, SemiregularRational):
        return f.shift(a)
    return f - LeftPoly.constant(a)


def _twist_degree(f) -> int:
    """Degree scale used by the spherical-derivative degeneracy tolerance."""
    if isinstance(f, SemiregularRational):
        return max(f.num_eff.degree, 1)
    return max(f.degree, 1)


def _log_threshold(f, r: float, reject_tol: float) -> float:
    """log of the near-zero rejection guard reject_tol·(1+r)^growth_degree."""
    return math.log(reject_tol) + f.growth_degree * math.log1p(r)


def _deflated_head(g):
    """Series head (g(0), g′(0), g″(0)) of q^{−m₀}·g, plus m₀."""
    if isinstance(g, SemiregularRational):
        return g.origin_order(), g.series_head()
    deflated, m0 = g.deflate_origin()
    return m0, deflated.series_head()


def _lambda_of_head(head, r: float) -> float:
    """Radius-r mean-value defect of log|g^s| at 0 from the series head of g.

    For g with g(0) ≠ 0 the defect is closed-form in the first three
    series coefficients:
    (r²/4)·Re(g(0)⁻¹·g″(0)) − (r²/4)·Re((g(0)⁻¹·g′(0))²),
    which equals −(r²/16)·Δ₄ log|g^s| at 0.  In terms of the real
    series coefficients s₀, s₁, s₂ of g^s, the defect is
    −(r²/8)(s₁² − 2s₀s₂)/s₀², so no conjugation may appear on g′(0):
    with conjugation the two forms disagree whenever Re(g(0))·Re(g′(0))
    and ⟨Im g(0), Im g′(0)⟩ are both nonzero (e.g. g(0) = g′(0) = 1+i
    gives +r²/4 instead of the correct −r²/4).
    """
    g0, g1, g2 = head
    if g0.norm() == 0.0:
        raise CenterIsZeroOrPole("series head vanishes at the center")
    inv0 = g0.inverse()
    tmp = inv0 * g1
    quarter_r2 = 0.25 * r * r
    return quarter_r2 * ((inv0 * g2).re - (tmp * tmp).re)


def _harmonic_deflated(g, r: float) -> float:
    """Harmonic remainder of g with any origin zero/pole divided out."""
    _, head = _deflated_head(g)
    return _lambda_of_head(head, r)


# ---------------------------------------------------------------------------
# Weil weights and proximity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeilFunction:
    """Singularity weight λ_a used by the mean proximity function.

    The analytic kind is the canonical weight: λ_a(q) = log⁺(1/|q − a|)
    for finite a and λ_∞(q) = log⁺|q|; it vanishes at the opposite
    extreme (λ_a(∞) = 0 for finite a).  A custom kind wraps a
    user-supplied weight expected to stay within a bounded offset of the
    analytic weight with the same singularity.
    """

    kind: str
    singularity: Quaternion | None  # None encodes the point at infinity
    weight_fn: object | None = None

    def __post_init__(self):
        if self.kind not in ("analytic", "custom"):
            raise ValueError(f"unknown Weil kind {self.kind!r}")
        if self.kind == "custom" and self.weight_fn is None:
            raise ValueError("custom Weil functions need a weight_fn")

    @staticmethod
    def analytic(a) -> "WeilFunction":
        """Canonical weight with singularity at ``a`` (finite or infinity)."""
        if _is_infinity(a):
            return WeilFunction("analytic", None)
        return WeilFunction("analytic", _as_quat(a))

    @staticmethod
    def custom(a, weight_fn) -> "WeilFunction":
        """Custom weight λ(values) with singularity at ``a``.

        weight_fn maps an (n, 4) array of quaternion values to an (n,)
        array of weights; non-finite outputs are rejected samples.
        """
        sing = None if _is_infinity(a) else _as_quat(a)
        return WeilFunction("custom", sing, weight_fn)

    def batch(self, values, guard_scale: float):
        """Weights and acceptance mask for (n, 4) quaternion value rows.

        Rows closer to a finite singularity than ``guard_scale`` are
        rejected (the weight would be unboundedly large there).
        """
        vals = np.asarray(values, dtype=float)
        if self.kind == "custom":
            lam = np.asarray(self.weight_fn(vals), dtype=float)
            return lam, np.isfinite(lam)
        if self.singularity is None:
            mag = qnorm(vals)
            with np.errstate(divide="ignore"):
                lam = np.maximum(np.log(mag), 0.0)
            return lam, np.isfinite(mag)
        w = vals - self.singularity.to_array()
        mag = qnorm(w)
        ok = mag >= guard_scale
        safe = np.where(ok, mag, 1.0)
        lam = np.maximum(-np.log(safe), 0.0)
        return lam, ok

    def max_offset_vs_analytic(self, probe_values) -> float:
        """sup |λ − λ_analytic| over (n, 4) probe value rows off-singularity."""
        ref = WeilFunction("analytic", self.singularity)
        lam, ok = self.batch(probe_values, 0.0)
        lam_ref, ok_ref = ref.batch(probe_values, 0.0)
        keep = ok & ok_ref
        if not np.any(keep):
            return 0.0
        return float(np.max(np.abs(lam[keep] - lam_ref[keep])))


def proximity(f, weil: WeilFunction, r: float, cfg: IntegratorConfig,
              stream_index: int = 0) -> SphericalMean:
    """Mean proximity m(f, λ_a, r): surface mean of the weight of f on ∂B_r.

    Analytic weights are evaluated in log space on the stem data of the
    shifted function (so near-singularity samples reject by the same rule
    as mean_log_abs); custom weights evaluate on formed values through
    mean_weil.  The estimate is ≥ 0 because the weight is pointwise ≥ 0.
    """
    if weil.kind == "custom":
        return mean_weil(f, weil, r, cfg, stream_index)
    if weil.singularity is None:

        def columns(pts):
            se = f.stems(pts, cfg.reject_tol)
            lam = np.maximum(se.log_abs(), 0.0)
            return lam[:, None], se.ok

        return mean_columns(columns, r, cfg, stream_index)[0]

    g = _shifted(f, weil.singularity)
    thr = _log_threshold(g, r, cfg.reject_tol)

    def columns(pts):
        se = g.stems(pts, cfg.reject_tol)
        la = se.log_abs()
        ok = se.ok & (la >= thr)
        lam = np.maximum(-la, 0.0)
        return lam[:, None], ok

    return mean_columns(columns, r, cfg, stream_index)[0]


def _proximity_at(f, a, r, cfg, stream_index=0) -> SphericalMean:
    """m(f, a, r) with the canonical analytic weight at ``a``."""
    return proximity(f, WeilFunction.analytic(a), r, cfg, stream_index)


# ---------------------------------------------------------------------------
# Harmonic remainder and characteristic
# ---------------------------------------------------------------------------


def harmonic_remainder(f, a, r: float) -> float:
    """Harmonic remainder H(f, a, r), closed form from the series head.

    H(f, a, r) is the radius-r defect by which the spherical mean of
    log|(f−a)^s| misses its value at the center — zero in two complex
    dimensions, generically nonzero in four.  H(f, ∞, r) ≡ 0.

    Raises CenterIsZeroOrPole when 0 is a zero or pole of f − a; callers
    that need the deflated variant should divide the origin factor out
    first (verify_jensen and characteristic do this automatically).
    """
    if _is_infinity(a):
        return 0.0
    g = _shifted(f, _as_quat(a))
    if getattr(g, "is_zero", False):
        raise CenterIsZeroOrPole("f is identically equal to a")
    m0, head = _deflated_head(g)
    if m0 != 0:
        raise CenterIsZeroOrPole(
            f"0 carries total order {m0} for f − a; deflate before calling"
        )
    return _lambda_of_head(head, r)


def characteristic(f, a, r: float, cfg: IntegratorConfig,
                   stream_index: int = 0) -> float:
    """Nevanlinna characteristic T(f, a, r).

    T(f, a, r) = N(f, a, r) + ½·m((f−a)^s, 0, r) − H(f, a, r) for finite
    a, and T(f, r) = N(f, ∞, r) + ½·m(f^s, ∞, r) at infinity.  Origin
    zeros/poles of f − a enter N through their log r term and H through
    the deflated series head.
    """
    value, _ = _characteristic_with_error(f, a, r, cfg, stream_index)
    return value


def _characteristic_with_error(f, a, r, cfg, stream_index=0):
    """(T, Monte-Carlo standard error of T)."""
    if _is_infinity(a):
        d = total_order_divisor(f)
        counting = N_integrated(d, "pole", r)
        sym_mean = proximity(f.symmetrize(), WeilFunction.analytic(None),
                             r, cfg, stream_index)
        return counting + 0.5 * sym_mean.value, 0.5 * sym_mean.std_error
    g = _shifted(f, _as_quat(a))
    d = total_order_divisor(g)
    counting = N_integrated(d, "zero", r)
    sym_mean = _proximity_at(g.symmetrize(), Quaternion(0.0, 0.0, 0.0, 0.0),
                             r, cfg, stream_index)
    remainder = _harmonic_deflated(g, r)
    return counting + 0.5 * sym_mean.value - remainder, 0.5 * sym_mean.std_error


# ---------------------------------------------------------------------------
# Jensen verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JensenReport:
    """One closure of the sphere-corrected Jensen formula at radius r.

    residual := assembled right-hand side − lhs, where the right-hand
    side is ½·boundary_f + ½·boundary_fSf + harmonic − divisor_sum (the
    combined boundary mean is estimated as one column, so three_sigma
    gates the residual directly).
    """

    lhs: float
    boundary_f: SphericalMean
    boundary_fSf: SphericalMean
    harmonic: float
    divisor_sum: float
    residual: float
    kernel_convention: str
    three_sigma: float
    radius: float

    @property
    def rhs(self) -> float:
        return self.lhs + self.residual

    @property
    def gate_ok(self) -> bool:
        """True when the residual sits inside its own 3σ envelope."""
        return abs(self.residual) <= self.three_sigma

    def to_json(self):
        return {
            "lhs": self.lhs,
            "boundary_f": _mean_json(self.boundary_f),
            "boundary_fSf": _mean_json(self.boundary_fSf),
            "harmonic": self.harmonic,
            "divisor_sum": self.divisor_sum,
            "residual": self.residual,
            "kernel_convention": self.kernel_convention,
            "three_sigma": self.three_sigma,
            "radius": self.radius,
        }


def _mean_json(m: SphericalMean):
    return {
        "value": m.value,
        "std_error": m.std_error,
        "effective_samples": m.effective_samples,
        "rejected": m.rejected,
    }


def _boundary_columns(f, r, cfg, stream_index):
    """Shared-stream means of log|f|, log|f∘S_f| and their ½-combination."""
    thr = _log_threshold(f, r, cfg.reject_tol)
    tdeg = _twist_degree(f)

    def columns(pts):
        se = f.stems(pts, cfg.reject_tol)
        la = se.log_abs()
        lat, ok_t = se.log_abs_twisted(None, tdeg)
        ok = se.ok & ok_t & (la >= thr) & (lat >= thr)
        cols = np.stack([la, lat, 0.5 * (la + lat)], axis=1)
        return cols, ok

    return mean_columns(columns, r, cfg, stream_index)


def verify_jensen(f, r: float, cfg: IntegratorConfig,
                  kernel_convention: str = "corrected",
                  stream_index: int = 0) -> JensenReport:
    """Close the Jensen formula for f on ∂B_r and report the residual.

    lhs = log|g(0)| for g the origin-deflated f; the divisor side carries
    the per-sphere kernel sum (doubled on nonreal spheres under the
    factor-2 convention) plus the origin total order times log r.  The
    boundary term is the shared-stream combined mean ½(log|f| +
    log|f∘S_f|); residual = RHS − lhs with a 3σ gate from that column.
    """
    if kernel_convention not in _CONVENTION_NAMES:
        raise ValueError(f"unknown kernel convention {kernel_convention!r}")
    short, long_name = _CONVENTION_NAMES[kernel_convention]
    d = total_order_divisor(f)
    divisor_sum = signed_kernel_sum(d, r, short) + d.origin_order * math.log(r)
    m0, head = _deflated_head(f)
    lhs = math.log(head[0].norm())
    boundary_f, boundary_fSf, combined = _boundary_columns(f, r, cfg, stream_index)
    harmonic = _lambda_of_head(head, r)
    rhs = combined.value + harmonic - divisor_sum
    return JensenReport(
        lhs=lhs,
        boundary_f=boundary_f,
        boundary_fSf=boundary_fSf,
        harmonic=harmonic,
        divisor_sum=divisor_sum,
        residual=rhs - lhs,
        kernel_convention=long_name,
        three_sigma=combined.three_sigma,
        radius=r,
    )


@dataclass(frozen=True)
class ArbiterReport:
    """Which integer sphere order closes the Jensen formula.

    residuals holds (candidate, residual) pairs computed on one shared
    boundary stream; best_order minimizes |residual|.
    """

    best_order: int
    residuals: tuple
    sphere: SliceComplex
    kernel: float
    lhs: float
    boundary: SphericalMean
    harmonic: float
    three_sigma: float
    radius: float

    def residual(self, candidate: int) -> float:
        for c, res in self.residuals:
            if c == candidate:
                return res
        raise KeyError(f"candidate {candidate} was not examined")

    def to_json(self):
        return {
            "best_order": self.best_order,
            "residuals": {str(c): res for c, res in self.residuals},
            "sphere": {"re": self.sphere.re, "im": self.sphere.im},
            "kernel": self.kernel,
            "lhs": self.lhs,
            "boundary": _mean_json(self.boundary),
            "harmonic": self.harmonic,
            "three_sigma": self.three_sigma,
            "radius": self.radius,
        }


def counting_arbiter(f, r: float, cfg: IntegratorConfig,
                     candidates=(1, 2), stream_index: int = 0) -> ArbiterReport:
    """Decide the total order of a single zero sphere by Jensen closure.

    f must be slice-preserving with exactly one zero sphere inside B_r,
    no poles, and no zero at 0.  Each candidate order c replaces the
    divisor sum by c·J(ζ, r); the report carries every candidate residual
    and the minimizer.
    """
    if not getattr(f, "is_real", False):
        raise ValueError("the arbiter needs a slice-preserving function")
    d = total_order_divisor(f)
    if d.origin_order != 0:
        raise ValueError("0 must not be a zero of f; deflate first")
    if any(k < 0 for _, k in d.entries):
        raise ValueError("the arbiter needs a pole-free function")
    inside = [s for s, _k in d.entries if s.modulus() < r]
    if len(inside) != 1:
        raise ValueError(
            f"need exactly one zero sphere inside B_{r}, found {len(inside)}"
        )
    sphere = inside[0]
    kernel = jensen_kernel(sphere, r)
    m0, head = _deflated_head(f)
    lhs = math.log(head[0].norm())
    _, _, combined = _boundary_columns(f, r, cfg, stream_index)
    harmonic = _lambda_of_head(head, r)
    base = combined.value + harmonic
    residuals = tuple((int(c), base - c * kernel - lhs) for c in candidates)
    best = min(residuals, key=lambda pair: abs(pair[1]))[0]
    return ArbiterReport(
        best_order=best,
        residuals=residuals,
        sphere=sphere,
        kernel=kernel,
        lhs=lhs,
        boundary=combined,
        harmonic=harmonic,
        three_sigma=combined.three_sigma,
        radius=r,
    )


# ---------------------------------------------------------------------------
# Mean-proximity balance diagnostics
# ---------------------------------------------------------------------------


def _realized(f):
    """Route slice-preserving polynomials through their real-stem form."""
    if isinstance(f, LeftPoly) and not isinstance(f, RealPoly) and f.is_real:
        return RealPoly(f.coeffs)
    return f


def mpb_defect(f, a, r: float, cfg: IntegratorConfig,
               stream_index: int = 0) -> SphericalMean:
    """Surface mean of log|f(w)| − log|f(S_{f−a}(w))| on ∂B_r.

    Both columns share one stem evaluation and one accepted mask; for
    slice-preserving f the integrand is identically zero sample by
    sample, so the estimate (and its standard error) is exactly 0.
    """
    f = _realized(f)
    shift = None if _is_infinity(a) else _as_quat(a)
    thr = _log_threshold(f, r, cfg.reject_tol)
    tdeg = _twist_degree(f)

    def columns(pts):
        se = f.stems(pts, cfg.reject_tol)
        la = se.log_abs()
        lat, ok_t = se.log_abs_twisted(shift, tdeg)
        ok = se.ok & ok_t & (la >= thr) & (lat >= thr)
        return (la - lat)[:, None], ok

    return mean_columns(columns, r, cfg, stream_index)[0]


# ---------------------------------------------------------------------------
# Radius grids and summaries
# ---------------------------------------------------------------------------


def admissible_radii(f, r_lo: float, r_hi: float, count: int = 12) -> np.ndarray:
    """Log-spaced radii in [r_lo, r_hi] nudged off divisor sphere moduli.

    Any grid point within 1e-6·r of a zero/pole sphere modulus of f is
    moved multiplicatively (factor 1 + 3e-6 per step) until clear, so
    every returned radius is admissible for boundary integration.
    """
    if not (0.0 < r_lo <= r_hi):
        raise ValueError("need 0 < r_lo <= r_hi")
    if count < 1:
        raise ValueError("count must be at least 1")
    d = total_order_divisor(f)
    moduli = [s.modulus() for s, _k in d.entries]
    grid = np.geomspace(r_lo, r_hi, count)
    out = []
    for r in grid:
        r = float(r)
        while any(abs(r - m) <= _RADIUS_CLEARANCE * r for m in moduli):
            r *= 1.0 + 3.0 * _RADIUS_CLEARANCE
        out.append(r)
    return np.asarray(out)


def o1_summary(radii, residuals):
    """(spread, slope) of a residual grid: bounded-claim report numbers.

    spread = max − min of the residuals; slope = best-fit line slope of
    residual against log r (an O(1) claim is numerically consistent when
    the slope is compatible with 0 and the spread stays at its frozen
    reference level).
    """
    res = np.asarray(residuals, dtype=float)
    radii = np.asarray(radii, dtype=float)
    spread = float(res.max() - res.min())
    if res.size < 2:
        return spread, 0.0
    slope = float(np.polyfit(np.log(radii), res, 1)[0])
    return spread, slope


# ---------------------------------------------------------------------------
# First Main Theorem forms
# ---------------------------------------------------------------------------


def _fmt_proximity_columns(f, g, a_row, r, cfg):
    """Shared-stream column function for the form-2 assembly.

    Yields columns [m(f,a,·), m(f∘S_{f−a},a,·), m(f∘S_f,∞,·),
    m(f∘S_{f−a},∞,·)] where g = f − a and a_row is a as a length-4 array.
    """
    thr_g = _log_threshold(g, r, cfg.reject_tol)
    dg = _twist_degree(g)
    df = _twist_degree(f)

    def columns(pts):
        sef = f.stems(pts, cfg.reject_tol)
        seg = g.stems(pts, cfg.reject_tol)
        la_g = seg.log_abs()
        lat_g, ok_tg = seg.log_abs_twisted(None, dg)
        lat_f, ok_tf = sef.log_abs_twisted(None, df)
        twisted_val, _, ok_tv = seg.twisted(None, dg)
        shifted_back = twisted_val + a_row
        with np.errstate(divide="ignore"):
            la_fsa = np.log(qnorm(shifted_back))
        cols = np.stack(
            [
                np.maximum(-la_g, 0.0),
                np.maximum(-lat_g, 0.0),
                np.maximum(lat_f, 0.0),
                np.maximum(la_fsa, 0.0),
            ],
            axis=1,
        )
        ok = (
            sef.ok & seg.ok & ok_tg & ok_tf & ok_tv
            & (la_g >= thr_g) & (lat_g >= thr_g)
        )
        return cols, ok

    return columns


def verify_fmt(f, a, radii, cfg: IntegratorConfig, form: int = 3,
               stream_index: int = 0):
    """Per-radius residual table for one First Main Theorem form.

    form 3: residual = N(f,a,r) + m(f,a,r) − H(f,a,r) − T(f,r), the
    bounded-gap statement for mean-proximity-balanced functions.
    form 2: residual = [N + ½m(f,a,r) + ½m(f∘S_{f−a},a,r) − H] −
    [T(f,r) − ½m(f∘S_f,∞,r) + ½m(f∘S_{f−a},∞,r)], the exactly
    normalized two-sided assembly.
    form 1: residual = T(f,a,r) − T(f,r) with the envelope
    m(f·f^c, ∞, r); the summary fits residual ≈ coefficient·envelope +
    offset and the coefficient must land in [−1, 1].

    Returns {"form", "a", "rows", "summary"}; rows are JSON-ready dicts.
    """
    if form not in (1, 2, 3):
        raise ValueError("form must be 1, 2, or 3")
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    infinite = _is_infinity(a)
    if infinite and form != 3:
        raise ValueError("forms 1 and 2 need a finite target a")
    rows = []
    if form == 3:
        for r in radii:
            t_inf, t_err = _characteristic_with_error(f, None, r, cfg, stream_index)
            if infinite:
                d = total_order_divisor(f)
                counting = N_integrated(d, "pole", r)
                prox = _proximity_at(f, None, r, cfg, stream_index)
                remainder = 0.0
            else:
                g = _shifted(f, _as_quat(a))
                d = total_order_divisor(g)
                counting = N_integrated(d, "zero", r)
                prox = _proximity_at(f, a, r, cfg, stream_index)
                remainder = _harmonic_deflated(g, r)
            residual = counting + prox.value - remainder - t_inf
            rows.append(
                {
                    "r": r,
                    "N": counting,
                    "m": prox.value,
                    "m_std_error": prox.std_error,
                    "H": remainder,
                    "T_infinity": t_inf,
                    "residual": residual,
                    "three_sigma": 3.0 * math.hypot(prox.std_error, t_err),
                }
            )
    elif form == 2:
        aq = _as_quat(a)
        g = _shifted(f, aq)
        d = total_order_divisor(g)
        for r in radii:
            counting = N_integrated(d, "zero", r)
            remainder = _harmonic_deflated(g, r)
            t_inf, _ = _characteristic_with_error(f, None, r, cfg, stream_index)
            columns = _fmt_proximity_columns(f, g, aq.to_array(), r, cfg)
            m_fa, m_fsa_a, m_fsf_inf, m_fsa_inf = mean_columns(
                columns, r, cfg, stream_index
            )
            left = counting + 0.5 * m_fa.value + 0.5 * m_fsa_a.value - remainder
            right = t_inf - 0.5 * m_fsf_inf.value + 0.5 * m_fsa_inf.value
            rows.append(
                {
                    "r": r,
                    "left": left,
                    "right": right,
                    "residual": left - right,
                    "m_fa": m_fa.value,
                    "m_fSa_at_a": m_fsa_a.value,
                    "m_fSf_inf": m_fsf_inf.value,
                    "m_fSa_inf": m_fsa_inf.value,
                }
            )
    else:  # form 1
        conj_f = f.conjugate()

        def envelope_columns(pts):
            sef = f.stems(pts, cfg.reject_tol)
            sec = conj_f.stems(pts, cfg.reject_tol)
            lam = np.maximum(sef.log_abs() + sec.log_abs(), 0.0)
            return lam[:, None], sef.ok & sec.ok

        for r in radii:
            t_a, _ = _characteristic_with_error(f, a, r, cfg, stream_index)
            t_inf, _ = _characteristic_with_error(f, None, r, cfg, stream_index)
            envelope = mean_columns(envelope_columns, r, cfg, stream_index)[0]
            rows.append(
                {
                    "r": r,
                    "T_a": t_a,
                    "T_infinity": t_inf,
                    "residual": t_a - t_inf,
                    "envelope": envelope.value,
                    "envelope_std_error": envelope.std_error,
                }
            )
    residuals = [row["residual"] for row in rows]
    spread, slope = o1_summary(radii, residuals)
    summary = {
        "spread": spread,
        "slope": slope,
        "slope_ok": abs(slope) <= _SLOPE_GATE,
        "max_abs_residual": max(abs(x) for x in residuals),
    }
    if form == 1 and len(rows) >= 2:
        env = np.asarray([row["envelope"] for row in rows])
        res = np.asarray(residuals)
        if float(env.max() - env.min()) > 1e-12:
            coeff, offset = np.polyfit(env, res, 1)
        else:
            coeff, offset = 0.0, float(res.mean())
        summary["coefficient"] = float(coeff)
        summary["offset"] = float(offset)
        summary["coefficient_ok"] = abs(float(coeff)) <= 1.0 + 1e-9
        summary["max_defect"] = float(np.max(np.abs(res) - env))
    return {"form": form, "a": _a_label(a), "rows": rows, "summary": summary}


# ---------------------------------------------------------------------------
# Characteristic algebra suite
# ---------------------------------------------------------------------------


def _star_power_any(f, n: int):
    """n-fold *-power for polynomials or rationals."""
    if n < 1:
        raise ValueError("n must be at least 1")
    acc = f
    for _ in range(n - 1):
        acc = acc * f
    return acc


def _sandwich_slacks(f, r, cfg, stream_index=0):
    """Shared-stream mean slacks of the symmetrization proximity sandwich.

    lower = mean(log⁺|f| + log⁺|f∘S_f| − log⁺|f^s|): the integrand is
    pointwise nonnegative, so the mean can dip below zero only by
    rounding.  upper = mean(log⁺|f^s| + log 2 − log⁺|f| − log⁺|f∘S_f|):
    nonnegative at the level of means (the pointwise excess concentrates
    near conjugate points of zeros), so it carries Monte-Carlo noise.
    """
    fs = f.symmetrize()
    tdeg = _twist_degree(f)

    def columns(pts):
        sef = f.stems(pts, cfg.reject_tol)
        ses = fs.stems(pts, cfg.reject_tol)
        la = np.maximum(sef.log_abs(), 0.0)
        lat_raw, ok_t = sef.log_abs_twisted(None, tdeg)
        lat = np.maximum(lat_raw, 0.0)
        ls = np.maximum(ses.log_abs(), 0.0)
        lower = la + lat - ls
        upper = ls + math.log(2.0) - la - lat
        ok = sef.ok & ses.ok & ok_t
        return np.stack([lower, upper], axis=1), ok

    low, high = mean_columns(columns, r, cfg, stream_index)
    return low, high


def characteristic_algebra_suite(f, g, a, b, t, radii,
                                 cfg: IntegratorConfig,
                                 stream_index: int = 0):
    """Battery of characteristic-function identities over a radius grid.

    Equality rows carry a shared-stream gate (1e-9 for rounding-exact
    identities, 3σ for Monte-Carlo ones); inequality rows carry the
    minimum slack with a −3σ gate; bounded-gap rows report the grid
    spread and log-r slope without asserting (boundedness is not
    numerically decidable).  ``t`` is an invertible 2×2 quaternion
    transform exercising the fractional-linear row.

    Returns a list of row dicts keyed by "identity".
    """
    from .star_poly import linear_fractional  # local to avoid a wide import

    radii = [float(r) for r in radii]
    if isinstance(f, SemiregularRational) or isinstance(g, SemiregularRational):
        f = as_rational(f)
        g = as_rational(g)
    aq = None if _is_infinity(a) else _as_quat(a)
    bq = None if _is_infinity(b) else _as_quat(b)
    rows = []

    t_f = [_characteristic_with_error(f, None, r, cfg, stream_index) for r in radii]
    t_g = [_characteristic_with_error(g, None, r, cfg, stream_index) for r in radii]

    # ---- exact star-power scaling at infinity --------------------------------
    for n in (2, 3):
        fn = _star_power_any(f, n)
        diffs = [
            abs(_characteristic_with_error(fn, None, r, cfg, stream_index)[0]
                - n * tf[0])
            for r, tf in zip(radii, t_f)
        ]
        value = max(diffs)
        rows.append(
            {
                "identity": f"star_power_{n}",
                "kind": "equality",
                "value": value,
                "gate": _EQUALITY_TOL,
                "pass": value <= _EQUALITY_TOL,
            }
        )

    # ---- subadditivity under the *-product -----------------------------------
    fg = f * g
    slacks = []
    gates = []
    for r, tf, tg in zip(radii, t_f, t_g):
        t_fg, e_fg = _characteristic_with_error(fg, None, r, cfg, stream_index)
        slacks.append(tf[0] + tg[0] - t_fg)
        gates.append(3.0 * math.sqrt(tf[1] ** 2 + tg[1] ** 2 + e_fg**2))
    worst = min(s + g3 for s, g3 in zip(slacks, gates))
    rows.append(
        {
            "identity": "star_subadditivity",
            "kind": "inequality",
            "value": min(slacks),
            "gate": -max(gates),
            "pass": worst >= 0.0,
        }
    )

    # ---- subadditivity under + with the mixed proximity term -----------------
    fpg = f + g
    mixed = f * g.conjugate() + g * f.conjugate()
    slacks = []
    gates = []
    for r, tf, tg in zip(radii, t_f, t_g):
        t_sum, e_sum = _characteristic_with_error(fpg, None, r, cfg, stream_index)
        m_mixed = proximity(mixed, WeilFunction.analytic(None), r, cfg, stream_index)
        slacks.append(
            tf[0] + tg[0] + math.log(3.0) + 0.5 * m_mixed.value - t_sum
        )
        gates.append(
            3.0
            * math.sqrt(
                tf[1] ** 2 + tg[1] ** 2 + e_sum**2 + (0.5 * m_mixed.std_error) ** 2
            )
        )
    worst = min(s + g3 for s, g3 in zip(slacks, gates))
    rows.append(
        {
            "identity": "plus_subadditivity",
            "kind": "inequality",
            "value": min(slacks),
            "gate": -max(gates),
            "pass": worst >= 0.0,
        }
    )

    # ---- conjugation sends the target to its conjugate (rounding-exact) ------
    fc = f.conjugate()
    a_conj = None if aq is None else aq.conj()
    diffs = [
        abs(
            _characteristic_with_error(fc, aq, r, cfg, stream_index)[0]
            - _characteristic_with_error(f, a_conj, r, cfg, stream_index)[0]
        )
        for r in radii
    ]
    value = max(diffs)
    rows.append(
        {
            "identity": "conjugate_invariance",
            "kind": "equality",
            "value": value,
            "gate": _EQUALITY_TOL,
            "pass": value <= _EQUALITY_TOL,
        }
    )

    # ---- T(f^c, a, r) vs ½T(f^s, ∞, r) (exact when a = 0 and |f(0)| = 1) -----
    fs = f.symmetrize()
    diffs = []
    gates = []
    for r in radii:
        t_a, e_a = _characteristic_with_error(fc, aq, r, cfg, stream_index)
        t_s, e_s = _characteristic_with_error(fs, None, r, cfg, stream_index)
        diffs.append(abs(t_a - 0.5 * t_s))
        gates.append(3.0 * math.sqrt(e_a**2 + (0.5 * e_s) ** 2))
    margin = max(dv - g3 for dv, g3 in zip(diffs, gates))
    rows.append(
        {
            "identity": "half_symmetrization_chain",
            "kind": "equality",
            "value": max(diffs),
            "gate": max(gates),
            "pass": margin <= 0.0,
        }
    )

    # ---- proximity sandwich around the symmetrization ------------------------
    lows = []
    highs = []
    high_gates = []
    for r in radii:
        low, high = _sandwich_slacks(f, r, cfg, stream_index)
        lows.append(low.value)
        highs.append(high.value)
        high_gates.append(high.three_sigma)
    rows.append(
        {
            "identity": "sandwich_lower",
            "kind": "inequality",
            "value": min(lows),
            "gate": -_EQUALITY_TOL,
            "pass": min(lows) >= -_EQUALITY_TOL,
        }
    )
    rows.append(
        {
            "identity": "sandwich_upper",
            "kind": "inequality",
            "value": min(highs),
            "gate": -max(high_gates),
            "pass": min(h + g3 for h, g3 in zip(highs, high_gates)) >= 0.0,
        }
    )

    # ---- bounded-gap reports (never asserted) ---------------------------------
    def o1_row(name, values):
        spread, slope = o1_summary(radii, values)
        return {
            "identity": name,
            "kind": "o1",
            "spread": spread,
            "slope": slope,
            "slope_ok": abs(slope) <= _SLOPE_GATE,
            "per_radius": list(values),
        }

    gaps = [
        _characteristic_with_error(f, aq, r, cfg, stream_index)[0]
        - _characteristic_with_error(f, bq, r, cfg, stream_index)[0]
        for r in radii
    ]
    rows.append(o1_row("target_shift", gaps))

    gaps = []
    for r in radii:
        t_sum, _ = _characteristic_with_error(fpg, aq, r, cfg, stream_index)
        t_fa, _ = _characteristic_with_error(f, aq, r, cfg, stream_index)
        t_ga, _ = _characteristic_with_error(g, aq, r, cfg, stream_index)
        gaps.append(t_sum - t_fa - t_ga)
    rows.append(o1_row("plus_additivity", gaps))

    recip = as_rational(f).star_reciprocal()
    gaps = [
        _characteristic_with_error(recip, aq, r, cfg, stream_index)[0]
        - _characteristic_with_error(f, aq, r, cfg, stream_index)[0]
        for r in radii
    ]
    rows.append(o1_row("star_reciprocal", gaps))

    if t is not None:
        phi = linear_fractional(t, f)
        gaps = [
            _characteristic_with_error(phi, aq, r, cfg, stream_index)[0]
            - _characteristic_with_error(f, aq, r, cfg, stream_index)[0]
            for r in radii
        ]
        rows.append(o1_row("fractional_linear", gaps))

    gaps = [
        _characteristic_with_error(f, aq, r, cfg, stream_index)[0] - tf[0]
        for r, tf in zip(radii, t_f)
    ]
    rows.append(o1_row("finite_target_gap", gaps))

    return rows


# ---------------------------------------------------------------------------
# Attainment bound
# ---------------------------------------------------------------------------


def n_bound_check(f, a, radii, cfg: IntegratorConfig, stream_index: int = 0):
    """How often f attains a: report N(f,a,r) − T(f,r) − H(f,a,r) per radius.

    The excess is bounded above for mean-proximity-balanced f; the report
    carries its supremum over the grid rather than asserting a constant.
    """
    radii = [float(r) for r in radii]
    infinite = _is_infinity(a)
    rows = []
    for r in radii:
        t_inf, _ = _characteristic_with_error(f, None, r, cfg, stream_index)
        if infinite:
            d = total_order_divisor(f)
            counting = N_integrated(d, "pole", r)
            remainder = 0.0
        else:
            g = _shifted(f, _as_quat(a))
            d = total_order_divisor(g)
            counting = N_integrated(d, "zero", r)
            remainder = _harmonic_deflated(g, r)
        rows.append(
            {
                "r": r,
                "N": counting,
                "T_infinity": t_inf,
                "H": remainder,
                "excess": counting - t_inf - remainder,
            }
        )
    return {
        "a": _a_label(a),
        "rows": rows,
        "sup_excess": max(row["excess"] for row in rows),
    }


# ---------------------------------------------------------------------------
# Radius profiles
# ---------------------------------------------------------------------------


def _a_label(a) -> str:
    if _is_infinity(a):
        return "inf"
    aq = _as_quat(a)
    return json.dumps([aq.w, aq.x, aq.y, aq.z])


@dataclass(frozen=True)
class NevanlinnaProfile:
    """Radius profile of the Nevanlinna functions of one (f, a) pair.

    Columns per radius: integrated counting N, mean proximity m (with
    its standard error), harmonic remainder H, characteristic T, and the
    angular term A of the counting decomposition.  N, H, A are
    closed-form; m and T carry Monte-Carlo noise.
    """

    function_id: str
    a_label: str
    radii: tuple
    N: tuple
    m: tuple
    m_std_error: tuple
    H: tuple
    T: tuple
    A: tuple
    config: IntegratorConfig

    CSV_COLUMNS = ("r", "N", "m", "m_std_error", "H", "T", "A")

    def __post_init__(self):
        n = len(self.radii)
        for name in ("N", "m", "m_std_error", "H", "T", "A"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} length differs from radii")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")

    @staticmethod
    def compute(f, a, radii, cfg: IntegratorConfig,
                stream_index: int = 0) -> "NevanlinnaProfile":
        """Evaluate the five Nevanlinna columns of (f, a) on a radius grid."""
        radii = tuple(float(r) for r in radii)
        infinite = _is_infinity(a)
        if infinite:
            d = total_order_divisor(f)
            side = "pole"
        else:
            g = _shifted(f, _as_quat(a))
            d = total_order_divisor(g)
            side = "zero"
        col_N, col_m, col_me, col_H, col_T, col_A = [], [], [], [], [], []
        for r in radii:
            prox = _proximity_at(f, a, r, cfg, stream_index)
            col_N.append(N_integrated(d, side, r))
            col_m.append(prox.value)
            col_me.append(prox.std_error)
            col_H.append(0.0 if infinite else _harmonic_deflated(g, r))
            col_T.append(characteristic(f, a, r, cfg, stream_index))
            col_A.append(angular_term(d, side, r))
        return NevanlinnaProfile(
            function_id=json.dumps(f.to_json()),
            a_label=_a_label(a),
            radii=radii,
            N=tuple(col_N),
            m=tuple(col_m),
            m_std_error=tuple(col_me),
            H=tuple(col_H),
            T=tuple(col_T),
            A=tuple(col_A),
            config=cfg,
        )

    def rows(self):
        """Per-radius rows in CSV column order."""
        for i, r in enumerate(self.radii):
            yield (r, self.N[i], self.m[i], self.m_std_error[i],
                   self.H[i], self.T[i], self.A[i])

    def to_csv(self) -> str:
        lines = [",".join(self.CSV_COLUMNS)]
        for row in self.rows():
            lines.append(",".join(f"{x:.12g}" for x in row))
        return "\n".join(lines) + "\n"

    def to_json(self):
        return {
            "function": json.loads(self.function_id),
            "a": self.a_label,
            "radii": list(self.radii),
            "N": list(self.N),
            "m": list(self.m),
            "m_std_error": list(self.m_std_error),
            "H": list(self.H),
            "T": list(self.T),
            "A": list(self.A),
            "config": {
                "samples": self.config.samples,
                "seed": self.config.seed,
                "scheme": self.config.scheme,
                "reject_tol": self.config.reject_tol,
            },
        }
