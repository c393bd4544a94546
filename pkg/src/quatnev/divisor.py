"""Zero/pole bookkeeping: sphere divisors, the Jensen kernel, counting functions.

A semiregular rational f = g * h^{-*} vanishes (or blows up) on isolated
real points and isolated spheres S_ζ; everything countable about them is a
function of the real polynomials g^s and h^s alone.  This module extracts
conjugate-closed complex root sets, converts them into signed total-order
divisors (zeros positive, poles negative, real roots at half the
symmetrization multiplicity, the origin kept separate), and evaluates the
counting functions n, N, A and their integral representations in closed
form — the integrands are elementary on each interval between divisor
radii, so the dual-route identity checks carry no quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .quat_core import SliceComplex
from .star_poly import RealPoly, ZeroCenter, as_rational

__all__ = [
    "SphereDivisor",
    "CountingCurve",
    "ZeroPolynomial",
    "BoundaryDivisor",
    "complex_roots",
    "total_order_divisor",
    "jensen_kernel",
    "signed_kernel_sum",
    "n_count",
    "N_integrated",
    "N_via_unintegrated",
    "angular_term",
    "a_count",
    "a_re_count",
    "angular_identity_check",
    "analytic_characterization_check",
    "counting_curve",
]


class ZeroPolynomial(ValueError):
    """Root extraction / divisor of the identically-zero polynomial."""


class BoundaryDivisor(ArithmeticError):
    """A divisor sphere sits on the integration boundary |ζ| = r (within 1e-12·r)."""


# ---------------------------------------------------------------------------
# complex root extraction
# ---------------------------------------------------------------------------

_ABERTH_MAX_ITER = 400
_CLUSTER_BASE = 1e-6
_CLUSTER_CAP = 1e-2
_DOMINANCE_TOL = 5e-6
_REAL_SNAP = 1e-8


def _aberth_iterate(c: np.ndarray) -> np.ndarray:
    """Simultaneous root iteration (Aberth–Ehrlich) for a monic-normalized
    coefficient array (lowest degree first, complex, c[-1] ≠ 0, c[0] ≠ 0)."""
    c = c / c[-1]
    deg = c.shape[0] - 1
    radius = 1.0 + np.abs(c[:-1]).max()  # Cauchy bound for the monic polynomial
    k = np.arange(deg)
    # start on a slightly spiralled circle; the angular offset breaks the
    # conjugation symmetry that can stall simultaneous iterations on real
    # coefficient input
    z = radius * (1.0 + 0.01 * k / max(deg, 1)) * np.exp(
        1j * (2.0 * np.pi * (k + 0.353) / deg + 0.007 * k)
    )
    dc = npoly.polyder(c)
    for _ in range(_ABERTH_MAX_ITER):
        pz = npoly.polyval(z, c)
        dpz = npoly.polyval(z, dc)
        dpz = np.where(np.abs(dpz) < 1e-300, 1e-300, dpz)
        w = pz / dpz
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        srecip = (1.0 / diff).sum(axis=1)
        denom = 1.0 - w * srecip
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        corr = w / denom
        z = z - corr
        if np.max(np.abs(corr) / (1.0 + np.abs(z))) < 1e-14:
            break
    return z


def _derivative_chain(c: np.ndarray, up_to: int) -> list[np.ndarray]:
    """[p, p', …, p^(up_to)] as coefficient arrays."""
    chain = [c]
    for _ in range(up_to):
        chain.append(npoly.polyder(chain[-1]))
    return chain


def _poly_scale(c: np.ndarray, z: complex) -> float:
    """Σ|c_i|·max(1,|z|)^i — the natural evaluation scale at z."""
    m = max(1.0, abs(z))
    return float(np.abs(c) @ (m ** np.arange(c.shape[0])))


def _polish_and_validate(chain: list[np.ndarray], center: complex, mult: int):
    """Newton-polish an m-fold root candidate on p^{(m−1)} and check that
    derivatives 0..m−1 vanish while p^{(m)} dominates.  Returns
    (polished_root, valid)."""
    if mult >= len(chain):
        return center, False
    pm1, pm = chain[mult - 1], chain[mult]
    z = center
    for _ in range(60):
        fz = npoly.polyval(z, pm1)
        dz = npoly.polyval(z, pm)
        if abs(dz) < 1e-300:
            break
        step = fz / dz
        z = z - step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    for j in range(mult):
        if abs(npoly.polyval(z, chain[j])) > _DOMINANCE_TOL * _poly_scale(chain[j], z):
            return z, False
    if abs(npoly.polyval(z, pm)) < 1e-6 * _poly_scale(pm, z):
        return z, False
    return z, True


def _cluster_once(z: np.ndarray, radius: float):
    """Greedy proximity clustering at the given relative radius."""
    order = np.argsort(np.abs(z), kind="stable")
    clusters: list[list[complex]] = []
    for idx in order:
        pt = z[idx]
        for cl in clusters:
            centroid = sum(cl) / len(cl)
            if abs(pt - centroid) <= radius * (1.0 + abs(centroid)):
                cl.append(pt)
                break
        else:
            clusters.append([pt])
    return clusters


def complex_roots(p) -> list[tuple[complex, int]]:
    """Roots of a real-coefficient polynomial with multiplicities.

    Returns a conjugate-closed list of (root, multiplicity) pairs whose
    multiplicities sum to the degree.  Numerically coincident approximants
    are grouped by a clustering radius that starts at 1e-6·(1+|z|) and
    grows tenfold (up to 1e-2) until every cluster passes a
    derivative-dominance validation of its candidate multiplicity; roots
    within 1e-8·(1+|z|) of the real axis snap onto it, and nonreal roots
    are emitted in exact conjugate pairs.

    Raises ZeroPolynomial for the identically-zero input.
    """
    if not isinstance(p, RealPoly):
        if not p.is_real:
            raise ValueError("complex_roots needs a real-coefficient polynomial")
        p = RealPoly(p.coeffs[:, 0] if p.coeffs.shape[0] else [])
    if p.is_zero:
        raise ZeroPolynomial("the zero polynomial has no root set")
    coeff = p.real_coeffs.astype(complex)
    origin_mult = p.origin_order()
    if origin_mult:
        coeff = coeff[origin_mult:]
    roots: list[tuple[complex, int]] = []
    if origin_mult:
        roots.append((0j, origin_mult))
    deg = coeff.shape[0] - 1
    if deg == 0:
        return roots
    raw = _aberth_iterate(coeff)
    chain = _derivative_chain(coeff / coeff[-1], deg)
    radius = _CLUSTER_BASE
    best = None
    while True:
        clusters = _cluster_once(raw, radius)
        polished = []
        all_valid = True
        for cl in clusters:
            centroid = sum(cl) / len(cl)
            root, valid = _polish_and_validate(chain, centroid, len(cl))
            polished.append((root if valid else centroid, len(cl)))
            all_valid &= valid
        best = polished
        if all_valid or radius >= _CLUSTER_CAP:
            break
        radius *= 10.0
    roots.extend(_canonicalize_conjugate_pairs(best))
    roots.sort(key=lambda rm: (round(abs(rm[0]), 10), rm[0].real, rm[0].imag))
    return roots


def _canonicalize_conjugate_pairs(clusters: list[tuple[complex, int]]):
    """Snap near-real roots, average conjugate partners, emit closed pairs."""
    snapped = []
    for z, m in clusters:
        if abs(z.imag) <= _REAL_SNAP * (1.0 + abs(z)):
            snapped.append((complex(z.real, 0.0), m))
        else:
            snapped.append((z, m))
    out: list[tuple[complex, int]] = []
    used = [False] * len(snapped)
    for i, (z, m) in enumerate(snapped):
        if used[i]:
            continue
        if z.imag == 0.0:
            out.append((z, m))
            used[i] = True
            continue
        partner = None
        for j in range(i + 1, len(snapped)):
            if used[j]:
                continue
            zj, mj = snapped[j]
            if zj.imag * z.imag < 0 and abs(zj - z.conjugate()) <= 1e-6 * (1.0 + abs(z)) and mj == m:
                partner = j
                break
        if partner is None:
            # unpaired nonreal root of a real polynomial: numerical artifact;
            # keep it alongside its exact conjugate to preserve closure
            half = complex((z.real + z.real) / 2, abs(z.imag))
            out.append((half, m))
            out.append((half.conjugate(), m))
            used[i] = True
            continue
        zj = snapped[partner][0]
        up = complex((z.real + zj.real) / 2.0, (abs(z.imag) + abs(zj.imag)) / 2.0)
        out.append((up, m))
        out.append((up.conjugate(), m))
        used[i] = used[partner] = True
    return out


# ---------------------------------------------------------------------------
# SphereDivisor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphereDivisor:
    """Signed sphere divisor: entries (ζ, ordt) with ordt ≠ 0, plus the
    total order at the origin kept separate.

    ζ is the canonical sphere key (re, im ≥ 0); positive orders are zeros,
    negative are poles.  Real points appear as (x, 0) spheres.
    """

    entries: tuple[tuple[SliceComplex, int], ...] = ()
    origin_order: int = 0

    def __post_init__(self):
        seen = set()
        for sphere, order in self.entries:
            if order == 0:
                raise ValueError("divisor entries must have nonzero order")
            key = (sphere.re, sphere.im)
            if key in seen:
                raise ValueError(f"duplicate sphere {key} in divisor")
            if sphere.re == 0.0 and sphere.im == 0.0:
                raise ValueError("the origin belongs in origin_order, not entries")
            seen.add(key)

    @staticmethod
    def build(pairs, origin_order: int = 0) -> "SphereDivisor":
        """Merge duplicate spheres, drop zero orders, sort deterministically."""
        acc: dict[tuple[float, float], int] = {}
        for sphere, order in pairs:
            key = (sphere.re, sphere.im)
            acc[key] = acc.get(key, 0) + int(order)
        entries = tuple(
            (SliceComplex(re, im), order)
            for (re, im), order in sorted(acc.items(), key=lambda kv: (kv[0][0] ** 2 + kv[0][1] ** 2, kv[0]))
            if order != 0
        )
        return SphereDivisor(entries, origin_order)

    def negate(self) -> "SphereDivisor":
        """Divisor of the *-reciprocal: all orders change sign."""
        return SphereDivisor(
            tuple((s, -k) for s, k in self.entries), -self.origin_order
        )

    def add(self, other: "SphereDivisor") -> "SphereDivisor":
        """Entrywise sum (the divisor of a *-product)."""
        merged: dict[tuple[float, float], int] = {}
        for d in (self, other):
            for s, k in d.entries:
                key = (s.re, s.im)
                merged[key] = merged.get(key, 0) + k
        return SphereDivisor.build(
            [(SliceComplex(re, im), k) for (re, im), k in merged.items()],
            self.origin_order + other.origin_order,
        )

    def scale(self, c: int) -> "SphereDivisor":
        return SphereDivisor(
            tuple((s, c * k) for s, k in self.entries), c * self.origin_order
        )

    def side_spheres(self, side: str):
        """[(modulus, sphere, order>0)] for the requested side, origin excluded,
        sorted by modulus."""
        if side not in ("zero", "pole"):
            raise ValueError("side must be 'zero' or 'pole'")
        sign = 1 if side == "zero" else -1
        out = []
        for s, k in self.entries:
            sk = sign * k
            if sk > 0:
                out.append((s.modulus(), s, sk))
        out.sort(key=lambda row: (row[0], row[1].re, row[1].im))
        return out

    def origin_side(self, side: str) -> int:
        sign = 1 if side == "zero" else -1
        return max(sign * self.origin_order, 0)

    def to_json(self):
        return {
            "entries": [
                {"re": s.re, "im": s.im, "order": k} for s, k in self.entries
            ],
            "origin_order": self.origin_order,
        }

    @staticmethod
    def from_json(data) -> "SphereDivisor":
        return SphereDivisor.build(
            [
                (SliceComplex(e["re"], e["im"]), int(e["order"]))
                for e in data["entries"]
            ],
            int(data.get("origin_order", 0)),
        )


def total_order_divisor(f) -> SphereDivisor:
    """Signed total-order divisor of a polynomial or semiregular rational.

    The total order at S_ζ is the multiplicity of the canonical complex
    representative ζ (Im ζ ≥ 0) in g^s minus its multiplicity in h^s; real
    roots carry half their symmetrization multiplicity (which is always
    even), and the order at the origin is tracked separately.
    """
    f = as_rational(f)
    if f.num.is_zero:
        raise ZeroPolynomial("the zero function has no divisor")
    num_s = f.num.symmetrize()
    den_s = f.den_s
    origin = f.num.origin_order() - f.den.origin_order()
    acc: list[tuple[SliceComplex, int]] = []
    for poly, sign in ((num_s, 1), (den_s, -1)):
        if poly.degree <= 0:
            continue
        for z, mult in complex_roots(poly):
            if z == 0:
                continue
            if z.imag < 0.0:
                continue  # canonical representative has Im ≥ 0
            if z.imag == 0.0:
                if mult % 2:
                    raise ArithmeticError(
                        f"real root {z.real} of a symmetrization has odd multiplicity {mult}"
                    )
                order = mult // 2
            else:
                order = mult
            acc.append((SliceComplex(z.real, z.imag), sign * order))
    merged = _merge_nearby_spheres(acc)
    return SphereDivisor.build(merged, origin)


def _merge_nearby_spheres(pairs, tol: float = 1e-8):
    """Combine spheres that agree within a relative tolerance (so zero and
    pole spheres extracted from two separate root finds cancel exactly)."""
    out: list[list] = []
    for sphere, order in pairs:
        for slot in out:
            ref = slot[0]
            dist = float(np.hypot(ref.re - sphere.re, ref.im - sphere.im))
            if dist <= tol * (1.0 + ref.modulus()):
                slot[1] += order
                break
        else:
            out.append([sphere, order])
    return [(s, k) for s, k in out if k != 0]


# ---------------------------------------------------------------------------
# Jensen kernel and counting functions
# ---------------------------------------------------------------------------


def jensen_kernel(sphere: SliceComplex, R: float) -> float:
    """J(ζ,R) = log(R/|ζ|) + ((|ζ|⁴−R⁴)/(4R²|ζ|⁴))·(2(Re ζ)² − |ζ|²).

    The per-sphere boundary contribution of a zero/pole sphere in the
    Jensen formula; J(ζ,|ζ|) = 0.  Raises ZeroCenter for ζ = 0.
    """
    mod = sphere.modulus()
    if mod == 0.0:
        raise ZeroCenter("Jensen kernel is undefined for the origin sphere")
    if R <= 0.0:
        raise ValueError("R must be positive")
    mod2 = mod * mod
    mod4 = mod2 * mod2
    return float(
        np.log(R / mod)
        + (mod4 - R**4) / (4.0 * R**2 * mod4) * (2.0 * sphere.re**2 - mod2)
    )


def signed_kernel_sum(d: SphereDivisor, R: float, convention: str = "corrected") -> float:
    """Σ ordt·J(ζ,R) over divisor spheres inside B_R, with signed orders.

    convention='doubled' doubles the kernel on nonreal spheres (the
    factor-2 variant); real spheres keep the single kernel,
    where the two kernel forms coincide.  Raises BoundaryDivisor if a
    sphere sits on |ζ| = R within 1e-12·R.
    """
    if convention not in ("corrected", "doubled"):
        raise ValueError("convention must be 'corrected' or 'doubled'")
    total = 0.0
    for s, k in d.entries:
        mod = s.modulus()
        if abs(mod - R) <= 1e-12 * R:
            raise BoundaryDivisor(f"divisor sphere |ζ| = {mod} on the boundary r = {R}")
        if mod > R:
            continue
        factor = 2.0 if (convention == "doubled" and s.im > 0.0) else 1.0
        total += k * factor * jensen_kernel(s, R)
    return total


def n_count(d: SphereDivisor, side: str, r: float) -> int:
    """n(f,a,r): unsigned count of side-matching total orders with |ζ| ≤ r,
    including the origin contribution."""
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    total = d.origin_side(side)
    for mod, _s, k in d.side_spheres(side):
        if mod <= r:
            total += k
    return total


def N_integrated(d: SphereDivisor, side: str, r: float) -> float:
    """N(f,a,r) = n(f,a,0)·log r + Σ_{0<|ζ|≤r} ordt⁺·J(ζ,r).

    Raises BoundaryDivisor when a side sphere has |ζ| = r within 1e-12·r.
    """
    if r <= 0.0:
        raise ValueError("r must be positive")
    total = d.origin_side(side) * float(np.log(r))
    for mod, s, k in d.side_spheres(side):
        if abs(mod - r) <= 1e-12 * r:
            raise BoundaryDivisor(f"divisor sphere |ζ| = {mod} on the boundary r = {r}")
        if mod < r:
            total += k * jensen_kernel(s, r)
    return total


def _step_pieces(spheres, r: float):
    """Partition (0, r] at the side-sphere moduli.

    Returns a list of (lo, hi, C, D): on (lo, hi] the cumulative count
    C(t) = n(t) − n(0) and the cumulative angular mass
    D(t) = Σ_{|ζ|≤t} ordt⁺·(Re ζ)² are the given constants.
    """
    jumps: dict[float, list[float]] = {}
    for mod, s, k in spheres:
        if mod <= 0.0 or mod > r:
            continue
        slot = jumps.setdefault(mod, [0.0, 0.0])
        slot[0] += k
        slot[1] += k * s.re * s.re
    pieces = []
    level_c = 0.0
    level_d = 0.0
    prev = 0.0
    for mod in sorted(jumps):
        if mod > prev:
            pieces.append((prev, mod, level_c, level_d))
        level_c += jumps[mod][0]
        level_d += jumps[mod][1]
        prev = mod
    if r > prev:
        pieces.append((prev, r, level_c, level_d))
    return pieces


def N_via_unintegrated(d: SphereDivisor, side: str, r: float) -> float:
    """N via its radial/angular decomposition.

    N = n(0)·log r + ∫₀ʳ (n(t) − n(0)) dt/t
        + Σ ordt⁺·((|ζ|⁴ − r⁴)/(4r²|ζ|⁴))·(2(Re ζ)² − |ζ|²),

    with the dt/t integral taken in closed form over the counting step
    function.  An identity with N_integrated; kept as an independent
    arithmetic route.
    """
    if r <= 0.0:
        raise ValueError("r must be positive")
    spheres = d.side_spheres(side)
    for mod, _s, _k in spheres:
        if abs(mod - r) <= 1e-12 * r:
            raise BoundaryDivisor(f"divisor sphere |ζ| = {mod} on the boundary r = {r}")
    total = d.origin_side(side) * float(np.log(r))
    for lo, hi, c_level, _d_level in _step_pieces(spheres, r):
        if c_level != 0.0 and lo > 0.0:
            total += c_level * float(np.log(hi / lo))
    for mod, s, k in spheres:
        if mod < r:
            mod2 = mod * mod
            mod4 = mod2 * mod2
            total += k * (mod4 - r**4) / (4.0 * r**2 * mod4) * (2.0 * s.re * s.re - mod2)
    return total


def angular_term(d: SphereDivisor, side: str, r: float) -> float:
    """A(f,a,r) = Σ_{0<|ζ|≤r} ordt⁺·((|ζ|⁴ − r⁴)/(2r²|ζ|⁴))·(Re ζ)² ≤ 0."""
    if r <= 0.0:
        raise ValueError("r must be positive")
    total = 0.0
    for mod, s, k in d.side_spheres(side):
        if mod <= r:
            mod4 = mod**4
            total += k * (mod4 - r**4) / (2.0 * r**2 * mod4) * s.re * s.re
    return total


def a_count(d: SphereDivisor, side: str, r: float, t: float) -> int:
    """a_r(f,a,t): count of side orders with 0 < |ζ| ≤ r and |Re ζ| ≤ t."""
    if r <= 0.0 or t < 0.0:
        raise ValueError("need r > 0 and t ≥ 0")
    return sum(
        k for mod, s, k in d.side_spheres(side) if mod <= r and abs(s.re) <= t
    )


def a_re_count(d: SphereDivisor, side: str, r: float, t: float) -> float:
    """a_r^Re(f,a,t): Σ ordt⁺·(Re ζ)² over 0 < |ζ| ≤ r, |Re ζ| ≤ t."""
    if r <= 0.0 or t < 0.0:
        raise ValueError("need r > 0 and t ≥ 0")
    return float(
        sum(
            k * s.re * s.re
            for mod, s, k in d.side_spheres(side)
            if mod <= r and abs(s.re) <= t
        )
    )


def angular_identity_check(d: SphereDivisor, side: str, r: float):
    """Residuals of the two integral representations of A(f,a,r).

    Representation 1:
        A = 4r² ∬_{0≤h≤t≤r} h·t⁻⁵·a_t(f,a,h) dh dt − 2r² ∫₀ʳ t⁻³·(n(t)−n(0)) dt
    Representation 2:
        A = −2r² ∫₀ʳ t⁻⁵·a_t^Re(f,a,t) dt

    Both are evaluated by exact piecewise integration over the divisor
    radii (the inner dh integral closes to (t² − (Re ζ)²)/2 per sphere, so
    the outer integrand is piecewise C·t⁻³ − D·t⁻⁵ with step constants C,
    D) and compared against the direct sum angular_term.  Returns
    (|rep1 − A|, |rep2 − A|).
    """
    if r <= 0.0:
        raise ValueError("r must be positive")
    spheres = d.side_spheres(side)
    pieces = _step_pieces(spheres, r)
    A = angular_term(d, side, r)

    double_int = 0.0  # ∬ h t⁻⁵ a_t(f,a,h) dh dt over 0 ≤ h ≤ t ≤ r
    radial_int = 0.0  # ∫ t⁻³ (n−n₀) dt
    rep2_int = 0.0   # ∫ t⁻⁵ a_t^Re(f,a,t) dt
    for lo, hi, c_level, d_level in pieces:
        if lo <= 0.0:
            continue
        inv2 = (lo**-2 - hi**-2) / 2.0
        inv4 = (lo**-4 - hi**-4) / 4.0
        double_int += 0.5 * (c_level * inv2 - d_level * inv4)
        radial_int += c_level * inv2
        rep2_int += d_level * inv4
    rep1 = 4.0 * r**2 * double_int - 2.0 * r**2 * radial_int
    rep2 = -2.0 * r**2 * rep2_int
    return abs(rep1 - A), abs(rep2 - A)


def analytic_characterization_check(d: SphereDivisor, side: str, r: float):
    """Equality and bound checks for the integral characterization of N.

    eq1:  N = n(0)·log r + ∫ (n−n₀) dt/t + Σ ordt⁺·angular kernel
    eq2:  N = n(0)·log r + ∫ (n−n₀) dt/t
              + ∫ ((t⁴+r⁴)/(2r²t³))·(n−n₀) dt + A
    bound: N ≥ n(0)·log r + ∫ (n−n₀) dt/t − ∫ ((t⁴+r⁴)/(2r²t³))·(n−n₀) dt

    Returns (|eq1 − N|, |eq2 − N|, slack) with slack = N − bound (≥ 0 up
    to rounding).  All integrals are closed-form piecewise.
    """
    N = N_integrated(d, side, r)
    eq1 = N_via_unintegrated(d, side, r)
    spheres = d.side_spheres(side)
    pieces = _step_pieces(spheres, r)
    log_int = 0.0
    mixed_int = 0.0  # ∫ (t⁴+r⁴)/(2r²t³) (n−n₀) dt
    for lo, hi, c_level, _d_level in pieces:
        if lo <= 0.0 or c_level == 0.0:
            continue
        log_int += c_level * float(np.log(hi / lo))
        # ∫ (t⁴+r⁴)/(2r²t³) dt = t²/(4r²) − r²/(4t²)
        anti = (hi**2 - lo**2) / (4.0 * r**2) + (r**2 / 4.0) * (lo**-2 - hi**-2)
        mixed_int += c_level * anti
    base = d.origin_side(side) * float(np.log(r)) + log_int
    eq2 = base + mixed_int + angular_term(d, side, r)
    bound = base - mixed_int
    return abs(eq1 - N), abs(eq2 - N), N - bound


# ---------------------------------------------------------------------------
# CountingCurve
# ---------------------------------------------------------------------------

_CURVE_KINDS = ("n", "N", "A", "a_r", "a_re")


@dataclass(frozen=True)
class CountingCurve:
    """A counting function sampled on a radius grid (n, N, A, a_r or a_re)."""

    radii: tuple[float, ...]
    values: tuple[float, ...]
    kind: str

    def __post_init__(self):
        if self.kind not in _CURVE_KINDS:
            raise ValueError(f"kind must be one of {_CURVE_KINDS}")
        if len(self.radii) != len(self.values):
            raise ValueError("radii and values must have equal length")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be strictly increasing")

    def to_json(self):
        return {"kind": self.kind, "radii": list(self.radii), "values": list(self.values)}


def counting_curve(d: SphereDivisor, side: str, radii, kind: str, t: float | None = None) -> CountingCurve:
    """Evaluate one counting function over a radius grid."""
    evals = {
        "n": lambda r: float(n_count(d, side, r)),
        "N": lambda r: N_integrated(d, side, r),
        "A": lambda r: angular_term(d, side, r),
        "a_r": lambda r: float(a_count(d, side, r, t if t is not None else r)),
        "a_re": lambda r: a_re_count(d, side, r, t if t is not None else r),
    }
    if kind not in evals:
        raise ValueError(f"kind must be one of {_CURVE_KINDS}")
    fn = evals[kind]
    radii = tuple(float(r) for r in radii)
    return CountingCurve(radii, tuple(fn(r) for r in radii), kind)
