"""Guided transverse modes of the metal-coated rectangular dielectric guide.

The dielectric slab (index n0) occupies |x| <= dx/2 and 0 <= y <= dy and is
infinite along z.  The y-faces carry ideal metal coatings, which fixes
k_y = pi/dy for every mode, in the vacuum region as well; the x-faces are
open, so the transverse profile X(x) is the standard symmetric-slab bound
state: cos/sin inside, a continuously matched exponential tail outside.

At frequency omega the inner wavenumber kx and outer decay constant gx of
every guided mode satisfy the matching identity

    kx^2 + gx^2 = (n0^2 - 1) * omega^2 / c^2

together with kx*tan(kx*dx/2) = gx (even parity) or
-kx*cot(kx*dx/2) = gx (odd parity).  With u = kx*dx/2 the m-th global mode
(parities alternating) has its root isolated in u in (m*pi/2, (m+1)*pi/2),
bounded by the guidance parameter V = (dx/2)*sqrt(n0^2-1)*omega/c; mode m
is guided iff V > m*pi/2 (strict: a root at exactly V has a
non-normalizable tail and counts as not guided).

Internal units c = omega_p = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateModeError, NoGuidedModeError

EVEN, ODD = 0, 1

#: relative half-width of the cutoff band treated as degenerate
_CUTOFF_RTOL = 1e-12


@dataclass(frozen=True)
class GuidedBranch:
    """One transverse mode family, anchored at the solve frequency.

    ``qn = sqrt(kx^2 + ky^2)/n0`` is the constant transverse wavenumber of
    the branch; its threshold frequency is c*qn.  ``norm_const`` scales the
    profile so that the index-weighted cross-section integral of |f|^2
    equals the cross section A.
    """

    parity: int          # EVEN (0) or ODD (1) symmetry in x
    mode_index: int      # per-parity index (0 for the first even/odd mode)
    kx: float
    gamma_x: float
    ky: float
    qn: float
    omega_th: float      # = c*qn
    norm_const: float

    @property
    def global_index(self):
        return 2 * self.mode_index + self.parity


def guidance_parameter(n0, dx, omega=1.0):
    """V = (dx/2) * sqrt(n0^2 - 1) * omega / c."""
    return 0.5 * dx * math.sqrt(n0 ** 2 - 1.0) * omega


def mode_count(n0, dx, omega=1.0):
    """Number of guided transverse modes (cutoffs at V = m*pi/2, strict)."""
    v = guidance_parameter(n0, dx, omega)
    count = 0
    while v > (count * math.pi / 2.0) * (1.0 + _CUTOFF_RTOL) or (count == 0 and v > 0):
        count += 1
        if count > 10_000:  # pragma: no cover - absurd geometry
            raise ValueError("mode count diverged; check geometry")
    return count


def _matching_residual(u, v, parity):
    # u*tan(u) (even) or -u*cot(u) (odd), minus the circle sqrt(V^2 - u^2)
    if parity == EVEN:
        lhs = u * math.tan(u)
    else:
        lhs = -u / math.tan(u)
    return lhs - math.sqrt(max(v * v - u * u, 0.0))


def solve_kx(parity, omega, n0, dx, mode_index=0):
    """Solve the slab matching condition for one mode at one frequency.

    Returns ``(kx, gamma_x)``.  Raises NoGuidedModeError below cutoff and
    DegenerateModeError within a relative band of 1e-12 around the exact
    cutoff, where gamma_x -> 0 and the tail is non-normalizable.
    """
    if parity not in (EVEN, ODD):
        raise ValueError(f"parity must be {EVEN} or {ODD}, got {parity}")
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if n0 <= 1.0:
        raise NoGuidedModeError(f"no index contrast (n0={n0}); nothing is guided")
    a = dx / 2.0
    v = guidance_parameter(n0, dx, omega)
    m = 2 * mode_index + parity
    lo_cut = m * math.pi / 2.0
    if v <= lo_cut * (1.0 + _CUTOFF_RTOL) and m > 0:
        if abs(v - lo_cut) <= _CUTOFF_RTOL * max(v, lo_cut):
            raise DegenerateModeError(
                f"mode (parity={parity}, index={mode_index}) sits exactly at cutoff V={v}"
            )
        raise NoGuidedModeError(
            f"mode (parity={parity}, index={mode_index}) below cutoff at omega={omega} "
            f"(V={v} <= {lo_cut})"
        )
    hi = min((m + 1) * math.pi / 2.0, v)
    # the residual runs from -sqrt(V^2-u^2) < 0 at the window edge to +inf
    # (or to +lhs at u=V where the circle term vanishes): one root, bracketed
    eps = 1e-13 * (1.0 + hi)
    lo = lo_cut + eps
    u = brentq(_matching_residual, lo, hi - eps, args=(v, parity),
               xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    # one Newton polish on kx*{tan,cot} form for a residual < 1e-12
    w = math.sqrt(max(v * v - u * u, 0.0))
    if parity == EVEN:
        t = math.tan(u)
        f = u * t - w
        df = t + u * (1.0 + t * t) + (u / w if w > 0 else 0.0)
    else:
        t = 1.0 / math.tan(u)
        f = -u * t - w
        df = -t + u * (1.0 + t * t) + (u / w if w > 0 else 0.0)
    if df != 0.0 and w > 0.0:
        u -= f / df
    w = math.sqrt(max(v * v - u * u, 0.0))
    if w <= 1e-9 * max(v, 1.0):
        raise DegenerateModeError(
            f"mode (parity={parity}, index={mode_index}) at cutoff within tolerance (V={v})"
        )
    return u / a, w / a


def _norm_const(parity, kx, gamma_x, n0, dx):
    # closed-form normalization: n0^2 * int_inside X^2 + int_outside X^2,
    # times the y-integral dy/2, must equal A = dx*dy
    a = dx / 2.0
    u = kx * a
    if parity == EVEN:
        inner = a + math.sin(2.0 * u) / (2.0 * kx)
        edge_sq = math.cos(u) ** 2
    else:
        inner = a - math.sin(2.0 * u) / (2.0 * kx)
        edge_sq = math.sin(u) ** 2
    outer = edge_sq / gamma_x
    return math.sqrt(2.0 * dx / (n0 ** 2 * inner + outer))


def enumerate_branches(geometry, omega=1.0):
    """All guided branches at ``omega``, sorted by qn (ascending).

    For the reference geometry this yields branch 0 = even and
    branch 1 = odd.  Wider slabs report every guided parity/index.
    """
    ky = math.pi / geometry.dy
    branches = []
    m = 0
    while True:
        parity, mode_index = m % 2, m // 2
        try:
            kx, gx = solve_kx(parity, omega, geometry.n0, geometry.dx, mode_index)
        except (NoGuidedModeError, DegenerateModeError):
            break
        qn = math.sqrt(kx ** 2 + ky ** 2) / geometry.n0
        branches.append(GuidedBranch(
            parity=parity,
            mode_index=mode_index,
            kx=kx,
            gamma_x=gx,
            ky=ky,
            qn=qn,
            omega_th=qn,  # c = 1
            norm_const=_norm_const(parity, kx, gx, geometry.n0, geometry.dx),
        ))
        m += 1
    if not branches:
        raise NoGuidedModeError(f"no guided mode at omega={omega} for this geometry")
    return sorted(branches, key=lambda b: b.qn)


def dy_for_threshold(omega_th, parity, n0, dx, mode_index=0):
    """Plate separation that puts the chosen branch threshold at omega_th.

    At threshold the longitudinal wavenumber vanishes, so
    n0^2*omega_th^2 = kx(omega_th)^2 + ky^2 with kx from the slab solve at
    omega_th itself; ky^2 is positive because kx < sqrt(n0^2-1)*omega_th
    for every guided mode.  Returns dy = pi/ky.
    """
    kx, _ = solve_kx(parity, omega_th, n0, dx, mode_index)
    ky_sq = (n0 * omega_th) ** 2 - kx ** 2
    return math.pi / math.sqrt(ky_sq)


def transverse_profile(branch, x, y, geometry):
    """Normalized transverse mode amplitude f_n^T(x, y).

    cos(kx*x) (even) or sin(kx*x) (odd) inside the slab, continuously
    matched exponential tails outside, times sin(pi*y/dy) between the
    plates.  Accepts scalars or arrays; y outside [0, dy] is a domain
    error.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0) or np.any(y > geometry.dy):
        raise ValueError("y outside the metal plates [0, dy]")
    a = geometry.dx / 2.0
    u = branch.kx * a
    inside = np.abs(x) <= a
    if branch.parity == EVEN:
        core = np.cos(branch.kx * x)
        edge = math.cos(u)
        tail = edge * np.exp(-branch.gamma_x * (np.abs(x) - a))
    else:
        core = np.sin(branch.kx * x)
        edge = math.sin(u)
        tail = np.sign(x) * edge * np.exp(-branch.gamma_x * (np.abs(x) - a))
    profile = np.where(inside, core, tail)
    result = branch.norm_const * profile * np.sin(math.pi * y / geometry.dy)
    if result.ndim == 0:
        return float(result)
    return result


def dispersion(branch, k, model, geometry=None):
    """Mode frequency omega_n(k) for one branch.

    model='constant-q': omega = sqrt(k^2/n0^2 + qn^2) with the branch's
    frozen transverse wavenumber.  model='exact': solve
    n0^2*omega^2 = kx(omega)^2 + ky^2 + k^2 with kx from the slab matching
    condition at omega itself (residual < 1e-10).  The two models share
    their anchor frequency by construction.
    """
    if geometry is None:
        raise ValueError("geometry required")
    if model == "constant-q":
        k = np.asarray(k, dtype=float)
        out = np.sqrt(k ** 2 / geometry.n0 ** 2 + branch.qn ** 2)
        return float(out) if out.ndim == 0 else out
    if model != "exact":
        raise ValueError(f"model must be 'constant-q' or 'exact', got '{model}'")

    def solve_one(kval):
        target = branch.ky ** 2 + kval ** 2

        def residual(om):
            kx, _ = solve_kx(branch.parity, om, geometry.n0, geometry.dx, branch.mode_index)
            return (geometry.n0 * om) ** 2 - kx ** 2 - target

        # G(omega) is strictly increasing; expand a bracket around the
        # constant-q estimate
        om_lo = math.sqrt(target) / geometry.n0
        cutoff = ((2 * branch.mode_index + branch.parity) * math.pi / 2.0) \
            / (0.5 * geometry.dx * math.sqrt(geometry.n0 ** 2 - 1.0))
        om_lo = max(om_lo, cutoff * (1.0 + 1e-10))
        om_hi = math.sqrt(target) * 1.0000001 + 1e-9
        while residual(om_hi) < 0.0:
            om_hi *= 1.5
        if residual(om_lo) > 0.0:
            # fall back: shrink towards the cutoff (cannot go lower)
            om_lo = cutoff * (1.0 + 1e-10)
        return brentq(residual, om_lo, om_hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)

    k = np.asarray(k, dtype=float)
    if k.ndim == 0:
        return solve_one(float(k))
    return np.array([solve_one(float(kv)) for kv in k])


def exact_threshold(branch, geometry):
    """Exact threshold frequency of a branch (k = 0 in the exact model)."""
    return dispersion(branch, 0.0, "exact", geometry)


@dataclass(frozen=True)
class DispersionCurve:
    """Sampled (k, omega) pairs for one branch and one model."""

    branch_index: int
    k: np.ndarray
    omega: np.ndarray
    model: str

    def __post_init__(self):
        if len(self.k) != len(self.omega):
            raise ValueError("k and omega must have equal length")
