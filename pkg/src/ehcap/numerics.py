"""Self-contained numerical kernels.

Lambert W0, bracketed root finding on monotone functions, the radial
quadrature behind the CSMA outage integrals, and a compensated alternating
binomial sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .model import ChannelParams

_INV_E = math.exp(-1.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the radial quadrature.

    rel_tol: target relative error of the returned integral.
    truncation_radius_factor: multiple of d*theta^(1/alpha) beyond which the
        analytic power-law tail replaces the quadrature.
    """

    rel_tol: float = 1e-8
    truncation_radius_factor: float = 1e4

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol}")
        if self.truncation_radius_factor < 10.0:
            raise ValueError("truncation_radius_factor must be >= 10")


DEFAULT_QUADRATURE = QuadratureSpec()


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function: w with w*exp(w) = x.

    Defined for x >= -1/e; the result satisfies w >= -1 with relative
    residual |w*exp(w) - x| <= ~1e-12 * |x|.  A safeguarded Halley iteration
    runs inside a sign-change bracket; bisection is the fallback whenever a
    step leaves the bracket, so convergence is unconditional.
    """
    if math.isnan(x):
        raise ValueError("lambert_w0: x is NaN")
    if x < -_INV_E:
        # allow for representation noise exactly at the branch point
        if x > -_INV_E - 1e-15:
            return -1.0
        raise ValueError(f"lambert_w0: x = {x} below branch point -1/e")
    if x == 0.0:
        return 0.0

    # For very large x solve log(w) + w = log(x) instead: same root, no
    # overflow, and Newton's derivative 1 + 1/w is exact.
    if x > 1e16:
        lx = math.log(x)
        w = lx - math.log(lx)
        for _ in range(64):
            step = (math.log(w) + w - lx) / (1.0 + 1.0 / w)
            w -= step
            if abs(step) <= 1e-14 * abs(w):
                break
        return w

    # Bracket with f(lo) <= 0 <= f(hi) for f(w) = w e^w - x.
    if x > 0.0:
        lo, hi = 0.0, 1.0 + math.log1p(x)
        w = math.log1p(x)  # decent seed on (0, inf)
    else:
        lo, hi = -1.0, 0.0
        # series around the branch point, else the seed -x is inside (-1, 0)
        t = 2.0 * (1.0 + math.e * x)
        if t < 0.5:
            pbr = math.sqrt(max(t, 0.0))
            w = -1.0 + pbr - pbr * pbr / 3.0
        else:
            w = x

    def f(w: float) -> float:
        return w * math.exp(w) - x

    for _ in range(100):
        fw = f(w)
        if abs(fw) <= 1e-13 * max(abs(x), 1e-300):
            return w
        if fw > 0.0:
            hi = w
        else:
            lo = w
        ew = math.exp(w)
        # Halley step; denominator from f' = e^w (1+w), f'' = e^w (2+w)
        denom = ew * (w + 1.0) - (w + 2.0) * fw / (2.0 * (w + 1.0)) if w != -1.0 else 0.0
        if denom != 0.0:
            w_next = w - fw / denom
        else:
            w_next = math.nan
        if not (lo < w_next < hi):
            w_next = 0.5 * (lo + hi)
        if w_next == w:
            break
        w = w_next
    return w


def find_root_increasing(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float = 1e-13,
) -> Optional[float]:
    """Solve f(x) = target for a monotone nondecreasing f by bisection.

    Returns the midpoint of the final bracket once its width is <= tol, or
    None when target is not bracketed by [f(lo), f(hi)] (the caller decides
    how to clamp).
    """
    if not lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if target < flo or target > fhi:
        return None
    if flo == target:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket at float resolution
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _adaptive_simpson(g: Callable[[float], float], a: float, b: float, abs_tol: float) -> float:
    """Iterative adaptive Simpson with Richardson correction on [a, b]."""

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 6.0 * (fa + 4.0 * fm + fb)

    m0 = 0.5 * (a + b)
    fa, fm, fb = g(a), g(m0), g(b)
    total = 0.0
    # stack entries: (a, b, fa, fm, fb, whole_estimate, tol, depth)
    stack = [(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), abs_tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, whole, tol0, depth = stack.pop()
        m = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m), 0.5 * (m + b0)
        flm, frm = g(lm), g(rm)
        left = simpson(fa0, flm, fm0, m - a0)
        right = simpson(fm0, frm, fb0, b0 - m)
        err = (left + right - whole) / 15.0
        if depth >= 48 or abs(err) <= tol0:
            total += left + right + err
        else:
            stack.append((a0, m, fa0, flm, fm0, left, 0.5 * tol0, depth + 1))
            stack.append((m, b0, fm0, frm, fb0, right, 0.5 * tol0, depth + 1))
    return total


def csma_spatial_integral(
    ell: int,
    nu: float,
    channel: ChannelParams,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Radial interference integral over the plane, in m^2.

    Computes 2*pi*d^2*theta^(2/alpha) * int_0^inf u*(1 - (1 - nu/(1+u^alpha))^ell) du,
    the area integral of 1 - (nu/(1 + d^alpha theta |x|^-alpha) + 1 - nu)^ell
    after the substitution u = |x|/(d theta^(1/alpha)).  For ell = 1 this has
    the closed form nu * d^2 * theta^(2/alpha) * kappa(alpha), which serves as
    the quadrature cross-check.

    Adaptive Simpson runs on [0, U] with U = truncation_radius_factor; the
    tail, where the integrand behaves as ell*nu*u^(1-alpha), is added
    analytically as ell*nu*U^(2-alpha)/(alpha-2).
    """
    if ell < 0 or ell != int(ell):
        raise ValueError(f"ell must be a nonnegative integer, got {ell}")
    if not (0.0 <= nu <= 1.0):
        raise ValueError(f"nu must be in [0, 1], got {nu}")
    ell = int(ell)
    if ell == 0 or nu == 0.0:
        return 0.0

    alpha = channel.alpha
    prefactor = 2.0 * math.pi * channel.d**2 * channel.theta ** (2.0 / alpha)

    def integrand(u: float) -> float:
        # 1 - (1 - x)^ell with x = nu/(1+u^alpha), via log1p/expm1 so the
        # far-field 1 - (1 - tiny)^ell keeps full relative accuracy
        x = nu / (1.0 + u**alpha)
        if x >= 1.0:
            return u
        return -u * math.expm1(ell * math.log1p(-x))

    cutoff = spec.truncation_radius_factor
    # geometric segments: the integrand turns over near u ~ 1 and decays as
    # a power law, so doubling panels keep the adaptive depth shallow
    edges = [0.0, 0.5, 1.0]
    while edges[-1] < cutoff:
        edges.append(min(edges[-1] * 4.0, cutoff))

    # coarse pass to set the absolute tolerance budget per segment
    rough = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        m = 0.5 * (a + b)
        rough += (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(m) + integrand(b))
    abs_tol = max(abs(rough), 1e-300) * spec.rel_tol * 0.1 / (len(edges) - 1)

    value = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value += _adaptive_simpson(integrand, a, b, abs_tol)
    tail = ell * nu * cutoff ** (2.0 - alpha) / (alpha - 2.0)
    return prefactor * (value + tail)


def alternating_binomial_sum(terms: Sequence[float]) -> float:
    """Compensated sum of (-1)^l * C(n, l) * terms[l] for l = 0..n.

    n is len(terms) - 1.  Binomial coefficients are exact integers; the sum
    uses Neumaier compensation.  The alternating weights grow as C(n, n/2),
    so for n beyond ~30 the result can lose most of its significant digits
    when the terms nearly cancel; callers working at that scale should
    restructure the computation instead.
    """
    n = len(terms) - 1
    if n < 0:
        raise ValueError("terms must be non-empty")
    total = 0.0
    comp = 0.0
    for l, t in enumerate(terms):
        term = (-1.0) ** l * math.comb(n, l) * t
        s = total + term
        if abs(total) >= abs(term):
            comp += (total - s) + term
        else:
            comp += (term - s) + total
        total = s
    return total + comp
