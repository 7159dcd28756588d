"""Convergence-time analysis for the fixed-time differentiator.

The error dynamics linearize, through the inverse of the scaled generating
function, into a planar system with matrix

    A = [[-k1/2, 1/2],
         [-k2,   0  ]].

All convergence-time quantities reduce to integrals of Psi'(h(tau)) where
Psi is the inverse of the scaled map and h(tau) = e1^T e^(A tau) v is a
scalar response of that system. This module provides:

  * the eigenstructure and closed-form matrix exponential of A,
  * the exact unperturbed convergence time from a given initial state,
  * the single-exponential reduction that ties those integrals to the
    reciprocal integral of Phi,
  * the largest admissible Lipschitz constant (closed form and independent
    numerical route),
  * analytic lower/upper bounds for the worst-case time over the unit
    sphere, and a numerical search for that worst case.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._quad import adaptive_simpson, golden_max, reciprocal_integral
from .dgf import AdmissibilityConstants, GeneratingFunction, ParamTriple, invert_phi, nu1
from .errors import (
    BoundNotApplicableError,
    InfeasibleError,
    InversionRangeError,
    QuadratureError,
)

__all__ = [
    "GlobalConvtime",
    "SystemMatrix",
    "expm2",
    "global_convtime_numeric",
    "lbar",
    "lbar_integral",
    "lower_bound",
    "system_matrix",
    "single_exp_reduction",
    "t0_exact",
    "t_perturbed_bound",
    "upper_bound_ttilde",
]

# Relative tolerance under which k1^2 - 8 k2 counts as zero (repeated eigenvalue)
_REPEATED_REL_TOL = 1e-10

_REAL_DISTINCT = "real-distinct"
_REAL_REPEATED = "real-repeated"
_COMPLEX = "complex"


@dataclass(frozen=True)
class SystemMatrix:
    """Eigenstructure of A = [[-k1/2, 1/2], [-k2, 0]].

    For the real kinds lam1 >= lam2 are the (real) eigenvalues. For the
    complex kind the eigenvalues are mu +/- i omega with omega > 0.
    """

    k1: float
    k2: float
    kind: str
    lam1: float
    lam2: float
    mu: float
    omega: float

    @property
    def eigenvalues(self) -> tuple[complex, complex]:
        if self.kind == _COMPLEX:
            return (complex(self.mu, self.omega), complex(self.mu, -self.omega))
        return (complex(self.lam1), complex(self.lam2))

    def matrix(self) -> np.ndarray:
        return np.array([[-0.5 * self.k1, 0.5], [-self.k2, 0.0]])


def system_matrix(k1: float, k2: float) -> SystemMatrix:
    """Classify the eigenstructure of the error-dynamics matrix."""
    if not (math.isfinite(k1) and k1 > 0.0 and math.isfinite(k2) and k2 > 0.0):
        raise ValueError("k1 and k2 must be positive finite scalars")
    disc = k1 * k1 - 8.0 * k2
    if abs(disc) <= _REPEATED_REL_TOL * k1 * k1:
        lam = -0.25 * k1
        return SystemMatrix(k1, k2, _REAL_REPEATED, lam, lam, 0.0, 0.0)
    if disc > 0.0:
        s = math.sqrt(disc)
        return SystemMatrix(k1, k2, _REAL_DISTINCT, 0.25 * (-k1 + s), 0.25 * (-k1 - s), 0.0, 0.0)
    omega = 0.25 * math.sqrt(-disc)
    return SystemMatrix(k1, k2, _COMPLEX, 0.0, 0.0, -0.25 * k1, omega)


def expm2(sys: SystemMatrix, tau: float) -> np.ndarray:
    """Matrix exponential e^(A tau) in closed form per eigenstructure."""
    a = sys.matrix()
    eye = np.eye(2)
    if sys.kind == _REAL_DISTINCT:
        l1, l2 = sys.lam1, sys.lam2
        p1 = (a - l2 * eye) / (l1 - l2)
        p2 = (a - l1 * eye) / (l2 - l1)
        return math.exp(l1 * tau) * p1 + math.exp(l2 * tau) * p2
    if sys.kind == _REAL_REPEATED:
        lam = sys.lam1
        return math.exp(lam * tau) * (eye + (a - lam * eye) * tau)
    mu, om = sys.mu, sys.omega
    return math.exp(mu * tau) * (
        math.cos(om * tau) * eye + math.sin(om * tau) / om * (a - mu * eye)
    )


# ---------------------------------------------------------------------------
# scalar responses h(tau) = e1^T e^(A tau) v and their envelopes


def _e(a: float) -> float:
    return math.exp(a) if a < 709.0 else math.inf


class _Response:
    """Scalar response h(tau) with cancellation-safe evaluation.

    real-distinct: h = c1 e^(l1 t) + c2 e^(l2 t). Opposite-sign
    coefficients put a zero crossing at tz; near it the plain sum loses all
    of its leading digits once an amplitude like 1e12 meets t ~ 1e-13, so
    the value is routed through expm1 relative to tz there.
    real-repeated: h = e^(l1 t) (c1 + c2 t), linear factor anchored at its
    zero. complex: h = e^(mu t) (c1 cos(om t) + c2 sin(om t)).
    Exponentials saturate to inf instead of raising; Psi' maps those to 0.
    """

    __slots__ = ("kind", "c1", "c2", "lam1", "lam2", "mu", "omega", "tz")

    def __init__(
        self,
        kind: str,
        c1: float,
        c2: float,
        lam1: float = 0.0,
        lam2: float = 0.0,
        mu: float = 0.0,
        omega: float = 0.0,
    ) -> None:
        self.kind = kind
        self.c1 = c1
        self.c2 = c2
        self.lam1 = lam1
        self.lam2 = lam2
        self.mu = mu
        self.omega = omega
        tz: Optional[float] = None
        if kind == _REAL_DISTINCT and c1 != 0.0 and c2 != 0.0 and (c1 > 0.0) != (c2 > 0.0):
            tz = math.log(-c2 / c1) / (lam1 - lam2)
        elif kind == _REAL_REPEATED and c2 != 0.0:
            tz = -c1 / c2
        self.tz = tz

    def h(self, t: float) -> float:
        if self.kind == _REAL_DISTINCT:
            if self.tz is not None:
                arg = (self.lam1 - self.lam2) * (t - self.tz)
                if abs(arg) <= 1.0:
                    return -self.c2 * _e(self.lam2 * t) * math.expm1(arg)
                t1 = self.c1 * _e(self.lam1 * t)
                t2 = self.c2 * _e(self.lam2 * t)
                if math.isinf(t1) and math.isinf(t2):
                    return t1 if arg > 0.0 else t2  # dominant mode decides
                return t1 + t2
            return self.c1 * _e(self.lam1 * t) + self.c2 * _e(self.lam2 * t)
        if self.kind == _REAL_REPEATED:
            m = self.c2 * (t - self.tz) if self.tz is not None else self.c1
            if m == 0.0:
                return 0.0
            return _e(self.lam1 * t) * m
        m = self.c1 * math.cos(self.omega * t) + self.c2 * math.sin(self.omega * t)
        if m == 0.0:
            return 0.0
        return _e(self.mu * t) * m

    def envelope(self, t: float) -> float:
        """Upper bound for |h| on [t, infinity), decreasing past decay_start."""
        if self.kind == _REAL_DISTINCT:
            return abs(self.c1) * _e(self.lam1 * t) + abs(self.c2) * _e(self.lam2 * t)
        if self.kind == _REAL_REPEATED:
            return _e(self.lam1 * t) * (abs(self.c1) + abs(self.c2) * abs(t))
        return math.hypot(self.c1, self.c2) * _e(self.mu * t)

    def envelope_tail(self, t: float) -> float:
        """integral_t^inf envelope, in closed form (t past decay_start)."""
        if self.kind == _REAL_DISTINCT:
            return (
                abs(self.c1) * _e(self.lam1 * t) / -self.lam1
                + abs(self.c2) * _e(self.lam2 * t) / -self.lam2
            )
        if self.kind == _REAL_REPEATED:
            lam = self.lam1
            return _e(lam * t) * (
                (abs(self.c1) + abs(self.c2) * t) / -lam + abs(self.c2) / (lam * lam)
            )
        return math.hypot(self.c1, self.c2) * _e(self.mu * t) / -self.mu

    def decay_start(self) -> float:
        """Time past which the envelope is nonincreasing."""
        if self.kind == _REAL_REPEATED and self.c2 != 0.0:
            return max(0.0, -1.0 / self.lam1 - abs(self.c1) / abs(self.c2))
        return 0.0


def _response_for(sys: SystemMatrix, v1: float, v2: float) -> _Response:
    if sys.kind == _REAL_DISTINCT:
        l1, l2 = sys.lam1, sys.lam2
        # e1^T (A - l I) v = (-k1/2 - l) v1 + v2/2 and -k1/2 - l2 = l1 (trace)
        c1 = (l1 * v1 + 0.5 * v2) / (l1 - l2)
        c2 = -(l2 * v1 + 0.5 * v2) / (l1 - l2)
        return _Response(sys.kind, c1, c2, l1, l2, 0.0, 0.0)
    if sys.kind == _REAL_REPEATED:
        lam = sys.lam1
        return _Response(sys.kind, v1, lam * v1 + 0.5 * v2, lam, lam, 0.0, 0.0)
    mu, om = sys.mu, sys.omega
    # e1^T (A - mu I) v = (-k1/2 - mu) v1 + v2/2 and -k1/2 - mu = mu here
    return _Response(sys.kind, v1, (mu * v1 + 0.5 * v2) / om, 0.0, 0.0, mu, om)


# ---------------------------------------------------------------------------
# Psi' closures and the small-slope threshold


def _psi_prime_closure(dgf: GeneratingFunction, k3: float) -> Callable[[float], float]:
    pp = dgf.phi_prime
    inv = dgf.inverse
    if inv is not None:
        def psi(z: float) -> float:
            if z == 0.0 or not math.isfinite(z):
                return 0.0  # slope of the inverse vanishes at both extremes
            d = pp(inv(k3 * abs(z)))
            return 0.0 if math.isinf(d) else 1.0 / (k3 * d)
    else:
        def psi(z: float) -> float:
            if z == 0.0 or not math.isfinite(z):
                return 0.0
            try:
                d = pp(invert_phi(dgf, k3 * abs(z)))
            except InversionRangeError:
                return 0.0  # preimage beyond float range: slope long gone
            return 0.0 if math.isinf(d) else 1.0 / (k3 * d)
    return psi


@functools.lru_cache(maxsize=64)
def _small_slope_threshold(dgf: GeneratingFunction) -> float:
    """Largest verified w such that 1/Phi'(Phi^-1(w)) <= 3w on (0, w].

    Near zero the bound holds for every generating function (the slope of
    the inverse vanishes); many hold globally. Verified on a log grid with
    a factor-two safety margin; scaling by k3 maps the threshold to the
    scaled family.
    """
    best = 0.0
    w = 1e-12
    while w <= 1e12:
        x = invert_phi(dgf, w)
        d = dgf.phi_prime(x)
        if not (math.isinf(d) or 1.0 / d <= 3.0 * w):
            break
        best = w
        w *= 10.0 ** 0.25
    return 0.5 * best


def _delta0(dgf: GeneratingFunction, k3: float) -> float:
    return _small_slope_threshold(dgf) / k3


# ---------------------------------------------------------------------------
# decaying-tail integration on [start, infinity)


def _integrate_decaying(
    f: Callable[[float], float],
    resp: _Response,
    delta0: float,
    tol: float,
    *,
    start: float = 0.0,
    slope_factor: float = 1.5,
    max_panels: int = 200,
) -> float:
    """integral_start^inf f with f <= slope_factor * |h| once |h| <= delta0.

    Panels of doubling width; stops when the closed-form envelope tail bound
    certifies the remainder below tol/2.
    """
    total = 0.0
    a = start
    width = 1.0
    decay_from = resp.decay_start()
    for j in range(max_panels):
        b = a + width
        total += adaptive_simpson(f, a, b, 0.25 * tol * 0.5 ** min(j, 40), floor=1e-6 * tol)
        a = b
        if width < 64.0:
            width *= 2.0
        if a >= decay_from and resp.envelope(a) <= delta0:
            if slope_factor * resp.envelope_tail(a) < 0.5 * tol:
                return total
    raise QuadratureError(
        "quadrature failure: decaying tail did not certify below tolerance "
        f"within {max_panels} panels"
    )


# ---------------------------------------------------------------------------
# exact unperturbed convergence time


def t0_exact(
    dgf: GeneratingFunction,
    kappa: ParamTriple,
    x0: tuple[float, float],
    *,
    tol: float = 1e-8,
) -> float:
    """Unperturbed convergence time from initial error state x0.

    Evaluates integral_0^inf (1/2) Psi'(e1^T e^(A tau) g(x0)) d tau where
    g(x0) = (Phi_k3(x0_1), x0_2); absolute tolerance tol.
    """
    x1, x2 = float(x0[0]), float(x0[1])
    g1 = nu1(dgf, kappa.k3, x1)  # nu1 is precisely the scaled map Phi_k3
    if g1 == 0.0 and x2 == 0.0:
        return 0.0
    sys = system_matrix(kappa.k1, kappa.k2)
    resp = _response_for(sys, g1, x2)
    psi = _psi_prime_closure(dgf, kappa.k3)
    delta0 = _delta0(dgf, kappa.k3)

    def f(t: float) -> float:
        return 0.5 * psi(resp.h(t))

    return _integrate_decaying(f, resp, delta0, tol)


def single_exp_reduction(
    dgf: GeneratingFunction,
    k3: float,
    lam: float,
    c: float,
    *,
    tol: float = 1e-9,
) -> float:
    """integral_0^inf Psi'(c e^(lam tau)) d tau for lam < 0, in reduced form.

    Equals (1/(k3 |lam|)) integral_0^{Phi^-1(k3 |c|)} dx / Phi(x); evenness
    of Psi' makes the sign of c irrelevant. As |c| grows the value tends to
    B / (k3 |lam|).
    """
    if not lam < 0.0:
        raise ValueError("lam must be negative (stable mode)")
    if not (math.isfinite(k3) and k3 > 0.0):
        raise ValueError("k3 must be a positive finite scalar")
    if c == 0.0:
        return 0.0
    upper = abs(invert_phi(dgf, k3 * abs(c)))
    return reciprocal_integral(dgf.phi, upper, tol=tol) / (k3 * -lam)


# ---------------------------------------------------------------------------
# largest admissible Lipschitz constant


def lbar(k1: float, k2: float, D: float) -> float:
    """Largest perturbation slope with a convergence guarantee, closed form."""
    if not (k1 > 0.0 and k2 > 0.0):
        raise ValueError("k1 and k2 must be positive")
    if not D >= 1.0:
        raise ValueError("D must be >= 1")
    if k1 * k1 >= 8.0 * k2:
        return k2 / D
    return (k2 / D) * math.tanh(math.pi * k1 / (2.0 * math.sqrt(8.0 * k2 - k1 * k1)))


def _bisect_root(f: Callable[[float], float], lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) < 1e-15 * max(abs(mid), 1.0):
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lbar_integral(k1: float, k2: float, D: float, *, tol: float = 1e-10) -> float:
    """Same quantity as lbar via 1 / (D integral_0^inf |e1^T e^(A tau) e2| d tau).

    Fully numerical route kept independent of the closed form: panel
    integration with an envelope-certified tail for real eigenvalues, and a
    per-period sum with bracketed sign changes plus geometric tail
    extrapolation in the oscillatory case.
    """
    if not D >= 1.0:
        raise ValueError("D must be >= 1")
    sys = system_matrix(k1, k2)
    resp = _response_for(sys, 0.0, 1.0)

    if sys.kind != _COMPLEX:
        # h >= 0 here: no sign changes to track
        total = 0.0
        a = 0.0
        width = 1.0
        for j in range(200):
            total += adaptive_simpson(lambda t: abs(resp.h(t)), a, a + width, 0.25 * tol)
            a += width
            if width < 64.0:
                width *= 2.0
            if a >= resp.decay_start() and resp.envelope_tail(a) < 0.5 * tol * max(total, 1.0):
                return 1.0 / (D * total)
        raise QuadratureError("quadrature failure: lbar integral tail did not converge")

    period = math.pi / sys.omega
    # bracket each sign change of h around its nominal position n*period
    zeros = [0.0]
    n = 1
    total = 0.0
    prev = None
    while n < 4000:
        guess = n * period
        lo, hi = guess - 0.45 * period, guess + 0.45 * period
        if resp.h(lo) * resp.h(hi) > 0.0:
            raise QuadratureError("quadrature failure: sign change bracketing lost a root")
        z = _bisect_root(resp.h, lo, hi)
        contrib = adaptive_simpson(lambda t: abs(resp.h(t)), zeros[-1], z, 0.25 * tol)
        total += contrib
        zeros.append(z)
        if prev is not None and contrib < prev:
            rho = contrib / prev
            remainder = contrib * rho / (1.0 - rho)
            if remainder < 0.5 * tol * max(total, 1.0):
                total += remainder
                return 1.0 / (D * total)
        prev = contrib
        n += 1
    raise QuadratureError("quadrature failure: oscillatory lbar integral did not converge")


def t_perturbed_bound(t0: float, L: float, lbar_value: float) -> float:
    """Convergence-time bound under perturbation slope L: t0 / (1 - L/lbar)."""
    if t0 < 0.0 or L < 0.0 or lbar_value <= 0.0:
        raise ValueError("t0, L must be nonnegative and lbar positive")
    if L >= lbar_value:
        raise InfeasibleError(
            f"Lipschitz constant exceeds admissible maximum (L = {L:g} >= {lbar_value:g})"
        )
    return t0 / (1.0 - L / lbar_value)


# ---------------------------------------------------------------------------
# analytic bounds for the worst case over the unit sphere


def _discriminant_or_raise(kappa: ParamTriple) -> float:
    disc = kappa.k1 * kappa.k1 - 8.0 * kappa.k2
    if disc < -_REPEATED_REL_TOL * kappa.k1 * kappa.k1:
        raise BoundNotApplicableError(
            f"bound not applicable: k1^2 < 8 k2 (k1={kappa.k1:g}, k2={kappa.k2:g})"
        )
    # snap the repeated-eigenvalue band to exactly zero so both bounds use the
    # boundary formulas instead of amplifying float residue through sqrt
    if disc <= _REPEATED_REL_TOL * kappa.k1 * kappa.k1:
        return 0.0
    return disc


def lower_bound(constants: AdmissibilityConstants, kappa: ParamTriple) -> float:
    """Worst-case convergence time is at least 2B / ((k1 - sqrt(k1^2-8k2)) k3)."""
    disc = _discriminant_or_raise(kappa)
    return 2.0 * constants.B / ((kappa.k1 - math.sqrt(disc)) * kappa.k3)


def upper_bound_ttilde(constants: AdmissibilityConstants, kappa: ParamTriple) -> float:
    """Closed-form upper bound for the worst-case unperturbed time.

    Continuous across the k1^2 = 8 k2 boundary, where it becomes
    (C + 6B) / (k1 k3).
    """
    disc = _discriminant_or_raise(kappa)
    k1, k2, k3 = kappa.k1, kappa.k2, kappa.k3
    if disc <= _REPEATED_REL_TOL * k1 * k1:
        return (constants.C + 6.0 * constants.B) / (k1 * k3)
    s = math.sqrt(disc)
    log_term = math.log((k1 + s) / (k1 - s)) / (2.0 * k3 * s) * constants.C
    tail_term = (k1 * k1 + 4.0 * k2) / (2.0 * k1 * k2 * k3) * constants.B
    return log_term + tail_term


# ---------------------------------------------------------------------------
# numerical worst case over the unit sphere


@dataclass(frozen=True)
class GlobalConvtime:
    """Numerically searched worst-case unperturbed convergence time.

    value is the supremum estimate; argmax identifies the worst initial
    condition in the parameterization named by search. The grid resolution
    and inner quadrature tolerance are reported rather than folded into an
    accuracy claim.
    """

    value: float
    dgf_name: str
    kappa: ParamTriple
    search: str
    argmax: float
    grid_points: int
    inner_tol: float

    def __float__(self) -> float:
        return self.value


def _integrate_growing_left(
    f: Callable[[float], float],
    resp: _Response,
    tol: float,
) -> float:
    """integral_-inf^0 f(tau) d tau where |h| grows (and may oscillate) leftward."""
    if resp.kind == _COMPLEX:
        period = math.pi / resp.omega
        total = 0.0
        prev = None
        right = 0.0
        for n in range(2000):
            left = right - period
            contrib = adaptive_simpson(f, left, right, 0.25 * tol, floor=1e-6 * tol)
            total += contrib
            right = left
            if prev is not None and 0.0 < contrib < prev:
                rho = contrib / prev
                if contrib * rho / (1.0 - rho) < 0.25 * tol:
                    return total + contrib * rho / (1.0 - rho)
            if contrib == 0.0 and prev == 0.0:
                return total
            prev = contrib
        raise QuadratureError("quadrature failure: oscillatory left tail did not converge")

    total = 0.0
    b = 0.0
    width = 1.0
    small_streak = 0
    for j in range(200):
        a = b - width
        contrib = adaptive_simpson(f, a, b, 0.25 * tol, floor=1e-6 * tol)
        total += contrib
        b = a
        if width < 64.0:
            width *= 2.0
        if abs(contrib) < 0.25 * tol:
            small_streak += 1
            if small_streak >= 2:
                return total
        else:
            small_streak = 0
    raise QuadratureError("quadrature failure: left tail did not converge")


def _full_line_time(
    psi: Callable[[float], float],
    resp: _Response,
    delta0: float,
    tol: float,
) -> float:
    def f(t: float) -> float:
        return 0.5 * psi(resp.h(t))

    right = _integrate_decaying(f, resp, delta0, tol)
    left = _integrate_growing_left(f, resp, tol)
    return left + right


def global_convtime_numeric(
    dgf: GeneratingFunction,
    kappa: ParamTriple,
    *,
    inner_tol: float = 1e-6,
    grid_points: int = 256,
) -> GlobalConvtime:
    """Worst-case unperturbed convergence time over unit initial conditions.

    For distinct real eigenvalues the search runs over the sign-symmetric
    two-exponential family |a| e^(lam1 t) + a e^(lam2 t) on a log grid in
    |a| (time shifts make this family exhaustive); otherwise directly over
    angles on the unit circle. Either way: coarse grid, then golden-section
    refinement around the best point.
    """
    sys = system_matrix(kappa.k1, kappa.k2)
    psi = _psi_prime_closure(dgf, kappa.k3)
    delta0 = _delta0(dgf, kappa.k3)

    if sys.kind == _REAL_DISTINCT:
        def value_at(log_b: float, sign: float) -> float:
            b = 10.0 ** log_b
            resp = _Response(_REAL_DISTINCT, b, sign * b, sys.lam1, sys.lam2)
            return _full_line_time(psi, resp, delta0, inner_tol)

        # Degenerate single-mode profiles are the b -> inf / b -> 0 limits of
        # the family; their full-line values have the closed reduction
        # B / (2 k3 |lam|), entered as explicit candidates so a supremum
        # attained only in the limit never chases the grid edge outward.
        b_full = reciprocal_integral(dgf.phi, None, tol=min(1e-3 * inner_tol, 1e-9))
        lim_slow = b_full / (2.0 * kappa.k3 * -sys.lam1)
        lim_fast = b_full / (2.0 * kappa.k3 * -sys.lam2)

        half = grid_points // 2
        lo_edge, hi_edge = -8.0, 8.0
        best = (-math.inf, 0.0, 1.0)  # (value, log_b, sign)
        for attempt in range(2):
            for sign in (1.0, -1.0):
                for i in range(half):
                    lb = lo_edge + (hi_edge - lo_edge) * i / (half - 1)
                    v = value_at(lb, sign)
                    if v > best[0]:
                        best = (v, lb, sign)
            at_edge = best[1] <= lo_edge + 1e-9 or best[1] >= hi_edge - 1e-9
            if not (at_edge and best[0] > max(lim_slow, lim_fast)) or attempt == 1:
                break
            lo_edge, hi_edge = 2.0 * lo_edge, 2.0 * hi_edge  # widen and rescan
        step = (hi_edge - lo_edge) / (half - 1)
        sgn = best[2]
        arg, val = golden_max(
            lambda lb: value_at(lb, sgn), best[1] - step, best[1] + step, iters=40
        )
        if val < best[0]:
            arg, val = best[1], best[0]
        argmax = sgn * 10.0 ** arg
        if lim_fast > val:
            val, argmax = lim_fast, 0.0
        if lim_slow > val:
            val, argmax = lim_slow, math.inf
        return GlobalConvtime(
            value=val, dgf_name=dgf.name, kappa=kappa, search="two-exponential",
            argmax=argmax, grid_points=grid_points, inner_tol=inner_tol,
        )

    def value_at_angle(theta: float) -> float:
        resp = _response_for(sys, math.cos(theta), math.sin(theta))
        return _full_line_time(psi, resp, delta0, inner_tol)

    best_v, best_t = -math.inf, 0.0
    for i in range(grid_points):
        theta = math.pi * i / grid_points  # Psi' even: v and -v coincide
        v = value_at_angle(theta)
        if v > best_v:
            best_v, best_t = v, theta
    step = math.pi / grid_points
    arg, val = golden_max(value_at_angle, best_t - step, best_t + step, iters=40)
    if val < best_v:
        arg, val = best_t, best_v
    return GlobalConvtime(
        value=val, dgf_name=dgf.name, kappa=kappa, search="unit-circle",
        argmax=arg, grid_points=grid_points, inner_tol=inner_tol,
    )
