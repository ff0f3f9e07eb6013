"""Exponential sums e(f(n)) = exp(2 pi i f(n)) and oscillatory integrals.

Phases come from a closed set of families with analytic derivatives, so the
hypotheses of the derivative tests can be checked rather than assumed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ._backend import Kernel, njit
from .errors import BudgetExceeded, ConvergenceError, DomainError, PreconditionError
from .sieves import divisor_counts
from .spacing import power_diff, weighted_self_within

TWO_PI = 2.0 * math.pi
MAX_SUM_TERMS = 10**8
MAX_TYPE_SUM = 10**8
_BLOCK = 1 << 20

Family = Literal["constant", "linear", "power", "sqrt_bilinear"]


@dataclass(frozen=True)
class PhaseFunction:
    """f(x) = coeff * x**theta, parametrised by family.

    constant: (c,)   linear: (c,)   power: (c, theta)
    sqrt_bilinear: (m1, m2) -> 2 (sqrt m1 - sqrt m2) sqrt x
    """

    family: Family
    params: tuple

    @classmethod
    def constant(cls, c):
        return cls("constant", (float(c),))

    @classmethod
    def linear(cls, c):
        return cls("linear", (float(c),))

    @classmethod
    def power(cls, c, theta):
        return cls("power", (float(c), float(theta)))

    @classmethod
    def sqrt_bilinear(cls, m1, m2):
        return cls("sqrt_bilinear", (int(m1), int(m2)))

    def coefficients(self) -> tuple[float, float]:
        if self.family == "constant":
            return self.params[0], 0.0
        if self.family == "linear":
            return self.params[0], 1.0
        if self.family == "power":
            return self.params
        if self.family == "sqrt_bilinear":
            m1, m2 = self.params
            return 2.0 * float(power_diff(m1, m2, 0.5)), 0.5
        raise ValueError(f"unknown family {self.family!r}")

    def value(self, x):
        c, th = self.coefficients()
        return c * np.asarray(x, dtype=np.float64) ** th

    def d1(self, x):
        c, th = self.coefficients()
        x = np.asarray(x, dtype=np.float64)
        if th == 0.0:
            return np.zeros_like(x)
        return c * th * x ** (th - 1.0)

    def d2(self, x):
        c, th = self.coefficients()
        x = np.asarray(x, dtype=np.float64)
        if th in (0.0, 1.0):
            return np.zeros_like(x)
        return c * th * (th - 1.0) * x ** (th - 2.0)

    def negated(self) -> "PhaseFunction":
        if self.family == "sqrt_bilinear":
            m1, m2 = self.params
            return PhaseFunction.sqrt_bilinear(m2, m1)
        c, *rest = self.params
        return PhaseFunction(self.family, (-c, *rest))

    def scaled(self, k: float) -> "PhaseFunction":
        c, th = self.coefficients()
        return PhaseFunction.power(c * k, th)

    def needs_positive_domain(self) -> bool:
        return self.coefficients()[1] not in (0.0, 1.0)


def _integer_range(a: float, b: float) -> tuple[int, int]:
    return math.floor(a) + 1, math.floor(b)


# -- exponential sums -------------------------------------------------------------


@njit
def _exp_sum_nb(c, theta, n0, n1, out):
    re = 0.0
    rc = 0.0
    im = 0.0
    ic = 0.0
    for n in range(n0, n1 + 1):
        v = c * float(n) ** theta
        r = v - np.rint(v)
        cr = np.cos(2.0 * np.pi * r)
        sr = np.sin(2.0 * np.pi * r)
        t = re + cr
        if abs(re) >= abs(cr):
            rc += (re - t) + cr
        else:
            rc += (cr - t) + re
        re = t
        t = im + sr
        if abs(im) >= abs(sr):
            ic += (im - t) + sr
        else:
            ic += (sr - t) + im
        im = t
    out[0] = re + rc
    out[1] = im + ic
    return out


def _exp_sum_np(c, theta, n0, n1, out):
    re = []
    im = []
    for a in range(n0, n1 + 1, _BLOCK):
        n = np.arange(a, min(a + _BLOCK, n1 + 1), dtype=np.float64)
        v = c * n**theta
        r = v - np.rint(v)
        re.append(np.sum(np.cos(2.0 * np.pi * r)))
        im.append(np.sum(np.sin(2.0 * np.pi * r)))
    out[0] = math.fsum(re)
    out[1] = math.fsum(im)
    return out


exp_sum_kernel = Kernel("exp_sum", _exp_sum_nb, _exp_sum_np)


def exp_sum(f: PhaseFunction, a: float, b: float) -> complex:
    """sum_{a < n <= b} e(f(n))."""
    n0, n1 = _integer_range(a, b)
    if n1 - n0 + 1 > MAX_SUM_TERMS:
        raise BudgetExceeded(f"{n1 - n0 + 1} terms exceed {MAX_SUM_TERMS}")
    if n1 < n0:
        return 0j
    if f.needs_positive_domain() and n0 < 1:
        raise DomainError("power phases need a > 0")
    c, th = f.coefficients()
    out = np.zeros(2)
    exp_sum_kernel(c, th, n0, n1, out)
    return complex(out[0], out[1])


def exp_sum_reference(f: PhaseFunction, a: float, b: float) -> complex:
    """Independent loop: direct cmath exponential and math.fsum."""
    n0, n1 = _integer_range(a, b)
    terms = [cmath.exp(2j * math.pi * float(f.value(n))) for n in range(n0, n1 + 1)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


# -- oscillatory integrals --------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _max_abs_derivative(F: PhaseFunction, a: float, b: float) -> float:
    # every family has a monotone derivative, so the extremes sit at the ends
    return float(max(abs(F.d1(a)), abs(F.d1(b))))


def _panel_quadrature(F: PhaseFunction, a: float, b: float, panels: int) -> complex:
    total = []
    width = (b - a) / panels
    half = 0.5 * width
    chunk = max(1, 200_000 // _GL_NODES.size)
    for start in range(0, panels, chunk):
        idx = np.arange(start, min(start + chunk, panels), dtype=np.float64)
        mids = a + (idx + 0.5) * width
        x = (mids[:, None] + half * _GL_NODES[None, :]).ravel()
        phase = F.value(x)
        vals = np.exp(1j * phase).reshape(-1, _GL_NODES.size) @ _GL_WEIGHTS
        total.append(vals.sum() * half)
    return complex(math.fsum(t.real for t in total), math.fsum(t.imag for t in total))


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error: float
    panels: int


def exp_integral_detail(F: PhaseFunction, a: float, b: float, rtol: float = 1e-8,
                        atol: float | None = None, max_panels: int = 1 << 22) -> IntegralResult:
    """Adaptive panel Gauss-Legendre for int_a^b exp(i F(x)) dx.

    Panels start at most a quarter oscillation wide and are halved until two
    successive resolutions agree to ``rtol`` relative (plus ``atol``, by
    default 1e-15 (b - a), for integrals that cancel to nearly zero).
    """
    if not a < b:
        raise DomainError("need a < b")
    if F.needs_positive_domain() and a <= 0:
        raise DomainError("power phases need a > 0")
    if atol is None:
        atol = 1e-15 * (b - a)
    width = 1.0 / (4.0 * _max_abs_derivative(F, a, b) / TWO_PI + 1.0)
    panels = max(1, math.ceil((b - a) / width))
    coarse = _panel_quadrature(F, a, b, panels)
    while True:
        fine = _panel_quadrature(F, a, b, 2 * panels)
        err = abs(fine - coarse)
        if err <= rtol * abs(fine) + atol:
            return IntegralResult(fine, err, 2 * panels)
        panels *= 2
        if 2 * panels > max_panels:
            raise ConvergenceError(
                f"no convergence with {panels} panels (achieved {err:.3e})", fine, err
            )
        coarse = fine


def exp_integral(F: PhaseFunction, a: float, b: float) -> complex:
    """int_a^b exp(i F(x)) dx."""
    return exp_integral_detail(F, a, b).value


# -- sum to integral ---------------------------------------------------------------


def _scan(fn, a, b, points: int = 1025):
    x = np.linspace(a, b, points)
    return fn(x)


def admissible_theta(f: PhaseFunction, a: float, b: float) -> float:
    """Largest theta with |f'| <= 1 - theta on [a, b]."""
    return 1.0 - float(np.max(np.abs(_scan(f.d1, a, b))))


def sum_to_integral_residual(f: PhaseFunction, a: float, b: float, theta: float) -> float:
    """theta * |sum_{a<n<=b} e(f(n)) - int_a^b e(f(x)) dx|."""
    if not 0 < theta < 1:
        raise PreconditionError("theta must lie in (0, 1)")
    if not a < b:
        raise DomainError("need a < b")
    d1 = _scan(f.d1, a, b)
    d2 = _scan(f.d2, a, b)
    if np.max(np.abs(d1)) > 1.0 - theta:
        raise PreconditionError(f"|f'| reaches {np.max(np.abs(d1)):.6g} > 1 - theta")
    if np.any(d2 == 0) or not (np.all(d2 > 0) or np.all(d2 < 0)):
        raise PreconditionError("f'' vanishes on [a, b]")
    s = exp_sum(f, a, b)
    integral = exp_integral(f.scaled(TWO_PI), a, b)
    return theta * abs(s - integral)


# -- first derivative test ----------------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.bound

    @property
    def ratio(self) -> float:
        return self.lhs / self.bound


def first_derivative_check(F: PhaseFunction, a: float, b: float) -> BoundCheck:
    """|int_a^b exp(i F)| against 4/m with m = min |F'| (F' monotone)."""
    if not a < b:
        raise DomainError("need a < b")
    d1 = _scan(F.d1, a, b)
    d2 = _scan(F.d2, a, b)
    if not (np.all(d2 >= 0) or np.all(d2 <= 0)):
        raise PreconditionError("F' is not monotonic on [a, b]")
    if np.any(d1 == 0) or not (np.all(d1 > 0) or np.all(d1 < 0)):
        raise PreconditionError("F' vanishes on [a, b]")
    m = float(min(abs(F.d1(a)), abs(F.d1(b))))
    return BoundCheck(abs(exp_integral(F, a, b)), 4.0 / m)


# -- second derivative test -------------------------------------------------------


@dataclass(frozen=True)
class SecondDerivativeResult:
    value: complex
    lambda2: float
    bound: float

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.bound


def second_derivative_ratio(f: PhaseFunction, a: float, b: float) -> SecondDerivativeResult:
    """|sum_{a<n<=b} e(f(n))| / (a lambda2^{1/2} + lambda2^{-1/2}).

    Requires 1 <= a < b <= 2a and |f''| within a factor 4 on [a, b];
    lambda2 is the geometric mean of the extremes.
    """
    if not (1 <= a < b <= 2 * a):
        raise PreconditionError("need 1 <= a < b <= 2a")
    d2 = np.abs(_scan(f.d2, a, b))
    lo, hi = float(d2.min()), float(d2.max())
    if lo <= 0 or hi > 4 * lo:
        raise PreconditionError(f"|f''| spans [{lo:.4g}, {hi:.4g}], outside a 4x band")
    lam = math.sqrt(lo * hi)
    s = exp_sum(f, a, b)
    return SecondDerivativeResult(s, lam, a * math.sqrt(lam) + 1.0 / math.sqrt(lam))


# -- double large sieve -------------------------------------------------------------


@njit
def _bilinear_nb(x, y, phi_re, phi_im, psi_re, psi_im, out):
    tot_re = 0.0
    tot_im = 0.0
    for r in range(x.shape[0]):
        in_re = 0.0
        in_im = 0.0
        for s in range(y.shape[0]):
            v = x[r] * y[s]
            v = v - np.rint(v)
            c = np.cos(2.0 * np.pi * v)
            sn = np.sin(2.0 * np.pi * v)
            in_re += psi_re[s] * c - psi_im[s] * sn
            in_im += psi_re[s] * sn + psi_im[s] * c
        tot_re += phi_re[r] * in_re - phi_im[r] * in_im
        tot_im += phi_re[r] * in_im + phi_im[r] * in_re
    out[0] = tot_re
    out[1] = tot_im
    return out


def _bilinear_np(x, y, phi_re, phi_im, psi_re, psi_im, out):
    v = np.multiply.outer(x, y)
    v = v - np.rint(v)
    kernel = np.exp(2j * np.pi * v)
    total = (phi_re + 1j * phi_im) @ (kernel @ (psi_re + 1j * psi_im))
    out[0] = total.real
    out[1] = total.imag
    return out


bilinear_kernel = Kernel("bilinear", _bilinear_nb, _bilinear_np)


@dataclass(frozen=True)
class BilinearInstance:
    x_points: np.ndarray
    y_points: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    X: float | None = None
    Y: float | None = None

    def __post_init__(self):
        if len(self.x_points) != len(self.phi) or len(self.y_points) != len(self.psi):
            raise DomainError("coefficient arrays must match the point arrays")

    @property
    def x_bound(self) -> float:
        return float(self.X) if self.X is not None else float(np.max(np.abs(self.x_points)))

    @property
    def y_bound(self) -> float:
        return float(self.Y) if self.Y is not None else float(np.max(np.abs(self.y_points)))


def bilinear_form(inst: BilinearInstance) -> complex:
    phi = np.asarray(inst.phi, dtype=np.complex128)
    psi = np.asarray(inst.psi, dtype=np.complex128)
    out = np.zeros(2)
    bilinear_kernel(
        np.ascontiguousarray(inst.x_points, dtype=np.float64),
        np.ascontiguousarray(inst.y_points, dtype=np.float64),
        np.ascontiguousarray(phi.real), np.ascontiguousarray(phi.imag),
        np.ascontiguousarray(psi.real), np.ascontiguousarray(psi.imag),
        out,
    )
    return complex(out[0], out[1])


def proximity_mass(points, coeffs, radius_inverse: float) -> float:
    """sum over |p_1 - p_2| <= 1/radius_inverse of |c_1 c_2|."""
    tol = math.inf if radius_inverse == 0 else 1.0 / radius_inverse
    return weighted_self_within(points, np.abs(np.asarray(coeffs)), tol)


def double_large_sieve_check(inst: BilinearInstance) -> BoundCheck:
    """|sum phi_r psi_s e(x_r y_s)|^2 against 20 (1 + XY) B_phi(X-set, Y) B_psi(Y-set, X)."""
    if max(len(inst.x_points), len(inst.y_points)) > 10**4:
        raise BudgetExceeded("at most 1e4 points per side")
    X, Y = inst.x_bound, inst.y_bound
    lhs = abs(bilinear_form(inst)) ** 2
    rhs = 20.0 * (1.0 + X * Y) * proximity_mass(inst.x_points, inst.phi, Y) * proximity_mass(
        inst.y_points, inst.psi, X
    )
    return BoundCheck(lhs, rhs)


# -- Type I / Type II sums ----------------------------------------------------------


@njit
def _type_sum_nb(m1s, m2s, d1, d2, s_hl, w_re, w_im, out):
    tot_re = 0.0
    tot_im = 0.0
    for i in range(m1s.shape[0]):
        for j in range(m2s.shape[0]):
            a = m1s[i]
            b = m2s[j]
            if a == b:
                continue
            big = max(a, b)
            small = min(a, b)
            gap = np.sqrt(small) * np.expm1(0.5 * np.log1p((big - small) / small))
            c = 2.0 * gap if a >= b else -2.0 * gap
            in_re = 0.0
            in_im = 0.0
            for k in range(s_hl.shape[0]):
                v = c * s_hl[k]
                v = v - np.rint(v)
                cs = np.cos(2.0 * np.pi * v)
                sn = np.sin(2.0 * np.pi * v)
                in_re += w_re[k] * cs - w_im[k] * sn
                in_im += w_re[k] * sn + w_im[k] * cs
            wt = d1[i] * d2[j]
            tot_re += wt * in_re
            tot_im += wt * in_im
    out[0] = tot_re
    out[1] = tot_im
    return out


def _type_sum_np(m1s, m2s, d1, d2, s_hl, w_re, w_im, out):
    g1, g2 = np.meshgrid(m1s, m2s, indexing="ij")
    wt = np.multiply.outer(d1, d2)
    keep = g1 != g2
    c = 2.0 * power_diff(g1[keep], g2[keep], 0.5)
    wt = wt[keep]
    w = w_re + 1j * w_im
    total = 0j
    rows = max(1, 2_000_000 // max(1, s_hl.size))
    for start in range(0, c.size, rows):
        v = np.multiply.outer(c[start : start + rows], s_hl)
        v = v - np.rint(v)
        total += np.dot(wt[start : start + rows], np.exp(2j * np.pi * v) @ w)
    out[0] = total.real
    out[1] = total.imag
    return out


type_sum_kernel = Kernel("type_sum", _type_sum_nb, _type_sum_np)

EtaMode = Literal["ones", "log", "arbitrary"]


@dataclass(frozen=True)
class TypeSumInstance:
    M1: int
    M2: int
    H: int
    L: int
    xi: np.ndarray | None = None
    eta: np.ndarray | None = None
    eta_mode: EtaMode = "ones"
    cap: float = 1.0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if min(self.M1, self.M2, self.H, self.L) < 1:
            raise DomainError("M1, M2, H, L must be >= 1")
        if self.xi is not None and len(self.xi) != self.H:
            raise DomainError("xi needs one coefficient per h ~ H")
        if self.eta is not None and len(self.eta) != self.L:
            raise DomainError("eta needs one coefficient per l ~ L")
        if self.eta_mode == "arbitrary" and self.eta is None:
            raise DomainError("arbitrary eta_mode needs eta coefficients")
        if self.xi is not None and np.max(np.abs(self.xi)) > self.cap * (1 + 1e-12):
            raise DomainError("|xi_h| exceeds the cap")

    @property
    def x(self) -> int:
        return self.H * self.L

    @property
    def kind(self) -> str:
        return "I" if self.eta_mode in ("ones", "log") else "II"

    def xi_values(self) -> np.ndarray:
        if self.xi is None:
            return np.ones(self.H, dtype=np.complex128)
        return np.asarray(self.xi, dtype=np.complex128)

    def eta_values(self) -> np.ndarray:
        ell = np.arange(self.L + 1, 2 * self.L + 1, dtype=np.float64)
        if self.eta_mode == "ones":
            return np.ones(self.L, dtype=np.complex128)
        if self.eta_mode == "log":
            return np.log(ell).astype(np.complex128)
        return np.asarray(self.eta, dtype=np.complex128)


def type_sum_value(inst: TypeSumInstance) -> complex:
    """The quadruple sum over m1 != m2, h ~ H, l ~ L with weights d(m1) d(m2)."""
    if inst.M1 * inst.M2 * inst.H * inst.L > MAX_TYPE_SUM:
        raise BudgetExceeded(f"M1*M2*H*L exceeds {MAX_TYPE_SUM}")
    m1s = np.arange(inst.M1 + 1, 2 * inst.M1 + 1, dtype=np.float64)
    m2s = np.arange(inst.M2 + 1, 2 * inst.M2 + 1, dtype=np.float64)
    d1 = divisor_counts(inst.M1 + 1, 2 * inst.M1 + 1).astype(np.float64)
    d2 = divisor_counts(inst.M2 + 1, 2 * inst.M2 + 1).astype(np.float64)
    h = np.arange(inst.H + 1, 2 * inst.H + 1, dtype=np.float64)
    ell = np.arange(inst.L + 1, 2 * inst.L + 1, dtype=np.float64)
    s_hl = np.sqrt(np.multiply.outer(h, ell)).ravel()
    w = np.multiply.outer(inst.xi_values(), inst.eta_values()).ravel()
    out = np.zeros(2)
    type_sum_kernel(m1s, m2s, d1, d2, s_hl, np.ascontiguousarray(w.real),
                    np.ascontiguousarray(w.imag), out)
    return complex(out[0], out[1])


def type_sum_naive(inst: TypeSumInstance) -> complex:
    def d(n):
        return sum(1 for k in range(1, n + 1) if n % k == 0)

    xi = inst.xi_values()
    eta = inst.eta_values()
    total = 0j
    for m1 in range(inst.M1 + 1, 2 * inst.M1 + 1):
        for m2 in range(inst.M2 + 1, 2 * inst.M2 + 1):
            if m1 == m2:
                continue
            for i, h in enumerate(range(inst.H + 1, 2 * inst.H + 1)):
                for j, ell in enumerate(range(inst.L + 1, 2 * inst.L + 1)):
                    phase = 2 * (math.sqrt(m1) - math.sqrt(m2)) * math.sqrt(h * ell)
                    total += d(m1) * d(m2) * xi[i] * eta[j] * cmath.exp(2j * math.pi * phase)
    return total


def type_one_bound(x: float, M1: float, M2: float) -> float:
    return x**0.5 * M1**1.25 * M2 + x**0.75 * (M1 * M2) ** 0.875


def type_two_bound(x: float, M1: float, M2: float) -> float:
    return (
        x**0.75 * M1**1.125 * M2**0.875
        + x**0.875 * M1 * M2**0.75
        + x**0.8125 * M1**1.1875 * M2**0.75
        + x**0.9375 * (M1 * M2) ** 0.75
        + x**0.5 * M1 * M2
    )


def in_regime(inst: TypeSumInstance) -> bool:
    # x = H L: H <= x^{1/4} iff H^3 <= L; x^{1/4} <= H <= x^{1/2} iff H <= L <= H^3
    H, L = inst.H, inst.L
    if inst.kind == "I":
        return H**3 <= L
    return H <= L <= H**3


@dataclass(frozen=True)
class TypeSumResult:
    value: complex
    kind: str
    bound: float

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.bound


def type_sum_eval(inst: TypeSumInstance) -> TypeSumResult:
    if not in_regime(inst):
        need = "H <= x^{1/4}" if inst.kind == "I" else "x^{1/4} <= H <= x^{1/2}"
        raise PreconditionError(
            f"Type {inst.kind} sum needs {need} with x = HL; got H={inst.H}, L={inst.L}"
        )
    value = type_sum_value(inst)
    bound_fn = type_one_bound if inst.kind == "I" else type_two_bound
    return TypeSumResult(value, inst.kind, bound_fn(float(inst.x), float(inst.M1), float(inst.M2)))
