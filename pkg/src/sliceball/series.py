"""Truncated power series ``f(q) = sum q^n a_n`` and their regular algebra.

A :class:`SliceSeries` holds quaternion coefficients in an ``(N+1, 4)`` array.
Series that are exact polynomials carry ``truncated=False``; series cut from
an infinite expansion (reciprocals, Möbius maps, long products) carry
``truncated=True`` and, when they know how, a ``rebuild`` callable that
regenerates them at a higher order.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import kernels
from .quaternion import (
    ONE,
    DomainError,
    ImaginaryUnit,
    Quaternion,
    as_array,
    conj,
    decompose,
    dot,
    inverse,
)

N_MAX = 64
R_EVAL = 0.95
ESCALATION_CAP = 512
TAIL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SliceSeries:
    coeffs: np.ndarray
    truncated: bool = False
    r_eval: float = R_EVAL
    rebuild: Optional[Callable[[int], "SliceSeries"]] = field(default=None, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 1 and c.size == 4:
            c = c.reshape(1, 4)
        if c.ndim != 2 or c.shape[1] != 4 or c.shape[0] == 0:
            raise ValueError(f"coefficients must have shape (N+1, 4), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, coeffs, **kw):
        """Accept quaternions, scalars, or 4-sequences per coefficient."""
        return cls(as_array([Quaternion.coerce(a) for a in coeffs]), **kw)

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    def coeff(self, n):
        if n > self.order:
            return Quaternion()
        return Quaternion(*map(float, self.coeffs[n]))

    def __call__(self, q):
        return evaluate(self, q)

    def __len__(self):
        return self.coeffs.shape[0]

    def is_real(self, tol=0.0):
        return bool(np.all(np.abs(self.coeffs[:, 1:]) <= tol))

    def tail_bound(self, radius):
        """Bound on the neglected tail at ``|q| <= radius``.

        Uses ``max |a_n| * radius^(N+1) / (1 - radius)`` with the maximum
        over the upper half ``n >= N/2`` of the stored coefficients, the
        best available proxy for the unseen ones; zero for exact polynomials.
        """
        if not self.truncated:
            return 0.0
        if radius >= 1.0:
            return math.inf
        m = float(np.max(np.linalg.norm(self.coeffs[self.order // 2:], axis=1)))
        return m * radius ** (self.order + 1) / (1.0 - radius)

    def widen(self, radius):
        return replace(self, r_eval=float(radius))

    def to_json(self):
        return {"coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, data):
        if "coeffs" not in data:
            raise ValueError("function spec needs a 'coeffs' list")
        rows = data["coeffs"]
        if not rows:
            raise ValueError("empty coefficient list")
        return cls(np.array([Quaternion.from_json(r) for r in rows], dtype=float))

    def allclose(self, other, tol=1e-12):
        a, b = _pad(self.coeffs, other.coeffs)
        return bool(np.max(np.abs(a - b), initial=0.0) <= tol)

    def __repr__(self):
        flag = ", truncated" if self.truncated else ""
        return f"SliceSeries(order={self.order}{flag})"


def _pad(a, b):
    n = max(a.shape[0], b.shape[0])
    out_a = np.zeros((n, 4))
    out_b = np.zeros((n, 4))
    out_a[: a.shape[0]] = a
    out_b[: b.shape[0]] = b
    return out_a, out_b


def _trim(c):
    """Drop trailing exactly-zero coefficients, keeping at least one."""
    nz = np.flatnonzero(np.any(c != 0.0, axis=1))
    return c[: (nz[-1] + 1 if nz.size else 1)]


def identity():
    return SliceSeries(np.array([[0.0, 0, 0, 0], [1.0, 0, 0, 0]]))


def constant(c):
    return SliceSeries(as_array([c]))


def polynomial(*coeffs):
    return SliceSeries.from_coeffs(coeffs)


# -- evaluation --------------------------------------------------------------

def _check_radius(f, norms):
    if norms.size and float(np.max(norms)) > f.r_eval * (1 + 1e-12):
        raise DomainError(
            f"outside evaluation radius: |q| = {float(np.max(norms)):.6g} > {f.r_eval}"
        )


def evaluate(f, q):
    """``f(q)`` by nested left multiplication."""
    q = Quaternion.coerce(q)
    _check_radius(f, np.array([abs(q)]))
    out = kernels.horner(f.coeffs, np.asarray(q, dtype=float).reshape(1, 4))
    return Quaternion(*map(float, out[0]))


def evaluate_many(f, points):
    """Evaluate at every row of an ``(M, 4)`` array; returns ``(M, 4)``."""
    pts = as_array(points)
    _check_radius(f, np.linalg.norm(pts, axis=1))
    return kernels.horner(f.coeffs, pts)


def escalate(f, radius, tol=TAIL_TOL, cap=ESCALATION_CAP):
    """Raise the truncation order until the tail at ``radius`` is below ``tol``.

    Order doubles each step and stops at ``cap``.  The returned series has its
    evaluation radius widened to ``radius`` whatever the final tail; callers
    that need a guarantee compare ``tail_bound`` themselves.
    """
    g = f
    while g.tail_bound(radius) >= tol and g.rebuild is not None and g.order < cap:
        g = g.rebuild(min(max(2 * g.order, 8), cap))
    if g.r_eval < radius:
        g = g.widen(radius)
    return g


def reliable_radius(f, tol=TAIL_TOL, ceiling=1.0):
    """Largest radius (up to ``ceiling``) whose tail bound stays below ``tol``."""
    if not f.truncated:
        return ceiling
    lo, hi = 0.0, min(ceiling, 1.0)
    if f.tail_bound(hi) < tol:
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if f.tail_bound(mid) < tol:
            lo = mid
        else:
            hi = mid
    return lo


# -- algebra -----------------------------------------------------------------

def slice_derivative(f, n=1):
    c = f.coeffs
    for _ in range(n):
        if c.shape[0] == 1:
            c = np.zeros((1, 4))
        else:
            c = c[1:] * np.arange(1, c.shape[0])[:, None]
    return SliceSeries(c, truncated=f.truncated, r_eval=f.r_eval,
                       rebuild=_chain(f.rebuild, lambda g: slice_derivative(g, n)))


def _chain(rebuild, op):
    if rebuild is None:
        return None
    return lambda order: op(rebuild(order))


def star_product(f, g, max_order=N_MAX):
    """Regular product: coefficient n is ``sum_k a_k b_(n-k)``."""
    full = f.order + g.order
    limit = max_order
    for h in (f, g):
        if h.truncated:
            limit = min(limit, h.order)
    order = min(full, limit)
    c = kernels.star(f.coeffs, g.coeffs, order)
    truncated = f.truncated or g.truncated or order < full
    rebuild = None
    if truncated and (f.rebuild or not f.truncated) and (g.rebuild or not g.truncated):
        def rebuild(n, f=f, g=g):
            ff = f.rebuild(n) if f.truncated else f
            gg = g.rebuild(n) if g.truncated else g
            return star_product(ff, gg, max_order=n)
    if not truncated:
        c = _trim(c)
    return SliceSeries(c, truncated=truncated, r_eval=min(f.r_eval, g.r_eval), rebuild=rebuild)


def pointwise_star(f, g, q):
    """``f(q) g(f(q)^-1 q f(q))``, or 0 where ``f(q) = 0``."""
    fq = evaluate(f, q)
    if fq.norm2() == 0.0:
        return Quaternion()
    q = Quaternion.coerce(q)
    return fq * evaluate(g, inverse(fq) * q * fq)


def regular_conjugate(f):
    c = f.coeffs.copy()
    c[:, 1:] *= -1.0
    return SliceSeries(c, truncated=f.truncated, r_eval=f.r_eval,
                       rebuild=_chain(f.rebuild, regular_conjugate))


def symmetrization(f, max_order=N_MAX):
    """``f * f^c``; coefficients are real up to rounding."""
    return star_product(f, regular_conjugate(f), max_order=max(max_order, 2 * f.order))


def regular_reciprocal(f, order=N_MAX):
    """``(f^s)^-1 f^c`` as a series truncated at ``order``."""
    a0 = f.coeff(0)
    if a0.norm2() == 0.0:
        raise DomainError("reciprocal pole at origin")
    sym = symmetrization(f, max_order=2 * f.order)
    real = sym.coeffs[:, 0]
    exact = not f.truncated and _trim(sym.coeffs).shape[0] == 1
    inv = kernels.invert_real(real, order)
    inv_q = np.zeros((order + 1, 4))
    inv_q[:, 0] = inv
    c = kernels.star(inv_q, regular_conjugate(f).coeffs, order)
    if exact:
        return SliceSeries(_trim(c), r_eval=f.r_eval)
    rebuild = None
    if not f.truncated:
        rebuild = lambda n, f=f: regular_reciprocal(f, n)  # noqa: E731
    elif f.rebuild is not None:
        rebuild = lambda n, f=f: regular_reciprocal(f.rebuild(n), n)  # noqa: E731
    return SliceSeries(c, truncated=True, r_eval=f.r_eval, rebuild=rebuild)


def transform_T(f, q):
    """``f^c(q)^-1 q f^c(q)``: a map of ``B`` that preserves each sphere ``x + yS``."""
    fc = evaluate(regular_conjugate(f), q)
    if abs(fc) <= 1e-12:
        raise DomainError("zero divisor in T_f")
    q = Quaternion.coerce(q)
    return inverse(fc) * q * fc


def shift(f, k=1):
    """Multiply by ``q^k`` (real coefficients commute, so this is a plain shift)."""
    c = np.vstack([np.zeros((k, 4)), f.coeffs])
    return SliceSeries(c, truncated=f.truncated, r_eval=f.r_eval,
                       rebuild=_chain(f.rebuild, lambda g: shift(g, k)))


def right_scale(f, v):
    """``f(q) v`` for a constant quaternion ``v``."""
    v = np.asarray(Quaternion.coerce(v), dtype=float)
    c = kernels.qmul_np(f.coeffs, v[None, :])
    return SliceSeries(c, truncated=f.truncated, r_eval=f.r_eval,
                       rebuild=_chain(f.rebuild, lambda g: right_scale(g, v)))


def mobius(u, v=ONE, order=N_MAX):
    """Regular Möbius map ``(1 - q ū)^-* * (q - u) v`` of the unit ball."""
    u = Quaternion.coerce(u)
    v = Quaternion.coerce(v)
    if abs(u) >= 1.0:
        raise DomainError(f"mobius needs |u| < 1, got {abs(u)}")
    if abs(abs(v) - 1.0) >= 1e-12:
        raise DomainError(f"mobius needs |v| = 1, got {abs(v)}")
    denom = SliceSeries.from_coeffs([ONE, -conj(u)])
    numer = SliceSeries.from_coeffs([-(u * v), v])
    out = star_product(regular_reciprocal(denom, order), numer, max_order=order)
    if abs(u) == 0.0:
        return SliceSeries(_trim(out.coeffs))
    return replace(out, truncated=True, rebuild=lambda n: mobius(u, v, n))


def rotation(f, u):
    """Slice regular rotation: coefficients ``u^n a_n`` for a unit ``u``."""
    u = Quaternion.coerce(u)
    if abs(abs(u) - 1.0) >= 1e-12:
        raise DomainError(f"rotation needs |u| = 1, got {abs(u)}")
    powers = np.empty((f.order + 1, 4))
    p = ONE
    for n in range(f.order + 1):
        powers[n] = p
        p = p * u
    c = kernels.qmul_np(powers, f.coeffs)
    return SliceSeries(c, truncated=f.truncated, r_eval=f.r_eval,
                       rebuild=_chain(f.rebuild, lambda g: rotation(g, u)))


# -- slices ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SliceHolomorphic:
    """Holomorphic ``F(z) = sum z^n (re_n + im_n I)`` on the slice ``C_I``."""

    re: np.ndarray
    im: np.ndarray
    unit: ImaginaryUnit

    def complex_coeffs(self):
        return self.re + 1j * self.im

    def __call__(self, z):
        """Evaluate at a Python complex ``x + iy`` standing for ``x + yI``."""
        return complex(np.polynomial.polynomial.polyval(complex(z), self.complex_coeffs()))

    def at(self, q):
        """Evaluate at a quaternion lying in ``C_I``; returns a quaternion."""
        q = Quaternion.coerce(q)
        z = complex(q.w, dot(q, self.unit.u))
        val = self(z)
        return Quaternion(val.real) + self.unit.u * val.imag


def split(f, I, J):
    """Resolve ``f_I = F + G J`` with ``F, G`` holomorphic on ``C_I``."""
    I = I if isinstance(I, ImaginaryUnit) else ImaginaryUnit.of(I)
    J = J if isinstance(J, ImaginaryUnit) else ImaginaryUnit.of(J)
    if abs(dot(I.u, J.u)) > 1e-12:
        raise DomainError("J must be orthogonal to I")
    IJ = I.u * J.u
    c = f.coeffs
    F = SliceHolomorphic(c[:, 0].copy(), c @ np.asarray(I.u), I)
    G = SliceHolomorphic(c @ np.asarray(J.u), c @ np.asarray(IJ), I)
    return F, G


def represent(f_on_slice, I, q):
    """Extend values on ``C_I`` to ``q`` through the representation formula.

    ``f(q) = ½(1 - I_q I) f(z) + ½(1 + I_q I) f(z̄)`` with ``q = x + y I_q`` and
    ``z = x + y I``.
    """
    I = I if isinstance(I, ImaginaryUnit) else ImaginaryUnit.of(I)
    x, y, Iq = decompose(q)
    z = Quaternion(x) + I.u * y
    zbar = Quaternion(x) - I.u * y
    prod = Iq.u * I.u
    return (ONE - prod) * f_on_slice(z) * 0.5 + (ONE + prod) * f_on_slice(zbar) * 0.5
