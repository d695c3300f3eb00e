"""Quaternion value type and slice decomposition ``q = x + yI``."""
import math
from typing import NamedTuple

import numpy as np

UNIT_TOL = 1e-12
REAL_TOL = 1e-14
SPHERE_TOL = 1e-10


class DomainError(ValueError):
    """An operation was called outside the set where it is defined."""


class Quaternion(NamedTuple):
    """``w + x i + y j + z k`` with float components."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    # make numpy scalars defer to the reflected operators below
    __array_ufunc__ = None

    @classmethod
    def coerce(cls, value):
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return cls(float(value), 0.0, 0.0, 0.0)
        arr = np.asarray(value, dtype=float).reshape(4)
        return cls(*map(float, arr))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            c = float(other)
            return Quaternion(self.w * c, self.x * c, self.y * c, self.z * c)
        return mul(self, Quaternion.coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return mul(Quaternion.coerce(other), self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            c = float(other)
            return Quaternion(self.w / c, self.x / c, self.y / c, self.z / c)
        return mul(self, inverse(Quaternion.coerce(other)))

    def __abs__(self):
        return math.sqrt(self.norm2())

    def norm2(self):
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    @property
    def real(self):
        return self.w

    @property
    def imag(self):
        return Quaternion(0.0, self.x, self.y, self.z)

    def conj(self):
        return conj(self)

    def to_array(self):
        return np.array(self, dtype=float)

    def to_json(self):
        return [self.w, self.x, self.y, self.z]

    @classmethod
    def from_json(cls, data):
        if len(data) != 4:
            raise ValueError(f"quaternion needs 4 components, got {len(data)}")
        return cls(*map(float, data))

    def isclose(self, other, tol=1e-12):
        return abs(self - Quaternion.coerce(other)) <= tol

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def mul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return Quaternion(
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def conj(q):
    return Quaternion(q[0], -q[1], -q[2], -q[3])


def inverse(q):
    q = Quaternion.coerce(q)
    n2 = q.norm2()
    if n2 == 0.0:
        raise DomainError("zero quaternion")
    return Quaternion(q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2)


def dot(a, b):
    """Real inner product on R^4."""
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]


class ImaginaryUnit(NamedTuple):
    """Element of the unit sphere of purely imaginary quaternions."""

    u: Quaternion

    @classmethod
    def of(cls, value, tol=UNIT_TOL):
        q = Quaternion.coerce(value)
        if abs(q.w) > tol or abs(abs(q) - 1.0) > tol:
            raise DomainError(f"{q!r} is not a unit imaginary quaternion")
        return cls(q)

    @classmethod
    def normalized(cls, value):
        q = Quaternion.coerce(value).imag
        n = abs(q)
        if n == 0.0:
            raise DomainError("zero imaginary part has no direction")
        return cls(q / n)

    def __mul__(self, other):
        return self.u * other

    def __rmul__(self, other):
        return Quaternion.coerce(other) * self.u

    def __neg__(self):
        return ImaginaryUnit(-self.u)


def decompose(q):
    """Split ``q`` as ``x + y I`` with ``y >= 0``; real ``q`` gets ``I = i``."""
    q = Quaternion.coerce(q)
    im = q.imag
    y = abs(im)
    if y < REAL_TOL:
        return q.w, 0.0, ImaginaryUnit(I)
    return q.w, y, ImaginaryUnit(im / y)


def compose(x, y, unit):
    u = unit.u if isinstance(unit, ImaginaryUnit) else Quaternion.coerce(unit)
    return Quaternion(x) + u * y


def same_sphere(p, q, tol=SPHERE_TOL):
    p = Quaternion.coerce(p)
    q = Quaternion.coerce(q)
    return abs(p.w - q.w) <= tol and abs(abs(p.imag) - abs(q.imag)) <= tol


def exp_slice(unit, theta):
    """``e^{I theta} = cos(theta) + I sin(theta)``."""
    u = unit.u if isinstance(unit, ImaginaryUnit) else Quaternion.coerce(unit)
    return Quaternion(math.cos(theta)) + u * math.sin(theta)


class Ball(NamedTuple):
    center: Quaternion
    radius: float

    @classmethod
    def of(cls, center, radius):
        if radius < 0 or not math.isfinite(radius):
            raise DomainError(f"ball radius must be finite and >= 0, got {radius}")
        return cls(Quaternion.coerce(center), float(radius))

    def contains(self, q, slack=0.0):
        return abs(Quaternion.coerce(q) - self.center) <= self.radius + slack


def as_array(qs):
    """Stack quaternions (or an existing array) into an ``(n, 4)`` float array."""
    if isinstance(qs, np.ndarray):
        return np.asarray(qs, dtype=float).reshape(-1, 4)
    return np.array([tuple(Quaternion.coerce(q)) for q in qs], dtype=float).reshape(-1, 4)
