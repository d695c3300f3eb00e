"""Closed-form radii, growth bounds and the 1-D maximisations behind them."""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from .quaternion import Ball, DomainError, ImaginaryUnit, Quaternion, exp_slice
from .series import N_MAX, SliceSeries, mobius, shift

SQRT3 = math.sqrt(3.0)
GRID_STEP = 1e-3
GOLDEN_TOL = 1e-8


@dataclass(frozen=True)
class MaximizationResult:
    argmax_r: float
    value: float
    tolerance: float


@dataclass(frozen=True)
class RadiusPair:
    injectivity_radius: float
    covering_radius: float
    injectivity_fit: Optional[MaximizationResult] = None
    covering_fit: Optional[MaximizationResult] = None

    def __post_init__(self):
        if self.covering_radius > self.injectivity_radius + 1e-15:
            raise ValueError(
                f"covering radius {self.covering_radius} exceeds "
                f"injectivity radius {self.injectivity_radius}"
            )


def maximize(objective, lo=0.0, hi=1.0, step=GRID_STEP, tol=GOLDEN_TOL):
    """Grid scan on the open interval, then golden-section polish.

    The grid guards against secondary peaks; the polish runs on the
    three-point bracket around the best grid node.
    """
    n = int(round((hi - lo) / step))
    grid = lo + step * np.arange(1, n)
    values = np.array([objective(r) for r in grid])
    k = int(np.argmax(values))
    if k == 0 or k == len(grid) - 1:
        return MaximizationResult(float(grid[k]), float(values[k]), step)
    bracket = (grid[k - 1], grid[k], grid[k + 1])
    res = optimize.minimize_scalar(
        lambda r: -objective(r), bracket=bracket, method="golden", tol=tol
    )
    r_best = float(res.x)
    v_best = float(-res.fun)
    if v_best < values[k]:
        r_best, v_best = float(grid[k]), float(values[k])
    return MaximizationResult(r_best, v_best, tol)


def _gap(x, r):
    # x - sqrt(x^2 - r^2), written to avoid cancellation for small r
    return r * r / (x + math.sqrt(x * x - r * r))


def bonk_bound(t):
    """Lower bound ``(1 - √3 t) / (1 - t/√3)^3`` for ``Re f'`` at ``|q| = t``."""
    if not 0.0 <= t < 1.0 / SQRT3:
        raise DomainError(f"bonk_bound needs 0 <= t < 1/sqrt(3), got {t}")
    return (1.0 - SQRT3 * t) / (1.0 - t / SQRT3) ** 3


def landau_radius(alpha):
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha / (1.0 + math.sqrt(1.0 - alpha * alpha))


def landau_covering(alpha, r):
    """``R(r) = r (alpha - r) / (1 - alpha r)`` for ``0 < r <= r0(alpha)``."""
    r0 = landau_radius(alpha)
    if not 0.0 < r <= r0 * (1 + 1e-12):
        raise DomainError(f"r must lie in (0, {r0}], got {r}")
    if alpha == 1.0:
        return r * r
    return r * (alpha - r) / (1.0 - alpha * r)


def landau_radii(alpha):
    r0 = landau_radius(alpha)
    return RadiusPair(r0, landau_covering(alpha, r0))


def growth_bound_bloch(t):
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    return math.atanh(t)


def growth_bound_bergman(t, p):
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    return (1.0 - t) ** (-2.0 / p)


# objectives ---------------------------------------------------------------

def bloch_injectivity_objective(r):
    return _gap(math.atanh(r), r)


def bloch_covering_objective(r):
    L = math.atanh(r)
    return L / (r * r) * _gap(L, r) ** 2


def bergman_injectivity_objective(r, p):
    m = (1.0 - r) ** (-2.0 / p)
    return _gap(m, r)


def bergman_covering_objective(r, p, symmetric=False):
    """Covering objective for the Bergman case.

    ``symmetric=True`` uses ``M (M - sqrt(M^2 - r^2))^2 / r^2`` with
    ``M = (1-r)^(-2/p)``: the covering radius ``M rho^2`` of the rescaled map,
    matching the injectivity objective.  ``symmetric=False`` keeps the
    printed inner root ``sqrt(M - r^2)``.
    """
    m = (1.0 - r) ** (-2.0 / p)
    inner = _gap(m, r) if symmetric else m - math.sqrt(m - r * r)
    return m / (r * r) * inner ** 2


def bloch_constants():
    inj = maximize(bloch_injectivity_objective)
    cov = maximize(bloch_covering_objective)
    return RadiusPair(inj.value, cov.value, inj, cov)


def bergman_constants(p, symmetric=True):
    """Injectivity and covering radii for the unit ball of ``A^p``.

    The printed covering objective (``symmetric=False``) grows without bound
    as ``r -> 1``, so its supremum is not a radius; asking for it raises.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    inj = maximize(lambda r: bergman_injectivity_objective(r, p))
    cov = maximize(lambda r: bergman_covering_objective(r, p, symmetric))
    if cov.argmax_r >= 1.0 - 1.5 * GRID_STEP:
        raise DomainError(
            f"covering objective has no interior maximum on (0, 1) for p={p} "
            f"(value {cov.value:.3g} at the grid edge r={cov.argmax_r})"
        )
    return RadiusPair(inj.value, cov.value, inj, cov)


def rotation_covering_constants():
    """``(3 - 2√2, 5 - 2√6, 5/2 - √6)``."""
    r1 = 3.0 - 2.0 * math.sqrt(2.0)
    r2 = 5.0 - 2.0 * math.sqrt(6.0)
    return r1, r2, 2.5 - math.sqrt(6.0)


# geometry -----------------------------------------------------------------

def apollonius_ball(a, b, t):
    """Ball bounded by ``|q - a| = t |q - b|``.

    For ``t < 1`` the closed ball is exactly ``{|q - a| <= t|q - b|}``; for
    ``t > 1`` that set is the closed exterior of the returned ball.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if abs(t - 1.0) <= 1e-9:
        raise DomainError("bisector is a hyperplane, not a ball")
    a = Quaternion.coerce(a)
    b = Quaternion.coerce(b)
    d = 1.0 - t * t
    center = (a - b * (t * t)) / d
    return Ball.of(center, abs(t * abs(a - b) / d))


@dataclass(frozen=True)
class LindelofBounds:
    center_scale: float
    radius20: float
    lower21: float
    upper21: float
    bound22: float


def lindelof_bounds(f0, t):
    """Bounds on a self-map of the ball at ``|q| = t`` given ``f(0) = f0``.

    ``f(q)`` lies in the ball of radius ``radius20`` about ``center_scale*f0``,
    its modulus in ``[lower21, upper21]``, and ``|f(q) - f0| <= bound22``.
    """
    a = abs(Quaternion.coerce(f0))
    if a >= 1.0:
        raise DomainError(f"|f(0)| must be < 1, got {a}")
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    den = 1.0 - t * t * a * a
    return LindelofBounds(
        center_scale=(1.0 - t * t) / den,
        radius20=t * (1.0 - a * a) / den,
        lower21=max(0.0, (a - t) / (1.0 - t * a)),
        upper21=(t + a) / (1.0 + t * a),
        bound22=t * (1.0 - a * a) / (1.0 - t * a),
    )


# extremal functions ---------------------------------------------------------

def extremal_f_alpha(alpha, order=N_MAX):
    """Series of ``q (q + alpha) / (1 + q alpha)``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    c = np.zeros((order + 1, 4))
    c[1, 0] = alpha
    m = np.arange(2, order + 1)
    c[2:, 0] = (-alpha) ** (m - 2) * (1.0 - alpha * alpha)
    return SliceSeries(c, truncated=True, rebuild=lambda n: extremal_f_alpha(alpha, n))


def extremal_cover(alpha, I, theta, v=1.0, order=N_MAX):
    """``q (1 - q alpha e^{-I theta})^-* * (q - alpha e^{I theta}) v``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    I = I if isinstance(I, ImaginaryUnit) else ImaginaryUnit.of(I)
    u = exp_slice(I, theta) * alpha
    inner = mobius(u, v, order - 1)
    out = shift(inner, 1)
    return SliceSeries(out.coeffs, truncated=True,
                       rebuild=lambda n: extremal_cover(alpha, I, theta, v, n))
