"""Sampling checks of injectivity, covering, distortion and norm bounds.

Every check takes a :class:`~sliceball.sampling.SampleConfig` and returns a
:class:`VerificationReport`.  A pass is evidence gathered on a finite,
seeded point set, never a proof.  Checks whose hypotheses are not satisfied
by the input raise :class:`HypothesisNotMet` instead of reporting a failure.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.spatial import cKDTree

from . import kernels
from .bounds import (
    SQRT3,
    extremal_f_alpha,
    landau_covering,
    landau_radius,
    lindelof_bounds,
    rotation_covering_constants,
)
from .quaternion import DomainError, Quaternion, decompose
from .sampling import (
    SampleConfig,
    axis_points,
    ball_points,
    sphere_points,
    unit_imaginary_points,
)
from .series import (
    TAIL_TOL,
    escalate,
    evaluate_many,
    regular_conjugate,
    regular_reciprocal,
    reliable_radius,
    rotation,
    slice_derivative,
    star_product,
    SliceSeries,
)

COLLISION_TOL = 1e-9
COVER_TOL = 1e-9
BONK_TOL = 1e-8
GATE_TOL = 1e-10
SEMINORM_SLACK = 1e-6
LINDELOF_TOL = 1e-9
EQUALITY_TOL = 1e-6
SEMINORM_RADIUS = 0.99
N_CANDIDATES = 32


class HypothesisNotMet(Exception):
    """The input function is outside the class a check applies to."""


@dataclass
class VerificationReport:
    passed: bool
    margin: float
    witness: Optional[Tuple[Quaternion, Quaternion]] = None
    samples_used: int = 0
    check: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failed report must carry a witness")

    def to_json(self):
        return {
            "check": self.check,
            "passed": bool(self.passed),
            "margin": float(self.margin),
            "witness": None if self.witness is None else [list(map(float, w)) for w in self.witness],
            "samples_used": int(self.samples_used),
            "details": _jsonable(self.details),
        }

    @classmethod
    def from_json(cls, data):
        w = data.get("witness")
        return cls(
            passed=bool(data["passed"]),
            margin=float(data["margin"]),
            witness=None if w is None else (Quaternion(*w[0]), Quaternion(*w[1])),
            samples_used=int(data["samples_used"]),
            check=data.get("check", ""),
            details=data.get("details", {}),
        )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Quaternion):
        return [float(c) for c in obj]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _q(row):
    return Quaternion(*map(float, row))


def _prepare(f, radius):
    g = escalate(f, radius)
    tail = g.tail_bound(radius)
    if tail >= TAIL_TOL:
        raise DomainError(
            f"series tail {tail:.3g} at radius {radius} exceeds {TAIL_TOL} "
            f"even at order {g.order}"
        )
    return g


def _working_radius(f, ceiling):
    """Escalate ``f`` toward ``ceiling`` and return it with the largest
    radius at which its tail stays below tolerance."""
    g = escalate(f, ceiling)
    rho = min(ceiling, reliable_radius(g))
    return g.widen(rho), rho


def _value_at(g, q):
    return evaluate_many(g, np.asarray(q, dtype=float).reshape(1, 4))[0]


def _norms(a):
    return np.linalg.norm(a, axis=1)


def _polish(objective, starts, project, maxiter=4000):
    """Nelder-Mead from each start; returns the best (value, point)."""
    best_val, best_x = math.inf, None
    for x0 in starts:
        res = optimize.minimize(
            lambda x: objective(project(x)), x0, method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": maxiter},
        )
        x = project(res.x)
        val = objective(x)
        if val < best_val:
            best_val, best_x = val, x
    return best_val, best_x


def _sphere_min(func, center, radius, cfg, n_polish=4):
    """Minimum of ``func`` (rows -> values) over the sphere about ``center``."""
    center = np.asarray(center, dtype=float)
    pts = np.vstack([sphere_points(cfg.count, radius, cfg.seed, center),
                     axis_points(radius, center)])
    vals = func(pts)
    order = np.argsort(vals)[:n_polish]

    def project(x):
        d = x - center
        n = np.linalg.norm(d)
        if n == 0.0:
            d, n = np.array([1.0, 0, 0, 0]), 1.0
        return center + radius * d / n

    val, x = _polish(lambda x: float(func(x[None, :])[0]), pts[order], project)
    k = order[0]
    if vals[k] <= val:
        return float(vals[k]), pts[k], len(pts)
    return val, x, len(pts)


def _ball_max(func, radius, cfg, center=None, n_polish=4, extra=None):
    """Maximum of ``func`` over the closed ball of ``radius`` about ``center``."""
    c = np.zeros(4) if center is None else np.asarray(center, dtype=float)
    pts = ball_points(cfg.count, radius, cfg.seed, c)
    pts = np.vstack([pts, c[None, :]] + ([extra] if extra is not None else []))
    vals = func(pts)
    order = np.argsort(-vals)[:n_polish]

    def project(x):
        d = x - c
        n = np.linalg.norm(d)
        return x if n <= radius else c + radius * d / n

    val, x = _polish(lambda x: -float(func(x[None, :])[0]), pts[order], project)
    k = order[0]
    if vals[k] >= -val:
        return float(vals[k]), pts[k], len(pts)
    return -val, x, len(pts)


# -- injectivity ---------------------------------------------------------------

def _jacobian(g, x, h=1e-7):
    pts = np.vstack([x + h * e for e in np.eye(4)] + [x - h * e for e in np.eye(4)])
    vals = evaluate_many(g, pts)
    return ((vals[:4] - vals[4:]) / (2 * h)).T


def _preimage(g, target, start, radius, maxiter=40):
    """Newton solve of ``g(x) = target`` from ``start`` inside the ball."""
    x = np.array(start, dtype=float)
    for _ in range(maxiter):
        if np.linalg.norm(x) >= radius:
            return None
        res = _value_at(g, x) - target
        if np.linalg.norm(res) < 1e-14:
            return x
        try:
            step = np.linalg.solve(_jacobian(g, x), res)
        except np.linalg.LinAlgError:
            return None
        x = x - step
        if np.linalg.norm(step) < 1e-16:
            break
    if np.linalg.norm(x) >= radius:
        return None
    return x


def check_injective(f, r, cfg=None):
    """Search ``B(0, r)`` for two separated points with a common image.

    Samples are paired with their nearest neighbour in image space.  Pairs
    that are close in the image but far apart in the domain point at a fold;
    Newton's method then looks for an exact second preimage.
    """
    cfg = cfg or SampleConfig()
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius must lie in (0, 1), got {r}")
    g = _prepare(f, r)
    pts = ball_points(cfg.count, r * (1 - 1e-12), cfg.seed)
    img = evaluate_many(g, pts)
    dist, idx = cKDTree(img).query(img, k=2)
    nn_img, nn = dist[:, 1], idx[:, 1]
    dom = _norms(pts - pts[nn])

    separated = dom > cfg.min_separation
    details = {"radius": r, "order": g.order}
    if not np.any(separated):
        return VerificationReport(True, math.inf, None, len(pts), "injective", details)
    margin = float(np.min(nn_img[separated])) - COLLISION_TOL

    hits = np.flatnonzero(separated & (nn_img < COLLISION_TOL))
    if hits.size:
        i = hits[np.argmin(nn_img[hits])]
        details["stage"] = "sample"
        return VerificationReport(False, margin, (_q(pts[i]), _q(pts[nn[i]])),
                                  len(pts), "injective", details)

    spacing = r * cfg.count ** -0.25
    far = np.flatnonzero(dom > max(cfg.min_separation, 4.0 * spacing))
    ranked = far[np.argsort(nn_img[far] / dom[far])][:N_CANDIDATES]
    for i in ranked:
        x = _preimage(g, img[i], pts[nn[i]], r)
        if x is None or np.linalg.norm(x - pts[i]) <= cfg.min_separation:
            continue
        gap = float(np.linalg.norm(_value_at(g, x) - img[i]))
        if gap < COLLISION_TOL:
            details["stage"] = "newton"
            details["image_gap"] = gap
            return VerificationReport(False, gap - COLLISION_TOL, (_q(pts[i]), _q(x)),
                                      len(pts), "injective", details)
    details["candidates_refined"] = int(len(ranked))
    return VerificationReport(True, margin, None, len(pts), "injective", details)


def real_axis_collision(f, r_far, r_fold):
    """Solve ``f(x) = f(-r_far)`` for ``x`` in ``(-r_fold, 0)`` on the real line.

    For a real-coefficient ``f`` with a critical point at ``-r_fold`` this
    yields two distinct points of ``B(0, r_far)`` sharing an image.
    """
    g = _prepare(f, r_far)

    def h(x):
        return _value_at(g, [x, 0, 0, 0])[0]

    target = h(-r_far)
    x2 = optimize.brentq(lambda x: h(x) - target, -r_fold, 0.0, xtol=1e-15, rtol=1e-15)
    p = Quaternion(-r_far)
    q = Quaternion(x2)
    gap = float(np.linalg.norm(_value_at(g, p) - _value_at(g, q)))
    return p, q, gap


# -- covering ----------------------------------------------------------------

def check_covering(f, r_domain, R_target, cfg=None):
    """Is ``B(f(0), R_target)`` inside ``f(B(0, r_domain))``?

    Uses the minimum of ``|f(q) - f(0)|`` over the sphere ``|q| = r_domain``;
    by openness of the image that minimum is a covering radius.
    """
    cfg = cfg or SampleConfig()
    if not 0.0 < r_domain < 1.0:
        raise DomainError(f"r_domain must lie in (0, 1), got {r_domain}")
    g = _prepare(f, r_domain)
    f0 = _value_at(g, np.zeros(4))
    s, q, n = _sphere_min(lambda P: _norms(evaluate_many(g, P) - f0), np.zeros(4), r_domain, cfg)
    margin = s - R_target
    passed = s >= R_target - COVER_TOL
    witness = None if passed else (_q(q), _q(_value_at(g, q)))
    details = {"boundary_min": s, "argmin": _q(q), "r_domain": r_domain,
               "R_target": R_target, "order": g.order}
    return VerificationReport(passed, margin, witness, n, "covering", details)


# -- seminorms and norms -------------------------------------------------------

def bloch_seminorm(f, cfg=None):
    """Sampled ``sup (1 - |q|^2) |f'(q)|`` over ``|q| <= 0.99``.

    A lower estimate of the true seminorm.  Truncated series are only
    sampled as far out as their tail bound allows.
    """
    cfg = cfg or SampleConfig()
    d, rho = _working_radius(slice_derivative(f), SEMINORM_RADIUS)

    def weight(P):
        return (1.0 - np.sum(P * P, axis=1)) * _norms(evaluate_many(d, P))

    val, _, _ = _ball_max(weight, rho, cfg)
    return val


def bergman_norm(f, p, cfg=None, n_slices=32, n_radial=128, n_angular=256):
    """``sup_I (∫ |f_I|^p dσ)^(1/p)`` by polar quadrature on sampled slices.

    Gauss-Legendre in the radius, the trapezoid rule in the angle; the
    slices are a Fibonacci lattice on the imaginary unit sphere plus i, j, k.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    g, _ = _working_radius(f, 1.0 - 1e-9)
    g = g.widen(1.0)
    x, w = np.polynomial.legendre.leggauss(n_radial)
    rad = 0.5 * (x + 1.0)
    wr = 0.5 * w * rad
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    cos_t = np.outer(rad, np.cos(theta)).ravel()
    sin_t = np.outer(rad, np.sin(theta)).ravel()
    units = np.vstack([np.eye(4)[1:], unit_imaginary_points(n_slices)])
    best = 0.0
    for u in units:
        pts = np.outer(sin_t, u)
        pts[:, 0] += cos_t
        mod = _norms(evaluate_many(g, pts)).reshape(n_radial, n_angular)
        integral = (2.0 / n_angular) * float(np.sum(wr[:, None] * mod ** p))
        best = max(best, integral ** (1.0 / p))
    return best


# -- distortion and growth ------------------------------------------------------

def _bonk_np(t):
    return (1.0 - SQRT3 * t) / (1.0 - t / SQRT3) ** 3


def _gate_normalized(g, name):
    f0 = _value_at(g, np.zeros(4))
    d0 = _value_at(slice_derivative(g), np.zeros(4))
    if np.linalg.norm(f0) > GATE_TOL:
        raise HypothesisNotMet(f"{name}: needs f(0) = 0, got |f(0)| = {np.linalg.norm(f0):.3g}")
    if np.linalg.norm(d0 - np.array([1.0, 0, 0, 0])) > GATE_TOL:
        raise HypothesisNotMet(f"{name}: needs f'(0) = 1, got {_q(d0)!r}")


def check_bonk(f, cfg=None):
    """``Re f'(q) >= (1 - √3|q|)/(1 - |q|/√3)^3`` on ``B(0, 1/√3)``."""
    cfg = cfg or SampleConfig()
    radius = 1.0 / SQRT3
    g = _prepare(f, radius)
    _gate_normalized(g, "bonk")
    seminorm = bloch_seminorm(f, cfg)
    if seminorm > 1.0 + SEMINORM_SLACK:
        raise HypothesisNotMet(f"bonk: Bloch seminorm {seminorm:.6g} exceeds 1")
    d = slice_derivative(g)
    pts = np.vstack([np.zeros((1, 4)), ball_points(cfg.count, radius * (1 - 1e-12), cfg.seed)])
    dv = evaluate_many(d, pts)
    slack = dv[:, 0] - _bonk_np(_norms(pts))
    k = int(np.argmin(slack))
    margin = float(slack[k])
    passed = margin >= -BONK_TOL
    witness = None if passed else (_q(pts[k]), _q(dv[k]))
    return VerificationReport(passed, margin, witness, len(pts), "bonk",
                              {"seminorm": seminorm, "argmin": _q(pts[k])})


def check_growth(f, cfg=None, p=None):
    """Pointwise growth bound at sampled ``q``.

    ``p=None``: ``|f(q)| <= ½ log((1+|q|)/(1-|q|))`` for normalised Bloch
    functions.  Otherwise ``|f(q)| <= (1-|q|)^(-2/p)`` for ``‖f‖_{A^p} <= 1``.
    """
    cfg = cfg or SampleConfig()
    g, rho = _working_radius(f, SEMINORM_RADIUS)
    if p is None:
        _gate_normalized(g, "growth")
        sn = bloch_seminorm(f, cfg)
        if sn > 1.0 + SEMINORM_SLACK:
            raise HypothesisNotMet(f"growth: Bloch seminorm {sn:.6g} exceeds 1")
        gate = {"seminorm": sn}
    else:
        nrm = bergman_norm(f, p)
        if nrm > 1.0 + 1e-4:
            raise HypothesisNotMet(f"growth: A^{p} norm {nrm:.6g} exceeds 1")
        gate = {"bergman_norm": nrm, "p": p}
    pts = ball_points(cfg.count, rho, cfg.seed)
    vals = _norms(evaluate_many(g, pts))
    t = _norms(pts)
    bound = np.arctanh(t) if p is None else (1.0 - t) ** (-2.0 / p)
    slack = bound - vals
    k = int(np.argmin(slack))
    margin = float(slack[k])
    passed = margin >= -COLLISION_TOL
    witness = None if passed else (_q(pts[k]), _q(evaluate_many(g, pts[k:k + 1])[0]))
    return VerificationReport(passed, margin, witness, len(pts), "growth", gate)


def check_lindelof(f, cfg=None, expect_equality=False):
    """Lindelöf-type bounds for a self-map of the unit ball at sampled points.

    ``expect_equality`` additionally demands that the ball bound holds with
    equality, which characterises regular Möbius maps.
    """
    cfg = cfg or SampleConfig()
    g, rho = _working_radius(f, SEMINORM_RADIUS)
    pts = ball_points(cfg.count, rho, cfg.seed)
    vals = evaluate_many(g, pts)
    mods = _norms(vals)
    if np.max(mods) >= 1.0:
        k = int(np.argmax(mods))
        raise HypothesisNotMet(f"lindelof: |f| = {mods[k]:.6g} >= 1 at a sample; not a self-map")
    f0 = _value_at(g, np.zeros(4))
    a = float(np.linalg.norm(f0))
    if a >= 1.0:
        raise HypothesisNotMet("lindelof: |f(0)| >= 1")
    t = _norms(pts)
    den = 1.0 - t * t * a * a
    scale = (1.0 - t * t) / den
    m20 = t * (1.0 - a * a) / den - _norms(vals - scale[:, None] * f0)
    m21lo = mods - np.maximum(0.0, (a - t) / (1.0 - t * a))
    m21hi = (t + a) / (1.0 + t * a) - mods
    m22 = t * (1.0 - a * a) / (1.0 - t * a) - _norms(vals - f0)
    allm = np.vstack([m20, m21lo, m21hi, m22])
    worst = allm.min(axis=0)
    k = int(np.argmin(worst))
    margin = float(worst[k])
    passed = margin >= -LINDELOF_TOL
    details = {
        "radius": rho,
        "min_margin_20": float(m20.min()),
        "min_margin_21_lower": float(m21lo.min()),
        "min_margin_21_upper": float(m21hi.min()),
        "min_margin_22": float(m22.min()),
        "max_abs_margin_20": float(np.max(np.abs(m20))),
    }
    if expect_equality:
        j = int(np.argmax(np.abs(m20)))
        if np.abs(m20[j]) >= EQUALITY_TOL:
            passed = False
            k = j
    witness = None if passed else (_q(pts[k]), _q(vals[k]))
    return VerificationReport(passed, margin, witness, len(pts), "lindelof", details)


# -- rotation covering ----------------------------------------------------------

def check_rotation_covering(f, cfg=None):
    """Run the rotation construction and measure the ball it certifies.

    1. maximise ``(1 - |q|)|f'(q)|`` to find ``a``;
    2. ``r = (1 - |a|)/2``, ``u = a/|a|`` (``u = 1`` for real ``a``);
    3. rotate ``f`` by ``u``;
    4. take the minimum of ``|f_u(q) - f_u(c)|`` over a shrunken sphere about
       ``c`` (``c = |a|``, or ``a`` itself when real) as the covering radius.
    """
    cfg = cfg or SampleConfig()
    if f.truncated:
        raise HypothesisNotMet("rotation: needs a polynomial, regular on the closed ball")
    g = f.widen(1.0)
    d = slice_derivative(g)
    d0 = _value_at(d, np.zeros(4))
    if np.linalg.norm(d0 - np.array([1.0, 0, 0, 0])) > GATE_TOL:
        raise HypothesisNotMet(f"rotation: needs f'(0) = 1, got {_q(d0)!r}")

    def psi(P):
        return (1.0 - _norms(P)) * _norms(evaluate_many(d, P))

    psi_max, a_arr, n1 = _ball_max(psi, 1.0, cfg)
    a = _q(a_arr)
    r = 0.5 * (1.0 - abs(a))
    da = float(np.linalg.norm(_value_at(d, a_arr)))
    _, y, _ = decompose(a)
    r1_coeff, r2_coeff, final = rotation_covering_constants()
    if y < 1e-12:
        u = Quaternion(1.0)
        h = g
        center = a_arr
        sphere_r = (1.0 - math.sqrt(2.0) / 2.0) * r
        guaranteed_radius = r1_coeff * r * da
    else:
        u = a / abs(a)
        h = rotation(g, u)
        center = np.array([abs(a), 0.0, 0.0, 0.0])
        sphere_r = (1.0 - math.sqrt(6.0) / 3.0) * r
        guaranteed_radius = r2_coeff * r * da

    ratio, _, n2 = _ball_max(lambda P: _norms(evaluate_many(d, P)), r, cfg, center=a_arr)
    hc = _value_at(h, center)
    s, q, n3 = _sphere_min(lambda P: _norms(evaluate_many(h, P) - hc), center, sphere_r, cfg)
    margin = s - final
    passed = s >= final - COVER_TOL
    witness = None if passed else (_q(q), _q(_value_at(h, q)))
    details = {
        "a": a, "psi_max": psi_max, "r": r, "u": u,
        "center": _q(center), "sphere_radius": sphere_r,
        "derivative_ratio": ratio / da if da else math.inf,
        "guaranteed_radius": guaranteed_radius, "achieved_radius": s,
        "target_radius": final,
    }
    return VerificationReport(passed, margin, witness, n1 + n2 + n3, "rotation", details)


# -- sharpness ----------------------------------------------------------------

def landau_sharpness(alpha, cfg=None, n_grid=50):
    """Check that the extremal map attains the injectivity and covering radii.

    (i) its slice derivative vanishes at ``-r0``; (ii) ``f(-r) = -R(r)`` on a
    grid of ``r`` in ``(0, r0]``; (iii) the sampled injectivity search passes
    at ``0.99 r0`` while a real-axis root solve finds a collision just
    beyond ``r0``.
    """
    cfg = cfg or SampleConfig()
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    r0 = landau_radius(alpha)
    # 1.05 r0 leaves the ball as alpha -> 1; stay where the series is reliable
    target = min(1.05 * r0, 0.5 * (r0 + alpha))
    g = escalate(extremal_f_alpha(alpha), target)
    r_far = min(target, reliable_radius(g))
    if r_far <= r0 * (1 + 1e-3):
        raise DomainError(f"series order {g.order} cannot resolve radii beyond r0 = {r0:.6g}")
    f = _prepare(g, r_far)
    d = slice_derivative(f)

    dz = float(np.linalg.norm(_value_at(d, [-r0, 0, 0, 0])))
    grid = r0 * np.arange(1, n_grid + 1) / n_grid
    pts = np.zeros((n_grid, 4))
    pts[:, 0] = -grid
    expected = np.array([landau_covering(alpha, float(r)) for r in grid])
    errs = _norms(evaluate_many(f, pts) + expected[:, None] * np.array([1.0, 0, 0, 0]))
    k = int(np.argmax(errs))

    inj = check_injective(f, 0.99 * r0, cfg)
    p, q, gap = real_axis_collision(f, r_far, r0)
    collided = gap < COLLISION_TOL and abs(p - q) > cfg.min_separation

    sub = {
        "derivative_zero": dz < 1e-8,
        "covering_identity": float(errs[k]) < COLLISION_TOL,
        "injective_inside": inj.passed,
        "collision_outside": collided,
    }
    passed = all(sub.values())
    margin = min(1e-8 - dz, COLLISION_TOL - float(errs[k]), inj.margin, COLLISION_TOL - gap)
    witness = None
    if not sub["derivative_zero"]:
        witness = (Quaternion(-r0), _q(_value_at(d, [-r0, 0, 0, 0])))
    elif not sub["covering_identity"]:
        witness = (_q(pts[k]), _q(evaluate_many(f, pts[k:k + 1])[0]))
    elif not sub["injective_inside"]:
        witness = inj.witness
    elif not sub["collision_outside"]:
        witness = (p, q)
    details = {
        "alpha": alpha, "r0": r0, "order": f.order,
        "derivative_at_minus_r0": dz, "max_identity_error": float(errs[k]),
        "injective_radius": 0.99 * r0, "injective_margin": inj.margin,
        "collision_radius": r_far, "collision_pair": [p, q], "collision_gap": gap,
        "subchecks": sub,
    }
    return VerificationReport(passed, margin, witness, inj.samples_used + n_grid,
                              "sharpness", details)


# -- algebra ------------------------------------------------------------------

def random_series(rng, max_order=16, max_norm=1.0):
    order = int(rng.integers(0, max_order + 1))
    g = rng.standard_normal((order + 1, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = max_norm * rng.random(order + 1) ** 0.25
    return SliceSeries(g * rad[:, None])


def pointwise_star_many(f, g, points):
    """Vectorised ``f(q) g(f(q)^-1 q f(q))`` (0 where ``f(q) = 0``)."""
    fq = evaluate_many(f, points)
    n2 = np.sum(fq * fq, axis=1)
    safe = np.where(n2 > 0, n2, 1.0)
    finv = fq * np.array([1.0, -1, -1, -1]) / safe[:, None]
    moved = kernels.qmul_np(kernels.qmul_np(finv, points), fq)
    moved[n2 == 0] = 0.0
    out = kernels.qmul_np(fq, evaluate_many(g, moved))
    out[n2 == 0] = 0.0
    return out


def transform_T_many(f, points):
    fc = evaluate_many(regular_conjugate(f), points)
    n2 = np.sum(fc * fc, axis=1)
    inv = fc * np.array([1.0, -1, -1, -1]) / n2[:, None]
    return kernels.qmul_np(kernels.qmul_np(inv, points), fc), np.sqrt(n2)


def check_algebra(cfg=None, n_series=500, max_order=16, n_points=1000, f=None):
    """Identities of the regular product on random series.

    Tolerances: real symmetrisation and associativity 1e-12 coefficientwise,
    the pointwise product formula 1e-9, ``T_{f^c}∘T_f = id`` 1e-10, and the
    reciprocal residual 1e-10 when ``|a_0| > 0.1``.
    """
    cfg = cfg or SampleConfig()
    rng = np.random.default_rng(cfg.seed)
    pts = ball_points(n_points, 0.5, cfg.seed)
    worst = {"symmetrization_imag": 0.0, "associativity": 0.0, "pointwise_product": 0.0,
             "T_inverse": 0.0, "reciprocal_residual": 0.0}
    tol = {"symmetrization_imag": 1e-12, "associativity": 1e-12, "pointwise_product": 1e-9,
           "T_inverse": 1e-10, "reciprocal_residual": 1e-10}
    where = {}
    recips = 0
    scaled = 0.0
    for n in range(n_series):
        ff = f if f is not None else random_series(rng, max_order)
        gg = random_series(rng, max_order)
        hh = random_series(rng, max_order)

        err = float(np.max(np.abs(star_product(ff, regular_conjugate(ff), 4 * max_order).coeffs[:, 1:]),
                           initial=0.0))
        err = max(err, float(np.max(np.abs(star_product(regular_conjugate(ff), ff, 4 * max_order).coeffs[:, 1:]),
                                    initial=0.0)))
        _record(worst, where, "symmetrization_imag", err, n)

        left = star_product(star_product(ff, gg, 4 * max_order), hh, 4 * max_order)
        right = star_product(ff, star_product(gg, hh, 4 * max_order), 4 * max_order)
        a, b = left.coeffs, right.coeffs
        m = max(len(a), len(b))
        a = np.vstack([a, np.zeros((m - len(a), 4))])
        b = np.vstack([b, np.zeros((m - len(b), 4))])
        _record(worst, where, "associativity", float(np.max(np.abs(a - b))), n)

        fq = evaluate_many(ff, pts)
        mask = _norms(fq) > 1e-8
        lhs = evaluate_many(star_product(ff, gg, 4 * max_order), pts)
        rhs = pointwise_star_many(ff, gg, pts)
        if np.any(mask):
            _record(worst, where, "pointwise_product", float(np.max(_norms(lhs - rhs)[mask])), n)

        moved, fc_mod = transform_T_many(ff, pts)
        ok = fc_mod > 1e-6
        back, back_mod = transform_T_many(regular_conjugate(ff), moved)
        ok &= back_mod > 1e-6
        if np.any(ok):
            _record(worst, where, "T_inverse", float(np.max(_norms(back - pts)[ok])), n)

        if np.linalg.norm(ff.coeffs[0]) > 0.1:
            recips += 1
            rec = regular_reciprocal(ff, ff.order)
            prod = star_product(ff, rec, ff.order).coeffs
            target = np.zeros_like(prod)
            target[0, 0] = 1.0
            res = np.abs(prod - target)
            _record(worst, where, "reciprocal_residual", float(np.max(res)), n)
            # residual relative to the size of the terms that cancel
            scale = _abs_star(ff.coeffs, rec.coeffs, ff.order)
            scaled = max(scaled, float(np.max(np.max(res, axis=1) / scale)))

    sub = {k: worst[k] <= tol[k] for k in worst}
    passed = all(sub.values())
    margin = min(tol[k] - worst[k] for k in worst)
    witness = None
    if not passed:
        bad = next(k for k in worst if not sub[k])
        witness = (Quaternion(float(where[bad])), Quaternion(worst[bad]))
    details = {"max_errors": worst, "tolerances": tol, "subchecks": sub,
               "worst_series_index": where, "reciprocals_checked": recips,
               "reciprocal_scaled_residual": scaled}
    return VerificationReport(passed, margin, witness, n_series * n_points, "algebra", details)


def _abs_star(a, b, order):
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    return np.array([sum(na[k] * nb[n - k] for k in range(max(0, n - len(nb) + 1), min(n, len(na) - 1) + 1))
                     for n in range(order + 1)])


def _record(worst, where, key, value, n):
    if value > worst[key]:
        worst[key] = value
        where[key] = n
