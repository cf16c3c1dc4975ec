"""Numeric oracle: direct Melnikov line integrals on traced level ovals.

Completely independent of the symbolic pipeline: the Hamiltonian flow is
integrated in double precision (RK4 with per-step Newton projection back to
the level set), orbits close on the positive-x section with bisection
refinement of the crossing time, and the perturbation one-form is integrated
with 4-point Gauss-Legendre quadrature on cubic dense output per substep.
Fitting the sampled integrals in the fractional-power basis recovers the
leading expansion coefficients for comparison against the exact ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .poly import ParamPoly

Rat = Union[int, Fraction]

__all__ = [
    "FitResult",
    "NumericSystem",
    "OrbitSample",
    "TraceError",
    "fit_expansion",
    "h_ladder",
    "melnikov_numeric",
    "trace_level_curve",
]

# 4-point Gauss-Legendre nodes and weights on [0, 1]
_GL_NODES = [0.5 - math.sqrt(525 + 70 * math.sqrt(30)) / 70 / 2,
             0.5 - math.sqrt(525 - 70 * math.sqrt(30)) / 70 / 2,
             0.5 + math.sqrt(525 - 70 * math.sqrt(30)) / 70 / 2,
             0.5 + math.sqrt(525 + 70 * math.sqrt(30)) / 70 / 2]
_GL_WEIGHTS = [(18 - math.sqrt(30)) / 72, (18 + math.sqrt(30)) / 72,
               (18 + math.sqrt(30)) / 72, (18 - math.sqrt(30)) / 72]


class TraceError(RuntimeError):
    pass


def _compile_poly(terms: Mapping[tuple[int, int], float]) -> Callable[[float, float], float]:
    if not terms:
        return lambda x, y: 0.0
    parts = []
    for (i, j), c in sorted(terms.items()):
        expr = repr(c)
        if i:
            expr += f"*x**{i}" if i > 1 else "*x"
        if j:
            expr += f"*y**{j}" if j > 1 else "*y"
        parts.append(expr)
    return eval("lambda x, y: " + " + ".join(parts))  # noqa: S307 - generated source


def _poly_terms(p: ParamPoly, values: Mapping[str, Rat], x: str, y: str
                ) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    ix = p.params.index(x)
    iy = p.params.index(y)
    vals = {k: Fraction(v) for k, v in values.items()}
    for exps, c in p.terms.items():
        factor = Fraction(c)
        for name, e in zip(p.params, exps):
            if name in (x, y) or e == 0:
                continue
            if name not in vals:
                raise ValueError(f"unbound parameter {name!r}")
            factor *= vals[name] ** e
        key = (exps[ix], exps[iy])
        out[key] = out.get(key, 0.0) + float(factor)
    return {k: v for k, v in out.items() if v != 0.0}


def _derive(terms: Mapping[tuple[int, int], float], axis: int) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    for (i, j), c in terms.items():
        if axis == 0 and i:
            out[(i - 1, j)] = out.get((i - 1, j), 0.0) + c * i
        if axis == 1 and j:
            out[(i, j - 1)] = out.get((i, j - 1), 0.0) + c * j
    return out


@dataclass
class NumericSystem:
    """Double-precision Hamiltonian + perturbation field near a center."""

    H: Callable[[float, float], float]
    Hx: Callable[[float, float], float]
    Hy: Callable[[float, float], float]
    p: Callable[[float, float], float]
    q: Callable[[float, float], float]
    p_value: int = 1

    @classmethod
    def from_polynomials(cls, H: ParamPoly, p: ParamPoly | None, q: ParamPoly | None,
                         values: Mapping[str, Rat] | None = None,
                         x: str = "x", y: str = "y", p_value: int = 1) -> "NumericSystem":
        values = values or {}
        Ht = _poly_terms(H, values, x, y)
        pt = _poly_terms(p, values, x, y) if p is not None else {}
        qt = _poly_terms(q, values, x, y) if q is not None else {}
        return cls(
            H=_compile_poly(Ht),
            Hx=_compile_poly(_derive(Ht, 0)),
            Hy=_compile_poly(_derive(Ht, 1)),
            p=_compile_poly(pt),
            q=_compile_poly(qt),
            p_value=p_value,
        )

    @classmethod
    def from_divergence(cls, H: ParamPoly, divergence: ParamPoly,
                        values: Mapping[str, Rat] | None = None,
                        x: str = "x", y: str = "y", p_value: int = 1) -> "NumericSystem":
        """Realize a target divergence with p = integral of D dx, q = 0."""
        names = divergence.params
        ix = names.index(x)
        terms = {}
        for exps, c in divergence.terms.items():
            lifted = exps[:ix] + (exps[ix] + 1,) + exps[ix + 1:]
            terms[lifted] = c / (exps[ix] + 1)
        p_poly = ParamPoly(names, terms)
        return cls.from_polynomials(H, p_poly, None, values, x, y, p_value)


@dataclass
class OrbitSample:
    h: float
    points: np.ndarray          # closed polyline, last point = first point
    period: float
    energy_drift: float
    steps: int


def _axis_saddle_energy(sys: NumericSystem, direction: tuple[float, float],
                        bound: float = 64.0) -> float:
    """Energy of the first critical point of H along a ray, or +inf."""
    dx, dy = direction
    prev_t, prev_v = 0.0, 0.0
    t = 1e-6
    while t < bound:
        v = sys.H(dx * t, dy * t)
        if v < prev_v:
            # bracket the maximum of H on [prev_t/4, t]
            lo, hi = prev_t / 4 if prev_t else t / 16, t

            def dH(s):
                return sys.Hx(dx * s, dy * s) * dx + sys.Hy(dx * s, dy * s) * dy

            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if dH(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            s = 0.5 * (lo + hi)
            return sys.H(dx * s, dy * s)
        prev_t, prev_v = t, v
        t *= 1.25
    return math.inf


def h_ladder(sys: NumericSystem, count: int, ratio: float = 4.0) -> list[float]:
    """Geometric energy ladder h_max * ratio^-i with h_max from axis saddles.

    h_max is 1/16 of the lowest critical energy found on the four half-axes
    (falling back to 1/16 when every ray is unbounded).
    """
    energies = [
        _axis_saddle_energy(sys, d)
        for d in ((1, 0), (-1, 0), (0, 1), (0, -1))
    ]
    base = min(energies)
    h_max = base / 16 if math.isfinite(base) else 1.0 / 16
    return [h_max * ratio ** (-i) for i in range(count)]


def _start_point(sys: NumericSystem, h: float) -> float:
    """x > 0 with H(x, 0) = h by bisection along the positive x-axis."""
    hi = 1e-6
    guard = 0
    while sys.H(hi, 0.0) < h:
        hi *= 2
        guard += 1
        if guard > 120:
            raise TraceError(f"level {h} not reached along the positive x-axis")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sys.H(mid, 0.0) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def trace_level_curve(sys: NumericSystem, h: float, tol: float = 1e-10,
                      steps_per_orbit: int = 4096, max_orbits: float = 8.0) -> OrbitSample:
    """Trace the closed level oval through (x0, 0) with projection and closure.

    The orbit is integrated with RK4 in arc-length-controlled steps, projected
    back to the level set after every step, and closed on the section
    y = 0, x > 0 (crossing direction matched, crossing time refined by
    bisection).  Raises :class:`TraceError` when the orbit fails to return.
    """
    x0 = _start_point(sys, h)
    # crude extent along y for the perimeter estimate
    y_extent = x0
    for probe in (1.0, -1.0):
        t = x0
        for _ in range(80):
            if sys.H(0.0, probe * t) >= h:
                break
            t *= 1.5
        y_extent = max(y_extent, t)
    perimeter = 4.0 * (x0 + y_extent)
    ds = perimeter / steps_per_orbit

    def field(x, y):
        return sys.Hy(x, y), -sys.Hx(x, y)

    def project(x, y):
        for _ in range(2):
            gx, gy = sys.Hx(x, y), sys.Hy(x, y)
            g2 = gx * gx + gy * gy
            if g2 == 0.0:
                return x, y
            err = sys.H(x, y) - h
            x -= err * gx / g2
            y -= err * gy / g2
        return x, y

    def rk4(x, y, dt):
        k1 = field(x, y)
        k2 = field(x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1])
        k3 = field(x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1])
        k4 = field(x + dt * k3[0], y + dt * k3[1])
        return (x + dt * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6,
                y + dt * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6)

    pts = [(x0, 0.0)]
    times = [0.0]
    x, y = x0, 0.0
    t = 0.0
    drift = 0.0
    escape = 16.0 * (x0 + y_extent) + 1.0
    max_steps = int(steps_per_orbit * max_orbits)
    for step in range(max_steps):
        vx, vy = field(x, y)
        speed = math.hypot(vx, vy)
        if speed == 0.0:
            raise TraceError(f"hit a critical point at h={h}")
        dt = ds / speed
        nx, ny = rk4(x, y, dt)
        nx, ny = project(nx, ny)
        crossed = y > 0.0 >= ny and nx > 0.25 * x0 and step > 4
        if crossed:
            lo_f, hi_f = 0.0, 1.0
            for _ in range(60):
                mid = 0.5 * (lo_f + hi_f)
                mx, my = rk4(x, y, dt * mid)
                if my > 0.0:
                    lo_f = mid
                else:
                    hi_f = mid
            frac = 0.5 * (lo_f + hi_f)
            fx, fy = rk4(x, y, dt * frac)
            fx, fy = project(fx, fy)
            pts.append((fx, fy))
            times.append(t + dt * frac)
            points = np.array(pts)
            drift = max(drift, abs(sys.H(fx, fy) - h))
            closure_gap = math.hypot(fx - x0, fy - 0.0)
            scale = max(1.0, abs(h))
            if drift > tol * scale:
                raise TraceError(f"energy drift {drift} above tolerance at h={h}")
            if closure_gap > 1e-5 * (x0 + y_extent):
                raise TraceError(f"orbit failed to close (gap {closure_gap}) at h={h}")
            return OrbitSample(h, points, times[-1], drift, step + 1)
        drift = max(drift, abs(sys.H(nx, ny) - h))
        if abs(nx) > escape or abs(ny) > escape:
            raise TraceError(f"not a periodic orbit at this h: trajectory escaped (h={h})")
        x, y = nx, ny
        t += dt
        pts.append((x, y))
        times.append(t)
    raise TraceError(f"not a periodic orbit at this h: no closure in {max_steps} steps (h={h})")


def _melnikov_once(sys: NumericSystem, h: float, tol: float, steps: int) -> float:
    orbit = trace_level_curve(sys, h, tol, steps_per_orbit=steps)
    pts = orbit.points
    total = 0.0

    def g(x, y):
        # q dx - p dy along the flow: q Hy + p Hx
        return sys.q(x, y) * sys.Hy(x, y) + sys.p(x, y) * sys.Hx(x, y)

    n = len(pts)
    for i in range(n - 1):
        x0, y0 = pts[i]
        x1, y1 = pts[i + 1]
        v0 = (sys.Hy(x0, y0), -sys.Hx(x0, y0))
        v1 = (sys.Hy(x1, y1), -sys.Hx(x1, y1))
        # local time step implied by distance / average speed
        sp0 = math.hypot(*v0)
        sp1 = math.hypot(*v1)
        dist = math.hypot(x1 - x0, y1 - y0)
        dt = 2.0 * dist / (sp0 + sp1)
        # cubic Hermite dense output evaluated at Gauss-Legendre nodes
        for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
            s = node
            h00 = (1 + 2 * s) * (1 - s) ** 2
            h10 = s * (1 - s) ** 2
            h01 = s * s * (3 - 2 * s)
            h11 = s * s * (s - 1)
            xs = h00 * x0 + h10 * dt * v0[0] + h01 * x1 + h11 * dt * v1[0]
            ys = h00 * y0 + h10 * dt * v0[1] + h01 * y1 + h11 * dt * v1[1]
            total += weight * g(xs, ys) * dt
    return total


def melnikov_numeric(sys: NumericSystem, h: float, tol: float = 1e-10,
                     steps: int = 4096) -> tuple[float, float]:
    """Line integral of q dx - p dy along the level oval, with error estimate.

    The estimate is the difference against a half-resolution run; halving the
    tolerance (doubling steps) shrinks it with the integrator order.
    """
    fine = _melnikov_once(sys, h, tol, steps)
    coarse = _melnikov_once(sys, h, tol * 16, max(steps // 2, 256))
    return fine, abs(fine - coarse)


@dataclass
class FitResult:
    coefficients: list[float]
    residual: float
    condition: float
    warnings: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.coefficients)


def fit_expansion(samples: Sequence[tuple[float, float]], p: int, L: int) -> FitResult:
    """Least squares for M(h) ~ sum_l b_l h^((p+1)/(2p) + l/p).

    Columns are normalized to unit norm before solving; an ill-conditioned
    normalized basis triggers a warning (the scaled retry is the solve
    itself, since scaling happens up front).
    """
    if len(samples) < L + 3:
        raise ValueError(f"need at least {L + 3} samples for L = {L}")
    hs = np.array([s[0] for s in samples], dtype=float)
    ms = np.array([s[1] for s in samples], dtype=float)
    expo0 = (p + 1) / (2 * p)
    cols = [hs ** (expo0 + l / p) for l in range(L + 1)]
    A = np.column_stack(cols)
    norms = np.linalg.norm(A, axis=0)
    warnings: list[str] = []
    A_scaled = A / norms
    svals = np.linalg.svd(A_scaled, compute_uv=False)
    cond = float(svals[0] / svals[-1]) if svals[-1] > 0 else math.inf
    if cond > 1e12:
        warnings.append(f"ill-conditioned basis (condition {cond:.3e}) despite scaling")
    sol, res, _, _ = np.linalg.lstsq(A_scaled, ms, rcond=None)
    coeffs = (sol / norms).tolist()
    residual = float(np.linalg.norm(A @ np.array(coeffs) - ms))
    return FitResult(coeffs, residual, cond, warnings)
