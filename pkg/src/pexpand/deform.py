"""Topology-preserving deformations f~_t = f_t + b(t) w.

The scalar field d(t, theta) = -J(f_t + theta w, v_t) / J(f_t + theta w, w)
is the unique slope that keeps the velocity of the corrected family inside
the kernel of J.  Integrating db/dt = d(t, b), b(0) = 0 with a classical
4th-order one-step scheme produces b; when the base map carries a periodic
critical relation the flow preserves it to integrator accuracy, and the
same curve can be reached independently by predictor-corrector continuation
of the relation itself (``continue_periodic``).

Near the periodic manifold the numerator and denominator of d individually
jump (one-sided constants C+-) but the jump factor cancels in the ratio.
Evaluating the pair in mixed modes still leaves a small crease that caps
the integrator at second order, so inside ``MANIFOLD_BAND`` both J values
are taken as matched finite periodic sums, the analytic continuation of
the ratio across the manifold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    AmbiguousPeriodicityError,
    DegenerateDirectionError,
    InvalidMapError,
    KneadingDriftError,
    NewtonDivergenceError,
    PreconditionError,
)
from .functional import (
    J_TOL,
    default_tol_w,
    j_functional,
    j_periodic_sum,
    j_series_sum,
)
from .maps import (
    PERIOD_TOL,
    TOL_C,
    DirectionField,
    Itinerary,
    MapFamily,
    PiecewiseMap,
    critical_orbit,
    critical_relations,
    detect_periodic_critical,
    family_eval,
    family_velocity,
    is_good,
    kneading,
    require_valid,
    validate,
)

MANIFOLD_BAND = 1e-3   # |f^p(c) - c| below this: evaluate J as matched p-term sums
ODE_TOL = 1e-9         # per-step local error bound (Richardson estimate)
H0 = 1e-3              # initial / maximal step
H_MIN = 1e-8           # step underflow -> truncate trace
NEWTON_TOL = 1e-12
CLAMP_SLACK = 1e-12    # boundary overshoot absorbed by a b-nudge


def _iterate(f: PiecewiseMap, n: int) -> float:
    x = 0.0
    for _ in range(n):
        x = f.value(x)
    return x


@dataclass(frozen=True)
class SlopeValue:
    d: float
    mode: str            # "periodic-pair" | "series-pair"
    j_v: float
    j_w: float
    residual: float      # |j_v + d * j_w|, roundoff-level by construction
    manifold_residual: float | None  # |f^p(c) - c| when a period is tracked


def _assemble(F: MapFamily, w: DirectionField, t: float, theta: float) -> PiecewiseMap:
    g = family_eval(F, t, check=False)
    if theta != 0.0:
        g = g.add_scaled(w, theta)
    require_valid(g)
    return g


def slope_field(F: MapFamily, w: DirectionField, t: float, theta: float,
                relation_period: int | None = None,
                band: float = MANIFOLD_BAND, j_tol: float = J_TOL,
                tol_w: float | None = None,
                period_tol: float = PERIOD_TOL) -> SlopeValue:
    """Kernel slope d(t, theta) with the matched-mode policy near the manifold.

    With ``relation_period`` p given and the assembled map within ``band``
    of the relation, both J values are p-term periodic sums; otherwise the
    classification of the assembled map decides (a hysteresis-band
    ambiguity also resolves to the matched periodic pair, whose ratio is
    the continuous reading).
    """
    if tol_w is None:
        tol_w = default_tol_w(w)
    g = _assemble(F, w, t, theta)
    v = family_velocity(F, t)
    manifold_res = None
    p_used = None
    if relation_period is not None:
        manifold_res = abs(_iterate(g, relation_period))
        if manifold_res < band:
            p_used = relation_period
    if p_used is None:
        det = detect_periodic_critical(g, tol=period_tol)
        if det.period is not None or not det.clean:
            qs = [q for q, _ in det.ambiguous]
            if det.period is not None:
                qs.append(det.period)
            p_used = min(qs)
    if p_used is not None:
        jv = j_periodic_sum(g, v, p_used)
        jw = j_periodic_sum(g, w, p_used)
        mode = "periodic-pair"
    else:
        jv, _, _ = j_series_sum(g, v, j_tol)
        jw, _, _ = j_series_sum(g, w, j_tol)
        mode = "series-pair"
    if abs(jw) <= tol_w:
        raise DegenerateDirectionError(
            f"|J(f,w)| = {abs(jw):.3e} <= tol_w = {tol_w:.3e} at "
            f"(t, theta) = ({t!r}, {theta!r})")
    d = -jv / jw
    return SlopeValue(d, mode, jv, jw, abs(jv + d * jw), manifold_res)


# ---------------------------------------------------------------------------
# the kernel ODE


@dataclass(frozen=True)
class TraceNode:
    t: float
    b: float
    d: float
    j_residual: float
    relation_residual: float | None
    step: float
    step_error: float
    clamped: bool
    at_boundary: bool
    mode: str


@dataclass(frozen=True)
class DeformationTrace:
    family: MapFamily
    w: DirectionField
    nodes: tuple[TraceNode, ...]
    relation_period: int | None
    canonical_relations: tuple[tuple[int, int], ...]
    slope0: float
    ode_tol: float
    truncated: tuple[tuple[str, str], ...]  # (side, reason) entries

    @property
    def ts(self) -> tuple[float, ...]:
        return tuple(n.t for n in self.nodes)

    @property
    def bs(self) -> tuple[float, ...]:
        return tuple(n.b for n in self.nodes)

    def node_at(self, t: float, atol: float = 1e-12) -> TraceNode:
        for n in self.nodes:
            if abs(n.t - t) <= atol:
                return n
        raise PreconditionError(f"no trace node at t={t!r}")

    def map_at(self, t: float) -> PiecewiseMap:
        n = self.node_at(t)
        return _assemble(self.family, self.w, n.t, n.b)


def _relation_residual(g: PiecewiseMap,
                       canonical: tuple[tuple[int, int], ...]) -> float | None:
    if not canonical:
        return None
    depth = max(j for _, j in canonical)
    xs = [0.0]
    x = 0.0
    for _ in range(depth):
        x = g.value(x)
        xs.append(x)
    return max(abs(xs[i] - xs[j]) for i, j in canonical)


def integrate_deformation(F: MapFamily, w: DirectionField,
                          t_range: tuple[float, float] | None = None,
                          h0: float = H0, ode_tol: float = ODE_TOL,
                          h_min: float = H_MIN, adaptive: bool = True,
                          band: float = MANIFOLD_BAND,
                          j_tol: float = J_TOL,
                          tol_w: float | None = None) -> DeformationTrace:
    """Integrate db/dt = d(t, b(t)), b(0) = 0 over t_range.

    Steps are accepted when the Richardson estimate |b_h - b_{h/2}|/15 of
    the local error stays under ode_tol (with ``adaptive=False`` plain
    fixed steps are taken, for order measurements).  Validity failures of
    trial maps trigger the same halving; at h_min the trace truncates with
    the reason.  A critical value overshooting 1 by at most CLAMP_SLACK is
    pulled back by nudging b (reported per node); anything larger is a
    validity stop.
    """
    if t_range is None:
        t_range = F.domain
    t_lo, t_hi = t_range
    if not t_lo <= 0.0 <= t_hi:
        raise PreconditionError("t_range must contain 0 (where b = 0)")
    f0 = family_eval(F, 0.0)
    good0 = is_good(f0)
    if not good0.good:
        raise PreconditionError(
            f"base map is not good (margin {good0.margin!r})")
    p_rel = good0.period
    canonical = critical_relations(f0, depth=8).canonical
    if tol_w is None:
        tol_w = default_tol_w(w)
    w0 = w.value(0.0)

    dom_lo, dom_hi = F.domain

    def d_of(t: float, b: float) -> SlopeValue:
        # stage times can overshoot the domain edge by one rounding ulp
        t = min(max(t, dom_lo), dom_hi)
        return slope_field(F, w, t, b, relation_period=p_rel, band=band,
                           j_tol=j_tol, tol_w=tol_w)

    def rk4(t: float, b: float, h: float) -> float:
        k1 = d_of(t, b).d
        k2 = d_of(t + h / 2.0, b + h * k1 / 2.0).d
        k3 = d_of(t + h / 2.0, b + h * k2 / 2.0).d
        k4 = d_of(t + h, b + h * k3).d
        return b + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0

    def make_node(t: float, b: float, h: float, err: float) -> TraceNode:
        clamped = at_boundary = False
        g = _assemble(F, w, t, b)
        excess = g.critical_value - 1.0
        if excess > 0.0:
            if w0 == 0.0:
                raise InvalidMapError(
                    "critical value exceeds 1 and w(c) = 0 cannot clamp it",
                    validate(g))
            b -= excess / w0
            clamped = True
            g = _assemble(F, w, t, b)
        if abs(g.critical_value - 1.0) <= CLAMP_SLACK:
            at_boundary = True
        sv = d_of(t, b)
        return TraceNode(t, b, sv.d, sv.residual,
                         _relation_residual(g, canonical), h, err,
                         clamped, at_boundary, sv.mode)

    sv0 = d_of(0.0, 0.0)
    center = make_node(0.0, 0.0, 0.0, 0.0)
    truncated = []

    def sweep(t_end: float) -> list[TraceNode]:
        out = []
        t, b = 0.0, 0.0
        sign = 1.0 if t_end > 0.0 else -1.0
        h = sign * h0
        while sign * (t_end - t) > 1e-15:
            t_next = t + h
            if sign * t_next >= sign * t_end:
                h = t_end - t
                t_next = t_end
            try:
                if adaptive:
                    b_big = rk4(t, b, h)
                    b_mid = rk4(t, b, h / 2.0)
                    b_new = rk4(t + h / 2.0, b_mid, h / 2.0)
                    err = abs(b_big - b_new) / 15.0
                    if err > ode_tol:
                        raise _Reject("local error above ode_tol")
                else:
                    b_new = rk4(t, b, h)
                    err = math.nan
                node = make_node(t_next, b_new, h, err)
            except (_Reject, InvalidMapError, DegenerateDirectionError) as e:
                if abs(h) / 2.0 < h_min:
                    side = "right" if sign > 0 else "left"
                    truncated.append((side, f"step underflow at t={t!r}: {e}"))
                    break
                h /= 2.0
                continue
            out.append(node)
            t, b = node.t, node.b
            h = sign * min(abs(h) * 2.0, h0)
        return out

    right = sweep(t_hi) if t_hi > 0.0 else []
    left = sweep(t_lo) if t_lo < 0.0 else []
    nodes = tuple(reversed(left)) + (center,) + tuple(right)
    return DeformationTrace(F, w, nodes, p_rel, canonical, sv0.d,
                            ode_tol, tuple(truncated))


class _Reject(Exception):
    pass


# ---------------------------------------------------------------------------
# the corrected family


@dataclass(frozen=True)
class TildeSample:
    t: float
    map: PiecewiseMap
    velocity: DirectionField


@dataclass(frozen=True)
class TildeFamily:
    samples: tuple[TildeSample, ...]
    kneading: Itinerary
    drift_index: int | None
    trace: DeformationTrace

    @property
    def ts(self) -> tuple[float, ...]:
        return tuple(s.t for s in self.samples)

    def map_at(self, t: float, atol: float = 1e-12) -> PiecewiseMap:
        for s in self.samples:
            if abs(s.t - t) <= atol:
                return s.map
        raise PreconditionError(f"no sample at t={t!r}")


def build_tilde_family(F: MapFamily, w: DirectionField,
                       trace: DeformationTrace, kneading_depth: int = 30,
                       strict: bool = True,
                       tol_c: float = TOL_C) -> TildeFamily:
    """Materialize f~_t = f_t + b(t) w at the trace nodes and certify.

    Every sample must validate, and the depth-``kneading_depth`` kneading
    prefix must match the base sample's.  A mismatch means the accepted
    steps were too loose to preserve the topological class: raised as
    drift when strict, recorded otherwise.
    """
    samples = []
    drift = None
    base = kneading(family_eval(F, 0.0, check=False), kneading_depth, tol_c)
    for idx, node in enumerate(trace.nodes):
        g = _assemble(F, w, node.t, node.b)
        vel = family_velocity(F, node.t).add(w.scale(node.d))
        samples.append(TildeSample(node.t, g, vel))
        kn = kneading(g, kneading_depth, tol_c)
        if kn.symbols != base.symbols:
            if strict:
                raise KneadingDriftError(
                    f"kneading prefix changed at sample {idx} (t={node.t!r}): "
                    f"{kn.symbols} vs {base.symbols}", idx)
            if drift is None:
                drift = idx
    return TildeFamily(tuple(samples), base, drift, trace)


# ---------------------------------------------------------------------------
# periodic relations: root finding and continuation


@dataclass(frozen=True)
class ThetaRoot:
    theta: float
    residual: float
    iterations: int
    period: int
    margin: float
    map: PiecewiseMap


def find_periodic_theta(F: MapFamily, w: DirectionField, p: int,
                        theta0: float = 0.0, t: float = 0.0,
                        newton_tol: float = NEWTON_TOL, max_iter: int = 50,
                        period_tol: float = PERIOD_TOL) -> ThetaRoot:
    """Newton root of theta -> f_{(t,theta)}^p(c) - c.

    The derivative is the exact chain-rule value Df^{p-1}(f(c)) * J_p(g, w);
    trial points that assemble to invalid maps are damped back toward the
    current iterate.  The converged root must have prime period p.
    """
    if p < 2:
        raise PreconditionError("period must be >= 2")
    theta = theta0
    g = _assemble(F, w, t, theta)
    for it in range(1, max_iter + 1):
        res = _iterate(g, p)
        if abs(res) < newton_tol:
            for q in range(1, p):
                rq = abs(_iterate(g, q))
                if rq < period_tol:
                    raise PreconditionError(
                        f"root at theta={theta!r} has prime period {q} < {p}")
                if rq < 10.0 * period_tol:
                    raise AmbiguousPeriodicityError(
                        f"prime-period check ambiguous at q={q}", ((q, rq),))
            margin = is_good(g, tol=period_tol).margin
            return ThetaRoot(theta, abs(res), it, p, margin, g)
        orb = critical_orbit(g, p, tol_c=0.0)
        dG = orb.products[p - 1] * j_periodic_sum(g, w, p)
        if abs(dG) < 1e-14:
            raise NewtonDivergenceError(
                f"degenerate derivative {dG!r} at theta={theta!r}")
        step = -res / dG
        for damp in range(9):
            try:
                g_new = _assemble(F, w, t, theta + step)
                break
            except InvalidMapError:
                step /= 2.0
        else:
            raise NewtonDivergenceError(
                f"no valid map along the Newton direction from theta={theta!r}")
        theta += step
        g = g_new
    raise NewtonDivergenceError(
        f"no convergence after {max_iter} iterations (residual {res!r})")


@dataclass(frozen=True)
class ContinuationNode:
    t: float
    theta: float
    slope: float
    residual: float
    newton_iterations: int


@dataclass(frozen=True)
class PeriodicContinuation:
    p: int
    theta0: float
    family: MapFamily
    w: DirectionField
    nodes: tuple[ContinuationNode, ...]
    truncated: tuple[tuple[str, str], ...]

    @property
    def ts(self) -> tuple[float, ...]:
        return tuple(n.t for n in self.nodes)

    @property
    def thetas(self) -> tuple[float, ...]:
        return tuple(n.theta for n in self.nodes)

    def node_at(self, t: float, atol: float = 1e-12) -> ContinuationNode:
        for n in self.nodes:
            if abs(n.t - t) <= atol:
                return n
        raise PreconditionError(f"no continuation node at t={t!r}")

    def map_at(self, t: float) -> PiecewiseMap:
        n = self.node_at(t)
        return _assemble(self.family, self.w, n.t, n.theta)

    def fd_slope_gaps(self) -> tuple[float, ...]:
        """|finite-difference slope - predictor slope| at interior nodes.

        Five-point stencil on uniform runs; the curve's third derivative is
        large enough near the manifold that a 3-point difference would
        drown the comparison in its own truncation error.
        """
        out = []
        n = self.nodes
        for i in range(2, len(n) - 2):
            hs = [n[j + 1].t - n[j].t for j in range(i - 2, i + 2)]
            if any(abs(x - hs[0]) > 1e-12 for x in hs):
                continue
            fd = (-n[i + 2].theta + 8.0 * n[i + 1].theta
                  - 8.0 * n[i - 1].theta + n[i - 2].theta) / (12.0 * hs[0])
            out.append(abs(fd - n[i].slope))
        return tuple(out)


def continue_periodic(F: MapFamily, w: DirectionField, p: int, theta0: float,
                      t_range: tuple[float, float] | None = None,
                      h: float = H0, newton_tol: float = NEWTON_TOL,
                      period_tol: float = PERIOD_TOL,
                      max_newton: int = 30) -> PeriodicContinuation:
    """Predictor-corrector continuation of the period-p critical relation.

    Euler predictor with slope -J_p(g, v_t)/J_p(g, w), Newton corrector
    back onto f^p(c) = c at each node; the prime period must stay p, a
    change aborts the sweep and records the node index.
    """
    if t_range is None:
        t_range = F.domain
    t_lo, t_hi = t_range
    if not t_lo <= 0.0 <= t_hi:
        raise PreconditionError("t_range must contain t = 0")
    truncated = []

    def slope_at(g: PiecewiseMap, t: float) -> float:
        jw = j_periodic_sum(g, w, p)
        if abs(jw) <= default_tol_w(w):
            raise DegenerateDirectionError(f"J_p(g, w) degenerate at t={t!r}")
        return -j_periodic_sum(g, family_velocity(F, t), p) / jw

    def correct(t: float, guess: float) -> tuple[float, float, int]:
        theta = guess
        for it in range(1, max_newton + 1):
            g = _assemble(F, w, t, theta)
            res = _iterate(g, p)
            if abs(res) < newton_tol:
                return theta, abs(res), it
            orb = critical_orbit(g, p, tol_c=0.0)
            dG = orb.products[p - 1] * j_periodic_sum(g, w, p)
            theta -= res / dG
        raise NewtonDivergenceError(f"corrector stalled at t={t!r}")

    g0 = _assemble(F, w, 0.0, theta0)
    res0 = abs(_iterate(g0, p))
    if res0 > 10.0 * newton_tol:
        theta0, res0, _ = correct(0.0, theta0)
        g0 = _assemble(F, w, 0.0, theta0)
    center = ContinuationNode(0.0, theta0, slope_at(g0, 0.0), res0, 0)

    def sweep(t_end: float) -> list[ContinuationNode]:
        out = []
        t, theta = 0.0, theta0
        sign = 1.0 if t_end > 0.0 else -1.0
        step = sign * h
        side = "right" if sign > 0 else "left"
        while sign * (t_end - t) > 1e-15:
            t_new = t + step
            if sign * t_new >= sign * t_end:
                step = t_end - t
                t_new = t_end
            g = _assemble(F, w, t, theta)
            try:
                guess = theta + step * slope_at(g, t)
                theta_new, res, iters = correct(t_new, guess)
                g_new = _assemble(F, w, t_new, theta_new)
                for q in range(1, p):
                    if abs(_iterate(g_new, q)) < 10.0 * period_tol:
                        raise PreconditionError(
                            f"prime period changed to <= {q}")
            except (PreconditionError, NewtonDivergenceError,
                    InvalidMapError, DegenerateDirectionError) as e:
                truncated.append(
                    (side, f"aborted at node {len(out)} (t={t_new!r}): {e}"))
                break
            out.append(ContinuationNode(t_new, theta_new,
                                        slope_at(g_new, t_new), res, iters))
            t, theta = t_new, theta_new
        return out

    right = sweep(t_hi) if t_hi > 0.0 else []
    left = sweep(t_lo) if t_lo < 0.0 else []
    nodes = tuple(reversed(left)) + (center,) + tuple(right)
    return PeriodicContinuation(p, theta0, F, w, nodes, tuple(truncated))


# ---------------------------------------------------------------------------
# transversality


@dataclass(frozen=True)
class TransversalReport:
    chain_value: float
    fd_value: float
    gap: float
    p: int


def transversal_derivative(F: MapFamily, p: int, t0: float = 0.0,
                           fd_h: float = 1e-6,
                           period_tol: float = PERIOD_TOL) -> TransversalReport:
    """d/dt[f_t^p(c)] at a periodic parameter, two independent ways.

    Chain-rule value Df^{p-1}(f(c)) * J_p(f, v_t) against a central
    difference of t -> f_t^p(c); their gap quantifies the exactness of
    the velocity bookkeeping.
    """
    f = family_eval(F, t0)
    det = detect_periodic_critical(f, tol=period_tol)
    if not det.clean or det.period != p:
        raise PreconditionError(
            f"critical point is not cleanly period-{p} at t0={t0!r} "
            f"(detected {det.period!r})")
    orb = critical_orbit(f, p, tol_c=0.0)
    chain = orb.products[p - 1] * j_periodic_sum(f, family_velocity(F, t0), p)
    g_hi = family_eval(F, t0 + fd_h, check=False)
    g_lo = family_eval(F, t0 - fd_h, check=False)
    fd = (_iterate(g_hi, p) - _iterate(g_lo, p)) / (2.0 * fd_h)
    return TransversalReport(chain, fd, abs(chain - fd), p)
