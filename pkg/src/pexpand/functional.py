"""The horizontality functional J, its cohomological counterpart alpha, and
the one-sided limit constants across the periodic manifold.

For a valid map f and a bounded direction v,

    J(f, v) = sum_{i>=0} v(f^i(c)) / Df^i(f(c)),

summed over the critical orbit.  When c is periodic with prime period p the
sum collapses to the first p terms (the convention Df_C = 1 at the return
makes the continuation geometric and it cancels); otherwise the series is
truncated with a certified geometric tail.  J(f, v) = 0 characterizes
directions tangent to the topological class of f: moving along them does
not break critical relations to first order.

alpha solves v = alpha o f - Df * alpha with alpha(c) = 0; J(f, v) equals
v(c) - alpha(f(c)), which gives every J value an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    AmbiguousPeriodicityError,
    DegenerateDirectionError,
    InternalConsistencyError,
    PreconditionError,
)
from .maps import (
    PERIOD_TOL,
    TOL_C,
    DirectionField,
    MapFamily,
    PiecewiseMap,
    critical_orbit,
    detect_periodic_critical,
    family_eval,
    family_velocity,
    is_good,
    require_valid,
)

J_TOL = 1e-12      # default series truncation tolerance
ALPHA_TOL = 1e-12
SIDE_TAIL = 1e-12  # summation floor for the C+- series


def a_priori_bound(f: PiecewiseMap, v: DirectionField) -> float:
    """|J(f, v)| <= sup|v| / (1 - 1/lambda_f), valid in both modes."""
    lam = require_valid(f).lambda_f
    return v.sup_norm() / (1.0 - 1.0 / lam)


def _series_terms(f: PiecewiseMap, v: DirectionField, n: int):
    """Partial-sum terms v(x_i)/P_i of the defining series, raw orbit."""
    orb = critical_orbit(f, n, tol_c=0.0)  # tol_c=0: never snap, never truncate
    return [v.value(x) / p for x, p in zip(orb.points[:n], orb.products[:n])]


def _truncation_index(sup_v: float, lam: float, tol: float) -> int:
    arg = sup_v / (tol * (1.0 - 1.0 / lam))
    if arg <= 1.0:
        return 1
    return max(1, math.ceil(math.log(arg) / math.log(lam)))


def j_periodic_sum(f: PiecewiseMap, v: DirectionField, p: int) -> float:
    """Finite p-term value of J, the exact form when c has period p."""
    if p < 1:
        raise PreconditionError("period must be >= 1")
    return math.fsum(_series_terms(f, v, p))


def j_series_sum(f: PiecewiseMap, v: DirectionField,
                 tol: float = J_TOL) -> tuple[float, float, int]:
    """Truncated series value with certified geometric tail bound."""
    lam = require_valid(f).lambda_f
    sup_v = v.sup_norm()
    if sup_v == 0.0:
        return 0.0, 0.0, 0
    n = _truncation_index(sup_v, lam, tol)
    tail = sup_v * lam ** (-n) / (1.0 - 1.0 / lam)
    return math.fsum(_series_terms(f, v, n)), tail, n


@dataclass(frozen=True)
class JResult:
    """One evaluation of J; ``value`` is None exactly in the ambiguous case.

    In periodic mode n_terms is the period and tail_bound is 0.  In the
    ambiguous case (a residual inside the hysteresis band) both readings
    are preserved in ``candidates`` as (mode, value) pairs, because the
    two sides of the periodic manifold carry genuinely different values.
    """

    value: float | None
    mode: str  # "periodic" | "series" | "ambiguous"
    n_terms: int
    tail_bound: float
    period: int | None = None
    candidates: tuple[tuple[str, float], ...] = ()

    def require_value(self) -> float:
        if self.value is None:
            raise AmbiguousPeriodicityError(
                "J is dual-valued here (periodicity in the hysteresis band); "
                f"candidates: {self.candidates}", self.candidates)
        return self.value


def j_functional(f: PiecewiseMap, v: DirectionField, tol: float = J_TOL,
                 period_tol: float = PERIOD_TOL, p_max: int = 64) -> JResult:
    """Evaluate J(f, v) with certified truncation.

    The critical orbit is classified first; the truncation depth for the
    series route also caps the periodicity search, so an exact return to
    c inside the summation window is always detected rather than summed
    across.
    """
    lam = require_valid(f).lambda_f
    sup_v = v.sup_norm()
    if sup_v == 0.0:
        return JResult(0.0, "series", 0, 0.0)
    n = _truncation_index(sup_v, lam, tol)
    det = detect_periodic_critical(f, p_max=max(p_max, n), tol=period_tol)
    if det.clean and det.period is not None:
        return JResult(j_periodic_sum(f, v, det.period), "periodic",
                       det.period, 0.0, det.period)
    series = math.fsum(_series_terms(f, v, n))
    tail = sup_v * lam ** (-n) / (1.0 - 1.0 / lam)
    if det.clean:
        return JResult(series, "series", n, tail)
    q = min(q for q, _ in det.ambiguous)
    if det.period is not None:
        q = min(q, det.period)
    return JResult(None, "ambiguous", n, tail, q,
                   (("periodic", j_periodic_sum(f, v, q)), ("series", series)))


# ---------------------------------------------------------------------------
# alpha


@dataclass(frozen=True)
class AlphaSolution:
    """Pointwise evaluator for the solution of v = alpha o f - Df * alpha.

    alpha(c) = 0 by convention.  Points whose orbit reaches the critical
    band get the exact finite sum (the series terminates there); all other
    points get the geometric truncation.
    """

    f: PiecewiseMap
    v: DirectionField
    tol: float
    lam: float
    sup_v: float
    n_max: int

    @property
    def bound(self) -> float:
        return self.sup_v / (self.lam - 1.0)

    def classify(self, x: float, tol_c: float = TOL_C) -> tuple[str, int]:
        if abs(x) < tol_c:
            return ("at_c", 0)
        y = x
        for i in range(1, self.n_max + 1):
            y = self.f.value(y)
            if abs(y) < tol_c:
                return ("hits_c", i)
        return ("avoids_c", self.n_max)

    def value(self, x: float, tol_c: float = TOL_C) -> float:
        if abs(x) < tol_c:
            return 0.0
        total, y, prod = 0.0, x, 1.0
        for _ in range(self.n_max):
            d = self.f.deriv(y, 1)
            prod *= d
            total += self.v.value(y) / prod
            y = self.f.value(y)
            if abs(y) < tol_c:
                break  # exact finite form: k = min{i > 0 : f^i(x) = c}
        return -total

    __call__ = value


def alpha(f: PiecewiseMap, v: DirectionField, tol: float = ALPHA_TOL) -> AlphaSolution:
    lam = require_valid(f).lambda_f
    sup_v = v.sup_norm()
    if sup_v == 0.0:
        return AlphaSolution(f, v, tol, lam, 0.0, 0)
    n = max(1, math.ceil(math.log(sup_v / (tol * (lam - 1.0))) / math.log(lam)))
    return AlphaSolution(f, v, tol, lam, sup_v, n)


def alpha_at(f: PiecewiseMap, v: DirectionField, x: float,
             tol: float = ALPHA_TOL) -> float:
    return alpha(f, v, tol).value(x)


@dataclass(frozen=True)
class CohomologyReport:
    max_residual: float
    argmax: float
    n_points: int


def check_twisted_cohomology(f: PiecewiseMap, v: DirectionField,
                             sol: AlphaSolution | None = None,
                             grid=None, n: int = 201,
                             tol_c: float = TOL_C) -> CohomologyReport:
    """Max residual of v(x) - alpha(f(x)) + Df(x) alpha(x) over a grid.

    Grid points inside the critical band are dropped (Df is one-sided
    there and alpha is pinned to 0 by convention).
    """
    if sol is None:
        sol = alpha(f, v)
    if grid is None:
        step = 2.0 / (n - 1)
        grid = [-1.0 + i * step for i in range(n)]
    worst, arg, count = -1.0, 0.0, 0
    for x in grid:
        if abs(x) < tol_c:
            continue
        count += 1
        r = abs(v.value(x) - sol.value(f.value(x)) + f.deriv(x, 1) * sol.value(x))
        if r > worst:
            worst, arg = r, x
    return CohomologyReport(worst, arg, count)


# ---------------------------------------------------------------------------
# horizontality and the parameter/phase identity


@dataclass(frozen=True)
class HorizontalityResult:
    horizontal: bool
    j: JResult
    v_at_c: float
    alpha_at_fc: float
    identity_gap: float


def horizontality(f: PiecewiseMap, v: DirectionField, tol: float = 1e-9,
                  j_tol: float = J_TOL) -> HorizontalityResult:
    """Decide J(f, v) = 0 via the series and via v(c) = alpha(f(c)).

    The two routes share no code path beyond orbit evaluation, so their
    agreement is used as a live internal-consistency check: disagreement
    beyond the combined certified error margins raises.
    """
    j = j_functional(f, v, tol=j_tol)
    jv = j.require_value()
    v_c = v.value(0.0)
    sol = alpha(f, v, tol=j_tol)
    a_fc = sol.value(f.critical_value)
    gap = abs(jv - (v_c - a_fc))
    allowed = 10.0 * (j.tail_bound + j_tol) + 1e-10
    if gap > allowed:
        raise InternalConsistencyError(
            f"J={jv!r} disagrees with v(c)-alpha(f(c))={v_c - a_fc!r} "
            f"(gap {gap:.3e} > allowed {allowed:.3e})")
    return HorizontalityResult(abs(jv) <= tol, j, v_c, a_fc, gap)


@dataclass(frozen=True)
class PhaseConsistency:
    quotient: float
    j: JResult
    gap: float
    k: int
    relaxed_observable: bool


def param_phase_consistency(F: MapFamily, t0: float, k: int,
                            observable: DirectionField | None = None,
                            j_tol: float = J_TOL,
                            tol_c: float = TOL_C) -> PhaseConsistency:
    """Compare the depth-k parameter derivative quotient with J.

    The quotient is d/dt[f_t^k(c)] / Df^{k-1}(f(c)) with the numerator
    computed by the exact chain-rule sum over the critical orbit, never
    by finite differences.  With the family's own velocity this is an
    identity at the prime period and a geometrically convergent
    approximation otherwise; an explicit ``observable`` replaces the
    velocity to probe the same identity for general fields.
    """
    if k < 1:
        raise PreconditionError("depth k must be >= 1")
    f = family_eval(F, t0)
    v = observable if observable is not None else family_velocity(F, t0)
    det = detect_periodic_critical(f, p_max=max(64, k))
    periodic_route = det.clean and det.period == k
    orb = critical_orbit(f, k, tol_c=tol_c)
    if not periodic_route:
        for idx in range(1, k):
            if abs(orb.points[idx]) < tol_c:
                raise PreconditionError(
                    f"critical orbit returns to c at step {idx} < k={k}")
    if len(orb.products) < k:
        raise PreconditionError(
            f"orbit truncated at {orb.truncated_at}, need {k} product terms")
    p_top = orb.products[k - 1]
    deriv_t = math.fsum((p_top / orb.products[i]) * v.value(orb.points[i])
                        for i in range(k))
    quotient = deriv_t / p_top
    j = j_functional(f, v, tol=j_tol)
    return PhaseConsistency(quotient, j, abs(quotient - j.require_value()),
                            k, v.relaxed)


# ---------------------------------------------------------------------------
# one-sided constants across the periodic manifold


@dataclass(frozen=True)
class SideConstants:
    c_plus: float
    c_minus: float
    two_beta: float
    bracket: tuple[float, float]
    sigma_plus_prefix: str
    sigma_minus_prefix: str
    period: int
    multiplier: float


def _shadow_sum(mult: float, d_left: float, d_right: float,
                seed: int, prefix_len: int = 8) -> tuple[float, str]:
    """Sum the one-sided constant by propagating the shadowing side signs.

    A perturbed orbit re-approaches c through sides s_1, s_2, ... with
    s_{j+1} = s_j * sign(mult * Df_side(s_j)); the i-th series term divides
    by mult and by the one-sided slope chosen at step i.  Signs become
    eventually constant, so the series is geometric with ratio 1/(2 beta)
    in magnitude and the 1e-12 tail floor is reached quickly.
    """
    total, term, s = 1.0, 1.0, seed
    prefix = []
    i = 0
    while abs(term) > SIDE_TAIL * 1e-3 and i < 400:
        d_side = d_right if s > 0 else d_left
        if len(prefix) < prefix_len:
            prefix.append("R" if s > 0 else "L")
        term /= mult * d_side
        total += term
        s *= 1 if mult * d_side > 0 else -1
        i += 1
    return total, "".join(prefix)


def side_constants(f: PiecewiseMap, p_max: int = 64,
                   period_tol: float = PERIOD_TOL) -> SideConstants:
    """C+ and C-: the two limits of J(f_theta, v)/J(f, v) across the manifold.

    Requires a good map with periodic critical point; goodness gives
    2 beta > 2 which underwrites geometric convergence of both series.
    """
    good = is_good(f, tol=period_tol, p_max=p_max)
    if good.period is None:
        raise PreconditionError("side constants need a periodic critical point")
    if not good.good:
        raise PreconditionError(
            f"map is not good (margin {good.margin!r}); the one-sided "
            "series has no convergence certificate")
    p = good.period
    orb = critical_orbit(f, p)
    mult = orb.products[p - 1]
    d_left, d_right = f.df_minus, f.df_plus
    c_plus, sig_p = _shadow_sum(mult, d_left, d_right, +1)
    c_minus, sig_m = _shadow_sum(mult, d_left, d_right, -1)
    two_beta = abs(mult) * min(abs(d_left), abs(d_right))
    lo = (two_beta - 2.0) / (two_beta * (two_beta - 1.0))
    hi = two_beta / (two_beta - 1.0)
    for name, c in (("C+", c_plus), ("C-", c_minus)):
        if not (c > 0.0 and lo - 1e-9 <= c <= hi + 1e-9):
            raise InternalConsistencyError(
                f"{name}={c!r} escapes the bracket [{lo!r}, {hi!r}]")
    return SideConstants(c_plus, c_minus, two_beta, (lo, hi),
                         sig_p, sig_m, p, mult)


# ---------------------------------------------------------------------------
# kernel projection


@dataclass(frozen=True)
class KernelProjection:
    d: float
    field: DirectionField
    j_v: JResult
    j_w: JResult
    residual: float


def default_tol_w(w: DirectionField) -> float:
    # below this |J(f, w)| the kernel slope -J(v)/J(w) is numerically
    # meaningless, so transversality is refused rather than divided by
    return 1e-8 * w.sup_norm()


def kernel_projection(f: PiecewiseMap, v: DirectionField, w: DirectionField,
                      j_tol: float = J_TOL,
                      tol_w: float | None = None) -> KernelProjection:
    """Slope d = -J(f,v)/J(f,w) and the projected field v + d w in Ker J."""
    if tol_w is None:
        tol_w = default_tol_w(w)
    j_w = j_functional(f, w, tol=j_tol)
    jw = j_w.require_value()
    if abs(jw) <= tol_w:
        raise DegenerateDirectionError(
            f"|J(f, w)| = {abs(jw):.3e} <= tol_w = {tol_w:.3e}")
    j_v = j_functional(f, v, tol=j_tol)
    d = -j_v.require_value() / jw
    projected = v.add(w.scale(d))
    residual = j_functional(f, projected, tol=j_tol).require_value()
    return KernelProjection(d, projected, j_v, j_w, abs(residual))
