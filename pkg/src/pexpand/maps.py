"""Piecewise expanding unimodal maps on I = [-1, 1] and families thereof.

Conventions used throughout the package:

* A map has two polynomial branches in the monomial basis, ``left`` on
  [-1, 0] and ``right`` on [0, 1], stored as ascending coefficient
  tuples.  The constant terms are shared: both branches evaluate to the
  critical value at the turning point c = 0.
* Valid maps fix the boundary (f(-1) = f(1) = -1), expand on each
  branch (Df > 1 on the left, Df < -1 on the right) and keep the
  critical value inside the interval (f(0) <= 1).
* lambda_f denotes the certified lower bound for min |Df| over I.
* Orbit symbols: L for points left of c, R for points right of c, C
  for points inside the band |x| < tol_c.  Once an orbit point enters
  the band the iteration continues from c exactly, so itineraries of
  maps with a periodic critical point are genuinely periodic instead
  of drifting on float noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    AmbiguousPeriodicityError,
    CertificationError,
    InvalidMapError,
    PreconditionError,
)

D_MAX = 16                # maximum branch polynomial degree
TOL_C = 1e-10             # half-width of the critical band
PERIOD_TOL = 1e-9         # default periodicity tolerance
HYSTERESIS = 10.0         # ambiguity band is [tol, HYSTERESIS*tol)
GRID_POINTS = 1024        # expansion certification grid per branch
BOUNDARY_SLACK = 1e-12    # allowed overshoot of f(0) above 1
ENDPOINT_TOL = 1e-9       # float slack for the boundary fixing check
COMPENSATE_AFTER = 50     # switch product bookkeeping to compensated logs


def _coeffs(raw) -> tuple[float, ...]:
    out = tuple(float(v) for v in raw)
    if not out:
        raise ValueError("empty coefficient list")
    if len(out) - 1 > D_MAX:
        raise ValueError(f"branch degree {len(out) - 1} exceeds D_MAX={D_MAX}")
    if not all(math.isfinite(v) for v in out):
        raise ValueError("non-finite branch coefficient")
    return out


@lru_cache(maxsize=4096)
def _der(coeffs: tuple[float, ...], order: int) -> tuple[float, ...]:
    if order == 0:
        return coeffs
    d = P.polyder(np.asarray(coeffs), m=order)
    return tuple(float(v) for v in d) if d.size else (0.0,)


def _pval(coeffs: tuple[float, ...], x) -> float | np.ndarray:
    return P.polyval(x, np.asarray(coeffs))


def _branch_sup(coeffs: tuple[float, ...], lo: float, hi: float) -> float:
    """Exact sup of |p| over [lo, hi]: check endpoints and interior critical points."""
    cand = [lo, hi]
    dc = np.asarray(_der(coeffs, 1))
    # Companion-matrix root finding divides by the leading coefficient, so a
    # leading term hundreds of orders below the rest overflows into NaN roots
    # and the interior maxima silently vanish.  Terms that small cannot move
    # the polynomial on a bounded interval; drop them before solving.
    scale = float(np.max(np.abs(dc)))
    if np.isfinite(scale) and scale > 0.0:
        dc = P.polytrim(dc, scale * 1e-15)
    if dc.size > 1:
        for r in P.polyroots(dc):
            if np.isfinite(r) and abs(r.imag) < 1e-12 and lo < r.real < hi:
                cand.append(float(r.real))
    return float(max(abs(_pval(coeffs, x)) for x in cand))


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class PiecewiseMap:
    """Two-branch polynomial map; ``left`` acts on [-1,0], ``right`` on [0,1].

    Coefficients are ascending monomial coefficients.  ``k`` records the
    smoothness order the map is used at (branch polynomials are C^inf, so
    k only drives norm choices downstream).
    """

    left: tuple[float, ...]
    right: tuple[float, ...]
    k: int = 3

    def __post_init__(self):
        object.__setattr__(self, "left", _coeffs(self.left))
        object.__setattr__(self, "right", _coeffs(self.right))
        if self.k < 1:
            raise ValueError("smoothness order k must be >= 1")
        if self.left[0] != self.right[0]:
            raise ValueError("branches must share the critical value exactly")

    @property
    def critical_value(self) -> float:
        return self.left[0]

    def value(self, x: float) -> float:
        if not -1.0 <= x <= 1.0:
            raise PreconditionError(f"point {x} outside [-1, 1]")
        return float(_pval(self.left if x < 0.0 else self.right, x))

    def deriv(self, x: float, order: int = 1, side: str | None = None) -> float:
        """Branch derivative at x; at x = 0 with order >= 1 a side is required."""
        if order == 0:
            return self.value(x)
        if x == 0.0:
            if side not in ("L", "R"):
                raise PreconditionError(
                    "derivative at the critical point needs side='L' or 'R'")
            coeffs = self.left if side == "L" else self.right
        else:
            coeffs = self.left if x < 0.0 else self.right
        return float(_pval(_der(coeffs, order), x))

    @property
    def df_minus(self) -> float:
        """One-sided slope at c from the left (positive for valid maps)."""
        return self.deriv(0.0, 1, "L")

    @property
    def df_plus(self) -> float:
        """One-sided slope at c from the right (negative for valid maps)."""
        return self.deriv(0.0, 1, "R")

    def add_scaled(self, direction: "DirectionField", s: float) -> "PiecewiseMap":
        """Return the map with coefficients self + s*direction, same k."""
        nl = P.polyadd(np.asarray(self.left), s * np.asarray(direction.left))
        nr = P.polyadd(np.asarray(self.right), s * np.asarray(direction.right))
        return PiecewiseMap(tuple(nl), tuple(nr), self.k)

    def difference(self, other: "PiecewiseMap") -> "DirectionField":
        """self - other as a (relaxed) direction field, for norm arithmetic."""
        dl = P.polysub(np.asarray(self.left), np.asarray(other.left))
        dr = P.polysub(np.asarray(self.right), np.asarray(other.right))
        return DirectionField(tuple(dl), tuple(dr), relaxed=True)


def interval_image(f: PiecewiseMap, lo: float, hi: float) -> tuple[float, float]:
    """Image of [lo, hi] under f, exact for the monotone-branch structure."""
    if lo > hi:
        lo, hi = hi, lo
    a, b = f.value(max(lo, -1.0)), f.value(min(hi, 1.0))
    if lo < 0.0 < hi:
        return (min(a, b), f.critical_value)
    return (min(a, b), max(a, b))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str
    witness: float | None = None


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    checks: tuple[ValidationCheck, ...]
    lambda_f: float | None
    df_minus_c: float
    df_plus_c: float
    critical_value: float

    def failures(self) -> tuple[ValidationCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def _certified_deriv_range(coeffs: tuple[float, ...], lo: float, hi: float):
    """Grid min/max of the branch derivative with a Lipschitz slack.

    The slack sum(|c_j| j(j-1)) bounds |D2f| on |x| <= 1, so grid extrema
    are off by at most slack*h/2.  Sound for monomial branches without
    interval arithmetic.
    """
    dc = _der(coeffs, 1)
    xs = np.linspace(lo, hi, GRID_POINTS)
    vals = _pval(dc, xs)
    lip = sum(abs(c) * j * (j - 1) for j, c in enumerate(coeffs))
    pad = lip * (hi - lo) / (GRID_POINTS - 1) / 2.0
    i_min, i_max = int(np.argmin(vals)), int(np.argmax(vals))
    return (float(vals[i_min]) - pad, float(vals[i_max]) + pad,
            float(xs[i_min]), float(xs[i_max]))


@lru_cache(maxsize=4096)
def validate(f: PiecewiseMap) -> ValidationReport:
    """Check boundary fixing, branch expansion, and critical-value bounds.

    Failures are report entries, never exceptions.  On pass, ``lambda_f``
    is the certified lower bound for min |Df|.
    """
    checks = []

    fm1, fp1 = f.value(-1.0), f.value(1.0)
    ok = abs(fm1 + 1.0) <= ENDPOINT_TOL and abs(fp1 + 1.0) <= ENDPOINT_TOL
    checks.append(ValidationCheck(
        "boundary_fixed", ok,
        f"f(-1)={fm1!r}, f(1)={fp1!r}", None if ok else (-1.0 if abs(fm1 + 1) > ENDPOINT_TOL else 1.0)))

    lo_l, _hi_l, w_l, _ = _certified_deriv_range(f.left, -1.0, 0.0)
    ok_l = lo_l > 1.0
    checks.append(ValidationCheck(
        "expansion_left", ok_l, f"certified min Df on [-1,0] = {lo_l!r}",
        None if ok_l else w_l))

    _lo_r, hi_r, _, w_r = _certified_deriv_range(f.right, 0.0, 1.0)
    ok_r = hi_r < -1.0
    checks.append(ValidationCheck(
        "expansion_right", ok_r, f"certified max Df on [0,1] = {hi_r!r}",
        None if ok_r else w_r))

    cv = f.critical_value
    ok_c = cv <= 1.0 + BOUNDARY_SLACK
    checks.append(ValidationCheck(
        "critical_value", ok_c, f"f(0)={cv!r}", None if ok_c else 0.0))

    passed = all(c.passed for c in checks)
    lam = min(lo_l, -hi_r) if (ok_l and ok_r) else None
    return ValidationReport(passed, tuple(checks), lam,
                            f.deriv(0.0, 1, "L"), f.deriv(0.0, 1, "R"), cv)


def require_valid(f: PiecewiseMap) -> ValidationReport:
    rep = validate(f)
    if not rep.passed:
        names = ", ".join(c.name for c in rep.failures())
        raise InvalidMapError(f"map failed validation: {names}", rep)
    return rep


def lambda_of(f: PiecewiseMap) -> float:
    return require_valid(f).lambda_f


# ---------------------------------------------------------------------------
# orbits and symbols


@dataclass(frozen=True)
class CriticalOrbit:
    """Forward orbit of c with cumulative derivative products.

    ``points[i]`` is f^i(c).  ``products[i]`` is Df^i(f(c)), the product of
    Df along points 1..i, so products[0] = 1 and the i-th series term of
    the horizontality functional is v(points[i]) / products[i].  When the
    orbit re-enters the critical band at step t, products stop at length t
    (a one-sided derivative at c is never assigned) and ``truncated_at``
    records t; later points follow the snapped orbit.
    """

    points: tuple[float, ...]
    products: tuple[float, ...]
    log_products: tuple[float, ...]
    signs: tuple[int, ...]
    truncated_at: int | None
    tol_c: float


def critical_orbit(f: PiecewiseMap, n: int, tol_c: float = TOL_C) -> CriticalOrbit:
    if n < 1:
        raise PreconditionError("orbit depth must be >= 1")
    points = [0.0]
    products, logs, signs = [1.0], [0.0], [1]
    truncated = None
    x = 0.0
    prod, log_sum, log_comp, sign = 1.0, 0.0, 0.0, 1
    for i in range(1, n + 1):
        x = f.value(x)
        points.append(x)
        if abs(x) < tol_c:
            if truncated is None:
                truncated = i
            x = 0.0  # snap: continue along the exact critical orbit
            continue
        if truncated is None and i < n:
            d = f.deriv(x, 1)
            if d == 0.0:
                raise PreconditionError(
                    f"zero branch derivative at orbit point {x!r}")
            prod *= d
            sign *= 1 if d > 0 else -1
            # Kahan-compensated log accumulation; the raw product overflows
            # once |Df^i| ~ lambda^i gets large, the log never does.
            y = math.log(abs(d)) - log_comp
            t = log_sum + y
            log_comp = (t - log_sum) - y
            log_sum = t
            if not math.isfinite(prod):
                prod = sign * math.inf
            products.append(prod)
            logs.append(log_sum)
            signs.append(sign)
    return CriticalOrbit(tuple(points), tuple(products), tuple(logs),
                         tuple(signs), truncated, tol_c)


@dataclass(frozen=True)
class Itinerary:
    symbols: str
    depth: int
    tol_c: float

    def __post_init__(self):
        if set(self.symbols) - set("LCR"):
            raise ValueError("itinerary symbols must be L, C or R")

    def prefix(self, n: int) -> str:
        return self.symbols[:n]


def itinerary(f: PiecewiseMap, x: float, n: int, tol_c: float = TOL_C) -> Itinerary:
    """L/C/R symbols of the length-n orbit of x.

    A point in the critical band gets symbol C and the orbit continues
    from c exactly (see module docstring).
    """
    if n < 1:
        raise PreconditionError("itinerary depth must be >= 1")
    out = []
    for _ in range(n):
        if abs(x) < tol_c:
            out.append("C")
            x = 0.0
        else:
            out.append("L" if x < 0.0 else "R")
        x = f.value(x)
    return Itinerary("".join(out), n, tol_c)


def kneading(f: PiecewiseMap, n: int, tol_c: float = TOL_C) -> Itinerary:
    return itinerary(f, 0.0, n, tol_c)


# ---------------------------------------------------------------------------
# periodicity of the critical point


@dataclass(frozen=True)
class PeriodDetection:
    period: int | None
    residual: float | None
    ambiguous: tuple[tuple[int, float], ...]
    p_max: int
    tol: float

    @property
    def clean(self) -> bool:
        return not self.ambiguous


def detect_periodic_critical(f: PiecewiseMap, p_max: int = 64,
                             tol: float = PERIOD_TOL) -> PeriodDetection:
    """Smallest q <= p_max with |f^q(c) - c| < tol, on the raw float orbit.

    Returns residuals in the hysteresis band [tol, 10*tol) as ambiguity
    entries instead of silently classifying them; the two sides of the
    periodic manifold carry genuinely different functional values, so a
    near-band verdict must stay visible to callers.
    """
    if p_max < 2:
        raise PreconditionError("p_max must be >= 2")
    band = []
    x = 0.0
    for q in range(1, p_max + 1):
        x = f.value(x)
        r = abs(x)
        if r < tol:
            return PeriodDetection(q, r, tuple(band), p_max, tol)
        if r < HYSTERESIS * tol:
            band.append((q, r))
    return PeriodDetection(None, None, tuple(band), p_max, tol)


def require_clean_period(det: PeriodDetection) -> PeriodDetection:
    if not det.clean:
        raise AmbiguousPeriodicityError(
            f"periodicity ambiguous in band [tol, 10*tol): {det.ambiguous}",
            det.ambiguous)
    return det


# ---------------------------------------------------------------------------
# critical relations


@dataclass(frozen=True)
class CriticalRelationSet:
    canonical: tuple[tuple[int, int], ...]
    derived: tuple[tuple[int, int], ...]
    ambiguous: tuple[tuple[int, int], ...]
    depth: int
    tol: float

    @property
    def relations(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.canonical + self.derived))


def critical_relations(f: PiecewiseMap, depth: int = 8,
                       tol: float = PERIOD_TOL) -> CriticalRelationSet:
    """Index pairs (i, j), i < j <= depth, with f^i(c) and f^j(c) coincident.

    A pair is canonical when it is not implied by an earlier kept pair
    (i0, j0), i.e. when i >= i0 and (j - i) divisible by (j0 - i0) fails.
    Band-distance pairs are reported as ambiguous, never classified.
    """
    if depth < 2:
        raise PreconditionError("relation depth must be >= 2")
    xs = [0.0]
    x = 0.0
    for _ in range(depth):
        x = f.value(x)
        xs.append(x)
    hits, band = [], []
    for i in range(depth):
        for j in range(i + 1, depth + 1):
            r = abs(xs[i] - xs[j])
            if r < tol:
                hits.append((i, j))
            elif r < HYSTERESIS * tol:
                band.append((i, j))
    hits.sort(key=lambda ij: (ij[0], ij[1] - ij[0]))
    canonical, derived = [], []
    for i, j in hits:
        if any(i >= i0 and (j - i) % (j0 - i0) == 0 for i0, j0 in canonical):
            derived.append((i, j))
        else:
            canonical.append((i, j))
    return CriticalRelationSet(tuple(canonical), tuple(sorted(derived)),
                               tuple(sorted(band)), depth, tol)


# ---------------------------------------------------------------------------
# goodness and expansivity


@dataclass(frozen=True)
class GoodnessResult:
    good: bool
    margin: float
    period: int | None


def is_good(f: PiecewiseMap, tol: float = PERIOD_TOL,
            p_max: int = 64) -> GoodnessResult:
    """Non-periodic critical point, or periodic with one-sided products > 2.

    margin = |Df^{p-1}(f(c))| * min(|Df+(c)|, |Df-(c)|) - 2 in the periodic
    case; +inf sentinel otherwise.
    """
    require_valid(f)
    det = require_clean_period(detect_periodic_critical(f, p_max, tol))
    if det.period is None:
        return GoodnessResult(True, math.inf, None)
    orb = critical_orbit(f, det.period, tol_c=max(TOL_C, tol))
    mult = orb.products[det.period - 1]
    margin = abs(mult) * min(abs(f.df_plus), abs(f.df_minus)) - 2.0
    return GoodnessResult(margin > 0.0, margin, det.period)


@dataclass(frozen=True)
class ExpansivityCertificate:
    n0: int
    epsilon: float
    margin: float
    boundary_contacts: tuple[int, ...]
    images: tuple[tuple[float, float], ...]


def expansivity_certificate(f: PiecewiseMap, eps0: float = 0.5,
                            tol_c: float = TOL_C) -> ExpansivityCertificate:
    """Certify c stays out of the interiors of f^i[-eps, eps], i = 1..N0.

    N0 is the smallest integer with lambda_f^(N0-2) > 2; eps is found by
    halving from eps0.  When an image touches c on its boundary (within
    tol_c, the periodic-return case) that index is flagged as a contact
    and excluded from the margin minimum.
    """
    lam = require_valid(f).lambda_f
    n0 = 3
    while lam ** (n0 - 2) <= 2.0:
        n0 += 1
    eps = eps0
    while eps >= 1e-12:
        lo, hi = -eps, eps
        images, contacts, dists = [], [], []
        ok = True
        for i in range(1, n0 + 1):
            lo, hi = interval_image(f, lo, hi)
            images.append((lo, hi))
            if abs(lo) < tol_c or abs(hi) < tol_c:
                contacts.append(i)
            elif lo > 0.0:
                dists.append(lo)
            elif hi < 0.0:
                dists.append(-hi)
            else:
                ok = False  # c strictly interior: not excluded
                break
        if ok:
            margin = min(dists) if dists else math.inf
            if margin > 0.0:
                return ExpansivityCertificate(n0, eps, margin,
                                              tuple(contacts), tuple(images))
        eps /= 2.0
    raise CertificationError(
        "no epsilon >= 1e-12 excludes c from the first N0 images")


# ---------------------------------------------------------------------------
# direction fields


@dataclass(frozen=True)
class DirectionField:
    """Piecewise-polynomial perturbation with the same branch layout as maps.

    Proper deformation directions vanish at the boundary; observables that
    do not must be constructed with relaxed=True and are rejected as
    deformation directions downstream.
    """

    left: tuple[float, ...]
    right: tuple[float, ...]
    relaxed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "left", _coeffs(self.left))
        object.__setattr__(self, "right", _coeffs(self.right))
        if self.left[0] != self.right[0]:
            raise ValueError("field branches must agree at the critical point")
        if not self.relaxed:
            bl = float(_pval(self.left, -1.0))
            br = float(_pval(self.right, 1.0))
            if abs(bl) > 1e-12 or abs(br) > 1e-12:
                raise ValueError(
                    f"direction field must vanish at the boundary "
                    f"(v(-1)={bl!r}, v(1)={br!r}); pass relaxed=True for observables")

    def value(self, x: float) -> float:
        return float(_pval(self.left if x < 0.0 else self.right, x))

    def deriv(self, x: float, order: int = 1, side: str | None = None) -> float:
        if order == 0:
            return self.value(x)
        if x == 0.0 and side is None:
            side = "R"  # norms only need one-sided values here
        coeffs = self.left if (x < 0.0 or (x == 0.0 and side == "L")) else self.right
        return float(_pval(_der(coeffs, order), x))

    def sup_norm(self) -> float:
        """Exact sup |v| over I via branch stationary points."""
        return max(_branch_sup(self.left, -1.0, 0.0),
                   _branch_sup(self.right, 0.0, 1.0))

    def grid_norm(self, order_max: int, n: int = 2048) -> float:
        """max over branches and derivative orders 0..order_max of grid sups."""
        best = 0.0
        xs_l = np.linspace(-1.0, 0.0, n)
        xs_r = np.linspace(0.0, 1.0, n)
        for m in range(order_max + 1):
            best = max(best,
                       float(np.max(np.abs(_pval(_der(self.left, m), xs_l)))),
                       float(np.max(np.abs(_pval(_der(self.right, m), xs_r)))))
        return best

    def scale(self, s: float) -> "DirectionField":
        return DirectionField(tuple(s * c for c in self.left),
                              tuple(s * c for c in self.right), self.relaxed)

    def add(self, other: "DirectionField") -> "DirectionField":
        nl = P.polyadd(np.asarray(self.left), np.asarray(other.left))
        nr = P.polyadd(np.asarray(self.right), np.asarray(other.right))
        return DirectionField(tuple(nl), tuple(nr),
                              self.relaxed or other.relaxed)


ZERO_FIELD = DirectionField((0.0,), (0.0,))


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class FamilyTerm:
    field: DirectionField
    t_powers: tuple[int, ...] = (1,)

    def __post_init__(self):
        pw = tuple(int(p) for p in self.t_powers)
        if not pw or any(p < 1 for p in pw):
            raise ValueError("t_powers must be positive integers")
        object.__setattr__(self, "t_powers", pw)

    def scalar(self, t: float) -> float:
        return sum(t ** p for p in self.t_powers)

    def scalar_deriv(self, t: float) -> float:
        return sum(p * t ** (p - 1) for p in self.t_powers)


@dataclass(frozen=True)
class MapFamily:
    """Polynomial-in-t curve of maps: f_t = base + sum_m s_m(t) * field_m.

    Polynomial dependence keeps the velocity exact (term-wise derivative),
    so no finite differencing ever enters the functional evaluations.
    """

    base: PiecewiseMap
    terms: tuple[FamilyTerm, ...]
    domain: tuple[float, float] = (-0.02, 0.02)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        lo, hi = self.domain
        if not (lo < hi and math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("parameter domain must be a finite interval")
        for term in self.terms:
            if term.field.relaxed:
                raise ValueError("family directions must be proper fields "
                                 "(boundary zeros), not relaxed observables")


def family_eval(F: MapFamily, t: float, check: bool = True) -> PiecewiseMap:
    """Assemble f_t exactly; optionally validate (errors carry the report)."""
    lo, hi = F.domain
    if not lo <= t <= hi:
        raise PreconditionError(f"t={t} outside family domain [{lo}, {hi}]")
    f = F.base
    for term in F.terms:
        s = term.scalar(t)
        if s != 0.0:
            f = f.add_scaled(term.field, s)
    if check:
        require_valid(f)
    return f


def family_velocity(F: MapFamily, t: float) -> DirectionField:
    """Exact term-wise t-derivative of the family at t."""
    lo, hi = F.domain
    if not lo <= t <= hi:
        raise PreconditionError(f"t={t} outside family domain [{lo}, {hi}]")
    v = ZERO_FIELD
    for term in F.terms:
        s = term.scalar_deriv(t)
        if s != 0.0:
            v = v.add(term.field.scale(s))
    return v


# ---------------------------------------------------------------------------
# built-in maps and fields

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


def symmetric_tent(slope: float, k: int = 3) -> PiecewiseMap:
    """f(x) = slope*(1 - |x|) - 1, the symmetric tent with given slope."""
    return PiecewiseMap((slope - 1.0, slope), (slope - 1.0, -slope), k)


def full_tent(k: int = 3) -> PiecewiseMap:
    return symmetric_tent(2.0, k)


def golden_tent(k: int = 3) -> PiecewiseMap:
    return symmetric_tent(GOLDEN_RATIO, k)


# Curved-branch map with a period-3 critical orbit 0 -> 0.42 -> -0.35 -> 0
# whose multiplier-times-slope product stays below 2: the left branch is
# nearly flat (slope 1.05) near -1 and the right branch lands softly, so
# is_good reports a negative margin.  Symmetric tents can never do this;
# their period-p product is the slope to the p-th power > 2^{3/2}.
_NOT_GOOD_LEFT = (0.42, 1.05,
                  -0.6313693998309383, -0.7506822847482189,
                  -0.48931288491728053)
_NOT_GOOD_RIGHT = (0.42, -2.6486384572279853, 2.7250709498882855,
                   -2.1342265280926154, 0.6377940354323149)


def curved_not_good(k: int = 3) -> PiecewiseMap:
    return PiecewiseMap(_NOT_GOOD_LEFT, _NOT_GOOD_RIGHT, k)


def bump_field() -> DirectionField:
    """1 - x^2."""
    return DirectionField((1.0, 0.0, -1.0), (1.0, 0.0, -1.0))


def odd_field() -> DirectionField:
    """x(1 - x^2)."""
    return DirectionField((0.0, 1.0, 0.0, -1.0), (0.0, 1.0, 0.0, -1.0))


def square_bump_field() -> DirectionField:
    """x^2(1 - x^2)."""
    return DirectionField((0.0, 0.0, 1.0, 0.0, -1.0),
                          (0.0, 0.0, 1.0, 0.0, -1.0))


def tent_profile_field() -> DirectionField:
    """1 - |x|; adding s*this to a symmetric tent raises its slope by s."""
    return DirectionField((1.0, 1.0), (1.0, -1.0))


def aux_dictionary() -> tuple[DirectionField, ...]:
    """Auxiliary transversal directions, tried in this order."""
    return (odd_field(), bump_field(), square_bump_field())


BUILTIN_MAPS = {
    "full_tent": full_tent,
    "golden_tent": golden_tent,
    "curved_not_good": curved_not_good,
}

BUILTIN_FIELDS = {
    "bump": bump_field,
    "odd": odd_field,
    "square_bump": square_bump_field,
    "tent_profile": tent_profile_field,
}
