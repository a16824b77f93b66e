"""Parameter sweeps with transition localization, and the workflows that
orchestrate the deformation machinery into shippable experiments."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .deform import (DeformationTrace, PeriodicContinuation,
                     continue_periodic, find_periodic_theta,
                     integrate_deformation)
from .errors import (InternalConsistencyError, NewtonDivergenceError,
                     PreconditionError)
from .functional import J_TOL, default_tol_w, j_functional
from .maps import (PERIOD_TOL, DirectionField, FamilyTerm, MapFamily,
                   PiecewiseMap, aux_dictionary, critical_relations,
                   detect_periodic_critical, family_eval, family_velocity,
                   kneading)

KNEADING_DEPTH = 30
RELATION_DEPTH = 8
J_ZERO_TOL = 1e-7        # |J| below this floor counts as "vanishes"
TRANSITION_WIDTH = 1e-8
NORM_GRID = 2048


def worker_count(n_tasks: int) -> int:
    """Thread budget for node evaluation; PEXPAND_THREADS caps it."""
    raw = os.environ.get("PEXPAND_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise PreconditionError(
                f"PEXPAND_THREADS={raw!r} is not an integer") from None
        if cap < 1:
            raise PreconditionError("PEXPAND_THREADS must be >= 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


# ---------------------------------------------------------------------------
# scan sources: polynomial families evaluate anywhere, sampled families
# only at their stored nodes


class _FamilySource:
    continuous = True

    def __init__(self, fam: MapFamily):
        self.domain = fam.domain
        self._fam = fam

    def at(self, t: float):
        return family_eval(self._fam, t), family_velocity(self._fam, t)


class _SampledSource:
    continuous = False

    def __init__(self, tilde):
        self._by_t = {s.t: s for s in tilde.samples}
        ts = tilde.ts
        self.domain = (min(ts), max(ts))

    def at(self, t: float):
        s = self._by_t.get(t)
        if s is None:
            raise PreconditionError(
                f"sampled family has no node at t = {t!r}")
        return s.map, s.velocity


def _source(family):
    if isinstance(family, MapFamily):
        return _FamilySource(family)
    if hasattr(family, "samples"):
        return _SampledSource(family)
    raise PreconditionError(f"cannot scan a {type(family).__name__}")


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class ScanRecord:
    t: float
    kneading: str
    relations: tuple[tuple[int, int], ...]
    j_value: float | None
    j_tail: float
    j_candidates: tuple[float, ...]
    classification: str  # "periodic:p" | "nonperiodic" | "ambiguous" | "error"
    flags: tuple[str, ...]


@dataclass(frozen=True)
class Transition:
    t_lo: float
    t_hi: float
    t_star: float
    width: float
    kinds: tuple[str, ...]  # subset of ("kneading", "relations")
    localized: bool


@dataclass(frozen=True)
class ScanResult:
    records: tuple[ScanRecord, ...]
    transitions: tuple[Transition, ...]
    max_abs_j: float | None
    threshold: float
    consistent: bool     # no transitions <=> max|J| under threshold

    @property
    def in_class(self) -> bool:
        return not self.transitions


def _node(src, t: float, kneading_depth: int, relation_depth: int,
          period_tol: float, j_tol: float) -> ScanRecord:
    try:
        f, v = src.at(t)
        kn = kneading(f, kneading_depth).symbols
        rel = critical_relations(f, relation_depth, tol=period_tol)
        det = detect_periodic_critical(f, tol=period_tol)
        j = j_functional(f, v, tol=j_tol, period_tol=period_tol)
    except PreconditionError as exc:
        return ScanRecord(t, "", (), None, 0.0, (), "error",
                          (f"error:{type(exc).__name__}",))
    flags = []
    if not det.clean:
        flags.append("ambiguous-period")
    if rel.ambiguous:
        flags.append("ambiguous-relations")
    if j.value is None:
        flags.append("ambiguous-j")
    if det.period is not None:
        cls = f"periodic:{det.period}"
    elif det.ambiguous:
        cls = "ambiguous"
    else:
        cls = "nonperiodic"
    return ScanRecord(t, kn, rel.relations, j.value, j.tail_bound,
                      tuple(val for _, val in j.candidates), cls,
                      tuple(flags))


def _signature(src, t: float, kneading_depth: int, relation_depth: int,
               period_tol: float):
    try:
        f, _ = src.at(t)
        return (kneading(f, kneading_depth).symbols,
                critical_relations(f, relation_depth, tol=period_tol)
                .relations)
    except PreconditionError:
        return None


def run_scan(family, t_grid=None, *, kneading_depth: int = KNEADING_DEPTH,
             relation_depth: int = RELATION_DEPTH,
             period_tol: float = PERIOD_TOL, j_tol: float = J_TOL,
             j_zero_tol: float = J_ZERO_TOL, localize: bool = True,
             width: float = TRANSITION_WIDTH) -> ScanResult:
    """Per-node diagnostics over a grid, with class-transition localization.

    A transition is an adjacent pair whose depth-30 kneading prefix or
    canonical relation set differs; on polynomial families it is narrowed
    by bisection to the requested width.  Sampled families cannot be
    evaluated between nodes, so their transitions keep the grid width and
    are marked unlocalized.  Node failures become error records and the
    scan continues; the A<=>D diagnostic (no transitions <=> max|J| under
    max(10*tail, floor)) is recorded, not enforced.
    """
    src = _source(family)
    if t_grid is None:
        if src.continuous:
            raise PreconditionError("a polynomial family needs a t grid")
        grid = sorted(src._by_t)
    else:
        grid = [float(t) for t in t_grid]
    lo, hi = src.domain
    for t in grid:
        if not lo <= t <= hi:
            raise PreconditionError(
                f"grid point t = {t!r} outside family domain [{lo}, {hi}]")
        if not src.continuous and t not in src._by_t:
            raise PreconditionError(
                f"sampled family has no node at t = {t!r}")
    if not grid:
        return ScanResult((), (), None, j_zero_tol, True)

    workers = worker_count(len(grid))
    if workers == 1:
        records = [_node(src, t, kneading_depth, relation_depth,
                         period_tol, j_tol) for t in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(
                lambda t: _node(src, t, kneading_depth, relation_depth,
                                period_tol, j_tol), grid))

    transitions = []
    for a, b in zip(records, records[1:]):
        if a.classification == "error" or b.classification == "error":
            continue
        kinds = tuple(k for k, changed in (
            ("kneading", a.kneading != b.kneading),
            ("relations", a.relations != b.relations)) if changed)
        if not kinds:
            continue
        if src.continuous and localize:
            t_lo, t_hi = a.t, b.t
            sig_lo = _signature(src, t_lo, kneading_depth, relation_depth,
                                period_tol)
            sig_hi = _signature(src, t_hi, kneading_depth, relation_depth,
                                period_tol)
            while t_hi - t_lo > width:
                mid = 0.5 * (t_lo + t_hi)
                sig_mid = _signature(src, mid, kneading_depth,
                                     relation_depth, period_tol)
                if sig_mid == sig_lo:
                    t_lo = mid
                else:
                    t_hi, sig_hi = mid, sig_mid
            # an interval can hold several change points; report what
            # actually differs across the final bracket
            if sig_lo is not None and sig_hi is not None:
                kinds = tuple(k for k, changed in (
                    ("kneading", sig_lo[0] != sig_hi[0]),
                    ("relations", sig_lo[1] != sig_hi[1])) if changed)
            transitions.append(Transition(
                t_lo, t_hi, 0.5 * (t_lo + t_hi), t_hi - t_lo, kinds, True))
        else:
            w = b.t - a.t
            transitions.append(Transition(
                a.t, b.t, 0.5 * (a.t + b.t), w, kinds, w <= width))

    mags = []
    max_tail = 0.0
    for r in records:
        if r.classification == "error":
            continue
        max_tail = max(max_tail, r.j_tail)
        if r.j_value is not None:
            mags.append(abs(r.j_value))
        elif r.j_candidates:
            mags.append(max(abs(c) for c in r.j_candidates))
    max_abs_j = max(mags) if mags else None
    threshold = max(j_zero_tol, 10.0 * max_tail)
    consistent = True
    if max_abs_j is not None:
        consistent = (not transitions) == (max_abs_j <= threshold)
    return ScanResult(tuple(records), tuple(transitions), max_abs_j,
                      threshold, consistent)


# ---------------------------------------------------------------------------
# workflows


def auto_transversal(f: PiecewiseMap, j_tol: float = J_TOL) -> DirectionField:
    """First dictionary direction with |J(f, w)| above the division floor."""
    for w in aux_dictionary():
        jr = j_functional(f, w, tol=j_tol)
        if jr.value is not None and abs(jr.value) > default_tol_w(w):
            return w
    raise PreconditionError(
        "no transversal direction in the auxiliary dictionary")


def tangent_deformation(f: PiecewiseMap, v: DirectionField,
                        w: DirectionField | None = None, *,
                        t_range: tuple[float, float] = (-0.02, 0.02),
                        tangent_tol: float = 1e-8,
                        ode_tol: float | None = None) -> DeformationTrace:
    """Deformation trace for the straight family through f tangent to v.

    v must satisfy J(f, v) = 0 within tangent_tol (that is what makes the
    family tangent to the topological class); w defaults to the first
    transversal dictionary entry.  The integrated trace must come out
    flat at the origin, |b'(0)| < 1e-8, or the run aborts.
    """
    jr = j_functional(f, v)
    residual = abs(jr.require_value())
    if residual > tangent_tol:
        raise PreconditionError(
            f"direction is not tangent: |J(f, v)| = {residual:.3e} "
            f"exceeds {tangent_tol:.3e}")
    if w is None:
        w = auto_transversal(f)
    fam = MapFamily(f, (FamilyTerm(v),), domain=t_range)
    kwargs = {} if ode_tol is None else {"ode_tol": ode_tol}
    trace = integrate_deformation(fam, w, **kwargs)
    if abs(trace.slope0) >= 1e-8:
        raise InternalConsistencyError(
            f"tangent family drifts: |b'(0)| = {abs(trace.slope0):.3e}")
    return trace


@dataclass(frozen=True)
class LadderRung:
    period: int
    theta0: float
    continuation: PeriodicContinuation
    distance: float


@dataclass(frozen=True)
class ApproximationLadder:
    rungs: tuple[LadderRung, ...]
    decreasing: bool
    partial: bool
    base_period: int | None
    grid_n: int


def _sup_distance(trace: DeformationTrace, cont: PeriodicContinuation,
                  grid_n: int) -> float:
    ref = {n.t: trace.map_at(n.t) for n in trace.nodes}
    worst = 0.0
    shared = 0
    for t in cont.ts:
        f_ref = ref.get(t)
        if f_ref is None:
            continue
        shared += 1
        delta = cont.map_at(t).difference(f_ref)
        worst = max(worst, delta.grid_norm(f_ref.k - 1, grid_n))
    if shared < 2:
        raise InternalConsistencyError(
            "continuation and reference trace share fewer than 2 nodes")
    return worst


def continuation_ladder(F: MapFamily, w: DirectionField | None = None, *,
                        periods: tuple[int, ...] = (7, 8, 9, 10),
                        min_rungs: int = 2, scan_nodes: int = 41,
                        seed_range: tuple[float, float] = (1e-4, 0.08),
                        seeds: int = 12, steps: int = 10,
                        grid_n: int = NORM_GRID,
                        period_tol: float = PERIOD_TOL,
                        ) -> ApproximationLadder:
    """Periodic-critical families closing in on an in-class family.

    For each requested period p, a root theta_p of g^p(c) = c is hunted
    from log-spaced seeds on both sides of 0 and continued in t alongside
    the reference deformation; the rung distance is the sup over shared
    nodes of the grid norm of g_t - f_t through derivative order k-1.
    If the base critical point is already periodic the ladder is the
    single trivial rung theta = 0 at distance 0, which is complete as it
    stands; otherwise fewer than min_rungs roots marks the result
    partial rather than failing.
    """
    lo, hi = F.domain
    if not lo < 0.0 < hi:
        raise PreconditionError("family domain must contain t = 0")
    sweep = run_scan(F, np.linspace(lo, hi, scan_nodes), localize=False,
                     period_tol=period_tol)
    if sweep.transitions:
        raise PreconditionError(
            f"family is not in-class: {len(sweep.transitions)} "
            f"transition(s) inside [{lo}, {hi}]")
    base = family_eval(F, 0.0)
    if w is None:
        w = auto_transversal(base)
    h = max(abs(lo), hi) / steps
    trace = integrate_deformation(F, w, h0=h, adaptive=False)

    rungs = []
    det = detect_periodic_critical(base, tol=period_tol)
    if det.period is not None:
        cont = continue_periodic(F, w, det.period, 0.0, h=h,
                                 period_tol=period_tol)
        rungs.append(LadderRung(det.period, 0.0, cont,
                                _sup_distance(trace, cont, grid_n)))
    else:
        prev = None
        for p in periods:
            root = None
            for mag in np.geomspace(seed_range[0], seed_range[1], seeds):
                for seed in (-float(mag), float(mag)):
                    try:
                        cand = find_periodic_theta(F, w, p, theta0=seed,
                                                   period_tol=period_tol)
                    except (PreconditionError, NewtonDivergenceError):
                        continue
                    if cand.period == p and (
                            prev is None or abs(cand.theta) < abs(prev)):
                        root = cand
                        break
                if root is not None:
                    break
            if root is None:
                continue
            cont = continue_periodic(F, w, p, root.theta, h=h,
                                     period_tol=period_tol)
            rungs.append(LadderRung(p, root.theta, cont,
                                    _sup_distance(trace, cont, grid_n)))
            prev = root.theta
    dists = [r.distance for r in rungs]
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    partial = det.period is None and len(rungs) < min_rungs
    return ApproximationLadder(tuple(rungs), decreasing, partial,
                               det.period, grid_n)
