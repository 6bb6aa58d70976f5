"""Views, rotational symmetry, ray periodicity and Weber point machinery.

The rotational structure of a configuration is probed in two independent
ways: a cyclic sweep around a candidate center (the successor chain and its
string of angles) and a counting argument on rotated rays.  Both are kept
and cross-checked wherever the protocol relies on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .configuration import ConfigClass, Configuration, TAG_L1W, TAG_QREGULAR
from .errors import (
    AllAtCenter,
    ClassWithoutUniqueWeber,
    DegenerateCenter,
    LinearInput,
    NotOccupied,
)
from .geometry import TAU, Point, ccw_angle_of, dist, smallest_enclosing_circle, wrap_near_zero

# Bounds on the cross-track noise of stored coordinates (a few ulps) and on
# the error of a converged geometric-median candidate, both relative to the
# configuration diameter.  Directions measured from a center are unreliable
# for robots much closer to it than these, so angle slacks widen accordingly.
_COORD_DRIFT = 3e-15
_CANDIDATE_ERROR = 1e-12
_MAX_ANGLE_SLACK = 0.01


class View(NamedTuple):
    """Scale-free polar encoding of a configuration from one occupied point.

    Entries are (clockwise angle from the reference direction, distance
    normalized by the enclosing-circle radius, multiplicity), sorted by
    (angle, distance).
    """

    encoding: tuple[tuple[float, float, int], ...]


@dataclass
class SymmetryReport:
    sym: int
    classes: list[list[Point]]


@dataclass
class StringOfAngles:
    """Clockwise hop angles of the successor sweep around a center."""

    angles: tuple[float, ...]
    start: Point
    center: Point

    def __len__(self) -> int:
        return len(self.angles)


@dataclass
class QRegularityResult:
    """Detected rotational order m around a center.

    ``deficits`` maps ray directions (counterclockwise bearings from the
    center) to the number of robots that must leave the center to complete
    that ray; empty when the configuration is already regular.
    """

    center: Point
    m: int
    deficits: dict[float, int]


# --- shared low-level helpers ---------------------------------------------------


def circular_clusters(values: list[float], slack: float, modulus: float) -> list[tuple[float, list[int]]]:
    """Single-link clusters of circular values in [0, modulus).

    Returns (mean, member indices) pairs ordered by mean.  A cluster that
    straddles zero gets a mean slightly below zero rather than near the
    modulus, so consumers can compare means directly.
    """
    if not values:
        return []
    order = sorted(range(len(values)), key=lambda k: values[k])
    groups: list[list[int]] = [[order[0]]]
    for k in order[1:]:
        if values[k] - values[groups[-1][-1]] <= slack:
            groups[-1].append(k)
        else:
            groups.append([k])
    shifted: dict[int, float] = {}
    if len(groups) > 1 and values[groups[0][0]] + modulus - values[groups[-1][-1]] <= slack:
        for k in groups.pop():
            shifted[k] = values[k] - modulus
            groups[0].append(k)
    out = []
    for g in groups:
        mean = sum(shifted.get(k, values[k]) for k in g) / len(g)
        out.append((mean, sorted(g)))
    out.sort(key=lambda item: item[0])
    return out


def _direction_slack(config: Configuration, r_min: float, center_error: float) -> float:
    """Angle slack widened for robots very close to the measuring center."""
    base = config.tol.eps_angle
    if r_min <= 0.0:
        return base
    widened = center_error * config.diameter / r_min
    return min(max(base, widened), _MAX_ANGLE_SLACK)


class _CenterContext:
    """Per-center geometry shared by successor steps."""

    __slots__ = ("config", "center", "at_center", "dists", "angs", "slack", "merge_slack")

    def __init__(self, config: Configuration, center: Point, angle_slack: float | None):
        self.config = config
        self.center = center
        self.merge_slack = config.merge_slack
        self.dists = [dist(p, center) for p in config.points]
        self.at_center = [d <= self.merge_slack for d in self.dists]
        self.angs = [
            None if at else ccw_angle_of(p, center) % TAU
            for p, at in zip(config.points, self.at_center)
        ]
        if angle_slack is None:
            off = [d for d, at in zip(self.dists, self.at_center) if not at]
            angle_slack = _direction_slack(config, min(off) if off else 0.0, _COORD_DRIFT)
        self.slack = angle_slack

    def cw_from(self, i: int, k: int) -> float:
        """Clockwise angle from robot i's ray to robot k's ray; ~0 on the same ray."""
        delta = (self.angs[i] - self.angs[k]) % TAU  # type: ignore[operator]
        return wrap_near_zero(delta, self.slack)


def _farthest_then_index(ctx: _CenterContext, candidates: list[int]) -> int:
    """Max distance from the center with ties by max index.

    Distances of co-located robots may differ by rounding noise, so anything
    within the coincidence slack of the maximum counts as tied; otherwise the
    index tie-break the sweep relies on would be decided by ulps.
    """
    top = max(ctx.dists[k] for k in candidates)
    return max(k for k in candidates if ctx.dists[k] >= top - ctx.merge_slack)


def _successor_step(ctx: _CenterContext, i: int) -> int:
    pts = ctx.config.points
    p_i = pts[i]
    # co-located robots are visited in descending index order first
    for k in range(i - 1, -1, -1):
        if not ctx.at_center[k] and dist(pts[k], p_i) <= ctx.merge_slack:
            return k
    # then the nearest robot strictly between the center and p_i
    inside = [
        k
        for k, at in enumerate(ctx.at_center)
        if not at
        and k != i
        and abs(ctx.cw_from(i, k)) <= ctx.slack
        and dist(pts[k], p_i) > ctx.merge_slack
        and ctx.dists[k] < ctx.dists[i]
    ]
    if inside:
        return _farthest_then_index(ctx, inside)
    # otherwise jump to the angularly nearest ray in the clockwise direction,
    # entering at its farthest robot
    min_pos: float | None = None
    for k, at in enumerate(ctx.at_center):
        if at:
            continue
        d = ctx.cw_from(i, k)
        if d > ctx.slack and (min_pos is None or d < min_pos):
            min_pos = d
    bucket = []
    for k, at in enumerate(ctx.at_center):
        if at:
            continue
        d = ctx.cw_from(i, k)
        if min_pos is None:
            if abs(d) <= ctx.slack:  # full turn back onto the own ray
                bucket.append(k)
        elif abs(d - min_pos) <= ctx.slack:
            bucket.append(k)
    assert bucket
    return _farthest_then_index(ctx, bucket)


def successor(config: Configuration, i: int, c: Point, angle_slack: float | None = None) -> int:
    """Index of the clockwise successor of robot i around center c."""
    ctx = _CenterContext(config, c, angle_slack)
    if ctx.at_center[i]:
        raise DegenerateCenter(f"robot {i} sits on the center {c}")
    return _successor_step(ctx, i)


def string_of_angles(config: Configuration, i: int, c: Point, angle_slack: float | None = None) -> StringOfAngles:
    """Hop angles of the full successor cycle around c, started at robot i.

    The string has one entry per robot not located at c; hops that stay on
    the same ray (co-located robots, moves inward) contribute angle zero.
    """
    ctx = _CenterContext(config, c, angle_slack)
    if ctx.at_center[i]:
        raise DegenerateCenter(f"robot {i} sits on the center {c}")
    m = sum(1 for at in ctx.at_center if not at)
    angles = []
    cur = i
    for _ in range(m):
        nxt = _successor_step(ctx, cur)
        hop = (ctx.angs[cur] - ctx.angs[nxt]) % TAU  # type: ignore[operator]
        hop = wrap_near_zero(hop, ctx.slack)
        angles.append(0.0 if abs(hop) <= ctx.slack else hop)
        cur = nxt
    return StringOfAngles(tuple(angles), config.points[i], c)


def periodicity(sa: StringOfAngles, eps_angle: float = 1e-9) -> int:
    """Greatest k dividing |SA| such that SA is the k-fold repeat of a block."""
    angles = sa.angles if isinstance(sa, StringOfAngles) else tuple(sa)
    m = len(angles)
    if m == 0:
        raise ValueError("periodicity of an empty string")
    for k in range(m, 1, -1):
        if m % k:
            continue
        block = m // k
        if all(abs(angles[j] - angles[j % block]) <= eps_angle for j in range(block, m)):
            return k
    return 1


# --- views and symmetricity ------------------------------------------------------


def view(config: Configuration, p: Point) -> View:
    """Polar encoding of the configuration as seen from occupied position p.

    The reference direction points toward the center of the smallest
    enclosing circle; a robot located on that center instead uses whichever
    other occupied position maximizes its own encoding.
    """
    loc = config.find_location(p)
    if loc is None:
        raise NotOccupied(f"{p} is not an occupied location")
    locs = config.locations
    if len(locs) == 1:
        return View(((0.0, 0.0, config.n),))
    occupied = [l.location for l in locs]
    sec = smallest_enclosing_circle(occupied)
    if dist(loc.location, sec.center) > config.merge_slack:
        refs = [sec.center]
    else:
        refs = [l.location for l in locs if l is not loc]
    best: tuple[tuple[float, float, int], ...] | None = None
    for ref in refs:
        enc = _encode_from(config, loc.location, ref, sec.radius)
        if best is None or enc > best:
            best = enc
    assert best is not None
    return View(best)


def _encode_from(
    config: Configuration, origin: Point, ref: Point, sec_radius: float
) -> tuple[tuple[float, float, int], ...]:
    eps = config.tol.eps_angle
    phi_ref = ccw_angle_of(ref, origin)
    raw = []
    for l in config.locations:
        if dist(l.location, origin) <= config.merge_slack:
            raw.append((0.0, 0.0, l.multiplicity))
        else:
            theta = (phi_ref - ccw_angle_of(l.location, origin)) % TAU
            theta = wrap_near_zero(theta, eps)
            raw.append((theta, dist(l.location, origin) / sec_radius, l.multiplicity))
    # snap angles to cluster means so same-ray entries sort purely by radius
    clusters = circular_clusters([max(a, 0.0) % TAU for a, _, _ in raw], eps, TAU)
    snapped = [0.0] * len(raw)
    for mean, members in clusters:
        for k in members:
            snapped[k] = mean
    entries = sorted((snapped[k], raw[k][1], raw[k][2]) for k in range(len(raw)))
    return tuple(entries)


def views_equal(a: View, b: View, tol_len: float = 1e-9, tol_angle: float = 1e-9) -> bool:
    if len(a.encoding) != len(b.encoding):
        return False
    for (aa, ar, am), (ba, br, bm) in zip(a.encoding, b.encoding):
        if am != bm or abs(aa - ba) > tol_angle or abs(ar - br) > tol_len:
            return False
    return True


def symmetricity(config: Configuration) -> SymmetryReport:
    """Partition occupied positions by equal views; sym is the largest class."""
    locs = config.locations
    vs = [view(config, l.location) for l in locs]
    classes: list[list[int]] = []
    for i in range(len(locs)):
        for cls in classes:
            if views_equal(vs[i], vs[cls[0]], config.tol.eps_len, config.tol.eps_angle):
                cls.append(i)
                break
        else:
            classes.append([i])
    groups = [[locs[i].location for i in cls] for cls in classes]
    return SymmetryReport(max(len(g) for g in groups), groups)


# --- regularity and quasi-regularity ----------------------------------------------


def regularity_at(config: Configuration, c: Point, angle_slack: float | None = None) -> int:
    """Rotational order of the ray structure around c (1 when none).

    Computed as the periodicity of the string of angles and confirmed by the
    rotated-ray counting test; the returned order always satisfies both.  On
    exact inputs the two agree outright; for inputs sitting on the tolerance
    knife edge the largest confirmed divisor wins, so the function stays
    total and conservative.
    """
    merge_slack = config.merge_slack
    off = [i for i, p in enumerate(config.points) if dist(p, c) > merge_slack]
    if not off:
        raise AllAtCenter(f"no robot off the center {c}")
    if angle_slack is None:
        r_min = min(dist(config.points[i], c) for i in off)
        angle_slack = _direction_slack(config, r_min, _COORD_DRIFT)
    dirs = _ray_clusters(config, c, off, angle_slack)
    if len(dirs) == 1:
        return 1
    sa = string_of_angles(config, off[0], c, angle_slack)
    per = periodicity(sa, angle_slack)
    for k in sorted((k for k in range(1, per + 1) if per % k == 0), reverse=True):
        if k == 1 or _ray_rotation_holds(dirs, k, angle_slack):
            return k
    return 1


def _ray_clusters(
    config: Configuration, c: Point, off: list[int], slack: float
) -> list[tuple[float, int]]:
    """(direction, robot count) per occupied ray from c."""
    angles = [ccw_angle_of(config.points[i], c) % TAU for i in off]
    return [(mean, len(members)) for mean, members in circular_clusters(angles, slack, TAU)]


def _ray_rotation_holds(dirs: list[tuple[float, int]], m: int, slack: float) -> bool:
    window = 4.0 * slack
    step = TAU / m
    for theta, count in dirs:
        for k in range(1, m):
            target = (theta + k * step) % TAU
            if not any(
                min(abs(target - other), TAU - abs(target - other)) <= window and count == c2
                for other, c2 in dirs
            ):
                return False
    return True


def qregular_test(config: Configuration, p: Point, m: int) -> QRegularityResult | None:
    """Check whether parking robots from p onto deficient rays makes the ray
    structure invariant under rotation by 2*pi/m around p.

    Succeeds iff the total deficit does not exceed the multiplicity of p.
    """
    if m < 2:
        raise ValueError("rotational order must be at least 2")
    loc = config.find_location(p)
    if loc is None:
        raise NotOccupied(f"{p} is not an occupied location")
    center = loc.location
    off = [i for i, q in enumerate(config.points) if dist(q, center) > config.merge_slack]
    if not off:
        return QRegularityResult(center, m, {})
    r_min = min(dist(config.points[i], center) for i in off)
    slack = _direction_slack(config, r_min, _COORD_DRIFT)
    dirs = _ray_clusters(config, center, off, slack)
    return _deficits_for(dirs, loc.multiplicity, m, slack, center)


def _deficits_for(
    dirs: list[tuple[float, int]], mult_center: int, m: int, slack: float, center: Point
) -> QRegularityResult | None:
    step = TAU / m
    # every orbit needs m occupied slots, so at least this many robots move
    lower_bound = m * ((len(dirs) + m - 1) // m) - sum(c for _, c in dirs)
    if lower_bound > mult_center:
        return None
    residues = [theta % step for theta, _ in dirs]
    orbits = circular_clusters(residues, slack, step)
    total = 0
    deficits: dict[float, int] = {}
    for _, members in orbits:
        if len(members) > m:
            return None
        counts = [dirs[k][1] for k in members]
        obj = max(counts)
        total += m * obj - sum(counts)
        if total > mult_center:
            return None
        anchor = dirs[members[0]][0]
        slot_count: dict[int, tuple[float, int]] = {}
        for k in members:
            theta = dirs[k][0]
            t = round(((theta - anchor) % TAU) / step) % m
            if t in slot_count:
                return None
            slot_count[t] = (theta, dirs[k][1])
        for t in range(m):
            theta, cnt = slot_count.get(t, ((anchor + t * step) % TAU, 0))
            if obj - cnt > 0:
                deficits[theta] = obj - cnt
    return QRegularityResult(center, m, deficits)


def detect_quasi_regular(config: Configuration) -> QRegularityResult | None:
    """Find the center and maximal order of quasi-regularity, if any.

    Occupied candidate centers are tested combinatorially for every order
    down from n; an unoccupied center can only belong to an already regular
    configuration, so the geometric-median candidate is validated by the
    ray periodicity test.
    """
    if config.is_linear:
        raise LinearInput("quasi-regularity is defined for non-linear configurations")
    n = config.n
    for loc in config.locations:
        off = [i for i, q in enumerate(config.points) if dist(q, loc.location) > config.merge_slack]
        r_min = min(dist(config.points[i], loc.location) for i in off)
        slack = _direction_slack(config, r_min, _COORD_DRIFT)
        dirs = _ray_clusters(config, loc.location, off, slack)
        for m in range(n, 1, -1):
            res = _deficits_for(dirs, loc.multiplicity, m, slack, loc.location)
            if res is not None:
                return res
    candidate = weber_numeric(config)
    if config.find_location(candidate) is not None:
        return None
    r_min = min(dist(q, candidate) for q in config.points)
    slack = _direction_slack(config, r_min, _CANDIDATE_ERROR)
    order = regularity_at(config, candidate, slack)
    if order >= 2:
        return QRegularityResult(candidate, order, {})
    return None


# --- Weber point ------------------------------------------------------------------

_WEBER_STEP_REL = 1e-10
_WEBER_MAX_ITER = 1000
_POLISH_STEP_REL = 1e-15


def weber_numeric(config: Configuration) -> Point:
    """Geometric median: iterative reweighting plus a Newton polish.

    Non-linear configurations only, where the minimizer is unique.  Occupied
    locations are checked for optimality directly, so medians that sit on a
    robot are returned exactly.  Reweighting alone stalls when the median
    lies close to an occupied location; the damped Newton steps on the
    (there smooth) objective recover full float precision.
    """
    if config.is_linear:
        raise LinearInput("the Weber point of a linear configuration is not unique")
    locs = config.locations
    diam = config.diameter
    tiny = _WEBER_STEP_REL * diam

    vertex = _optimal_vertex(locs)
    if vertex is not None:
        return vertex

    sx = sum(l.location.x * l.multiplicity for l in locs)
    sy = sum(l.location.y * l.multiplicity for l in locs)
    y = Point(sx / config.n, sy / config.n)
    for _ in range(_WEBER_MAX_ITER):
        near = next((l for l in locs if dist(l.location, y) <= tiny), None)
        if near is not None:
            y = _push_off_vertex(locs, near)
            continue
        wx = wy = wsum = 0.0
        for l in locs:
            w = l.multiplicity / dist(l.location, y)
            wx += w * l.location.x
            wy += w * l.location.y
            wsum += w
        y_new = Point(wx / wsum, wy / wsum)
        step = dist(y_new, y)
        y = y_new
        if step <= tiny:
            break
    return _newton_polish(locs, y, diam)


def _gradient(locs, y: Point) -> tuple[float, float, float]:
    gx = gy = 0.0
    for l in locs:
        d = dist(l.location, y)
        if d == 0.0:
            return math.inf, math.inf, math.inf
        gx += l.multiplicity * (y.x - l.location.x) / d
        gy += l.multiplicity * (y.y - l.location.y) / d
    return gx, gy, math.hypot(gx, gy)


def _newton_polish(locs, y: Point, diam: float) -> Point:
    for _ in range(60):
        gx = gy = 0.0
        hxx = hxy = hyy = 0.0
        for l in locs:
            dx = y.x - l.location.x
            dy = y.y - l.location.y
            d = math.hypot(dx, dy)
            if d <= 1e-17 * diam:
                return y
            ux = dx / d
            uy = dy / d
            gx += l.multiplicity * ux
            gy += l.multiplicity * uy
            curve = l.multiplicity / d
            hxx += curve * (1.0 - ux * ux)
            hxy -= curve * ux * uy
            hyy += curve * (1.0 - uy * uy)
        det = hxx * hyy - hxy * hxy
        gnorm = math.hypot(gx, gy)
        if det <= 0.0 or gnorm == 0.0:
            return y
        sx = (hyy * gx - hxy * gy) / det
        sy = (hxx * gy - hxy * gx) / det
        t = 1.0
        while t > 1e-6:
            candidate = Point(y.x - t * sx, y.y - t * sy)
            if _gradient(locs, candidate)[2] < gnorm:
                break
            t *= 0.5
        else:
            return y
        step = t * math.hypot(sx, sy)
        y = candidate
        if step <= _POLISH_STEP_REL * diam:
            return y
    return y


def _pull_vector(locs, at) -> tuple[float, float]:
    gx = gy = 0.0
    for l in locs:
        if l is at:
            continue
        d = dist(l.location, at.location)
        gx += l.multiplicity * (l.location.x - at.location.x) / d
        gy += l.multiplicity * (l.location.y - at.location.y) / d
    return gx, gy


def _optimal_vertex(locs) -> Point | None:
    for l in locs:
        gx, gy = _pull_vector(locs, l)
        if math.hypot(gx, gy) <= l.multiplicity * (1.0 + 1e-12):
            return l.location
    return None


def _push_off_vertex(locs, at) -> Point:
    gx, gy = _pull_vector(locs, at)
    norm = math.hypot(gx, gy)
    damping = sum(l.multiplicity / dist(l.location, at.location) for l in locs if l is not at)
    t = (norm - at.multiplicity) / damping
    return Point(at.location.x + t * gx / norm, at.location.y + t * gy / norm)


def weber_point(config: Configuration, cls: ConfigClass) -> Point:
    """The unique Weber point for classes that pin one down (L1W and QR)."""
    if cls.tag in (TAG_L1W, TAG_QREGULAR) and cls.weber is not None:
        return cls.weber
    raise ClassWithoutUniqueWeber(f"class {cls.tag} does not define a unique Weber point")
