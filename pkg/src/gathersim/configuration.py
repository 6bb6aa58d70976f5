"""Robot configurations: multiset of positions, classification, safe points.

A configuration is classified into exactly one of six classes:

=====  ==========================================================
tag    meaning
=====  ==========================================================
B      bivalent: robots split equally over exactly two locations
M      a unique location of strictly maximal multiplicity exists
L1W    linear with a unique median (hence a unique Weber point)
L2W    linear with a non-degenerate median interval
QR     non-linear and quasi-regular around some center
A      non-linear, not quasi-regular, all views distinct
=====  ==========================================================

The tests are applied in that order; each later class excludes the earlier
ones by definition, so ordered testing yields a partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from . import geometry
from .errors import NotLinear
from .geometry import Point, Tolerance, dist

TAG_BIVALENT = "B"
TAG_MULTIPLE = "M"
TAG_L1W = "L1W"
TAG_L2W = "L2W"
TAG_QREGULAR = "QR"
TAG_ASYMMETRIC = "A"

ALL_TAGS = (TAG_BIVALENT, TAG_MULTIPLE, TAG_L1W, TAG_L2W, TAG_QREGULAR, TAG_ASYMMETRIC)


@dataclass
class LocationSummary:
    location: Point
    multiplicity: int
    indices: list[int]


@dataclass
class ConfigClass:
    """Class tag plus the per-class analysis detail the protocol consumes."""

    tag: str
    elected: Point | None = None          # M: max-multiplicity point; A: elected safe point
    weber: Point | None = None            # L1W: unique median; QR: center of quasi-regularity
    qreg: int | None = None               # QR: detected rotational order (>= 2)
    endpoints: tuple[Point, Point] | None = None  # L2W: extreme locations
    midpoint: Point | None = None         # L2W: midpoint of the endpoints


class Configuration:
    """Indexed multiset of robot positions with tolerance-aware multiplicities."""

    def __init__(self, points: Iterable[Point | Sequence[float]], tol: Tolerance | None = None):
        pts = tuple(Point(float(p[0]), float(p[1])) for p in points)
        if not pts:
            raise ValueError("a configuration needs at least one robot")
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValueError(f"non-finite coordinate: {p}")
        self.points: tuple[Point, ...] = pts
        self.tol: Tolerance = tol or geometry.DEFAULT_TOLERANCE

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def diameter(self) -> float:
        return geometry.farthest_pair(self.points)[2]

    @cached_property
    def merge_slack(self) -> float:
        """Absolute coincidence threshold used for multiplicity merging."""
        return self.tol.eps_len * self.diameter

    @cached_property
    def locations(self) -> list[LocationSummary]:
        """Distinct occupied locations (single-link merge within tolerance)."""
        slack = self.merge_slack
        n = self.n
        parent = list(range(n))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(n):
            for j in range(i + 1, n):
                if dist(self.points[i], self.points[j]) <= slack:
                    parent[find(j)] = find(i)
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        out = []
        for root in sorted(groups, key=lambda r: min(groups[r])):
            idx = sorted(groups[root])
            out.append(LocationSummary(self.points[idx[0]], len(idx), idx))
        return out

    @cached_property
    def is_linear(self) -> bool:
        return geometry.collinear(self.points, self.tol)

    def location_of(self, index: int) -> LocationSummary:
        for loc in self.locations:
            if index in loc.indices:
                return loc
        raise IndexError(index)

    def find_location(self, p: Point) -> LocationSummary | None:
        """The occupied location coinciding with p within tolerance, if any."""
        for loc in self.locations:
            if dist(loc.location, p) <= self.merge_slack:
                return loc
        return None

    def multiplicity_at(self, p: Point) -> int:
        loc = self.find_location(p)
        return loc.multiplicity if loc else 0

    def occupied_points(self) -> list[Point]:
        return [loc.location for loc in self.locations]

    def __repr__(self) -> str:
        return f"Configuration({list(self.points)!r})"


def distinct_locations(config: Configuration) -> list[LocationSummary]:
    """Occupied locations with multiplicities; multiplicities sum to n."""
    return config.locations


def median_interval(config: Configuration) -> tuple[Point, Point]:
    """The two extreme median positions of a linear configuration.

    Both returned points are robot positions; they coincide exactly when the
    median (and therefore the Weber point) is unique.
    """
    if not config.is_linear:
        raise NotLinear("median interval of a non-linear configuration")
    lo, hi = linear_endpoints(config)
    if lo == hi:
        return (lo, hi)
    dx = hi.x - lo.x
    dy = hi.y - lo.y
    norm = math.hypot(dx, dy)
    dx /= norm
    dy /= norm
    ordered = sorted(
        range(config.n),
        key=lambda i: ((config.points[i].x - lo.x) * dx + (config.points[i].y - lo.y) * dy, i),
    )
    n = config.n
    lo_rank = (n + 1) // 2 - 1   # ceil(n/2), 0-based
    hi_rank = n // 2             # floor(n/2) + 1, 0-based
    return (config.points[ordered[lo_rank]], config.points[ordered[hi_rank]])


def linear_endpoints(config: Configuration) -> tuple[Point, Point]:
    """Extreme occupied locations of a linear configuration, in (x, y) order."""
    if not config.is_linear:
        raise NotLinear("endpoints of a non-linear configuration")
    a, b, _ = geometry.farthest_pair(config.occupied_points())
    return (a, b) if a <= b else (b, a)


def safe_points(config: Configuration) -> list[Point]:
    """Occupied locations from which every half-line holds <= ceil(n/2)-1 robots."""
    limit = (config.n + 1) // 2 - 1
    slack = config.merge_slack
    eps_angle = config.tol.eps_angle
    out = []
    for loc in config.locations:
        others = [p for p in config.points if dist(p, loc.location) > slack]
        if _max_ray_count(loc.location, others, eps_angle) <= limit:
            out.append(loc.location)
    return out


def _max_ray_count(origin: Point, others: list[Point], eps_angle: float) -> int:
    if not others:
        return 0
    angles = sorted(geometry.ccw_angle_of(p, origin) % geometry.TAU for p in others)
    counts = []
    current = 1
    for prev, cur in zip(angles, angles[1:]):
        if cur - prev <= eps_angle:
            current += 1
        else:
            counts.append(current)
            current = 1
    counts.append(current)
    # circular wrap: first and last bucket may be the same ray
    if len(counts) > 1 and (angles[0] + geometry.TAU - angles[-1]) <= eps_angle:
        counts[0] += counts.pop()
    return max(counts)


def classify(config: Configuration) -> ConfigClass:
    """Assign the configuration its unique class tag plus analysis detail."""
    locs = config.locations
    n = config.n

    if len(locs) == 2 and locs[0].multiplicity == locs[1].multiplicity:
        return ConfigClass(TAG_BIVALENT)

    best = max(loc.multiplicity for loc in locs)
    top = [loc for loc in locs if loc.multiplicity == best]
    if len(top) == 1:
        return ConfigClass(TAG_MULTIPLE, elected=top[0].location)

    if config.is_linear:
        lo, hi = median_interval(config)
        if dist(lo, hi) <= config.merge_slack:
            return ConfigClass(TAG_L1W, weber=lo)
        u_lo, u_hi = linear_endpoints(config)
        mid = Point((u_lo.x + u_hi.x) / 2.0, (u_lo.y + u_hi.y) / 2.0)
        return ConfigClass(TAG_L2W, endpoints=(u_lo, u_hi), midpoint=mid)

    from . import symmetry  # late import: symmetry depends on this module

    qr = symmetry.detect_quasi_regular(config)
    if qr is not None:
        return ConfigClass(TAG_QREGULAR, weber=qr.center, qreg=qr.m)

    safe = safe_points(config)
    if not safe:
        raise RuntimeError("non-linear configuration without a safe point")
    elected = _elect_safe_point(config, safe)
    _assert_asymmetric(config)
    return ConfigClass(TAG_ASYMMETRIC, elected=elected)


def _elect_safe_point(config: Configuration, safe: list[Point]) -> Point:
    """Maximize (multiplicity, 1/distance-sum, view) over the safe points.

    Distance sums are compared with tolerance so the winner is stable under
    the float noise of a robot's local coordinate frame; exact ties fall
    through to the total order on views.
    """
    best_mult = max(config.multiplicity_at(p) for p in safe)
    cands = [p for p in safe if config.multiplicity_at(p) == best_mult]
    totals = {p: sum(dist(p, q) for q in config.points) for p in cands}
    lowest = min(totals.values())
    tied = [p for p in cands if totals[p] <= lowest + config.merge_slack]
    if len(tied) == 1:
        return tied[0]
    from . import symmetry

    return max(tied, key=lambda p: symmetry.view(config, p).encoding)


def _assert_asymmetric(config: Configuration) -> None:
    """All views must be distinct when no quasi-regular structure exists.

    A cheap screen first: if every location has a distinct (multiplicity,
    distance multiset) signature, views are necessarily distinct.
    """
    sigs = set()
    distinct = True
    for loc in config.locations:
        sig = (loc.multiplicity, tuple(sorted(round(dist(loc.location, q), 9) for q in config.points)))
        if sig in sigs:
            distinct = False
            break
        sigs.add(sig)
    if distinct:
        return
    from . import symmetry

    report = symmetry.symmetricity(config)
    if report.sym != 1:
        raise RuntimeError(f"classified asymmetric but sym={report.sym}")


def is_gathered(config: Configuration, live: Sequence[bool], moving: Iterable[Point]) -> bool:
    """True iff the live robots share one location and are instructed to stay."""
    if len(live) != config.n:
        raise ValueError("live mask length must equal the robot count")
    live_pts = [p for p, alive in zip(config.points, live) if alive]
    if not live_pts:
        raise ValueError("at least one robot must be live")
    slack = config.merge_slack
    anchor = live_pts[0]
    if any(dist(p, anchor) > slack for p in live_pts[1:]):
        return False
    return all(dist(anchor, m) > slack for m in moving)
