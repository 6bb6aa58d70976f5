"""Destination computation for one robot from one snapshot.

Pure functions of the observed configuration: robots keep no state between
activations, and co-located robots always receive identical decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import configuration as cfg
from . import symmetry
from .configuration import ConfigClass, Configuration
from .errors import BivalentInput, WrongClass
from .geometry import TAU, Point, angle_cw, dist, on_open_segment, rotate_cw

RULE_M_DIRECT = "M_direct"
RULE_M_SIDESTEP = "M_sidestep"
RULE_WEBER = "WeberMove"
RULE_A_ELECT = "A_elect"
RULE_L2W_CENTER = "L2W_center"
RULE_L2W_ROTATE = "L2W_rotate"
RULE_STAY = "Stay"


@dataclass
class ComputeDecision:
    destination: Point
    rule: str
    elected: Point | None = None


class PotentialValue(NamedTuple):
    """Lexicographic progress measure of asymmetric configurations."""

    mult: int
    inv_sum: float


def compute(config: Configuration, self_index: int, cls: ConfigClass | None = None) -> ComputeDecision:
    """Destination of the robot at ``self_index`` given the snapshot.

    ``cls`` may carry a precomputed classification of the same configuration
    to avoid repeating it for every robot of one round.
    """
    if cls is None:
        cls = cfg.classify(config)
    r = config.points[self_index]
    slack = config.merge_slack

    if cls.tag == cfg.TAG_BIVALENT:
        raise BivalentInput("the protocol defines no move in a bivalent configuration")

    if cls.tag == cfg.TAG_MULTIPLE:
        elected = cls.elected
        assert elected is not None
        if dist(r, elected) <= slack:
            return ComputeDecision(r, RULE_STAY, elected)
        blocked = any(on_open_segment(q, r, elected, config.tol) for q in config.points)
        if not blocked:
            return ComputeDecision(elected, RULE_M_DIRECT, elected)
        theta = _sidestep_angle(config, self_index, elected)
        return ComputeDecision(rotate_cw(r, elected, theta / 3.0), RULE_M_SIDESTEP, elected)

    if cls.tag in (cfg.TAG_L1W, cfg.TAG_QREGULAR):
        target = cls.weber
        assert target is not None
        if dist(r, target) <= slack:
            return ComputeDecision(r, RULE_STAY)
        return ComputeDecision(target, RULE_WEBER)

    if cls.tag == cfg.TAG_ASYMMETRIC:
        elected = cls.elected
        assert elected is not None
        if dist(r, elected) <= slack:
            return ComputeDecision(r, RULE_STAY, elected)
        return ComputeDecision(elected, RULE_A_ELECT, elected)

    assert cls.tag == cfg.TAG_L2W and cls.endpoints is not None and cls.midpoint is not None
    lo, hi = cls.endpoints
    mid = cls.midpoint
    if dist(r, lo) <= slack or dist(r, hi) <= slack:
        return ComputeDecision(rotate_cw(r, mid, math.pi / 4.0), RULE_L2W_ROTATE)
    if dist(r, mid) <= slack:
        return ComputeDecision(r, RULE_STAY)
    return ComputeDecision(mid, RULE_L2W_CENTER)


def _sidestep_angle(config: Configuration, self_index: int, elected: Point) -> float:
    """Clockwise angle to the first successor off the robot's own ray.

    Falls back to a full turn when every robot outside the elected point
    lies on the ray through the moving robot, so the side step still clears
    one third of the available gap.
    """
    r = config.points[self_index]
    eps = config.tol.eps_angle
    off_ray_count = sum(
        1
        for q in config.points
        if dist(q, elected) > config.merge_slack
        and not _same_ray(elected, r, q, config.merge_slack, eps)
    )
    steps = config.n - config.multiplicity_at(elected)
    cur = self_index
    for _ in range(steps):
        cur = symmetry.successor(config, cur, elected)
        q = config.points[cur]
        if not _same_ray(elected, r, q, config.merge_slack, eps):
            return angle_cw(r, elected, q, config.tol)
    if off_ray_count:
        raise RuntimeError("successor sweep missed every off-ray robot")
    return TAU


def _same_ray(center: Point, a: Point, b: Point, merge_slack: float, eps_angle: float) -> bool:
    if dist(a, b) <= merge_slack:
        return True
    theta = angle_cw(a, center, b)
    return theta <= eps_angle or theta >= TAU - eps_angle


def moving_set(config: Configuration, cls: ConfigClass | None = None) -> list[Point]:
    """Occupied locations whose robots are instructed to move."""
    if cls is None:
        cls = cfg.classify(config)
    if cls.tag == cfg.TAG_BIVALENT:
        raise BivalentInput("moving set undefined for bivalent configurations")
    out = []
    for loc in config.locations:
        decision = compute(config, loc.indices[0], cls)
        if decision.rule != RULE_STAY:
            out.append(loc.location)
    return out


def potential(config: Configuration, cls: ConfigClass | None = None) -> PotentialValue:
    """(multiplicity, 1/distance-sum) of the elected safe point (class A only)."""
    if cls is None:
        cls = cfg.classify(config)
    if cls.tag != cfg.TAG_ASYMMETRIC or cls.elected is None:
        raise WrongClass(f"potential is defined for class A, not {cls.tag}")
    total = sum(dist(cls.elected, q) for q in config.points)
    return PotentialValue(config.multiplicity_at(cls.elected), 1.0 / total)
