"""Exception types raised by the library."""


class GatherError(Exception):
    """Base class for all library errors."""


class EmptyInput(GatherError, ValueError):
    """An operation that needs at least one point received none."""


class DegenerateAngle(GatherError, ValueError):
    """Angle query where one of the rays has zero length."""


class DegenerateCenter(GatherError, ValueError):
    """Successor/string-of-angles query for a robot sitting on the center."""


class NotOccupied(GatherError, ValueError):
    """The queried point is not an occupied location of the configuration."""


class NotLinear(GatherError, ValueError):
    """Median interval requested for a non-linear configuration."""


class LinearInput(GatherError, ValueError):
    """Operation defined only for non-linear configurations."""


class AllAtCenter(GatherError, ValueError):
    """Regularity query with every robot located at the candidate center."""


class WrongClass(GatherError, ValueError):
    """Operation invoked for a configuration class it is not defined on."""


class ClassWithoutUniqueWeber(GatherError, ValueError):
    """Weber point requested for a class that does not pin one down."""


class BivalentInput(GatherError, ValueError):
    """The protocol defines no move for bivalent configurations."""


class BivalentInitial(GatherError, ValueError):
    """Simulation started from a bivalent configuration (gathering impossible)."""


class TooFewRobots(GatherError, ValueError):
    """Simulation requires at least three robots."""


class InvariantViolation(GatherError, RuntimeError):
    """A run-time invariant of the protocol was broken during simulation."""
