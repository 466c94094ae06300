from enum import Enum


class PenKind(Enum):
    """Penetration maps attached to a convex body."""

    LENGTH = "length"
    PH = "ph"
    IPP = "ipp"
    FTP = "ftp"
    BP = "bp"
    CRP = "crp"


class BodyKind(Enum):
    HOROBALL = "horoball"
    BALL = "ball"
    TUBE = "tube"


class Ring(Enum):
    """Ring of integers a Ford family is built over."""

    RATIONAL = "rational"
    GAUSSIAN = "gaussian"


class Model(Enum):
    H2 = "h2"
    H3 = "h3"

    @property
    def dim(self) -> int:
        return 2 if self is Model.H2 else 3


class ThresholdCase(Enum):
    """Which local-prescription regime a configuration falls in."""

    HOROBALL = "horoball"
    BALL = "ball"
    TUBE = "tube"
    DISJOINT = "disjoint"
