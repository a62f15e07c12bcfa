"""knotsteer: knotoid-spectrum complexity and topological steering of polymers."""

from .complexity import ComplexityEstimate, KnotoidDistribution, aun, knotoid_spectrum, tun
from .geometry import PolyCurve, SubchainSpec, project, read_curve, sample_directions, trim, write_curve
from .knot_id import KnotDistribution, KnotType, classify_family, stochastic_closure

__version__ = "0.1.0"

__all__ = [
    "ComplexityEstimate", "KnotoidDistribution", "aun", "knotoid_spectrum", "tun",
    "PolyCurve", "SubchainSpec", "project", "read_curve", "sample_directions",
    "trim", "write_curve",
    "KnotDistribution", "KnotType", "classify_family", "stochastic_closure",
    "__version__",
]
