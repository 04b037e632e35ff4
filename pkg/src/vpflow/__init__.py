"""Volume-preserving flat-flow laboratory on 2D grids."""

__version__ = "0.1.0"

from .grid import Grid, GridField, load_field
from .region import Region, signed_distance

__all__ = [
    "Grid",
    "GridField",
    "load_field",
    "Region",
    "signed_distance",
    "__version__",
]
