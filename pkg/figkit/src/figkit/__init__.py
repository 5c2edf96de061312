"""Figure panels for rbmcascade CSV artifacts (SVG, deterministic)."""

from .panels import PANELS, FigureSpec, render
from .schema import SchemaError

__version__ = "0.1.0"

__all__ = ["PANELS", "FigureSpec", "render", "SchemaError", "__version__"]
