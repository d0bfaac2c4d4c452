"""Figure generation for harness CSV output."""

from .figure import FigureSpec, fit_power_law, render

__all__ = ["FigureSpec", "fit_power_law", "render"]
__version__ = "0.1.0"
