"""Figure rendering for linres experiment output directories."""

__version__ = "0.1.0"

from linresplots.figures import FigureSpec, render_figures
