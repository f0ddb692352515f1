"""Figure rendering for vdw-otoc artifact directories."""

__version__ = "0.1.0"

from .figures import FIGURE_IDS, FigureSpec, render

__all__ = ["__version__", "FIGURE_IDS", "FigureSpec", "render"]
