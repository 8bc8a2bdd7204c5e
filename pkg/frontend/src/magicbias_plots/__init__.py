"""Figure rendering for magicbias sweep outputs (no physics computed here)."""

from .render import FigureSpec, RenderError, render

__all__ = ["FigureSpec", "RenderError", "render"]
