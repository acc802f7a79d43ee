"""Figure rendering for spike-direction simulation studies."""

from .render import FigureSpec, SchemaError, build_panels, load_rows, render

__all__ = ["FigureSpec", "SchemaError", "build_panels", "load_rows", "render"]
