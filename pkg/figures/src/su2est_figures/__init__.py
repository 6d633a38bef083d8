"""Figure rendering for Fisher-set boundary CSV data."""

from .render import FigureSpec, PanelData, SchemaError, load_panel, render

__all__ = ["FigureSpec", "PanelData", "SchemaError", "load_panel", "render"]
