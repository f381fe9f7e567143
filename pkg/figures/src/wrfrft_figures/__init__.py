"""Deterministic figure rendering for the radar-search toolkit's exports."""

from .readers import InputError, read_curve_csv, read_matrix, read_rows_csv
from .render import KINDS, FigureSpec, parse_spec, render

__version__ = "0.1.0"
