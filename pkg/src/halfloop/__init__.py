"""Exact verification engine for twisted Gaudin magnets and star-graph Dunkl operators."""

__version__ = "0.1.0"
