"""Theme-aware episode similarity and rating prediction for Star Trek catalogs."""

__version__ = "0.1.0"
