"""Zero localization for entire functions written as f(z**2) + z*g(z**2)."""

__version__ = "0.1.0"
