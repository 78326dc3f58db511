"""biolit: entity- and relation-aware biomedical literature search."""

__version__ = "0.1.0"
