"""Walk algebra on directed mixed graphs."""
__version__ = "0.1.0"
