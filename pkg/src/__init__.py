# implylp - differential verification of compatible neural networks

__version__ = "1.0.0"
