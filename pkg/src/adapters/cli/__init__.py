"""
Command-line adapter.

argparse front end over the use cases: verify, sweep, compare, certify,
compact, audit and fixture.
"""

from .commands import main

__all__ = ["main"]
