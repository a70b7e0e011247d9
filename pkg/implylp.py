#!/usr/bin/env python3
"""
Command-line entry point of implylp.

Usage: python implylp.py verify --net1 a.json --net2 b.json --samples s.json --delta 0.001
Run ``python implylp.py --help`` for every command.
"""

import sys

from src.adapters.cli import main

if __name__ == "__main__":
    sys.exit(main())
