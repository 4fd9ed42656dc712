# main.py
"""entropylab entry point: ``python main.py run experiments/sandwich.yaml``."""

from __future__ import annotations

import sys

from entropylab.cli import main

if __name__ == "__main__":
    sys.exit(main())
