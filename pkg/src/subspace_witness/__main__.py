#!/usr/bin/env python3
"""
Subspace Witness - package entry point

    python -m subspace_witness <command> [options]
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
