#!/usr/bin/env python3
# ============================================================================
# EWP-SCS - MAIN ENTRY POINT
# ============================================================================
"""
Usage:
    python -m ewp_scs scs --input returns.csv --loss mv:gamma=0.5 --alpha 0.05

Environment Variables:
    EWP_SCS_THREADS   - Worker processes (0 = one per CPU)
    EWP_SCS_OUT_DIR   - Default output directory
    EWP_SCS_VERBOSE   - Debug logging when set
    NO_COLOR          - Disable colored output
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
