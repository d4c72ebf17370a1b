#!/usr/bin/env python3
"""Regenerate the committed blast reference under refs/blast-dvm.

The global grid for the blast extremes needs a couple thousand velocity
nodes, so this takes minutes; the result is committed so the test suite
can compare against it without paying that cost.  Output is unchanged
across reruns on any machine (wall time in summary.csv aside).
"""

import sys
from pathlib import Path

from ldvgas.cli import main

REPO = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "run",
                str(REPO / "configs" / "blast-dvm.cfg"),
                "--out",
                str(REPO / "refs" / "blast-dvm"),
                "--no-plots",
            ]
        )
    )
