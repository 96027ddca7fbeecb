#!/usr/bin/env python3
"""Classical-limit experiment battery.

Runs the closed-form verification pipeline end to end with the bundled
config: integrator-vs-oracle check, degeneracy scan over the phase
offset, extremization, and the integrator-order probe. Outputs land in
results/classical/.
"""

import sys
from pathlib import Path

from qap.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "classical.ini"
OUT = "results/classical"


def run() -> int:
    worst = 0
    for command in ("integrate", "eigenvalue", "classical-check", "scan-t0",
                    "extremize", "convergence"):
        print(f"\n=== qap {command} ===")
        code = main([command, "--config", str(CONFIG), "--out", OUT])
        print(f"--- exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run())
