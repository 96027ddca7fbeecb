#!/usr/bin/env python3
"""Quantum-correction sweep.

Sweeps the quantum scale over a dyadic grid at fixed initial data and
fits the power of the eigenvalue correction (expected: 2, the scale
enters every equation squared). Also demonstrates blow-up reporting on
a config whose caustic falls inside the horizon.
"""

import sys
from pathlib import Path

from qap.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run() -> int:
    print("=== qap sweep-hbar ===")
    code = main(["sweep-hbar", "--config", str(CONFIGS / "quantum_sweep.ini"),
                 "--out", "results/quantum"])
    print(f"--- exit {code}")

    print("\n=== qap integrate (caustic demo, expected exit 3) ===")
    blow = main(["integrate", "--config", str(CONFIGS / "caustic.ini"),
                 "--out", "results/caustic"])
    print(f"--- exit {blow}")
    return code if code != 0 else (0 if blow == 3 else 1)


if __name__ == "__main__":
    sys.exit(run())
