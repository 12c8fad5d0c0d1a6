"""
Glaeser Refinement Toolkit - Main Entry Point

Usage:
    python main.py run configs/paper_feasible.toml
    python main.py boundary-scan --resolution 128 --out-csv out/scan.csv
"""

import sys

from src.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
