import sys
from pathlib import Path

# make the shared brute-force oracles importable from any working directory
sys.path.insert(0, str(Path(__file__).resolve().parent))
