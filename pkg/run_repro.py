import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent))
from feasibility.cli import run_command
from feasibility.repro import REPRO_CASES

if __name__ == "__main__":
    if len(sys.argv) == 1:
        # no case given: run them all with their default options
        codes = [run_command("repro", [name]) for name in REPRO_CASES]
        sys.exit(max(codes))
    sys.exit(run_command("repro", sys.argv[1:]))

    # python run_repro.py example-3-1 --alpha 1 --x0 0.5
