import sys
import time
from pathlib import Path

sys.path.append(str(Path(__file__).parent))
from feasibility.cli import run_command

# --problem: Path  # JSON or YAML problem file
# --x0: list[float] | None = None  # origin if not given
# --schedule: str = "constant:1"  # constant:<a> | harmonic:<c> | explicit:<path>[@tail] | normalized:<inner>
# --select: str = "first_violated"  # most_violated | cyclic | random
# --seed: int | None = None  # $FEASIBILITY_SEED or 0
# --budget: int | None = None
# --tolerance: float | None = None
# --trace: Path | None = None  # JSON-lines trace
# --monitors: bool = False
# --config: config.yaml holds the same keys

if __name__ == "__main__":
    t = time.time()
    code = run_command("solve", sys.argv[1:])
    print(f"# took {time.time() - t:.3f} seconds, exit {code}")
    sys.exit(code)

    # python run_solve.py problems/neg_x.json --x0 -5 --schedule constant:1 --trace neg_x.jsonl
