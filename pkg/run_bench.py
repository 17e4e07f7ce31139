import sys
import time
from pathlib import Path

sys.path.append(str(Path(__file__).parent))
from feasibility.cli import run_command

# --suite: str = constant | harmonic | perceptron | scaling | all
# --count: int | None = None  # number of seeds
# --n_jobs: int = 1
# --progress: bool = False

if __name__ == "__main__":
    t = time.time()
    code = run_command("bench", sys.argv[1:])
    print(f"# took {time.time() - t:.3f} seconds, exit {code}")
    sys.exit(code)

    # python run_bench.py all --n_jobs 8 --progress
