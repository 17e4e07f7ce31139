import sys
import time
from pathlib import Path

sys.path.append(str(Path(__file__).parent))
from feasibility.cli import run_command

# --data: Path | None = None  # CSV rows a_i, '#labeled' first line for points with a +1/-1 column
# --generate: bool = False  # seeded dataset with a planted separator
# --alpha: float = 1.0
# --rho: float | None = None  # smallest grid value with alpha < 2 rho if not given
# --z: list[float] | None = None  # known strict separator for the certificate
# --boundary_feasible: bool = False  # <x, a_i> == 0 is not a mistake

if __name__ == "__main__":
    t = time.time()
    code = run_command("perceptron", sys.argv[1:])
    print(f"# took {time.time() - t:.3f} seconds, exit {code}")
    sys.exit(code)

    # python run_perceptron.py data/opposed_halflines.csv --alpha 1
    # python run_perceptron.py --generate --seed 7 --trace planted.jsonl
