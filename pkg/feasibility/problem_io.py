from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from feasibility.core import FeasibilityProblem, SlaterCertificate, require_valid_certificate
from feasibility.errors import InputError
from feasibility.functions import oracle_from_descriptor
from feasibility.perceptron import LinearDataset

PROBLEM_KEYS = {"dimension", "constraints", "slater", "defaults"}
DEFAULT_KEYS = {"tolerance", "budget"}
LABELED_HEADER = "#labeled"


def _yaml() -> YAML:
    return YAML(typ="safe", pure=True)


def problem_from_document(doc: dict) -> tuple[FeasibilityProblem, dict]:
    """Assemble a problem from a parsed problem-file document; returns (problem, defaults)."""
    if not isinstance(doc, dict):
        raise InputError("problem file must hold a mapping at the top level")
    unknown = set(doc) - PROBLEM_KEYS
    if unknown:
        raise InputError(f"unknown problem-file keys: {sorted(unknown)}")
    if "dimension" not in doc or "constraints" not in doc:
        raise InputError("problem file needs 'dimension' and 'constraints'")
    dimension = doc["dimension"]
    if not isinstance(dimension, int) or isinstance(dimension, bool) or dimension < 1:
        raise InputError(f"dimension must be a positive integer, got {dimension!r}")
    constraints = doc["constraints"]
    if not isinstance(constraints, list) or len(constraints) == 0:
        raise InputError("'constraints' must be a non-empty list")
    oracles = tuple(oracle_from_descriptor(d, dimension) for d in constraints)
    problem = FeasibilityProblem(oracles, dimension)

    slater = doc.get("slater")
    if slater is not None:
        try:
            cert = SlaterCertificate(s=slater["s"], sigma=float(slater["sigma"]), L=float(slater["L"]))
        except (KeyError, TypeError) as e:
            raise InputError(f"'slater' needs s, sigma and L: {e}") from None
        require_valid_certificate(problem, cert)
        problem = problem.with_certificate(cert)

    defaults = dict(doc.get("defaults") or {})
    if set(defaults) - DEFAULT_KEYS:
        raise InputError(f"unknown defaults: {sorted(set(defaults) - DEFAULT_KEYS)}")
    return problem, defaults


def problem_to_document(p: FeasibilityProblem, defaults: dict | None = None) -> dict:
    doc: dict = {"dimension": p.dimension, "constraints": [c.to_descriptor() for c in p.constraints]}
    if p.slater is not None:
        doc["slater"] = p.slater.to_dict()
    if defaults:
        doc["defaults"] = dict(defaults)
    return doc


def load_problem(path: str | Path) -> tuple[FeasibilityProblem, dict]:
    """Read a JSON or YAML problem file."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"problem file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            doc = _yaml().load(f)
    except YAMLError as e:
        raise InputError(f"malformed problem file {path}: {e}") from None
    return problem_from_document(doc)


def save_problem(p: FeasibilityProblem, path: str | Path, defaults: dict | None = None) -> None:
    y = _yaml()
    y.default_flow_style = None
    with open(path, "w", encoding="utf-8") as f:
        y.dump(problem_to_document(p, defaults), f)


def read_dataset(path: str | Path) -> LinearDataset:
    """CSV of rows a_i, or labelled points with a final +1/-1 column when the first line is `#labeled`."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"dataset not found: {path}")
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return parse_dataset(text, source=str(path))


def parse_dataset(text: str, source: str = "<csv>") -> LinearDataset:
    lines = text.splitlines()
    labeled = bool(lines) and lines[0].strip().lower() == LABELED_HEADER
    if labeled:
        lines = lines[1:]
    rows = []
    for lineno, row in enumerate(csv.reader(lines), start=2 if labeled else 1):
        if not row or all(c.strip() == "" for c in row) or row[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            raise InputError(f"{source}:{lineno}: not a row of reals: {row}") from None
    if len(rows) == 0:
        raise InputError(f"{source}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"{source}: rows have differing lengths {sorted(widths)}")
    data = np.array(rows, dtype=np.float64)
    if labeled:
        if data.shape[1] < 2:
            raise InputError(f"{source}: labelled rows need at least one coordinate and a label")
        labels = data[:, -1]
        if np.any((labels != 1.0) & (labels != -1.0)):
            raise InputError(f"{source}: labels must be +1 or -1")
        return LinearDataset.from_labeled(data[:, :-1], labels.astype(np.int64))
    return LinearDataset(rows=data)


def write_dataset(ds: LinearDataset, path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if ds.labels is not None and ds.points is not None:
        buf.write(LABELED_HEADER + "\n")
        for p, y in zip(ds.points, ds.labels):
            writer.writerow([repr(float(v)) for v in p] + [int(y)])
    else:
        for a in ds.rows:
            writer.writerow([repr(float(v)) for v in a])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
