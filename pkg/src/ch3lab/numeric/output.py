"""CSV field dumps and JSON run manifests."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def write_fields_csv(path: Path, coord_name: str, coord: np.ndarray, fields: dict) -> Path:
    path = Path(path)
    names = list(fields)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([coord_name, *names])
        for i in range(len(coord)):
            w.writerow([repr(float(coord[i]))] + [repr(float(fields[n][i])) for n in names])
    return path


def read_fields_csv(path: Path) -> dict:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in r] for r in body])
    return {h: data[:, j] for j, h in enumerate(head)}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def write_manifest(path: Path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n")
    return path
