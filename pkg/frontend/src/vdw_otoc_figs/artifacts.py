"""Readers for the artifact directory written by the vdw-otoc pipeline.

Everything here is file parsing: no physics is recomputed, every number
that ends up on a figure traces back to a CSV or JSON field.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

SPECTRUM_FILE = "spectrum.csv"
OTOC_FILE = "otoc.csv"
SENSITIVITY_FILE = "sensitivity.json"
MANIFEST_FILE = "manifest.json"


class MissingArtifactError(FileNotFoundError):
    """A required artifact file is absent; `filename` names it."""

    def __init__(self, directory, filename):
        super().__init__(os.path.join(directory, filename))
        self.filename = filename


def _require(directory: str, filename: str) -> str:
    path = os.path.join(directory, filename)
    if not os.path.exists(path):
        raise MissingArtifactError(directory, filename)
    return path


@dataclass
class ArtifactSet:
    directory: str
    manifest: dict
    spectrum: list = field(default_factory=list)
    otoc: dict = field(default_factory=dict)
    sensitivity: list = field(default_factory=list)


def load_manifest(directory: str) -> dict:
    with open(_require(directory, MANIFEST_FILE), encoding="utf-8") as fh:
        return json.load(fh)


def load_spectrum(directory: str) -> list[dict]:
    """Rows of spectrum.csv with numeric fields parsed."""
    with open(_require(directory, SPECTRUM_FILE), newline="", encoding="utf-8") as fh:
        rows = []
        for row in csv.DictReader(fh):
            rows.append({
                "n": int(row["n"]),
                "E_n": float(row["E_n"]),
                "r_nn": float(row["r_nn"]),
                "r_c": float(row["r_c"]),
                "lambda_c": float(row["lambda_c"]),
                "lambda_sc": float(row["lambda_sc"]),
            })
        return rows


def load_otoc(directory: str) -> dict[int, tuple[list[float], list[float]]]:
    """State index -> (times, values) from the long-format otoc.csv."""
    series: dict[int, tuple[list[float], list[float]]] = {}
    with open(_require(directory, OTOC_FILE), newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            n = int(row["n"])
            times, values = series.setdefault(n, ([], []))
            times.append(float(row["t"]))
            values.append(float(row["C"]))
    return series


def load_sensitivity(directory: str) -> list[dict]:
    with open(_require(directory, SENSITIVITY_FILE), encoding="utf-8") as fh:
        return json.load(fh)
