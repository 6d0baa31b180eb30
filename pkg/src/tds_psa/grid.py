"""Pseudospectra grid data: log10 of the level-set function on a rectangle.

Cells with value above ``log10(1/eps)`` lie inside the eps-pseudospectrum.
Contouring is left to the consumer.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._jsonfmt import as_float, dumps, fmt17
from ._threads import thread_count
from .system import PerturbationSpec, TimeDelaySystem, eval_f_batch


@dataclass
class GridSample:
    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray  # shape (len(im_axis), len(re_axis))
    metadata: dict = field(default_factory=dict)
    overlay: Optional[dict] = None

    def inside(self, epsilon: Optional[float] = None) -> np.ndarray:
        """Boolean mask of cells strictly inside the eps-pseudospectrum."""
        eps = self.metadata["epsilon"] if epsilon is None else epsilon
        return self.values > math.log10(1.0 / eps)


def _axis(rng, count, name):
    lo, hi = (float(v) for v in rng)
    if int(count) != count or count < 2:
        raise ValueError(f"{name} needs at least 2 points, got {count!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"{name} range must satisfy lo < hi, got {rng!r}")
    return np.linspace(lo, hi, int(count))


def sample_grid(sys: TimeDelaySystem, spec: PerturbationSpec, re_range, im_range,
                nx: int, ny: int, threads: Optional[int] = None) -> GridSample:
    spec.check(sys)
    re_axis = _axis(re_range, nx, "re axis")
    im_axis = _axis(im_range, ny, "im axis")

    def row(y):
        with np.errstate(divide="ignore"):
            return np.log10(eval_f_batch(sys, spec, re_axis + 1j * y))

    workers = thread_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(row, im_axis))
    else:
        rows = [row(y) for y in im_axis]
    meta = {"epsilon": spec.epsilon, "weights": list(spec.weights),
            "system_hash": sys.fingerprint()}
    return GridSample(re_axis, im_axis, np.vstack(rows), meta)


def to_csv(sample: GridSample) -> str:
    buf = io.StringIO()
    buf.write("re,im,log10f\n")
    for j, y in enumerate(sample.im_axis):
        for i, x in enumerate(sample.re_axis):
            buf.write(f"{fmt17(x)},{fmt17(y)},{fmt17(sample.values[j, i])}\n")
    return buf.getvalue()


def to_json(sample: GridSample) -> str:
    doc = {
        "re_axis": [float(x) for x in sample.re_axis],
        "im_axis": [float(y) for y in sample.im_axis],
        "values": [[float(v) for v in r] for r in sample.values],
        "metadata": sample.metadata,
    }
    if sample.overlay is not None:
        doc["overlay"] = sample.overlay
    return dumps(doc)


def from_json(text: str) -> GridSample:
    doc = json.loads(text)
    re_axis = np.array([as_float(x) for x in doc["re_axis"]])
    im_axis = np.array([as_float(y) for y in doc["im_axis"]])
    values = np.array([[as_float(v) for v in r] for r in doc["values"]], dtype=float)
    if values.shape != (im_axis.size, re_axis.size):
        raise ValueError(f"values shape {values.shape} does not match axes "
                         f"({im_axis.size}, {re_axis.size})")
    return GridSample(re_axis, im_axis, values, doc.get("metadata", {}), doc.get("overlay"))
