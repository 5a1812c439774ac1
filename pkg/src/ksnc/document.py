"""JSON hypergraph documents.

A document declares measurements, operational equivalences between their
outcomes, and optionally one ray per measurement event::

    {
      "schema_version": "1",
      "measurements": [4, 4, {"outcomes": 4, "label": "M3"}],
      "equivalences": [[[1, 1], [3, 2]], ...],
      "rays": {"dimension": 4,
               "vectors": [[["1", "0", "1/2-i", "0"], ...], ...]},
      "metadata": {}
    }

``measurements`` entries are outcome counts or objects with ``outcomes``
and an optional ``label``.  Equivalences list events as ``[measurement,
outcome]`` pairs, 1-based.  ``rays.vectors[i][k]`` is the ray of outcome
k+1 of measurement i+1; each amplitude is a rational complex string such as
``"1/2+1/3i"`` (exact backend) or a ``[re, im]`` pair of numbers (float
backend).  One float entry anywhere switches the whole document to floats.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .hypergraph import KSHypergraph, MeasurementEvent, quotient_by_equivalences, validate
from .quantum import Ray, RayRealization, realization_from_events

SCHEMA_VERSION = "1"


class DocumentError(ValueError):
    pass


@dataclass
class HypergraphDocument:
    measurements: list[int]
    equivalences: list[list[tuple[int, int]]]
    labels: list[str | None] = field(default_factory=list)
    rays: dict[MeasurementEvent, Ray] | None = None
    dimension: int | None = None
    metadata: dict[str, Any] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def hypergraph(self) -> KSHypergraph:
        try:
            h = quotient_by_equivalences(self.measurements, self.equivalences)
        except ValueError as exc:
            raise DocumentError(str(exc)) from None
        problems = validate(h)
        if problems:
            raise DocumentError("; ".join(problems))
        return h

    def realization(self, h: KSHypergraph | None = None) -> RayRealization | None:
        if self.rays is None:
            return None
        return realization_from_events(h or self.hypergraph(), self.rays, self.dimension)


def parse_document(data: dict) -> HypergraphDocument:
    if not isinstance(data, dict):
        raise DocumentError("document must be a JSON object")
    version = str(data.get("schema_version", SCHEMA_VERSION))
    if version != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {version!r}")
    raw = data.get("measurements")
    if not isinstance(raw, list) or not raw:
        raise DocumentError("'measurements' must be a nonempty list")
    counts, labels = [], []
    for i, entry in enumerate(raw, start=1):
        if isinstance(entry, dict):
            count, label = entry.get("outcomes"), entry.get("label")
        else:
            count, label = entry, None
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise DocumentError(f"measurement {i}: outcome count must be a positive integer, got {count!r}")
        counts.append(count)
        labels.append(label)

    equivalences = []
    for g, group in enumerate(data.get("equivalences", []), start=1):
        if not isinstance(group, list):
            raise DocumentError(f"equivalence {g} must be a list of [measurement, outcome] pairs")
        events = []
        for pair in group:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)
            ):
                raise DocumentError(f"equivalence {g}: bad event {pair!r}")
            events.append((pair[0], pair[1]))
        equivalences.append(events)

    doc = HypergraphDocument(
        counts, equivalences, labels, metadata=dict(data.get("metadata", {})), schema_version=version
    )
    if data.get("rays") is not None:
        doc.rays, doc.dimension = _parse_rays(data["rays"], counts)
    return doc


def _parse_rays(raw: Any, counts: list[int]) -> tuple[dict[MeasurementEvent, Ray], int]:
    if not isinstance(raw, dict) or "dimension" not in raw or "vectors" not in raw:
        raise DocumentError("'rays' needs 'dimension' and 'vectors'")
    d = raw["dimension"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise DocumentError(f"ray dimension must be a positive integer, got {d!r}")
    vectors = raw["vectors"]
    if not isinstance(vectors, list) or len(vectors) != len(counts):
        raise DocumentError("'rays.vectors' needs one list per measurement")
    use_float = any(
        isinstance(amp, list) for per_m in vectors if isinstance(per_m, list)
        for vec in per_m if isinstance(vec, list) for amp in vec
    )
    out = {}
    for i, (per_measurement, m) in enumerate(zip(vectors, counts), start=1):
        if not isinstance(per_measurement, list) or len(per_measurement) != m:
            raise DocumentError(f"measurement {i}: expected {m} rays")
        for k, vec in enumerate(per_measurement, start=1):
            ev = MeasurementEvent(i, k)
            if not isinstance(vec, list) or len(vec) != d:
                raise DocumentError(f"ray of {ev} must have {d} amplitudes")
            try:
                if use_float:
                    out[ev] = Ray.from_float([_float_amplitude(a) for a in vec])
                else:
                    out[ev] = Ray.from_exact([a if isinstance(a, str) else _exact_int(a) for a in vec])
            except (TypeError, ValueError) as exc:
                raise DocumentError(f"ray of {ev}: {exc}") from None
    return out, d


def _exact_int(a: Any) -> int:
    if isinstance(a, bool) or not isinstance(a, int):
        raise TypeError(f"amplitude {a!r} is neither a rational string nor an integer")
    return a


def _float_amplitude(a: Any) -> complex:
    if isinstance(a, list) and len(a) == 2 and all(isinstance(x, (int, float)) for x in a):
        return complex(a[0], a[1])
    if isinstance(a, (int, float)) and not isinstance(a, bool):
        return complex(a)
    if isinstance(a, str):
        from .quantum import parse_complex

        return complex(parse_complex(a))
    raise TypeError(f"bad amplitude {a!r}")


def serialize_document(doc: HypergraphDocument) -> dict:
    measurements: list[Any] = []
    for count, label in zip(doc.measurements, doc.labels or [None] * len(doc.measurements)):
        measurements.append(count if label is None else {"outcomes": count, "label": label})
    data: dict[str, Any] = {
        "schema_version": doc.schema_version,
        "measurements": measurements,
        "equivalences": [[list(e) for e in group] for group in doc.equivalences],
    }
    if doc.rays is not None:
        vectors = []
        for i, m in enumerate(doc.measurements, start=1):
            per = []
            for k in range(1, m + 1):
                ray = doc.rays[MeasurementEvent(i, k)]
                if ray.exact:
                    per.append([str(a) for a in ray.amplitudes])
                else:
                    per.append([[float(a.real), float(a.imag)] for a in ray.amplitudes])
            vectors.append(per)
        data["rays"] = {"dimension": doc.dimension, "vectors": vectors}
    if doc.metadata:
        data["metadata"] = doc.metadata
    return data


def load_document(path: str | Path) -> HypergraphDocument:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: not valid JSON ({exc})") from None
    return parse_document(data)


def bundled(name: str) -> HypergraphDocument:
    """A fixture shipped with the package: ceg18, ceg18-with-rays, single-context, ..."""
    text = resources.files("ksnc.data").joinpath(f"{name}.json").read_text()
    return parse_document(json.loads(text))


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("ksnc.data").joinpath(f"{name}.json")))
