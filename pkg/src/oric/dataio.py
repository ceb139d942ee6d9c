"""CSV ingestion with label encoding, model persistence and interaction feature emission."""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (CorruptFile, MalformedRow, MissingLabelColumn, NonBinaryLabel,
                     SchemaMismatch, VersionMismatch)
from .estimator import ClassPriors, OricConfig, OricModel, PatternStats, RankedInteraction
from .patterns import LabeledBatch, Pattern

FORMAT_NAME = "oric-model"
FORMAT_VERSION = 1
OTHERS = 0


@dataclass
class EncoderState:
    """Per-feature category-string -> code maps; code 0 collects rare categories.

    A category gets its own code once it has been seen ``threshold`` times in
    total. Codes are append-only: a category collapsed to 0 earlier can be
    promoted later, but an assigned code never changes.
    """

    schema: tuple[str, ...]
    threshold: int = 1
    codes: list[dict[str, int]] = field(default_factory=list)
    counts: list[dict[str, int]] = field(default_factory=list)

    def __post_init__(self):
        self.schema = tuple(self.schema)
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if not self.codes:
            self.codes = [{} for _ in self.schema]
        if not self.counts:
            self.counts = [{} for _ in self.schema]

    def observe(self, j: int, values: Iterable[str]) -> None:
        seen = self.counts[j]
        for v in values:
            seen[v] = seen.get(v, 0) + 1
        # dict order is first-seen order, so promotion order is deterministic
        for v, n in seen.items():
            if n >= self.threshold and v not in self.codes[j]:
                self.codes[j][v] = len(self.codes[j]) + 1

    def encode(self, j: int, values: Iterable[str]) -> np.ndarray:
        table = self.codes[j]
        return np.fromiter((table.get(v, OTHERS) for v in values), dtype=np.int64)

    def decode(self, j: int, code: int) -> str:
        if code == OTHERS:
            return "<others>"
        for v, c in self.codes[j].items():
            if c == code:
                return v
        return f"<unknown:{code}>"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> EncoderState:
        d = json.loads(text)
        return cls(tuple(d["schema"]), d["threshold"], d["codes"], d["counts"])


def _read_rows(path, label_column):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: empty file, header expected", row_index=0) from None
        if label_column not in header:
            raise MissingLabelColumn(f"{path}: no column named {label_column!r}")
        rows = []
        for i, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRow(f"{path}: row {i} has {len(row)} fields, expected {len(header)}", row_index=i)
            rows.append(row)
    return header, rows


def ingest_csv(path, label_column: str, encoder: EncoderState | None = None,
               columns: Sequence[str] | None = None, threshold: int = 1,
               period: int = 1) -> tuple[LabeledBatch, EncoderState]:
    """Read one period's CSV into a :class:`LabeledBatch`.

    ``columns`` names the categorical features (default: every column but the
    label); other columns are ignored. The encoder is copied, updated with this
    file's category counts and returned alongside the batch.
    """
    header, rows = _read_rows(path, label_column)
    if encoder is None:
        names = columns if columns is not None else [h for h in header if h != label_column]
        encoder = EncoderState(tuple(names), threshold)
    else:
        encoder = EncoderState.from_json(encoder.to_json())
        if columns is not None and tuple(columns) != encoder.schema:
            raise SchemaMismatch("columns differ from the encoder schema")
    missing = [n for n in encoder.schema if n not in header]
    if missing:
        raise SchemaMismatch(f"{path}: missing feature columns {missing}")

    li = header.index(label_column)
    raw_labels = [r[li].strip() for r in rows]
    for i, v in enumerate(raw_labels, start=1):
        if v not in ("0", "1"):
            raise NonBinaryLabel(f"{path}: row {i} has label {v!r}")
    labels = np.array([v == "1" for v in raw_labels], dtype=np.int8)

    cols = []
    for j, name in enumerate(encoder.schema):
        k = header.index(name)
        values = [r[k] for r in rows]
        encoder.observe(j, values)
        cols.append(encoder.encode(j, values))
    codes = np.column_stack(cols) if cols else np.zeros((len(rows), 0), np.int64)
    return LabeledBatch(encoder.schema, codes.reshape(len(rows), len(cols)), labels, period), encoder


def write_batch_csv(batch: LabeledBatch, path, label_column: str = "label") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(batch.schema) + [label_column])
        for row, y in zip(batch.codes.tolist(), batch.labels.tolist()):
            w.writerow(row + [y])


def contains(batch: LabeledBatch, s: Pattern) -> np.ndarray:
    hit = np.ones(batch.n_rows, dtype=bool)
    for f, c in s.items:
        hit &= batch.codes[:, f] == c
    return hit


def emit_interaction_features(batch: LabeledBatch, interactions: Sequence[RankedInteraction | Pattern],
                              out_path) -> dict[str, float]:
    """Write one 0/1 column per interaction; return each column's positive rate."""
    patterns = [r.pattern if isinstance(r, RankedInteraction) else r for r in interactions]
    for s in patterns:
        if max(s.features) >= batch.n_features:
            raise SchemaMismatch(f"interaction {s} references a feature outside the schema")
    names = [str(s) for s in patterns]
    cols = [contains(batch, s).astype(np.int8) for s in patterns]
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row"] + names)
        mat = np.column_stack([np.arange(batch.n_rows)] + cols) if cols else np.arange(batch.n_rows)[:, None]
        w.writerows(mat.tolist())
    n = max(batch.n_rows, 1)
    return {name: int(col.sum()) / n for name, col in zip(names, cols)}


def _body(model: OricModel) -> dict:
    registry = []
    for s, st in model.registry.items():
        flat = [v for it in s.items for v in it]
        registry.append([flat, st.k_hat_pos, st.i_hat_pos, st.k_hat_neg, st.i_hat_neg,
                         st.first_seen, st.last_updated])
    return {
        "schema": list(model.schema),
        "config": asdict(model.config),
        "period": model.period,
        "priors": [model.priors.n_hat_pos, model.priors.n_hat_neg],
        "registry": registry,
    }


def _digest(body: dict) -> str:
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def save_model(model: OricModel) -> bytes:
    body = _body(model)
    doc = {"format": FORMAT_NAME, "format_version": FORMAT_VERSION, "sha256": _digest(body), "body": body}
    # json writes floats with repr(), which round-trips exactly
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode()


def load_model(data: bytes) -> OricModel:
    try:
        doc = json.loads(data.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFile(f"model file is not valid: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise CorruptFile("not an oric model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise VersionMismatch(f"model format {doc.get('format_version')} != {FORMAT_VERSION}")
    body = doc.get("body")
    if not isinstance(body, dict) or doc.get("sha256") != _digest(body):
        raise CorruptFile("checksum mismatch")
    try:
        registry = {}
        for flat, kp, ip, kn, in_, first, last in body["registry"]:
            s = Pattern(tuple(zip(flat[0::2], flat[1::2])))
            registry[s] = PatternStats(kp, ip, kn, in_, first, last)
        pos, neg = body["priors"]
        return OricModel(OricConfig(**body["config"]), tuple(body["schema"]), registry,
                         ClassPriors(pos, neg), body["period"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFile(f"malformed model body: {exc}") from None


def save_model_file(model: OricModel, path) -> int:
    data = save_model(model)
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)
    return len(data)


def load_model_file(path) -> OricModel:
    with open(path, "rb") as fh:
        return load_model(fh.read())


def record_size(s: Pattern) -> int:
    """Nominal binary footprint of one registry entry: four float64 counts,
    two int32 period stamps and an int32 pair per item."""
    return 4 * 8 + 2 * 4 + 8 * s.order
