"""House records and CSV ingestion.

Records CSV layout: ``id,price,<attr...>,img_1,img_2,img_3,img_4`` in UTF-8
with ``.`` as the decimal point.  Deep-feature CSV layout:
``id,view,f0..f999`` with view in 1..4.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .schema import KIND_CATEGORICAL, SchemaError

DEEP_FEATURE_DIM = 1000
NUM_VIEWS = 4


class RecordError(ValueError):
    """A data row violates the schema or a record-level invariant."""


@dataclass
class HouseRecord:
    id: str
    values: dict
    price: float
    image_refs: tuple = ()
    deep_feature: np.ndarray | None = field(default=None, repr=False)

    def validate(self, schema):
        if self.price <= 0:
            raise RecordError(f"record {self.id!r}: price must be positive")
        if self.image_refs and len(self.image_refs) != NUM_VIEWS:
            raise RecordError(f"record {self.id!r}: expected {NUM_VIEWS} image refs")
        for attr in schema.attributes:
            if attr.name not in self.values:
                raise RecordError(f"record {self.id!r}: missing attribute {attr.name!r}")
            v = self.values[attr.name]
            if attr.kind == KIND_CATEGORICAL and v not in attr.levels:
                raise RecordError(
                    f"record {self.id!r}: unknown level {v!r} for attribute {attr.name!r}"
                )
        if self.deep_feature is not None and len(self.deep_feature) != DEEP_FEATURE_DIM:
            raise RecordError(
                f"record {self.id!r}: deep feature length "
                f"{len(self.deep_feature)} != {DEEP_FEATURE_DIM}"
            )


_IMG_COLS = tuple(f"img_{i}" for i in range(1, NUM_VIEWS + 1))


def load_records(csv_path, schema):
    """Parse a records CSV into validated HouseRecords."""
    with open(csv_path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{csv_path}: empty file") from None
        expected = ["id", "price"] + schema.names() + list(_IMG_COLS)
        if header != expected:
            missing = set(expected) - set(header)
            detail = f"missing columns {sorted(missing)}" if missing else f"got {header}"
            raise SchemaError(f"{csv_path}: header mismatch, {detail}")
        records = []
        for i, row in enumerate(reader, start=1):
            if len(row) != len(expected):
                raise RecordError(f"row {i}: expected {len(expected)} fields, got {len(row)}")
            rid = row[0]
            try:
                price = float(row[1])
            except ValueError:
                raise RecordError(f"row {i}: unparsable price {row[1]!r}") from None
            values = {}
            for attr, raw in zip(schema.attributes, row[2 : 2 + len(schema.attributes)]):
                if attr.kind == KIND_CATEGORICAL:
                    if raw not in attr.levels:
                        raise RecordError(
                            f"row {i}: unknown level {raw!r} for attribute {attr.name!r}"
                        )
                    values[attr.name] = raw
                else:
                    try:
                        values[attr.name] = float(raw)
                    except ValueError:
                        raise RecordError(
                            f"row {i}: unparsable numeric {raw!r} in {attr.name!r}"
                        ) from None
            rec = HouseRecord(rid, values, price, tuple(row[-NUM_VIEWS:]))
            try:
                rec.validate(schema)
            except RecordError as e:
                raise RecordError(f"row {i}: {e}") from None
            records.append(rec)
    return records


def write_records(csv_path, records, schema):
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["id", "price"] + schema.names() + list(_IMG_COLS))
        for r in records:
            row = [r.id, repr(float(r.price))]
            for attr in schema.attributes:
                v = r.values[attr.name]
                row.append(v if attr.kind == KIND_CATEGORICAL else repr(float(v)))
            row.extend(r.image_refs)
            writer.writerow(row)


def load_deep_features(csv_path, records):
    """Read per-view deep-feature rows and average the 4 views per record.

    Returns an (n, 1000) matrix aligned with ``records`` order.
    """
    per_id = {}
    with open(csv_path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        expected = ["id", "view"] + [f"f{j}" for j in range(DEEP_FEATURE_DIM)]
        if header != expected:
            raise SchemaError(
                f"{csv_path}: deep-feature header mismatch "
                f"(got {len(header)} columns, expected {len(expected)})"
            )
        for i, row in enumerate(reader, start=1):
            if len(row) != DEEP_FEATURE_DIM + 2:
                raise RecordError(
                    f"row {i}: expected {DEEP_FEATURE_DIM} feature values, "
                    f"got {len(row) - 2}"
                )
            rid, view = row[0], int(row[1])
            if not 1 <= view <= NUM_VIEWS:
                raise RecordError(f"row {i}: view {view} outside 1..{NUM_VIEWS}")
            vec = np.asarray(row[2:], dtype=np.float64)
            per_id.setdefault(rid, {})
            if view in per_id[rid]:
                raise RecordError(f"row {i}: duplicate view {view} for id {rid!r}")
            per_id[rid][view] = vec
    out = np.empty((len(records), DEEP_FEATURE_DIM))
    for k, rec in enumerate(records):
        views = per_id.get(rec.id)
        if views is None or len(views) != NUM_VIEWS:
            got = 0 if views is None else len(views)
            raise RecordError(f"id {rec.id!r}: expected {NUM_VIEWS} view rows, got {got}")
        out[k] = np.mean([views[v] for v in range(1, NUM_VIEWS + 1)], axis=0)
    return out


def write_deep_features(csv_path, ids, per_view_features):
    """Write an (n, 4, 1000) per-view feature array as a deep-feature CSV."""
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["id", "view"] + [f"f{j}" for j in range(DEEP_FEATURE_DIM)])
        for rid, views in zip(ids, per_view_features):
            for v in range(NUM_VIEWS):
                writer.writerow([rid, v + 1] + [repr(float(x)) for x in views[v]])
