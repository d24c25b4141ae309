"""Attribute schemas for house listings.

A schema is an ordered list of attributes.  Each attribute is numeric,
categorical (with a fixed, ordered level list) or macro-numeric (city-level
economic indicators such as GDP or CPI that repeat across listings).
"""

import json
from dataclasses import dataclass, field

KIND_NUMERIC = "numeric"
KIND_CATEGORICAL = "categorical"
KIND_MACRO = "macro"

_KINDS = (KIND_NUMERIC, KIND_CATEGORICAL, KIND_MACRO)


class SchemaError(ValueError):
    """Schema definition or CSV header does not match expectations."""


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str
    levels: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SchemaError(f"unknown attribute kind {self.kind!r}")
        if self.kind == KIND_CATEGORICAL:
            if not self.levels:
                raise SchemaError(f"categorical attribute {self.name!r} has no levels")
            if len(set(self.levels)) != len(self.levels):
                raise SchemaError(f"duplicate levels in attribute {self.name!r}")
        elif self.levels:
            raise SchemaError(f"non-categorical attribute {self.name!r} declares levels")


@dataclass(frozen=True)
class AttributeSchema:
    attributes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")

    def names(self):
        return [a.name for a in self.attributes]

    def attribute(self, name):
        for a in self.attributes:
            if a.name == name:
                return a
        raise SchemaError(f"no attribute named {name!r}")

    def to_json(self):
        return json.dumps(
            {
                "attributes": [
                    {"name": a.name, "kind": a.kind, "levels": list(a.levels)}
                    for a in self.attributes
                ]
            },
            ensure_ascii=False,
            indent=2,
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        attrs = tuple(
            Attribute(d["name"], d["kind"], tuple(d.get("levels", ())))
            for d in obj["attributes"]
        )
        return cls(attrs)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.from_json(f.read())


def cn_listing_schema():
    """20-attribute schema for Chinese listing data plus macro indicators."""
    a = Attribute
    return AttributeSchema(
        (
            a("室", KIND_NUMERIC),
            a("厅", KIND_NUMERIC),
            a("厨", KIND_NUMERIC),
            a("卫", KIND_NUMERIC),
            a("建筑面积", KIND_NUMERIC),
            a("所在楼层", KIND_NUMERIC),
            a("总楼层", KIND_NUMERIC),
            a("建成年份", KIND_NUMERIC),
            a("户型结构", KIND_CATEGORICAL, ("平层", "复式", "错层")),
            a("建筑类型", KIND_CATEGORICAL, ("板楼", "塔楼", "板塔结合")),
            a("房屋朝向", KIND_CATEGORICAL, ("东", "南", "西", "北", "南北")),
            a("装修情况", KIND_CATEGORICAL, ("毛坯", "简装", "精装")),
            a("是否有电梯", KIND_CATEGORICAL, ("无", "有")),
            a("梯户比例", KIND_NUMERIC),
            a("GDP", KIND_MACRO),
            a("M2", KIND_MACRO),
            a("地区生产总值", KIND_MACRO),
            a("CPI", KIND_MACRO),
            a("PPI", KIND_MACRO),
            a("年末人口", KIND_MACRO),
        )
    )


def us_listing_schema():
    """10-attribute schema for US listing data."""
    a = Attribute
    return AttributeSchema(
        (
            a("bedrooms", KIND_NUMERIC),
            a("bathrooms", KIND_NUMERIC),
            a("area", KIND_NUMERIC),
            a("zipcode", KIND_CATEGORICAL, ("85255", "85262", "85266", "85331", "85377")),
            a("year_built", KIND_NUMERIC),
            a("year_renovated", KIND_NUMERIC),
            a("house_type", KIND_CATEGORICAL, ("single_family", "townhouse", "condo")),
            a("parking_spots", KIND_NUMERIC),
            a("daylight_ratio", KIND_NUMERIC),
            a("GDP", KIND_MACRO),
        )
    )
