"""Decision tables, attribute schemas and candidate profiles.

A decision table is the information system ``S = {U, C, D}``: objects ``U``
described by categorical condition attributes ``C`` and a single decision
attribute ``D``.  Values are stored by name; integer codes are accepted on
ingestion and normalised to names.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO


class TableError(ValueError):
    """Raised for malformed tabular input; carries a row/column position."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column


def _canon(token: str) -> str:
    return token.strip().lower().replace(" ", "_").replace("-", "_")


@dataclass(frozen=True)
class Attribute:
    """A categorical attribute with its ordered allowed values and integer codes."""

    name: str
    values: tuple[str, ...]
    codes: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.codes:
            object.__setattr__(self, "codes", tuple(range(1, len(self.values) + 1)))
        else:
            object.__setattr__(self, "codes", tuple(int(c) for c in self.codes))
        if len(self.values) < 2:
            raise ValueError(f"attribute {self.name!r} needs at least 2 values")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"attribute {self.name!r} has duplicate values")
        if len(self.codes) != len(self.values) or len(set(self.codes)) != len(self.codes):
            raise ValueError(f"attribute {self.name!r} codes must be unique, one per value")

    def code_of(self, value: str) -> int:
        return self.codes[self.values.index(value)]

    def value_of(self, code: int) -> str:
        return self.values[self.codes.index(code)]

    def normalize(self, token: str) -> str:
        """Map a raw cell (value name or integer code) to the canonical value name."""
        token = token.strip()
        if token in self.values:
            return token
        try:
            code = int(token)
        except ValueError:
            code = None
        if code is not None:
            if code in self.codes:
                return self.value_of(code)
            raise KeyError(token)
        canon = _canon(token)
        for v in self.values:
            if _canon(v) == canon:
                return v
        raise KeyError(token)


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered condition attributes plus one decision attribute.

    The order of ``decision.values`` fixes the order of every per-class vector
    (class counts, RHS supports, vote tallies) downstream.
    """

    conditions: tuple[Attribute, ...]
    decision: Attribute
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        names = [a.name for a in self.conditions] + [self.decision.name]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")
        if not self.conditions:
            raise ValueError("schema needs at least one condition attribute")

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.conditions)

    @property
    def classes(self) -> tuple[str, ...]:
        return self.decision.values

    def attribute(self, name: str) -> Attribute:
        for a in self.conditions:
            if a.name == name:
                return a
        if name == self.decision.name:
            return self.decision
        raise KeyError(f"unknown attribute {name!r}")

    def index(self, name: str) -> int:
        try:
            return self.attribute_names.index(name)
        except ValueError:
            raise KeyError(f"unknown attribute {name!r}") from None

    def to_dict(self) -> dict:
        def attr(a: Attribute) -> dict:
            return {"name": a.name, "values": list(a.values), "codes": list(a.codes)}

        return {
            "name": self.name,
            "conditions": [attr(a) for a in self.conditions],
            "decision": attr(self.decision),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "AttributeSchema":
        def attr(d: Mapping) -> Attribute:
            return Attribute(d["name"], tuple(d["values"]), tuple(d.get("codes", ())))

        return cls(
            conditions=tuple(attr(d) for d in data["conditions"]),
            decision=attr(data["decision"]),
            name=data.get("name", "custom"),
        )


STUDY_SCHEMA = AttributeSchema(
    conditions=(
        Attribute("role", ("team_leader", "programmer")),
        Attribute("ie", ("introvert", "extrovert")),
        Attribute("sn", ("sensing", "intuiting")),
        Attribute("tf", ("thinking", "feeling")),
        Attribute("jp", ("judging", "perceiving")),
        Attribute("gender", ("male", "female")),
    ),
    decision=Attribute("performance", ("ineffective", "effective"), (0, 1)),
    name="mbti-team-v1",
)

BUILTIN_SCHEMAS = {STUDY_SCHEMA.name: STUDY_SCHEMA}


def get_schema(ref: str | Path) -> AttributeSchema:
    """Resolve a built-in schema name or a JSON schema file path."""
    if str(ref) in BUILTIN_SCHEMAS:
        return BUILTIN_SCHEMAS[str(ref)]
    path = Path(ref)
    if not path.is_file():
        raise TableError(f"unknown schema {str(ref)!r}")
    return AttributeSchema.from_dict(json.loads(path.read_text(encoding="utf-8")))


@dataclass(frozen=True)
class DecisionTable:
    """Immutable decision table.  Object ids are 1-based positions in ``rows``."""

    schema: AttributeSchema
    rows: tuple[tuple[str, ...], ...]
    decisions: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        object.__setattr__(self, "decisions", tuple(self.decisions))
        if not self.rows:
            raise TableError("no objects")
        if len(self.rows) != len(self.decisions):
            raise ValueError("rows and decisions differ in length")
        width = len(self.schema.conditions)
        for i, (row, d) in enumerate(zip(self.rows, self.decisions), start=1):
            if len(row) != width:
                raise TableError("incomplete object", row=i)
            for a, v in zip(self.schema.conditions, row):
                if v not in a.values:
                    raise TableError(f"value {v!r} not allowed", row=i, column=a.name)
            if d not in self.schema.decision.values:
                raise TableError(f"class {d!r} not allowed", row=i, column=self.schema.decision.name)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def object_ids(self) -> range:
        return range(1, len(self.rows) + 1)

    def row(self, obj: int) -> tuple[str, ...]:
        return self.rows[obj - 1]

    def decision(self, obj: int) -> str:
        return self.decisions[obj - 1]

    def value(self, obj: int, attribute: str) -> str:
        return self.rows[obj - 1][self.schema.index(attribute)]

    def record(self, obj: int) -> dict[str, str]:
        return dict(zip(self.schema.attribute_names, self.rows[obj - 1]))

    def records(self) -> list[dict[str, str]]:
        return [self.record(i) for i in self.object_ids]

    def subset(self, ids: Iterable[int]) -> "DecisionTable":
        """Sub-table over the given object ids, in ascending id order (re-numbered from 1)."""
        ids = sorted(ids)
        return DecisionTable(
            self.schema,
            tuple(self.rows[i - 1] for i in ids),
            tuple(self.decisions[i - 1] for i in ids),
        )


def _read_rows(source: TextIO | str) -> list[tuple[int, list[str]]]:
    text = source if isinstance(source, str) else source.read()
    numbered = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        numbered.append((lineno, line))
    parsed = csv.reader([line for _, line in numbered])
    return [(lineno, cells) for (lineno, _), cells in zip(numbered, parsed)]


def _parse(source, schema: AttributeSchema, require_decision: bool):
    rows = _read_rows(source)
    if not rows:
        raise TableError("missing header")
    header_line, header = rows[0]
    header = [h.strip() for h in header]
    known = set(schema.attribute_names) | {schema.decision.name}
    for h in header:
        if h not in known:
            raise TableError(f"unknown attribute {h!r}", row=header_line, column=h)
    if len(set(header)) != len(header):
        raise TableError("duplicate column in header", row=header_line)
    needed = list(schema.attribute_names) + ([schema.decision.name] if require_decision else [])
    for name in needed:
        if name not in header:
            raise TableError(f"missing attribute {name!r} in header", row=header_line)
    if len(rows) == 1:
        raise TableError("no objects")

    out = []
    for lineno, cells in rows[1:]:
        if len(cells) != len(header):
            raise TableError(f"expected {len(header)} cells, got {len(cells)}", row=lineno)
        cell = dict(zip(header, cells))
        values = {}
        for name in header:
            raw = cell[name]
            if not raw.strip():
                raise TableError("missing cell", row=lineno, column=name)
            try:
                values[name] = schema.attribute(name).normalize(raw)
            except KeyError:
                raise TableError(f"value {raw.strip()!r} outside allowed set", row=lineno, column=name) from None
        out.append(values)
    return out


def load_table(source: TextIO | str, schema: AttributeSchema) -> DecisionTable:
    """Parse comma-separated text into a validated :class:`DecisionTable`.

    ``source`` is a text stream or the text itself.  The header must name every
    condition attribute and the decision attribute, in any order.  Cells may
    hold value names or integer codes.  Lines starting with ``#`` are skipped.
    Errors are raised as :class:`TableError` with the offending line number.
    """
    parsed = _parse(source, schema, require_decision=True)
    return DecisionTable(
        schema,
        tuple(tuple(v[a] for a in schema.attribute_names) for v in parsed),
        tuple(v[schema.decision.name] for v in parsed),
    )


def load_profiles(source: TextIO | str, schema: AttributeSchema) -> list[dict[str, str]]:
    """Like :func:`load_table` but the decision column is optional and dropped."""
    parsed = _parse(source, schema, require_decision=False)
    return [{a: v[a] for a in schema.attribute_names} for v in parsed]


def write_table(table: DecisionTable, codes: bool = False) -> str:
    """Render a table as CSV text in schema column order, value names by default."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    schema = table.schema
    writer.writerow(list(schema.attribute_names) + [schema.decision.name])
    for row, d in zip(table.rows, table.decisions):
        if codes:
            cells = [a.code_of(v) for a, v in zip(schema.conditions, row)]
            cells.append(schema.decision.code_of(d))
        else:
            cells = list(row) + [d]
        writer.writerow(cells)
    return buf.getvalue()


def class_counts(table: DecisionTable) -> dict[str, int]:
    """Object count per decision class, in schema class order."""
    counts = dict.fromkeys(table.schema.classes, 0)
    for d in table.decisions:
        counts[d] += 1
    return counts


_PROFILE_FIELDS = ("role", "ie", "sn", "tf", "jp", "gender")


@dataclass(frozen=True)
class CandidateProfile:
    """One candidate described on the six study predictors."""

    role: str
    ie: str
    sn: str
    tf: str
    jp: str
    gender: str

    def __post_init__(self):
        for name in _PROFILE_FIELDS:
            allowed = STUDY_SCHEMA.attribute(name).values
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name}={getattr(self, name)!r} not in {allowed}")

    def as_record(self) -> dict[str, str]:
        return {name: getattr(self, name) for name in _PROFILE_FIELDS}

    @classmethod
    def from_record(cls, record: Mapping[str, str]) -> "CandidateProfile":
        return cls(**{name: record[name] for name in _PROFILE_FIELDS})


def encode_profile(profile: CandidateProfile) -> tuple[int, ...]:
    """Integer codes in the order role, IE, SN, TF, JP, gender."""
    return tuple(STUDY_SCHEMA.attribute(n).code_of(getattr(profile, n)) for n in _PROFILE_FIELDS)


def decode_profile(codes: Sequence[int]) -> CandidateProfile:
    if len(codes) != len(_PROFILE_FIELDS):
        raise ValueError(f"expected {len(_PROFILE_FIELDS)} codes, got {len(codes)}")
    return CandidateProfile(
        *(STUDY_SCHEMA.attribute(n).value_of(int(c)) for n, c in zip(_PROFILE_FIELDS, codes))
    )


def all_profiles() -> list[CandidateProfile]:
    """Every one of the 64 possible study profiles (six binary predictors), in code order."""
    from itertools import product

    return [decode_profile(c) for c in product((1, 2), repeat=len(_PROFILE_FIELDS))]
