"""Parsers for the four input formats and the entity store they feed.

Formats (all UTF-8):
  * dump        - newline-delimited JSON, one record per line:
                  {"id": str, "labels": {"en": str}, "aliases": {"en": [str]},
                   "description": str,
                   "claims": {PID: [{"type": "item"|"literal", "value": str}]}}
                  Records whose id starts with "P" are property pseudo-records;
                  only their label is kept (it feeds propositionalization).
  * categories  - TSV, two columns: category_title <TAB> member_id
  * glossary    - TSV, three columns: term <TAB> definition <TAB> source
  * glo seed    - JSON array of {"id", "label", "parent"?, "wikidata_roots"?};
                  exactly one entry has no parent (the root), parents form a tree.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import ParseError
from .graph import IsaIndex

ISA_PROPERTIES = ("P279", "P31")

_PROPERTY_ID_RE = re.compile(r"^P\d+$")


def _valid_id(token) -> bool:
    return (
        isinstance(token, str)
        and len(token) > 0
        and not any(c.isspace() or ord(c) < 32 for c in token)
    )


@dataclass(frozen=True)
class Claim:
    kind: str  # "item" | "literal"
    value: str


@dataclass
class DumpRecord:
    label: str
    aliases: list[str] = field(default_factory=list)
    description: str = ""
    claims: dict[str, list[Claim]] = field(default_factory=dict)

    def isa_targets(self) -> list[str]:
        """Direct P279/P31 item objects, deduplicated, sorted."""
        targets = set()
        for pid in ISA_PROPERTIES:
            for claim in self.claims.get(pid, ()):
                if claim.kind == "item":
                    targets.add(claim.value)
        return sorted(targets)


class EntityStore:
    """All dump records plus property labels, with a lazily built ISA index.

    The ISA index spans every record id and every P279/P31 item target, so
    distance queries still work for parent classes that have no record of
    their own (they are simply dead ends).
    """

    def __init__(self):
        self.records: dict[str, DumpRecord] = {}
        self.property_labels: dict[str, str] = {}
        self.warnings: list[str] = []
        self.malformed_lines: int = 0
        self._isa_index: IsaIndex | None = None

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.records

    def __len__(self) -> int:
        return len(self.records)

    def label_of(self, entity_id: str) -> str | None:
        rec = self.records.get(entity_id)
        return rec.label if rec is not None else None

    def isa_index(self) -> IsaIndex:
        if self._isa_index is None:
            nodes = set(self.records)
            edges = []
            for child in sorted(self.records):
                for parent in self.records[child].isa_targets():
                    nodes.add(parent)
                    edges.append((child, parent))
            self._isa_index = IsaIndex(nodes, edges)
        return self._isa_index


def _iter_text_lines(source):
    """Yield (line_number, text) from a path, file object, bytes, or str."""
    if isinstance(source, (str, bytes)):
        text = source.decode("utf-8") if isinstance(source, bytes) else source
        lines = text.splitlines()
    else:
        read = getattr(source, "read", None)
        if read is not None:
            data = read()
            if isinstance(data, bytes):
                data = data.decode("utf-8")
            lines = data.splitlines()
        else:
            lines = [
                (ln.decode("utf-8") if isinstance(ln, bytes) else ln).rstrip("\r\n")
                for ln in source
            ]
    for i, line in enumerate(lines, start=1):
        yield i, line


def _record_from_obj(obj) -> tuple[str, str, DumpRecord]:
    """Validate one parsed dump object; raises ValueError on any shape problem."""
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    entity_id = obj.get("id")
    if not _valid_id(entity_id):
        raise ValueError(f"bad or missing id: {entity_id!r}")
    labels = obj.get("labels", {})
    if not isinstance(labels, dict):
        raise ValueError("labels is not an object")
    label = labels.get("en", "")
    if not isinstance(label, str) or not label.strip():
        raise ValueError(f"record {entity_id}: missing or empty english label")
    aliases_block = obj.get("aliases", {})
    if not isinstance(aliases_block, dict):
        raise ValueError("aliases is not an object")
    aliases = aliases_block.get("en", [])
    if not isinstance(aliases, list) or any(not isinstance(a, str) for a in aliases):
        raise ValueError(f"record {entity_id}: aliases must be a list of strings")
    description = obj.get("description", "")
    if not isinstance(description, str):
        raise ValueError(f"record {entity_id}: description must be a string")
    claims_block = obj.get("claims", {})
    if not isinstance(claims_block, dict):
        raise ValueError(f"record {entity_id}: claims must be an object")
    claims: dict[str, list[Claim]] = {}
    for pid, values in claims_block.items():
        if not _valid_id(pid):
            raise ValueError(f"record {entity_id}: bad property id {pid!r}")
        if not isinstance(values, list):
            raise ValueError(f"record {entity_id}: claims[{pid}] must be a list")
        parsed = []
        for v in values:
            if not isinstance(v, dict) or v.get("type") not in ("item", "literal"):
                raise ValueError(f"record {entity_id}: bad claim under {pid}")
            value = v.get("value")
            if not isinstance(value, str):
                raise ValueError(f"record {entity_id}: claim value under {pid} not a string")
            if v["type"] == "item" and not _valid_id(value):
                raise ValueError(
                    f"record {entity_id}: item claim under {pid} has invalid id {value!r}"
                )
            parsed.append(Claim(v["type"], value))
        claims[pid] = parsed
    return entity_id, label, DumpRecord(label, list(aliases), description, claims)


def parse_dump(source, strict: bool = False) -> EntityStore:
    """Parse a newline-delimited JSON dump into an EntityStore.

    Duplicate ids: the last record wins (with a warning). Malformed lines are
    counted and skipped, or raise ParseError with the line number in strict
    mode. Blank lines are ignored.
    """
    store = EntityStore()
    for lineno, line in _iter_text_lines(source):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            entity_id, label, record = _record_from_obj(obj)
        except (ValueError, TypeError) as exc:
            if strict:
                raise ParseError(str(exc), line=lineno) from exc
            store.malformed_lines += 1
            continue
        if _PROPERTY_ID_RE.match(entity_id):
            if entity_id in store.property_labels:
                store.warnings.append(f"line {lineno}: duplicate property {entity_id}")
            store.property_labels[entity_id] = label
            continue
        if entity_id in store.records:
            store.warnings.append(f"line {lineno}: duplicate id {entity_id}, last wins")
        store.records[entity_id] = record
    return store


def parse_categories(source) -> dict[str, set[str]]:
    """Parse the category TSV into {title: set of member ids}."""
    index: dict[str, set[str]] = {}
    for lineno, line in _iter_text_lines(source):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(f"expected 2 tab-separated columns, got {len(cols)}", line=lineno)
        title, member = cols
        if not title.strip():
            raise ParseError("empty category title", line=lineno)
        if not _valid_id(member):
            raise ParseError(f"invalid member id {member!r}", line=lineno)
        index.setdefault(title, set()).add(member)
    return index


@dataclass(frozen=True)
class GlossaryTerm:
    term: str
    definition: str
    source: str


def normalize_term(text: str) -> str:
    """Casefold and collapse internal whitespace; used for all term matching."""
    return " ".join(text.casefold().split())


def parse_glossary(source) -> list[GlossaryTerm]:
    """Parse the glossary TSV; duplicates on (normalized term, source) are dropped,
    keeping the first occurrence and the original order."""
    terms: list[GlossaryTerm] = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in _iter_text_lines(source):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"expected 3 tab-separated columns, got {len(cols)}", line=lineno)
        term, definition, src = cols
        if not term.strip():
            raise ParseError("empty term", line=lineno)
        if not definition.strip():
            raise ParseError(f"term {term!r}: empty definition", line=lineno)
        key = (normalize_term(term), src)
        if key in seen:
            continue
        seen.add(key)
        terms.append(GlossaryTerm(term, definition, src))
    return terms


@dataclass
class GloConcept:
    id: str
    label: str
    parent: str | None = None
    wikidata_roots: list[str] = field(default_factory=list)


@dataclass
class GloSeed:
    """The upper concept layer: a small labelled tree loaded from JSON."""

    concepts: list[GloConcept]

    @property
    def root(self) -> GloConcept:
        return next(c for c in self.concepts if c.parent is None)

    def ids(self) -> set[str]:
        return {c.id for c in self.concepts}


def parse_glo_seed(source) -> GloSeed:
    """Parse and validate the glo seed JSON (array of concept objects)."""
    text = "\n".join(line for _, line in _iter_text_lines(source))
    try:
        raw = json.loads(text)
    except ValueError as exc:
        raise ParseError(f"glo seed is not valid JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise ParseError("glo seed must be a non-empty JSON array")
    concepts = []
    for i, obj in enumerate(raw):
        if not isinstance(obj, dict) or not _valid_id(obj.get("id")):
            raise ParseError(f"glo seed entry {i}: bad or missing id")
        label = obj.get("label", "")
        if not isinstance(label, str) or not label.strip():
            raise ParseError(f"glo seed entry {obj.get('id')}: missing label")
        parent = obj.get("parent")
        if parent is not None and not _valid_id(parent):
            raise ParseError(f"glo seed entry {obj['id']}: bad parent {parent!r}")
        roots = obj.get("wikidata_roots", [])
        if not isinstance(roots, list) or any(not _valid_id(r) for r in roots):
            raise ParseError(f"glo seed entry {obj['id']}: bad wikidata_roots")
        concepts.append(GloConcept(obj["id"], label, parent, list(roots)))
    by_id = {c.id: c for c in concepts}
    if len(by_id) != len(concepts):
        raise ParseError("glo seed contains duplicate ids")
    rootless = [c for c in concepts if c.parent is None]
    if len(rootless) != 1:
        raise ParseError(f"glo seed must have exactly one root, found {len(rootless)}")
    for c in concepts:
        seen = set()
        cur = c
        while cur.parent is not None:
            if cur.parent not in by_id:
                raise ParseError(f"glo seed entry {c.id}: unknown parent {cur.parent}")
            if cur.parent in seen:
                raise ParseError(f"glo seed parent links contain a cycle at {cur.parent}")
            seen.add(cur.parent)
            cur = by_id[cur.parent]
    return GloSeed(concepts)
