"""Core ontology graph: entities, statements, the ISA hierarchy and its algorithms.

The graph follows a build-then-freeze lifecycle: one writer populates it
(entities, `subConceptOf` edges, domain statements), then `freeze()` validates
the structural invariants and builds the CSR indexes the read operations need.
All query operations require a frozen graph; `thaw()` returns a mutable copy
when a later pipeline stage has to extend a frozen graph.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantError, UnknownEntityError
from .kernels import bfs_dists, build_csr, reachable_pair_count

EntityId = str

STATEMENT_ORIGINS = ("dump", "s1", "s2", "s3", "closure")

_UNREACHABLE = -1


def check_entity_id(entity_id: str) -> str:
    """Ids are opaque non-empty tokens without whitespace or control chars."""
    if (
        not isinstance(entity_id, str)
        or not entity_id
        or any(c.isspace() or ord(c) < 32 for c in entity_id)
    ):
        raise InvariantError(f"invalid entity id: {entity_id!r}")
    return entity_id


@dataclass
class Entity:
    id: EntityId
    label: str
    aliases: list[str] = field(default_factory=list)
    description: str = ""

    def __post_init__(self):
        check_entity_id(self.id)
        if not self.label.strip():
            raise InvariantError(f"entity {self.id}: label empty after trimming")

    def copy(self) -> "Entity":
        return Entity(self.id, self.label, list(self.aliases), self.description)


@dataclass(frozen=True)
class Statement:
    """One non-ISA edge: subject --property--> entity object XOR literal text."""

    subject: EntityId
    property: str
    object_id: EntityId | None = None
    object_literal: str | None = None
    origin: str = "dump"

    def __post_init__(self):
        check_entity_id(self.subject)
        check_entity_id(self.property)
        if (self.object_id is None) == (self.object_literal is None):
            raise InvariantError(
                f"statement {self.subject} {self.property}: exactly one of "
                "entity object / literal object must be set"
            )
        if self.object_id is not None:
            check_entity_id(self.object_id)
        if self.origin not in STATEMENT_ORIGINS:
            raise InvariantError(f"unknown statement origin: {self.origin!r}")

    def key(self) -> tuple:
        kind = "item" if self.object_id is not None else "literal"
        value = self.object_id if self.object_id is not None else self.object_literal
        return (self.subject, self.property, kind, value, self.origin)


@dataclass
class ClosureStats:
    isa_closure_edges: int
    non_isa_statements: int


class IsaIndex:
    """CSR index over an ISA edge set, shared by graph ops and store-level metrics.

    Node ids are sorted so every traversal is deterministic. `up` follows
    child -> parent edges, `und` is the symmetrized adjacency.
    """

    def __init__(self, ids, edges):
        self.ids: list[str] = sorted(ids)
        self.pos: dict[str, int] = {e: i for i, e in enumerate(self.ids)}
        n = len(self.ids)
        up_edges = [(self.pos[c], self.pos[p]) for c, p in edges]
        self._up = build_csr(n, up_edges)
        self._down = build_csr(n, [(p, c) for c, p in up_edges])
        self._und = build_csr(n, up_edges + [(p, c) for c, p in up_edges])

    def __len__(self) -> int:
        return len(self.ids)

    def up_dists(self, src: str) -> np.ndarray:
        return bfs_dists(*self._up, np.array([self.pos[src]], dtype=np.int64))

    def down_dists(self, src: str) -> np.ndarray:
        return bfs_dists(*self._down, np.array([self.pos[src]], dtype=np.int64))

    def und_dists(self, src: str, blocked: np.ndarray | None = None) -> np.ndarray:
        return bfs_dists(*self._und, np.array([self.pos[src]], dtype=np.int64), blocked)

    def und_dists_multi(self, srcs, blocked: np.ndarray | None = None) -> np.ndarray:
        if not srcs:
            return np.full(len(self.ids), _UNREACHABLE, dtype=np.int64)
        arr = np.array(sorted(self.pos[s] for s in srcs), dtype=np.int64)
        return bfs_dists(*self._und, arr, blocked)

    def closure_edge_count(self) -> int:
        return reachable_pair_count(*self._up)


class OntologyGraph:
    """Entities + acyclic `subConceptOf` DAG + non-ISA statements + glo layer."""

    def __init__(self, root: EntityId):
        check_entity_id(root)
        self.root = root
        self.entities: dict[EntityId, Entity] = {}
        self.isa: set[tuple[EntityId, EntityId]] = set()
        self.statements: list[Statement] = []
        self.glo_layer: set[EntityId] = set()
        self.isa_source: dict[tuple[EntityId, EntityId], str] = {}
        self.warnings: list[str] = []
        self._parents: dict[EntityId, set[EntityId]] = {}
        self._children: dict[EntityId, set[EntityId]] = {}
        self._index: IsaIndex | None = None
        self._glo_mask: np.ndarray | None = None

    # -- build phase -------------------------------------------------------

    def add_entity(self, entity: Entity, glo: bool = False) -> None:
        self._writable()
        self.entities[entity.id] = entity
        if glo:
            self.glo_layer.add(entity.id)

    def add_isa(self, child: EntityId, parent: EntityId, source: str = "") -> None:
        self._writable()
        edge = (child, parent)
        if edge not in self.isa:
            self.isa.add(edge)
            self._parents.setdefault(child, set()).add(parent)
            self._children.setdefault(parent, set()).add(child)
            if source:
                self.isa_source[edge] = source

    def add_statement(self, statement: Statement) -> None:
        self._writable()
        self.statements.append(statement)

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def reaches_up(self, src: EntityId, dst: EntityId) -> bool:
        """True if dst is src or reachable from src along existing isa edges.

        Works during the build phase; used for cycle-avoiding edge insertion.
        """
        if src == dst:
            return True
        seen = {src}
        stack = [src]
        while stack:
            for p in self._parents.get(stack.pop(), ()):
                if p == dst:
                    return True
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return False

    # -- freeze / thaw -----------------------------------------------------

    @property
    def frozen(self) -> bool:
        return self._index is not None

    def freeze(self) -> "OntologyGraph":
        """Validate invariants and build the read indexes. Idempotent."""
        if self.frozen:
            return self
        for child, parent in self.isa:
            if child not in self.entities or parent not in self.entities:
                raise InvariantError(f"isa edge ({child}, {parent}) references a missing entity")
        if self.root not in self.entities:
            raise InvariantError(f"root {self.root} is not an entity")
        if self.root not in self.glo_layer:
            raise InvariantError(f"root {self.root} does not belong to the glo layer")
        for e in self.glo_layer:
            if e not in self.entities:
                raise InvariantError(f"glo concept {e} is not an entity")
        for st in self.statements:
            if st.subject not in self.entities:
                raise InvariantError(f"statement subject {st.subject} is not an entity")
            if st.object_id is not None and st.object_id not in self.entities:
                raise InvariantError(f"statement object {st.object_id} is not an entity")
        self._check_acyclic()
        index = IsaIndex(self.entities.keys(), self.isa)
        root_down = bfs_dists(
            *index._down, np.array([index.pos[self.root]], dtype=np.int64)
        )
        for e in self.entities:
            if e not in self.glo_layer and root_down[index.pos[e]] == _UNREACHABLE:
                raise InvariantError(f"entity {e} has no isa path to root {self.root}")
        mask = np.zeros(len(index.ids), dtype=np.uint8)
        for e in self.glo_layer:
            mask[index.pos[e]] = 1
        self._index = index
        self._glo_mask = mask
        return self

    def thaw(self) -> "OntologyGraph":
        """Mutable copy for the next build phase; the original stays frozen."""
        g = OntologyGraph(self.root)
        for e in self.entities.values():
            g.add_entity(e.copy(), glo=e.id in self.glo_layer)
        for child, parent in self.isa:
            g.add_isa(child, parent, self.isa_source.get((child, parent), ""))
        g.statements = list(self.statements)
        g.warnings = list(self.warnings)
        return g

    def _check_acyclic(self) -> None:
        indeg = {e: 0 for e in self.entities}
        for child, _parent in self.isa:
            indeg[child] += 1
        ready = [e for e, d in indeg.items() if d == 0]
        done = 0
        while ready:
            done += 1
            for c in self._children.get(ready.pop(), ()):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if done != len(self.entities):
            raise InvariantError("isa relation contains a cycle")

    def _writable(self) -> None:
        if self.frozen:
            raise InvariantError("graph is frozen; thaw() it to start a new build phase")

    def _require_frozen(self) -> IsaIndex:
        if self._index is None:
            raise InvariantError("operation requires a frozen graph; call freeze() first")
        return self._index

    def _require_entity(self, e: EntityId) -> None:
        if e not in self.entities:
            raise UnknownEntityError(e)

    # -- adjacency helpers (valid in both phases) ---------------------------

    def parents_of(self, e: EntityId) -> list[EntityId]:
        self._require_entity(e)
        return sorted(self._parents.get(e, ()))

    def children_of(self, e: EntityId) -> list[EntityId]:
        self._require_entity(e)
        return sorted(self._children.get(e, ()))

    # -- equality: canonical content, ignoring warnings/edge-source metadata --

    def _content(self) -> tuple:
        ents = tuple(
            (e.id, e.label, tuple(e.aliases), e.description)
            for e in (self.entities[k] for k in sorted(self.entities))
        )
        return (
            self.root,
            tuple(sorted(self.glo_layer)),
            ents,
            tuple(sorted(self.isa)),
            tuple(sorted(Counter(s.key() for s in self.statements).items())),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, OntologyGraph):
            return NotImplemented
        return self._content() == other._content()

    def __hash__(self):  # content-mutable; identity hash keeps sets/dicts usable
        return id(self)


# ---------------------------------------------------------------------------
# read operations (frozen graph only)
# ---------------------------------------------------------------------------


def ancestors(graph: OntologyGraph, e: EntityId) -> list[EntityId]:
    """All entities reachable from `e` by one or more isa steps.

    Ordered by (BFS depth, id); `e` itself is excluded.
    """
    idx = graph._require_frozen()
    graph._require_entity(e)
    dist = idx.up_dists(e)
    found = [(int(dist[i]), idx.ids[i]) for i in np.flatnonzero(dist > 0)]
    found.sort()
    return [name for _, name in found]


def path_length(
    graph: OntologyGraph, a: EntityId, b: EntityId, exclude_glo: bool = False
) -> int | None:
    """Shortest undirected isa path between a and b; None when disconnected.

    With `exclude_glo`, glo-layer concepts may appear only as endpoints, so
    entities sitting in different branches under the upper layer become
    mutually unreachable.
    """
    idx = graph._require_frozen()
    graph._require_entity(a)
    graph._require_entity(b)
    if a == b:
        return 0
    blocked = graph._glo_mask if exclude_glo else None
    d = int(idx.und_dists(a, blocked)[idx.pos[b]])
    return None if d == _UNREACHABLE else d


def lowest_common_ancestor(
    graph: OntologyGraph, a: EntityId, b: EntityId
) -> tuple[EntityId, int, int] | None:
    """Common ancestor (self counts) minimizing directed depth_a + depth_b.

    Ties on the sum break by lexicographic id. None when the two ancestor
    sets, including the entities themselves, are disjoint.
    """
    idx = graph._require_frozen()
    graph._require_entity(a)
    graph._require_entity(b)
    da = idx.up_dists(a)
    db = idx.up_dists(b)
    best = None
    for i in np.flatnonzero((da != _UNREACHABLE) & (db != _UNREACHABLE)):
        cand = (int(da[i]) + int(db[i]), idx.ids[i], int(da[i]), int(db[i]))
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    return (best[1], best[2], best[3])


def leaves(graph: OntologyGraph) -> list[EntityId]:
    """Non-glo entities with no incoming isa edge (no children), sorted by id."""
    graph._require_frozen()
    return sorted(
        e
        for e in graph.entities
        if e not in graph.glo_layer and not graph._children.get(e)
    )


def deductive_closure(graph: OntologyGraph) -> ClosureStats:
    """Size of the isa transitive closure plus the stored non-ISA statement count.

    Domain relations are deliberately not propagated down the hierarchy, so the
    second number is simply the statement multiset size.
    """
    idx = graph._require_frozen()
    return ClosureStats(
        isa_closure_edges=idx.closure_edge_count(),
        non_isa_statements=len(graph.statements),
    )
