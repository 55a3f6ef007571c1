"""d-separation and m-separation queries on mixed acyclic graphs.

Two independent decision routes are provided:

* is_separated_oracle -- exhaustively tests every simple path against the
  blocking criterion (a non-collider in the conditioning set blocks; a
  collider blocks unless it is in the conditioning set's ancestor closure).
* is_separated -- reachability over (vertex, incoming-mark) states, the
  fast route used by sweeps.  Witness walks are spliced down to simple
  paths, which keeps the two routes provably equivalent.

A collider is an interior path vertex receiving arrowheads from both
neighbors; bidirected edge ends count as arrowheads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import AdjacentVertices, InvalidPath, NotCollateral
from .graph import (
    ANCESTORS,
    ANCESTORS_INCLUSIVE,
    BIDIR,
    DIR_BACKWARD,
    DIR_FORWARD,
    MixedGraph,
    Path,
    relatives,
)

INCLUSIVE = "inclusive"
STRICT = "strict"

_CONVENTIONS = (INCLUSIVE, STRICT)


@dataclass(frozen=True)
class SeparationQuery:
    """One separation decision: are a and b separated given cond?"""

    a: str
    b: str
    cond: frozenset[str] = frozenset()
    collider_convention: str = INCLUSIVE

    def __post_init__(self) -> None:
        object.__setattr__(self, "cond", frozenset(self.cond))
        if self.a == self.b:
            raise ValueError("query endpoints must differ")
        if self.a in self.cond or self.b in self.cond:
            raise ValueError("query endpoints may not be conditioned on")
        if self.collider_convention not in _CONVENTIONS:
            raise ValueError(f"unknown collider convention {self.collider_convention!r}")


@dataclass(frozen=True)
class SeparationVerdict:
    separated: bool
    witness: Path | None = None


def _collider_set(g: MixedGraph, cond: frozenset[str], convention: str) -> frozenset[str]:
    """Vertices at which a conditioned collider is open."""
    if convention == INCLUSIVE:
        return relatives(g, cond, ANCESTORS_INCLUSIVE)
    return relatives(g, cond, ANCESTORS)


def path_is_connecting(g: MixedGraph, p: Path, cond: Iterable[str],
                       convention: str = INCLUSIVE) -> bool:
    """True iff the path is active given cond.

    Active: every interior non-collider is outside cond and every interior
    collider is inside the conditioning set's ancestor closure (inclusive
    convention) or strict ancestor set (strict convention).
    """
    cond = frozenset(cond)
    g.require(p.vertices)
    g.require(cond)
    _validate_path_edges(g, p)
    if p.vertices[0] in cond or p.vertices[-1] in cond:
        raise InvalidPath("path endpoints may not be in the conditioning set")
    open_colliders = _collider_set(g, cond, convention)
    return _connecting(p.vertices, p.edges, cond, open_colliders)


def _validate_path_edges(g: MixedGraph, p: Path) -> None:
    for u, kind, v in zip(p.vertices, p.edges, p.vertices[1:]):
        ok = (kind == DIR_FORWARD and g.has_directed(u, v)) or \
             (kind == DIR_BACKWARD and g.has_directed(v, u)) or \
             (kind == BIDIR and g.has_bidirected(u, v))
        if not ok:
            raise InvalidPath(f"no {kind} edge between {u!r} and {v!r}")


def _connecting(verts, kinds, cond: frozenset[str], open_colliders: frozenset[str]) -> bool:
    # Mark at interior vertex i: head on the incoming side iff the previous
    # edge points at it; head on the outgoing side iff the next edge points
    # back at it.
    for i in range(1, len(verts) - 1):
        v = verts[i]
        in_head = kinds[i - 1] in (DIR_FORWARD, BIDIR)
        out_head = kinds[i] in (DIR_BACKWARD, BIDIR)
        if in_head and out_head:
            if v not in open_colliders:
                return False
        elif v in cond:
            return False
    return True


def is_separated_oracle(g: MixedGraph, q: SeparationQuery) -> SeparationVerdict:
    """Exhaustive simple-path test (max length |V| - 1 edges).

    Independent of the reachability route; kept as the ground-truth oracle.
    The witness is the first connecting path in deterministic enumeration
    order.  The search abandons a prefix the moment an interior vertex's
    role is decided and blocked, which prunes nothing but blocked paths, so
    the verdict and witness match the unpruned enumeration exactly.
    """
    g.require((q.a, q.b))
    g.require(q.cond)
    cond = q.cond
    open_colliders = _collider_set(g, cond, q.collider_convention)

    verts = [q.a]
    kinds: list[str] = []
    on_path = {q.a}
    max_len = len(g.vertices) - 1

    def walk(v: str, in_head: bool) -> Path | None:
        if len(kinds) >= max_len:
            return None
        for (w, mv, mw, kind) in g.incident(v):
            if w in on_path:
                continue
            if kinds:  # v is interior once we extend past it
                if in_head and mv == "h":
                    if v not in open_colliders:
                        continue
                elif v in cond:
                    continue
            verts.append(w)
            kinds.append(kind)
            if w == q.b:
                found = Path(tuple(verts), tuple(kinds))
                verts.pop()
                kinds.pop()
                return found
            on_path.add(w)
            found = walk(w, mw == "h")
            on_path.discard(w)
            verts.pop()
            kinds.pop()
            if found is not None:
                return found
        return None

    witness = walk(q.a, False)
    return SeparationVerdict(witness is None, witness)


def is_separated(g: MixedGraph, q: SeparationQuery) -> SeparationVerdict:
    """Decide separation by reachability over (vertex, incoming-mark) states.

    A state records the arrowhead/tail mark the walk carried into a vertex;
    passage through v is allowed when v acts as a non-collider and is not
    conditioned on, or as a collider inside the open-collider set.  Runs in
    O(|V| * |E|); agrees with is_separated_oracle on every input.
    """
    g.require((q.a, q.b))
    g.require(q.cond)
    cond = q.cond
    open_colliders = _collider_set(g, cond, q.collider_convention)

    # prev[state] = (previous state or None, path-kind of the edge used)
    prev: dict[tuple[str, str], tuple[tuple[str, str] | None, str]] = {}
    queue: deque[tuple[str, str]] = deque()
    goal: tuple[str, str] | None = None

    for (w, _mv, mw, kind) in g.incident(q.a):
        state = (w, mw)
        if state not in prev:
            prev[state] = (None, kind)
            if w == q.b:
                goal = state
                break
            queue.append(state)

    while goal is None and queue:
        v, mark = queue.popleft()
        for (w, mv, mw, kind) in g.incident(v):
            is_collider = mark == "h" and mv == "h"
            if is_collider:
                if v not in open_colliders:
                    continue
            elif v in cond:
                continue
            state = (w, mw)
            if state not in prev:
                prev[state] = ((v, mark), kind)
                if w == q.b:
                    goal = state
                    break
                queue.append(state)

    if goal is None:
        return SeparationVerdict(True, None)

    walk_verts, walk_kinds = _reconstruct_walk(q.a, goal, prev)
    path = _walk_to_simple_path(walk_verts, walk_kinds)
    if not _connecting(path.vertices, path.edges, cond, open_colliders):
        raise RuntimeError("internal invariant violation: spliced witness not connecting")
    return SeparationVerdict(False, path)


def _reconstruct_walk(start: str, goal, prev) -> tuple[list[str], list[str]]:
    verts: list[str] = []
    kinds: list[str] = []
    state = goal
    while state is not None:
        verts.append(state[0])
        parent, kind = prev[state]
        kinds.append(kind)
        state = parent
    verts.append(start)
    verts.reverse()
    kinds.reverse()
    return verts, kinds


def _walk_to_simple_path(verts: list[str], kinds: list[str]) -> Path:
    """Splice out repeated vertices; each splice preserves activeness.

    Cutting between the first arrival and the last departure of a repeated
    vertex leaves a role there that is passable under the same rules as the
    original two visits, so shortening terminates with an active simple path.
    """
    while True:
        seen: dict[str, int] = {}
        dup = None
        for idx, v in enumerate(verts):
            if v in seen:
                dup = v
                break
            seen[v] = idx
        if dup is None:
            return Path(tuple(verts), tuple(kinds))
        i = seen[dup]
        j = max(k for k, v in enumerate(verts) if v == dup)
        verts = verts[:i + 1] + verts[j + 1:]
        kinds = kinds[:i] + kinds[j:]


def _sep(g: MixedGraph, a: str, b: str, cond: Iterable[str],
         convention: str = INCLUSIVE) -> bool:
    return is_separated(g, SeparationQuery(a, b, frozenset(cond), convention)).separated


def minimal_separator(g: MixedGraph, a: str, b: str,
                      convention: str = INCLUSIVE) -> frozenset[str] | None:
    """Greedy minimal separator contained in ancestors_inclusive({a, b}).

    Starts from the inclusive ancestor set minus the endpoints and removes
    elements in label order while separation is preserved.  The result
    separates a from b and loses separation after any single removal; None
    is returned if the starting set itself fails to separate.
    """
    g.require((a, b))
    if a == b:
        raise ValueError("query endpoints must differ")
    if g.is_adjacent(a, b):
        raise AdjacentVertices(f"{a!r} and {b!r} are adjacent")
    s0 = relatives(g, frozenset((a, b)), ANCESTORS_INCLUSIVE) - {a, b}
    if not _sep(g, a, b, s0, convention):
        return None
    # Removing a vertex can re-block colliders, so earlier survivors may
    # become removable; iterate to a fixpoint for true inclusion-minimality.
    keep = set(s0)
    changed = True
    while changed:
        changed = False
        for v in sorted(keep):
            trial = keep - {v}
            if _sep(g, a, b, trial, convention):
                keep = trial
                changed = True
    return frozenset(keep)


def is_graph_shielder_off_set(g: MixedGraph, a: str, b: str,
                              cond: Iterable[str]) -> bool:
    """Graph-level shielding: cond sits in Anc(a) and cuts every directed
    path from the common ancestors of a and b to a.

    This is the structural property geometric shielder-off regions induce
    on the lattice graphs; on those graphs it implies separation.
    """
    cond = frozenset(cond)
    g.require((a, b))
    g.require(cond)
    if a in cond or b in cond:
        raise ValueError("probe vertices may not be in the candidate set")
    anc_a = relatives(g, frozenset((a,)), ANCESTORS)
    anc_b = relatives(g, frozenset((b,)), ANCESTORS)
    if a in anc_b or b in anc_a:
        raise NotCollateral(f"{a!r} and {b!r} are not collateral")
    if not cond <= anc_a:
        return False
    common = anc_a & anc_b
    if not common:
        return True
    # Reverse reachability from a over parents, skipping cond: any common
    # ancestor reached has a cond-free directed path to a.
    seen = {a}
    stack = [a]
    while stack:
        v = stack.pop()
        for p in g.parents_of(v):
            if p in cond or p in seen:
                continue
            if p in common:
                return False
            seen.add(p)
            stack.append(p)
    return True


@dataclass(frozen=True)
class TheoremRow:
    candidate: tuple[str, ...]
    shielder_off: bool
    separated: bool
    witness: Path | None


@dataclass
class TheoremReport:
    rows: list[TheoremRow] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def shielder_off_count(self) -> int:
        return sum(r.shielder_off for r in self.rows)

    @property
    def separated_count(self) -> int:
        return sum(r.separated for r in self.rows)

    @property
    def counterexamples(self) -> list[TheoremRow]:
        return [r for r in self.rows if r.shielder_off and not r.separated]


def verify_separation_theorem(g: MixedGraph, a: str, b: str,
                              candidate_sets: Iterable[Iterable[str]],
                              convention: str = INCLUSIVE) -> TheoremReport:
    """Sweep candidate conditioning sets: record the graph shielding flag and
    the separation verdict for each, flagging shielded-but-connected rows."""
    report = TheoremReport()
    for cand in candidate_sets:
        cand = frozenset(cand)
        shielded = is_graph_shielder_off_set(g, a, b, cand)
        verdict = is_separated(g, SeparationQuery(a, b, cand, convention))
        report.rows.append(TheoremRow(
            tuple(sorted(cand)), shielded, verdict.separated, verdict.witness))
    return report


def iter_subsets(items: Iterable[str], max_size: int | None = None) -> Iterator[frozenset[str]]:
    """All subsets (including the empty set) in (size, lexicographic) order."""
    from itertools import combinations
    pool = sorted(items)
    top = len(pool) if max_size is None else min(max_size, len(pool))
    for size in range(top + 1):
        for combo in combinations(pool, size):
            yield frozenset(combo)
