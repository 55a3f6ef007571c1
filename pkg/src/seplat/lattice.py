"""1+1 Minkowski lattice geometry and the shielder-off predicates.

Two partitions of the plane into half-open unit cells are supported:

* diamond cells d(i,j): the square [i,i+1) x [j,j+1) in light-cone
  coordinates (u,v) = (t-x, t+x).  Causal order is componentwise <= on
  (i,j); corner-touching diamonds are direct-parent connected, giving a
  DAG with the three-arrow pattern (up, left-up, right-up).
* box cells b(k,m): the square [k,k+1) x [m,m+1) in (t,x).  The causal
  past of b(k,m) is the open cone
      PC(k,m) = {(t,x): t < k+1,  m-(k+1-t) < x < m+1+(k+1-t)},
  so spacelike same-row neighbors have mutual past contact and become
  spouses (bidirected edges) in the induced mixed graph.

A region C is shielder-off for a probe cell A relative to B when
  L1: every cell of C lies inside the causal past of A,
  L2: the causal shadow of C contains A (discrete domain of dependence:
      every backward parent path from A inside the window meets C before
      reaching a cell with an out-of-window parent), and
  L3: either every cell of C is spacelike from B (variant "l3q") or the
      causal past of C contains the common past of A and B ("l3c").
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb, floor
from typing import Iterable, Iterator

from . import graph as graph_mod
from .errors import BudgetExceeded, KindMismatch, NotSpacelike, UnknownCell
from .graph import MixedGraph
from .separation import INCLUSIVE, SeparationQuery, is_separated

DIAMOND = "diamond"
BOX = "box"

PAST_OF_B = "past_of_b"
FUTURE_OF_B = "future_of_b"
SPACELIKE = "spacelike"

L3C = "l3c"
L3Q = "l3q"

DEFAULT_ENUM_BUDGET = 1_000_000

_LABEL_RE = re.compile(r"^([db])\((-?\d+),(-?\d+)\)$")
_PREFIX = {DIAMOND: "d", BOX: "b"}
_KIND_OF_PREFIX = {"d": DIAMOND, "b": BOX}


@dataclass(frozen=True, order=True)
class Cell:
    """One lattice cell; (a, b) is (i, j) for diamonds and (k, m) for boxes."""

    kind: str
    a: int
    b: int

    @property
    def label(self) -> str:
        return f"{_PREFIX[self.kind]}({self.a},{self.b})"


def parse_cell(label: str) -> Cell:
    m = _LABEL_RE.match(label)
    if not m:
        raise UnknownCell(f"bad cell label {label!r}")
    return Cell(_KIND_OF_PREFIX[m.group(1)], int(m.group(2)), int(m.group(3)))


@dataclass(frozen=True)
class Window:
    """Inclusive integer bounds on both cell coordinates."""

    a_min: int
    a_max: int
    b_min: int
    b_max: int

    def __post_init__(self) -> None:
        if self.a_max < self.a_min or self.b_max < self.b_min:
            raise ValueError("window bounds are empty")

    def contains(self, c: Cell) -> bool:
        return self.a_min <= c.a <= self.a_max and self.b_min <= c.b <= self.b_max

    def cells(self, kind: str) -> tuple[Cell, ...]:
        return tuple(Cell(kind, x, y)
                     for x in range(self.a_min, self.a_max + 1)
                     for y in range(self.b_min, self.b_max + 1))


_WINDOW_KEYS = {DIAMOND: ("imin", "imax", "jmin", "jmax"),
                BOX: ("kmin", "kmax", "mmin", "mmax")}


def window_to_dict(kind: str, w: Window) -> dict:
    keys = _WINDOW_KEYS[kind]
    return dict(zip(keys, (w.a_min, w.a_max, w.b_min, w.b_max)))


def window_from_dict(kind: str, d: dict) -> Window:
    keys = _WINDOW_KEYS[kind]
    try:
        return Window(*(int(d[k]) for k in keys))
    except KeyError as exc:
        raise ValueError(f"window document missing key {exc}") from exc


@dataclass(frozen=True)
class Region:
    """A finite nonempty union of cells of one kind."""

    kind: str
    cells: frozenset[Cell]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("regions are nonempty")
        for c in self.cells:
            if c.kind != self.kind:
                raise KindMismatch(f"cell {c.label} in a {self.kind} region")

    @classmethod
    def of(cls, cells: Iterable[Cell]) -> "Region":
        cells = frozenset(cells)
        kinds = {c.kind for c in cells}
        if len(kinds) != 1:
            raise KindMismatch(f"region mixes kinds {sorted(kinds)}")
        return cls(next(iter(kinds)), cells)

    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in sorted(self.cells))

    def literal(self) -> str:
        return "+".join(self.labels())


def parse_region(literal: str) -> Region:
    """Parse a '+'-joined region literal such as "d(0,3)+d(0,4)+d(1,3)"."""
    parts = [p for p in literal.split("+") if p]
    if not parts:
        raise UnknownCell("empty region literal")
    return Region.of(parse_cell(p) for p in parts)


@dataclass(frozen=True)
class ShieldVerdict:
    l1: bool
    l2: bool
    l3: bool
    variant: str

    @property
    def shielder_off(self) -> bool:
        return self.l1 and self.l2 and self.l3


def _require_same_kind(*cells: Cell) -> str:
    kinds = {c.kind for c in cells}
    if len(kinds) != 1:
        raise KindMismatch(f"mixed cell kinds {sorted(kinds)}")
    return next(iter(kinds))


def causal_relation(a: Cell, b: Cell) -> str:
    """Exactly one of past_of_b / future_of_b / spacelike for an ordered pair.

    Box cells in the same row with |dm| = 1 intersect each other's past
    cones; they are reported spacelike here and flagged separately by
    mutual_past_contact() for spouse detection.
    """
    kind = _require_same_kind(a, b)
    if a == b:
        raise ValueError("causal_relation needs distinct cells")
    if kind == DIAMOND:
        if a.a <= b.a and a.b <= b.b:
            return PAST_OF_B
        if a.a >= b.a and a.b >= b.b:
            return FUTURE_OF_B
        return SPACELIKE
    # box: a intersects PC(b) iff |m_a - m_b| <= (k_b - k_a) + 1 and k_a < k_b
    if a.a < b.a and abs(a.b - b.b) <= (b.a - a.a) + 1:
        return PAST_OF_B
    if a.a > b.a and abs(a.b - b.b) <= (a.a - b.a) + 1:
        return FUTURE_OF_B
    return SPACELIKE


def mutual_past_contact(a: Cell, b: Cell) -> bool:
    """True for spacelike box neighbors whose past cones reach each other."""
    kind = _require_same_kind(a, b)
    return kind == BOX and a.a == b.a and abs(a.b - b.b) == 1


def strictly_spacelike(a: Cell, b: Cell) -> bool:
    return causal_relation(a, b) == SPACELIKE and not mutual_past_contact(a, b)


def direct_parents(c: Cell) -> frozenset[Cell]:
    """Cells with a causal curve into c that enters no third region."""
    if c.kind == DIAMOND:
        return frozenset((Cell(DIAMOND, c.a - 1, c.b),
                          Cell(DIAMOND, c.a, c.b - 1),
                          Cell(DIAMOND, c.a - 1, c.b - 1)))
    return frozenset((Cell(BOX, c.a - 1, c.b - 1),
                      Cell(BOX, c.a - 1, c.b),
                      Cell(BOX, c.a - 1, c.b + 1)))


def spouses(c: Cell) -> frozenset[Cell]:
    """Spacelike neighbors with mutual past contact (box rows only)."""
    if c.kind == BOX:
        return frozenset((Cell(BOX, c.a, c.b - 1), Cell(BOX, c.a, c.b + 1)))
    return frozenset()


def is_boundary_cell(c: Cell, window: Window) -> bool:
    """True when at least one geometric parent falls outside the window."""
    return any(not window.contains(p) for p in direct_parents(c))


def build_graph(kind: str, window: Window) -> MixedGraph:
    """One vertex per in-window cell; parent arrows, spouse bidirected edges."""
    if kind not in (DIAMOND, BOX):
        raise ValueError(f"unknown lattice kind {kind!r}")
    cells = window.cells(kind)
    vertices = [c.label for c in cells]
    directed = []
    bidirected = []
    for c in cells:
        for p in sorted(direct_parents(c)):
            if window.contains(p):
                directed.append((p.label, c.label))
        right = Cell(kind, c.a, c.b + 1)
        if kind == BOX and window.contains(right):
            bidirected.append((c.label, right.label))
    return graph_mod.build_graph(vertices, directed, bidirected)


def geo_ancestors(c: Cell, window: Window) -> frozenset[Cell]:
    """In-window cells whose region intersects the causal past of c."""
    out = []
    if c.kind == DIAMOND:
        for x in range(window.a_min, min(c.a, window.a_max) + 1):
            for y in range(window.b_min, min(c.b, window.b_max) + 1):
                out.append(Cell(DIAMOND, x, y))
    else:
        for x in range(window.a_min, min(c.a, window.a_max) + 1):
            reach = (c.a - x) + 1
            for y in range(max(window.b_min, c.b - reach),
                           min(window.b_max, c.b + reach) + 1):
                out.append(Cell(BOX, x, y))
    return frozenset(out) - {c}


def l1_past(region: Region, cell_a: Cell) -> bool:
    """Every cell of the region lies inside the causal past of cell_a."""
    _require_same_kind(cell_a, *region.cells)
    if cell_a.kind == DIAMOND:
        return all(c.a <= cell_a.a and c.b <= cell_a.b for c in region.cells)
    return all(c.a < cell_a.a and abs(c.b - cell_a.b) <= cell_a.a - c.a
               for c in region.cells)


def l2_shields(region: Region, cell_a: Cell, window: Window) -> bool:
    """Discrete domain-of-dependence test.

    Walk backward from cell_a through in-window parents, never entering the
    region; the region shields iff no reachable cell has a parent outside
    the window (window exit counts as failure).
    """
    _require_same_kind(cell_a, *region.cells)
    blocked = region.cells
    seen = {cell_a}
    stack = [cell_a]
    while stack:
        c = stack.pop()
        if is_boundary_cell(c, window):
            return False
        for p in direct_parents(c):
            if window.contains(p) and p not in blocked and p not in seen:
                seen.add(p)
                stack.append(p)
    return True


def _require_spacelike_pair(cell_a: Cell, cell_b: Cell) -> None:
    _require_same_kind(cell_a, cell_b)
    if causal_relation(cell_a, cell_b) != SPACELIKE or mutual_past_contact(cell_a, cell_b):
        raise NotSpacelike(f"{cell_a.label} and {cell_b.label} are causally connectable")


def l3_region(region: Region, cell_a: Cell, cell_b: Cell, variant: str) -> bool:
    """L3Q: region spacelike from cell_b.  L3C: past of region contains the
    common past of cell_a and cell_b."""
    _require_same_kind(cell_a, *region.cells)
    _require_spacelike_pair(cell_a, cell_b)
    if variant == L3Q:
        return all(strictly_spacelike(c, cell_b) for c in region.cells)
    if variant != L3C:
        raise ValueError(f"unknown L3 variant {variant!r}")
    if cell_a.kind == DIAMOND:
        # The common past is the quadrant below (min i, min j); covering its
        # apex corner forces a single dominating cell, which then covers all.
        ia, ja = min(cell_a.a, cell_b.a), min(cell_a.b, cell_b.b)
        return any(c.a >= ia and c.b >= ja for c in region.cells)
    return _box_l3c(region, cell_a, cell_b)


def _box_l3c(region: Region, cell_a: Cell, cell_b: Cell) -> bool:
    """Raster containment test for the box variant of L3C.

    All region boundaries lie on lines t = n, x - t = n, x + t = n, so
    membership is constant on the faces of that line arrangement.  A
    quarter-step grid offset by (1/8, 1/16) never hits a boundary and puts
    at least one sample in every face; since all cones expand at unit rate,
    coverage below the band [min cell row of C - 2, common apex] is
    monotone, so sampling the band decides containment exactly.
    """
    ka, ma = cell_a.a, cell_a.b
    kb, mb = cell_b.a, cell_b.b
    cones = [(c.a, c.b) for c in sorted(region.cells)]
    apex = min(ka + 1.0, kb + 1.0,
               (mb - ma + ka + kb + 3) / 2.0,
               (ma - mb + ka + kb + 3) / 2.0)
    left_c = max(ma - ka - 1, mb - kb - 1)
    right_c = min(ma + ka + 2, mb + kb + 2)
    # A single cone whose boundary lines flank the common past's and which
    # stays active up to the apex covers everything (all edges expand at
    # unit rate), so no sampling is needed.
    for k, m in cones:
        if m - k - 1 <= left_c and m + k + 2 >= right_c and k + 1 >= apex:
            return True
    t_lo = min(k for k, _ in cones) - 2
    # scan downward from the apex: uncovered pockets sit at the top
    t = t_lo + 0.125 + 0.25 * floor((apex - (t_lo + 0.125)) / 0.25)
    if t >= apex:
        t -= 0.25
    while t > t_lo:
        p_left = t + left_c
        p_right = -t + right_c
        if p_left < p_right:
            # first grid point 1/16 + n/4 strictly above p_left
            x = 0.0625 + 0.25 * (floor((p_left - 0.0625) / 0.25) + 1)
            while x < p_right:
                for k, m in cones:
                    if t < k + 1 and (m - k - 1) + t < x < (m + k + 2) - t:
                        break
                else:
                    return False
                x += 0.25
        t -= 0.25
    return True


def shielder_off(region: Region, cell_a: Cell, cell_b: Cell, variant: str,
                 window: Window) -> ShieldVerdict:
    """Evaluate L1, L2 and the chosen L3 variant for one candidate region."""
    _require_spacelike_pair(cell_a, cell_b)
    if cell_a in region.cells or cell_b in region.cells:
        raise ValueError("region may not contain a probe cell")
    for c in region.cells:
        if not window.contains(c):
            raise UnknownCell(f"region cell {c.label} outside the window")
    return _verdict(region, cell_a, cell_b, variant, window)


def _verdict(region: Region, cell_a: Cell, cell_b: Cell, variant: str,
             window: Window) -> ShieldVerdict:
    return ShieldVerdict(
        l1=l1_past(region, cell_a),
        l2=l2_shields(region, cell_a, window),
        l3=l3_region(region, cell_a, cell_b, variant),
        variant=variant,
    )


def candidate_count(n_cells: int, max_cells: int) -> int:
    return sum(comb(n_cells, k) for k in range(1, min(max_cells, n_cells) + 1))


def enumerate_shielder_off(cell_a: Cell, cell_b: Cell, window: Window,
                           variant: str, max_cells: int,
                           budget: int = DEFAULT_ENUM_BUDGET,
                           ) -> Iterator[tuple[Region, ShieldVerdict]]:
    """Stream (region, verdict) over all nonempty subsets of the in-window
    geometric ancestors of cell_a, up to max_cells cells, in (size,
    lexicographic) order."""
    _require_spacelike_pair(cell_a, cell_b)
    pool = sorted(geo_ancestors(cell_a, window))
    if candidate_count(len(pool), max_cells) > budget:
        raise BudgetExceeded(
            f"{candidate_count(len(pool), max_cells)} candidates exceed budget {budget}")
    for size in range(1, min(max_cells, len(pool)) + 1):
        for combo in combinations(pool, size):
            region = Region(cell_a.kind, frozenset(combo))
            yield region, _verdict(region, cell_a, cell_b, variant, window)


def region_to_vertexset(region: Region, g: MixedGraph) -> frozenset[str]:
    """Vertex labels of the region's cells; UnknownCell if any label is not a
    vertex of the graph."""
    labels = set()
    for c in region.cells:
        if c.label not in g:
            raise UnknownCell(f"cell {c.label} is not a vertex of the graph")
        labels.add(c.label)
    return frozenset(labels)


def canonical_probe_pair(kind: str, window: Window) -> tuple[Cell, Cell]:
    """Default spacelike probe pair for a window (the two "peaks")."""
    if kind == DIAMOND:
        a = Cell(DIAMOND, window.a_min + 1, window.b_max - 1)
        b = Cell(DIAMOND, window.a_max - 1, window.b_min + 1)
    else:
        row = window.a_max - 1
        a = Cell(BOX, row, window.b_min + 2)
        b = Cell(BOX, row, window.b_max - 2)
    if not (window.contains(a) and window.contains(b)):
        raise ValueError("window too small for a canonical probe pair")
    _require_spacelike_pair(a, b)
    return a, b


@dataclass(frozen=True)
class Prop1Row:
    region: tuple[str, ...]
    l1: bool
    l2: bool
    l3: bool
    shielder_off: bool
    separated: bool
    witness: graph_mod.Path | None


@dataclass
class Prop1Report:
    variant: str
    rows: list[Prop1Row]

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def shielder_off_count(self) -> int:
        return sum(r.shielder_off for r in self.rows)

    @property
    def counterexamples(self) -> list[Prop1Row]:
        return [r for r in self.rows if r.shielder_off and not r.separated]


def prop1_sweep(kind: str, window: Window, cell_a: Cell, cell_b: Cell,
                variant: str, max_cells: int,
                convention: str = INCLUSIVE,
                budget: int = DEFAULT_ENUM_BUDGET,
                lattice_graph: MixedGraph | None = None) -> Prop1Report:
    """Full candidate sweep joining geometric verdicts with separation.

    A counterexample row would be shielder-off yet connected; the sweep is
    the machine check that none exists.
    """
    g = lattice_graph if lattice_graph is not None else build_graph(kind, window)
    a, b = cell_a.label, cell_b.label
    rows = []
    for region, verdict in enumerate_shielder_off(cell_a, cell_b, window,
                                                  variant, max_cells, budget):
        sep = is_separated(g, SeparationQuery(a, b, region_to_vertexset(region, g),
                                              convention))
        rows.append(Prop1Row(region.labels(), verdict.l1, verdict.l2, verdict.l3,
                             verdict.shielder_off, sep.separated, sep.witness))
    return Prop1Report(variant, rows)
