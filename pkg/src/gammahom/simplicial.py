"""Multisimplicial pointed sets and their normalized chain multicomplexes.

An ``MSSet`` carries k independent simplicial directions.  Levels are finite
pointed sets addressed by a multi-index (q_1, ..., q_k); faces and
degeneracies are pointed maps between adjacent levels, operators in distinct
directions commute.  Evaluation callbacks must be pure; every level and
structure map is memoized.

Realization is replaced throughout by the total complex of the normalized
chains: level-wise reduced free modules modulo the span of degenerate cells,
with one alternating face sum per direction and Koszul signs supplied at
totalization time.  This avoids the multiplicative cell blow-up of diagonal
simplicial sets while computing the same homology.
"""

from __future__ import annotations

from itertools import product as iter_product

import numpy as np

from . import gamma
from .chains import (ChainComplex, CooMatrix, Multicomplex, Ring,
                     coo_mul, homology, induced_map_is_iso_field,
                     induced_map_is_surjective_integer, is_zero_product,
                     total_complex)
from .errors import BudgetExceeded, IntegrityError
from .gamma import FinPointedSet, PointedMap

MultiIndex = tuple[int, ...]

DEFAULT_CELL_BUDGET = 2_000_000


def total_degree(idx: MultiIndex) -> int:
    return sum(idx)


def lowered(idx: MultiIndex, j: int) -> MultiIndex:
    return idx[:j] + (idx[j] - 1,) + idx[j + 1:]


def raised(idx: MultiIndex, j: int) -> MultiIndex:
    return idx[:j] + (idx[j] + 1,) + idx[j + 1:]


def indices_up_to(directions: int, degree: int) -> list[MultiIndex]:
    """All multi-indices with the given number of directions and total
    degree at most ``degree``, ordered by total degree then lexicographically.
    """
    if directions == 0:
        return [()]
    out = [idx for idx in iter_product(range(degree + 1), repeat=directions)
           if sum(idx) <= degree]
    out.sort(key=lambda idx: (sum(idx), idx))
    return out


class MSSet:
    """A multisimplicial pointed set, evaluated lazily and memoized.

    ``cell_fn(idx)`` returns the level; ``face_fn(idx, j, i)`` the pointed map
    to ``lowered(idx, j)``; ``degeneracy_fn(idx, j, i)`` the pointed map to
    ``raised(idx, j)``.  All three must be pure.
    """

    def __init__(self, directions, cell_fn, face_fn, degeneracy_fn,
                 name="msset"):
        self.directions = directions
        self.name = name
        self._cell_fn = cell_fn
        self._face_fn = face_fn
        self._degeneracy_fn = degeneracy_fn
        self._cells: dict = {}
        self._ops: dict = {}

    def _check_index(self, idx):
        if len(idx) != self.directions or any(q < 0 for q in idx):
            raise ValueError(f"bad multi-index {idx} for {self.directions} "
                             "directions")

    def cell(self, idx: MultiIndex) -> FinPointedSet:
        idx = tuple(idx)
        got = self._cells.get(idx)
        if got is None:
            self._check_index(idx)
            got = self._cells.setdefault(idx, self._cell_fn(idx))
        return got

    def face(self, idx: MultiIndex, j: int, i: int) -> PointedMap:
        """The i-th face in direction j at level idx."""
        idx = tuple(idx)
        key = (idx, j, i, False)
        got = self._ops.get(key)
        if got is None:
            self._check_index(idx)
            if not 0 <= j < self.directions or idx[j] < 1 \
                    or not 0 <= i <= idx[j]:
                raise ValueError(f"bad face ({j}, {i}) at {idx}")
            f = self._face_fn(idx, j, i)
            if f.source != self.cell(idx) or f.target != self.cell(
                    lowered(idx, j)):
                raise IntegrityError(f"face ({j},{i}) at {idx} has wrong "
                                     "endpoints")
            got = self._ops.setdefault(key, f)
        return got

    def degeneracy(self, idx: MultiIndex, j: int, i: int) -> PointedMap:
        """The i-th degeneracy in direction j at level idx."""
        idx = tuple(idx)
        key = (idx, j, i, True)
        got = self._ops.get(key)
        if got is None:
            self._check_index(idx)
            if not 0 <= j < self.directions or not 0 <= i <= idx[j]:
                raise ValueError(f"bad degeneracy ({j}, {i}) at {idx}")
            s = self._degeneracy_fn(idx, j, i)
            if s.source != self.cell(idx) or s.target != self.cell(
                    raised(idx, j)):
                raise IntegrityError(f"degeneracy ({j},{i}) at {idx} has "
                                     "wrong endpoints")
            got = self._ops.setdefault(key, s)
        return got

    def __repr__(self):
        return f"MSSet({self.name}, k={self.directions})"


# ---------------------------------------------------------------------------
# Basic objects.

def point_object(directions: int = 0) -> MSSet:
    pt = FinPointedSet(0)
    collapse = gamma.constant_map(pt, pt)
    return MSSet(directions, lambda idx: pt, lambda idx, j, i: collapse,
                 lambda idx, j, i: collapse, name="pt")


def constant_object(x: FinPointedSet, directions: int = 0,
                    name: str | None = None) -> MSSet:
    """The constant multisimplicial object on a pointed set."""
    ident = PointedMap(x, x, tuple(range(x.points)))
    return MSSet(directions, lambda idx: x, lambda idx, j, i: ident,
                 lambda idx, j, i: ident,
                 name=name or f"const{x.size}")


def two_point_object() -> MSSet:
    """The zero-sphere: the constant object on a two-point set."""
    return constant_object(FinPointedSet(1), 0, name="s0")


def circle() -> MSSet:
    """The simplicial circle: level q is [q]+."""
    return MSSet(
        1,
        lambda idx: FinPointedSet(idx[0]),
        lambda idx, j, i: gamma.circle_face(idx[0], i),
        lambda idx, j, i: gamma.circle_degeneracy(idx[0], i),
        name="circle")


# ---------------------------------------------------------------------------
# Level-wise constructions.

def _check_same_directions(x: MSSet, y: MSSet):
    if x.directions != y.directions:
        raise ValueError(
            f"direction count mismatch: {x.directions} != {y.directions}")


def smash_ss(x: MSSet, y: MSSet) -> MSSet:
    """Level-wise smash product with diagonal structure maps."""
    _check_same_directions(x, y)
    return MSSet(
        x.directions,
        lambda idx: gamma.smash(x.cell(idx), y.cell(idx)),
        lambda idx, j, i: gamma.smash(x.face(idx, j, i), y.face(idx, j, i)),
        lambda idx, j, i: gamma.smash(x.degeneracy(idx, j, i),
                                      y.degeneracy(idx, j, i)),
        name=f"({x.name}^{y.name})")


def wedge_ss(x: MSSet, y: MSSet) -> MSSet:
    """Level-wise wedge with block-wise structure maps."""
    _check_same_directions(x, y)
    return MSSet(
        x.directions,
        lambda idx: gamma.wedge(x.cell(idx), y.cell(idx)),
        lambda idx, j, i: gamma.wedge(x.face(idx, j, i), y.face(idx, j, i)),
        lambda idx, j, i: gamma.wedge(x.degeneracy(idx, j, i),
                                      y.degeneracy(idx, j, i)),
        name=f"({x.name}v{y.name})")


def product_ss(x: MSSet, y: MSSet) -> MSSet:
    """Level-wise pointed cartesian product."""
    _check_same_directions(x, y)
    return MSSet(
        x.directions,
        lambda idx: gamma.product(x.cell(idx), y.cell(idx)),
        lambda idx, j, i: gamma.product(x.face(idx, j, i), y.face(idx, j, i)),
        lambda idx, j, i: gamma.product(x.degeneracy(idx, j, i),
                                        y.degeneracy(idx, j, i)),
        name=f"({x.name}x{y.name})")


def suspension_ss(x: MSSet) -> MSSet:
    """A new leading simplicial direction carrying the circle.

    The cell at (q, rest) is S(q) ∧ x(rest); leading structure maps act on
    the circle factor, the other directions act as in x.
    """
    def cell(idx):
        return gamma.smash(FinPointedSet(idx[0]), x.cell(idx[1:]))

    def face(idx, j, i):
        if j == 0:
            return gamma.smash(gamma.circle_face(idx[0], i),
                               _identity_of(x.cell(idx[1:])))
        return gamma.smash(_identity_of(FinPointedSet(idx[0])),
                           x.face(idx[1:], j - 1, i))

    def degeneracy(idx, j, i):
        if j == 0:
            return gamma.smash(gamma.circle_degeneracy(idx[0], i),
                               _identity_of(x.cell(idx[1:])))
        return gamma.smash(_identity_of(FinPointedSet(idx[0])),
                           x.degeneracy(idx[1:], j - 1, i))

    return MSSet(x.directions + 1, cell, face, degeneracy,
                 name=f"susp({x.name})")


def _identity_of(s: FinPointedSet) -> PointedMap:
    return gamma.identity_map(s.size)


def diagonal_ss(x: MSSet) -> MSSet:
    """Restriction of a two-direction object along the diagonal."""
    if x.directions != 2:
        raise ValueError("diagonal restriction implemented for k = 2")

    def face(idx, j, i):
        q = idx[0]
        first = x.face((q, q), 0, i)
        second = x.face((q - 1, q), 1, i)
        return gamma.compose(first, second)

    def degeneracy(idx, j, i):
        q = idx[0]
        first = x.degeneracy((q, q), 0, i)
        second = x.degeneracy((q + 1, q), 1, i)
        return gamma.compose(first, second)

    return MSSet(1, lambda idx: x.cell((idx[0], idx[0])), face, degeneracy,
                 name=f"diag({x.name})")


# ---------------------------------------------------------------------------
# Maps of multisimplicial sets.

class MSMap:
    """A level-wise pointed map between multisimplicial sets of equal
    direction count; components are memoized and must commute with all
    structure maps (spot-checkable via :meth:`verify`)."""

    def __init__(self, source: MSSet, target: MSSet, component_fn,
                 name="msmap"):
        _check_same_directions(source, target)
        self.source = source
        self.target = target
        self.name = name
        self._component_fn = component_fn
        self._components: dict = {}

    def component(self, idx: MultiIndex) -> PointedMap:
        idx = tuple(idx)
        got = self._components.get(idx)
        if got is None:
            f = self._component_fn(idx)
            if f.source != self.source.cell(idx) \
                    or f.target != self.target.cell(idx):
                raise IntegrityError(
                    f"component at {idx} has wrong endpoints")
            got = self._components.setdefault(idx, f)
        return got

    def verify(self, level_bound: int):
        """Spot-check commutation with faces and degeneracies up to a total
        degree bound; raises IntegrityError on failure."""
        for idx in indices_up_to(self.source.directions, level_bound):
            here = self.component(idx)
            for j in range(self.source.directions):
                for i in range(idx[j] + 1):
                    if idx[j] >= 1:
                        lhs = gamma.compose(here,
                                            self.target.face(idx, j, i))
                        rhs = gamma.compose(self.source.face(idx, j, i),
                                            self.component(lowered(idx, j)))
                        if lhs != rhs:
                            raise IntegrityError(
                                f"{self.name}: face ({j},{i}) at {idx} "
                                "does not commute")
                    if total_degree(idx) < level_bound:
                        lhs = gamma.compose(
                            here, self.target.degeneracy(idx, j, i))
                        rhs = gamma.compose(
                            self.source.degeneracy(idx, j, i),
                            self.component(raised(idx, j)))
                        if lhs != rhs:
                            raise IntegrityError(
                                f"{self.name}: degeneracy ({j},{i}) at "
                                f"{idx} does not commute")

    def __repr__(self):
        return f"MSMap({self.name})"


def identity_msmap(x: MSSet) -> MSMap:
    return MSMap(x, x, lambda idx: _identity_of(x.cell(idx)), name="id")


def compose_msmap(f: MSMap, g: MSMap) -> MSMap:
    """g after f, level-wise."""
    return MSMap(f.source, g.target,
                 lambda idx: gamma.compose(f.component(idx),
                                           g.component(idx)),
                 name=f"{g.name}.{f.name}")


def collapse_msmap(x: MSSet, target: MSSet | None = None) -> MSMap:
    tgt = target or point_object(x.directions)
    return MSMap(x, tgt,
                 lambda idx: gamma.constant_map(x.cell(idx), tgt.cell(idx)),
                 name="collapse")


def smash_msmap(f: MSMap, g: MSMap) -> MSMap:
    return MSMap(smash_ss(f.source, g.source), smash_ss(f.target, g.target),
                 lambda idx: gamma.smash(f.component(idx), g.component(idx)),
                 name=f"({f.name}^{g.name})")


def wedge_msmap(f: MSMap, g: MSMap) -> MSMap:
    return MSMap(wedge_ss(f.source, g.source), wedge_ss(f.target, g.target),
                 lambda idx: gamma.wedge(f.component(idx), g.component(idx)),
                 name=f"({f.name}v{g.name})")


def wedge_case_msmap(f: MSMap, g: MSMap, source: MSSet | None = None) -> MSMap:
    """The map out of a level-wise wedge given components with one target."""
    if f.target is not g.target:
        raise ValueError("wedge_case needs a shared target object")
    src = source or wedge_ss(f.source, g.source)
    return MSMap(src, f.target,
                 lambda idx: gamma.wedge_case(f.component(idx),
                                              g.component(idx)),
                 name=f"[{f.name},{g.name}]")


def pair_msmap(f: MSMap, g: MSMap, target: MSSet | None = None) -> MSMap:
    """The map into a level-wise product given components with one source."""
    if f.source is not g.source:
        raise ValueError("pair needs a shared source object")
    tgt = target or product_ss(f.target, g.target)
    return MSMap(f.source, tgt,
                 lambda idx: gamma.pair(f.component(idx), g.component(idx)),
                 name=f"({f.name},{g.name})")


def wedge_to_product_msmap(x: MSSet, y: MSSet) -> MSMap:
    return MSMap(wedge_ss(x, y), product_ss(x, y),
                 lambda idx: gamma.wedge_to_product(x.cell(idx).size,
                                                    y.cell(idx).size),
                 name="wedge>product")


def product_to_smash_msmap(x: MSSet, y: MSSet) -> MSMap:
    return MSMap(product_ss(x, y), smash_ss(x, y),
                 lambda idx: gamma.product_to_smash(x.cell(idx).size,
                                                    y.cell(idx).size),
                 name="product>smash")


# ---------------------------------------------------------------------------
# Normalized chains.

class NormalizedChains:
    """Normalized chain data of an MSSet up to a total-degree bound.

    Materializes levels of total degree <= degree_bound + 1, removes
    basepoints and degenerate cells, and assembles one unsigned alternating
    face-sum matrix per direction; ``complex`` totalizes with Koszul signs.
    Basis order is deterministic: multi-indices by (total degree, lex), then
    cell code ascending.
    """

    def __init__(self, x: MSSet, degree_bound: int,
                 cell_budget: int | None = DEFAULT_CELL_BUDGET):
        if degree_bound < 0:
            raise ValueError("degree bound must be >= 0")
        self.x = x
        self.degree_bound = degree_bound
        self.codes: dict[MultiIndex, np.ndarray] = {}
        self._offsets: dict[MultiIndex, int] = {}
        self._by_degree: dict[int, list[MultiIndex]] = {}

        top = degree_bound + 1
        for idx in indices_up_to(x.directions, top):
            cell = x.cell(idx)
            if cell_budget is not None and cell.points > cell_budget:
                raise BudgetExceeded(idx, cell.points, cell_budget)
            alive = np.ones(cell.points, dtype=bool)
            alive[0] = False
            for j in range(x.directions):
                if idx[j] < 1:
                    continue
                below = lowered(idx, j)
                for i in range(idx[j]):
                    images = x.degeneracy(below, j, i).as_array[1:]
                    alive[images] = False
            self.codes[idx] = np.nonzero(alive)[0]
            self._by_degree.setdefault(total_degree(idx), []).append(idx)

        ranks: dict[MultiIndex, int] = {}
        for d in sorted(self._by_degree):
            self._by_degree[d].sort()
            pos = 0
            for idx in self._by_degree[d]:
                self._offsets[idx] = pos
                pos += len(self.codes[idx])
                ranks[idx] = len(self.codes[idx])

        diffs: dict[tuple[MultiIndex, int], CooMatrix] = {}
        for idx, src_codes in self.codes.items():
            n_src = len(src_codes)
            if n_src == 0:
                continue
            for j in range(x.directions):
                if idx[j] < 1:
                    continue
                tgt_codes = self.codes[lowered(idx, j)]
                rows_parts, cols_parts, vals_parts = [], [], []
                for i in range(idx[j] + 1):
                    table = x.face(idx, j, i).as_array
                    hit = table[src_codes]
                    pos = np.searchsorted(tgt_codes, hit)
                    pos_safe = np.minimum(pos, max(len(tgt_codes) - 1, 0))
                    valid = (hit > 0) & (len(tgt_codes) > 0)
                    if len(tgt_codes):
                        valid &= tgt_codes[pos_safe] == hit
                    if not valid.any():
                        continue
                    rows_parts.append(pos_safe[valid])
                    cols_parts.append(np.nonzero(valid)[0])
                    vals_parts.append(
                        np.full(int(valid.sum()), (-1) ** i, dtype=np.int64))
                shape = (len(tgt_codes), n_src)
                if rows_parts:
                    m = CooMatrix(shape, np.concatenate(rows_parts),
                                  np.concatenate(cols_parts),
                                  np.concatenate(vals_parts))
                else:
                    m = CooMatrix.zero(shape)
                if m.nnz:
                    diffs[(idx, j)] = m

        self.multicomplex = Multicomplex(x.directions, ranks, diffs)

    def rank(self, degree: int) -> int:
        return sum(len(self.codes[idx])
                   for idx in self._by_degree.get(degree, []))

    def indices_of_degree(self, degree: int) -> list[MultiIndex]:
        return list(self._by_degree.get(degree, []))

    def offset(self, idx: MultiIndex) -> int:
        return self._offsets[idx]

    def complex(self, ring: Ring) -> ChainComplex:
        return total_complex(self.multicomplex, ring, self.degree_bound)


def normalized_chains(x: MSSet, ring: Ring, degree_bound: int,
                      cell_budget: int | None = DEFAULT_CELL_BUDGET,
                      ) -> ChainComplex:
    """Total complex of the normalized chains of a multisimplicial set."""
    return NormalizedChains(x, degree_bound, cell_budget).complex(ring)


class ChainMap:
    """The chain-level matrix blocks induced by an MSMap on normalized
    chains, together with both complexes."""

    def __init__(self, source: ChainComplex, target: ChainComplex,
                 blocks: dict[int, CooMatrix], ring: Ring):
        self.source = source
        self.target = target
        self.blocks = blocks
        self.ring = ring

    def block(self, degree: int) -> CooMatrix:
        got = self.blocks.get(degree)
        if got is None:
            return CooMatrix.zero((self.target.rank(degree),
                                   self.source.rank(degree)))
        return got


def chains_of_map(f: MSMap, ring: Ring, degree_bound: int,
                  cell_budget: int | None = DEFAULT_CELL_BUDGET,
                  source_chains: NormalizedChains | None = None,
                  target_chains: NormalizedChains | None = None) -> ChainMap:
    """Matrix blocks of the induced map between normalized total complexes.

    Cells mapped to degenerate cells contribute zero; commutation with the
    differentials is asserted and failures raise IntegrityError.
    """
    src = source_chains or NormalizedChains(f.source, degree_bound,
                                            cell_budget)
    tgt = target_chains or NormalizedChains(f.target, degree_bound,
                                            cell_budget)
    blocks: dict[int, CooMatrix] = {}
    for d in range(degree_bound + 2):
        rows_parts, cols_parts = [], []
        for idx in src.indices_of_degree(d):
            src_codes = src.codes[idx]
            if len(src_codes) == 0:
                continue
            tgt_codes = tgt.codes[idx]
            table = f.component(idx).as_array
            hit = table[src_codes]
            if len(tgt_codes) == 0:
                continue
            pos = np.searchsorted(tgt_codes, hit)
            pos_safe = np.minimum(pos, len(tgt_codes) - 1)
            valid = (hit > 0) & (tgt_codes[pos_safe] == hit)
            if not valid.any():
                continue
            rows_parts.append(pos_safe[valid] + tgt.offset(idx))
            cols_parts.append(np.nonzero(valid)[0] + src.offset(idx))
        shape = (tgt.rank(d), src.rank(d))
        if rows_parts:
            rows = np.concatenate(rows_parts)
            cols = np.concatenate(cols_parts)
            blocks[d] = CooMatrix(shape, rows, cols,
                                  np.ones(len(rows), dtype=np.int64))
        else:
            blocks[d] = CooMatrix.zero(shape)

    source_cx = src.complex(ring)
    target_cx = tgt.complex(ring)
    for d in range(1, degree_bound + 2):
        left = coo_mul(target_cx.boundary(d), blocks[d])
        right = coo_mul(blocks[d - 1], source_cx.boundary(d))
        if left != right:
            raise IntegrityError(
                f"{f.name}: induced map does not commute with the "
                f"differential at degree {d}")
    return ChainMap(source_cx, target_cx, blocks, ring)


def chain_map_induces_iso(chm: ChainMap, degree: int) -> bool:
    """Whether a chain map induces an isomorphism on degree-d homology.

    Over a field: equal dimensions plus full rank of the induced map.  Over
    the integers: equal groups plus a surjectivity certificate via Smith
    normal form of the induced presentation.
    """
    if chm.ring.is_field:
        return induced_map_is_iso_field(chm.source, chm.target, chm.blocks,
                                        degree, chm.ring)
    src_group = homology(chm.source, degree).group(degree)
    tgt_group = homology(chm.target, degree).group(degree)
    if src_group != tgt_group:
        return False
    return induced_map_is_surjective_integer(chm.source, chm.target,
                                             chm.blocks, degree)


def verify_square_zero(x: MSSet, ring: Ring, degree_bound: int):
    """Assert d*d = 0 for the normalized chains of x (test hook)."""
    cx = normalized_chains(x, ring, degree_bound)
    cx.verify_boundary_condition()
    return cx


__all__ = [
    "MSSet", "MSMap", "MultiIndex", "NormalizedChains", "ChainMap",
    "point_object", "constant_object", "two_point_object", "circle",
    "smash_ss", "wedge_ss", "product_ss", "suspension_ss", "diagonal_ss",
    "identity_msmap", "compose_msmap", "collapse_msmap", "smash_msmap",
    "wedge_msmap", "wedge_case_msmap", "pair_msmap",
    "wedge_to_product_msmap", "product_to_smash_msmap",
    "normalized_chains", "chains_of_map", "chain_map_induces_iso",
    "indices_up_to", "total_degree", "lowered", "raised",
    "verify_square_zero", "DEFAULT_CELL_BUDGET", "is_zero_product",
]
