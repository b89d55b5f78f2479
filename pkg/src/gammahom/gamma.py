"""The category of finite pointed sets and its structural maps.

Objects are the pointed sets ``[n]+ = {o, 1, ..., n}``, stored as the integer
``n`` with elements encoded ``0..n`` and ``0`` the basepoint.  Morphisms are
total basepoint-preserving maps stored as lookup tables.  Finite sets with
partially defined maps present an equivalent category; ``gamma_from_partial``
and ``sharp`` convert partial data into pointed maps.

The smash product uses the mixed-radix pairing ``(i, j) -> (i-1)*m + j`` and
the wedge uses block numbering.  These choices make smash strictly
associative and strictly unital on the nose, which downstream code relies on
when comparing composite constructions cell by cell.

The simplicial circle is modelled on monotone threshold maps to ``[1]`` with
the two constant maps identified to the basepoint, so level ``q`` is ``[q]+``
and the face/degeneracy tables come out of threshold arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

# Tables at least this long are built and composed through numpy.
_VECTOR_MIN = 1024


@dataclass(frozen=True)
class FinPointedSet:
    """The pointed set [n]+ with elements 0..n and 0 the basepoint."""

    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"pointed set needs size >= 0, got {self.size}")

    @property
    def points(self) -> int:
        """Number of points including the basepoint."""
        return self.size + 1

    def elements(self) -> range:
        """The non-basepoint elements."""
        return range(1, self.size + 1)

    def __repr__(self) -> str:
        return f"[{self.size}]+"


@dataclass(frozen=True)
class PointedMap:
    """A basepoint-preserving map of finite pointed sets, as a lookup table."""

    source: FinPointedSet
    target: FinPointedSet
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source.points:
            raise ValueError("table length does not match source size")
        if self.table[0] != 0:
            raise ValueError("map does not preserve the basepoint")
        if len(self.table) >= _VECTOR_MIN:
            arr = np.asarray(self.table, dtype=np.int64)
            if ((arr < 0) | (arr > self.target.size)).any():
                raise ValueError("table value out of target range")
            arr.setflags(write=False)
            self.__dict__["as_array"] = arr
        elif any(v < 0 or v > self.target.size for v in self.table):
            raise ValueError("table value out of target range")

    @cached_property
    def as_array(self) -> np.ndarray:
        arr = np.asarray(self.table, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def __call__(self, x: int) -> int:
        return self.table[x]

    def then(self, g: "PointedMap") -> "PointedMap":
        """The composite g after self."""
        return compose(self, g)

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and all(
            v == i for i, v in enumerate(self.table))

    def is_bijection(self) -> bool:
        return (self.source == self.target
                and len(set(self.table)) == len(self.table))

    def __repr__(self) -> str:
        return f"PointedMap({self.source!r} -> {self.target!r})"


def identity_map(n: int) -> PointedMap:
    s = FinPointedSet(n)
    return PointedMap(s, s, tuple(range(n + 1)))


def constant_map(source: FinPointedSet, target: FinPointedSet) -> PointedMap:
    """The map collapsing everything to the basepoint."""
    return PointedMap(source, target, (0,) * source.points)


def compose(f: PointedMap, g: PointedMap) -> PointedMap:
    """The composite g∘f (apply f first, then g)."""
    if f.target != g.source:
        raise ValueError(
            f"cannot compose: intermediate {f.target!r} != {g.source!r}")
    if f.source.points >= _VECTOR_MIN:
        table = tuple(g.as_array[f.as_array].tolist())
    else:
        gt = g.table
        table = tuple(gt[v] for v in f.table)
    return PointedMap(f.source, g.target, table)


# ---------------------------------------------------------------------------
# Partially defined maps of plain finite sets.

@dataclass(frozen=True)
class PartialMap:
    """A partially defined map between the plain finite sets {1..n}.

    ``domain`` lists the elements of the source where the map is defined (the
    injective leg of the span) and ``action`` their images in the target.
    """

    source_size: int
    target_size: int
    domain: tuple[int, ...]
    action: tuple[int, ...]

    def __post_init__(self):
        if self.source_size < 0 or self.target_size < 0:
            raise ValueError("sizes must be non-negative")
        if len(self.domain) != len(self.action):
            raise ValueError("domain and action lengths differ")
        if len(set(self.domain)) != len(self.domain):
            raise ValueError("domain elements must be distinct")
        if any(x < 1 or x > self.source_size for x in self.domain):
            raise ValueError("domain element out of source range")
        if any(y < 1 or y > self.target_size for y in self.action):
            raise ValueError("action value out of target range")


def compose_partial(p: PartialMap, q: PartialMap) -> PartialMap:
    """The composite q∘p, defined on the pullback of the domains."""
    if p.target_size != q.source_size:
        raise ValueError("cannot compose: sizes do not match")
    qmap = dict(zip(q.domain, q.action))
    dom, act = [], []
    for x, y in zip(p.domain, p.action):
        if y in qmap:
            dom.append(x)
            act.append(qmap[y])
    return PartialMap(p.source_size, q.target_size, tuple(dom), tuple(act))


def gamma_from_partial(p: PartialMap) -> PointedMap:
    """Turn a partial map into a pointed map by adding a basepoint.

    Elements where the map is defined go to their image; everything else is
    sent to the new distinguished point 0.
    """
    table = [0] * (p.source_size + 1)
    for x, y in zip(p.domain, p.action):
        table[x] = y
    return PointedMap(FinPointedSet(p.source_size),
                      FinPointedSet(p.target_size), tuple(table))


def sharp(images: Sequence[int], target_size: int) -> PointedMap:
    """The wrong-way pointed map of an injection.

    ``images`` lists where the injection sends 1..k inside {1..target_size}.
    The result maps ``[target_size]+ -> [k]+``: points in the image go back
    along the injection, everything else goes to the basepoint.
    """
    ims = tuple(images)
    if len(set(ims)) != len(ims):
        raise ValueError("not injective")
    if any(t < 1 or t > target_size for t in ims):
        raise ValueError("image out of range")
    table = [0] * (target_size + 1)
    for s, t in enumerate(ims, start=1):
        table[t] = s
    return PointedMap(FinPointedSet(target_size), FinPointedSet(len(ims)),
                      tuple(table))


# ---------------------------------------------------------------------------
# Smash and wedge.

PointedThing = Union[FinPointedSet, PointedMap]


def _smash_maps(f: PointedMap, g: PointedMap) -> PointedMap:
    n1, m1 = f.source.size, g.source.size
    n2, m2 = f.target.size, g.target.size
    size = n1 * m1
    source = FinPointedSet(size)
    target = FinPointedSet(n2 * m2)
    if size + 1 >= _VECTOR_MIN:
        e = np.arange(1, size + 1)
        i = (e - 1) // m1 + 1
        j = (e - 1) % m1 + 1
        fi = f.as_array[i]
        gj = g.as_array[j]
        out = np.where((fi == 0) | (gj == 0), 0, (fi - 1) * m2 + gj)
        table = (0, *out.tolist())
    else:
        table = [0]
        ft, gt = f.table, g.table
        for i in range(1, n1 + 1):
            fi = ft[i]
            for j in range(1, m1 + 1):
                gj = gt[j]
                table.append(0 if fi == 0 or gj == 0 else (fi - 1) * m2 + gj)
        table = tuple(table)
    return PointedMap(source, target, table)


def smash(a: PointedThing, b: PointedThing) -> PointedThing:
    """Smash product: [n]+ ∧ [m]+ = [nm]+ with pairing (i,j) -> (i-1)m + j.

    Works on two objects or on two maps; functorial in both slots, strictly
    associative and strictly unital for this enumeration.
    """
    if isinstance(a, FinPointedSet) and isinstance(b, FinPointedSet):
        return FinPointedSet(a.size * b.size)
    if isinstance(a, PointedMap) and isinstance(b, PointedMap):
        return _smash_maps(a, b)
    raise TypeError("smash takes two objects or two maps")


def wedge(a: PointedThing, b: PointedThing) -> PointedThing:
    """Wedge: [n]+ ∨ [m]+ = [n+m]+, first block then second block."""
    if isinstance(a, FinPointedSet) and isinstance(b, FinPointedSet):
        return FinPointedSet(a.size + b.size)
    if isinstance(a, PointedMap) and isinstance(b, PointedMap):
        n2 = a.target.size
        table = list(a.table)
        table.extend(0 if v == 0 else n2 + v for v in b.table[1:])
        return PointedMap(FinPointedSet(a.source.size + b.source.size),
                          FinPointedSet(n2 + b.target.size), tuple(table))
    raise TypeError("wedge takes two objects or two maps")


def wedge_inclusions(n: int, m: int) -> tuple[PointedMap, PointedMap]:
    """The canonical block inclusions [n]+ -> [n+m]+ <- [m]+."""
    total = FinPointedSet(n + m)
    first = PointedMap(FinPointedSet(n), total, tuple(range(n + 1)))
    second = PointedMap(FinPointedSet(m), total,
                        (0, *range(n + 1, n + m + 1)))
    return first, second


def wedge_case(f: PointedMap, g: PointedMap) -> PointedMap:
    """The map out of a wedge determined by maps with a common target."""
    if f.target != g.target:
        raise ValueError("wedge_case needs a common target")
    return PointedMap(FinPointedSet(f.source.size + g.source.size), f.target,
                      f.table + g.table[1:])


def mu(n: int, f: PointedMap) -> PointedMap:
    """Smash with the identity of [n]+ on the left."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return smash(identity_map(n), f)


def standard_inclusion(s: int, n: int) -> PointedMap:
    """The inclusion [1]+ -> [n]+ sending 1 to s."""
    if not 1 <= s <= n:
        raise ValueError(f"element {s} out of range 1..{n}")
    return PointedMap(FinPointedSet(1), FinPointedSet(n), (0, s))


# ---------------------------------------------------------------------------
# Pointed products (needed for the special-ness comparison maps).

def product(a: PointedThing, b: PointedThing) -> PointedThing:
    """Cartesian product of pointed sets; pair (x, y) coded x*(m+1) + y."""
    if isinstance(a, FinPointedSet) and isinstance(b, FinPointedSet):
        return FinPointedSet(a.points * b.points - 1)
    if isinstance(a, PointedMap) and isinstance(b, PointedMap):
        ms, mt = b.source.points, b.target.points
        size = a.source.points * ms - 1
        table = []
        at, bt = a.table, b.table
        for e in range(size + 1):
            x, y = divmod(e, ms)
            table.append(at[x] * mt + bt[y])
        return PointedMap(FinPointedSet(size),
                          FinPointedSet(a.target.points * mt - 1),
                          tuple(table))
    raise TypeError("product takes two objects or two maps")


def pair(f: PointedMap, g: PointedMap) -> PointedMap:
    """The map x -> (f(x), g(x)) into the pointed product."""
    if f.source != g.source:
        raise ValueError("pair needs a common source")
    mt = g.target.points
    table = tuple(fx * mt + gx for fx, gx in zip(f.table, g.table))
    return PointedMap(f.source,
                      FinPointedSet(f.target.points * mt - 1), table)


def wedge_to_product(n: int, m: int) -> PointedMap:
    """The canonical inclusion [n]+ ∨ [m]+ -> [n]+ × [m]+."""
    table = [0]
    table.extend(s * (m + 1) for s in range(1, n + 1))
    table.extend(range(1, m + 1))
    return PointedMap(FinPointedSet(n + m),
                      FinPointedSet((n + 1) * (m + 1) - 1), tuple(table))


def product_to_smash(n: int, m: int) -> PointedMap:
    """The collapse [n]+ × [m]+ -> [n]+ ∧ [m]+."""
    size = (n + 1) * (m + 1) - 1
    table = []
    for e in range(size + 1):
        x, y = divmod(e, m + 1)
        table.append(0 if x == 0 or y == 0 else (x - 1) * m + y)
    return PointedMap(FinPointedSet(size), FinPointedSet(n * m), tuple(table))


# ---------------------------------------------------------------------------
# The simplicial circle, as pointed maps between its levels.
#
# Level q is [q]+; the non-basepoint element k in 1..q stands for the
# monotone map [q] -> [1] vanishing exactly below k.  Faces precompose with
# the coface [q-1] -> [q] skipping i, degeneracies with the codegeneracy
# [q+1] -> [q] repeating i; thresholds that become constant are identified
# with the basepoint.

def circle_face(q: int, i: int) -> PointedMap:
    """Face i of the simplicial circle at level q, as a map [q]+ -> [q-1]+."""
    if q < 1:
        raise ValueError("faces need level q >= 1")
    if not 0 <= i <= q:
        raise ValueError(f"face index {i} out of range 0..{q}")
    table = [0]
    for k in range(1, q + 1):
        kk = k - 1 if i < k else k
        table.append(kk if 1 <= kk <= q - 1 else 0)
    return PointedMap(FinPointedSet(q), FinPointedSet(q - 1), tuple(table))


def circle_degeneracy(q: int, i: int) -> PointedMap:
    """Degeneracy i of the simplicial circle at level q: [q]+ -> [q+1]+."""
    if q < 0 or not 0 <= i <= q:
        raise ValueError(f"degeneracy index {i} out of range 0..{q}")
    table = [0]
    for k in range(1, q + 1):
        table.append(k + 1 if i < k else k)
    return PointedMap(FinPointedSet(q), FinPointedSet(q + 1), tuple(table))
