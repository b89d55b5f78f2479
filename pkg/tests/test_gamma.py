"""Category-level tests: pointed sets, partial maps, smash/wedge, the
simplicial circle."""

import itertools
import random

import pytest

from gammahom.gamma import (FinPointedSet, PartialMap, PointedMap,
                            circle_degeneracy, circle_face, compose,
                            compose_partial, constant_map,
                            gamma_from_partial, identity_map, mu, pair,
                            product, product_to_smash, sharp, smash,
                            standard_inclusion, wedge, wedge_case,
                            wedge_inclusions, wedge_to_product)


def all_maps(a, b):
    """Every pointed map [a]+ -> [b]+."""
    for values in itertools.product(range(b + 1), repeat=a):
        yield PointedMap(FinPointedSet(a), FinPointedSet(b), (0, *values))


def test_pointed_set_basics():
    s = FinPointedSet(3)
    assert s.points == 4
    assert list(s.elements()) == [1, 2, 3]
    with pytest.raises(ValueError):
        FinPointedSet(-1)


def test_map_validation():
    with pytest.raises(ValueError):
        PointedMap(FinPointedSet(1), FinPointedSet(1), (1, 1))
    with pytest.raises(ValueError):
        PointedMap(FinPointedSet(1), FinPointedSet(1), (0, 2))
    with pytest.raises(ValueError):
        PointedMap(FinPointedSet(2), FinPointedSet(1), (0, 1))


def test_compose_identity_cases():
    g = PointedMap(FinPointedSet(3), FinPointedSet(2), (0, 1, 2, 0))
    assert compose(identity_map(3), g) == g
    collapse = PointedMap(FinPointedSet(1), FinPointedSet(1), (0, 0))
    assert compose(collapse, identity_map(1)) == collapse
    swap = PointedMap(FinPointedSet(2), FinPointedSet(2), (0, 2, 1))
    assert compose(swap, swap) == identity_map(2)


def test_compose_mismatch():
    f = identity_map(2)
    g = identity_map(3)
    with pytest.raises(ValueError):
        compose(f, g)


def test_associativity_exhaustive_small():
    sizes = range(3)
    for a, b, c, d in itertools.product(sizes, repeat=4):
        for f in all_maps(a, b):
            for g in all_maps(b, c):
                for h in all_maps(c, d):
                    assert compose(compose(f, g), h) == \
                        compose(f, compose(g, h))


def test_associativity_sampled_size_four():
    rng = random.Random(11)

    def rand_map(a, b):
        return PointedMap(
            FinPointedSet(a), FinPointedSet(b),
            (0, *(rng.randint(0, b) for _ in range(a))))

    for _ in range(300):
        a, b, c, d = (rng.randint(0, 4) for _ in range(4))
        f, g, h = rand_map(a, b), rand_map(b, c), rand_map(c, d)
        assert compose(compose(f, g), h) == compose(f, compose(g, h))
        assert compose(identity_map(a), f) == f
        assert compose(f, identity_map(b)) == f


# ---------------------------------------------------------------------------
# Partial maps.

def all_partial_maps(a, b):
    elements = list(range(1, a + 1))
    for size in range(a + 1):
        for dom in itertools.combinations(elements, size):
            for act in itertools.product(range(1, b + 1), repeat=size):
                yield PartialMap(a, b, dom, act)


def test_gamma_from_partial_examples():
    p = PartialMap(2, 1, (1,), (1,))
    assert gamma_from_partial(p).table == (0, 1, 0)
    empty = PartialMap(3, 2, (), ())
    assert gamma_from_partial(empty).table == (0, 0, 0, 0)
    bijection = PartialMap(2, 2, (1, 2), (2, 1))
    g = gamma_from_partial(bijection)
    assert sorted(g.table[1:]) == [1, 2]


def test_partial_map_validation():
    with pytest.raises(ValueError):
        PartialMap(2, 1, (1, 1), (1, 1))
    with pytest.raises(ValueError):
        PartialMap(2, 1, (3,), (1,))


def test_gamma_functorial_exhaustive():
    for a, b, c in itertools.product(range(3), repeat=3):
        for p in all_partial_maps(a, b):
            for q in all_partial_maps(b, c):
                lhs = gamma_from_partial(compose_partial(p, q))
                rhs = compose(gamma_from_partial(p), gamma_from_partial(q))
                assert lhs == rhs


# ---------------------------------------------------------------------------
# sharp.

def test_sharp_examples():
    assert sharp((1, 2, 3), 3) == identity_map(3)
    assert sharp((1,), 2).table == (0, 1, 0)
    assert sharp((), 2) == constant_map(FinPointedSet(2), FinPointedSet(0))
    with pytest.raises(ValueError):
        sharp((1, 1), 2)


def test_sharp_contravariant():
    # injections as tuples of images; compose then sharp reverses order
    for a, b, c in itertools.product(range(4), repeat=3):
        if a > b or b > c:
            continue
        for kappa in itertools.permutations(range(1, b + 1), a):
            for iota in itertools.permutations(range(1, c + 1), b):
                composite = tuple(iota[k - 1] for k in kappa)
                assert sharp(composite, c) == \
                    compose(sharp(iota, c), sharp(kappa, b))


# ---------------------------------------------------------------------------
# Smash and wedge.

def test_smash_objects():
    assert smash(FinPointedSet(2), FinPointedSet(3)) == FinPointedSet(6)
    assert smash(FinPointedSet(0), FinPointedSet(5)) == FinPointedSet(0)


def test_smash_swap_block_permutation():
    # (swap on [2]+) ∧ id_[2]+ exchanges the two row blocks of [4]+:
    # pairs (1,1)(1,2)(2,1)(2,2) are coded 1,2,3,4 and the swap sends
    # them to (2,1)(2,2)(1,1)(1,2) = 3,4,1,2.
    swap = PointedMap(FinPointedSet(2), FinPointedSet(2), (0, 2, 1))
    assert smash(swap, identity_map(2)).table == (0, 3, 4, 1, 2)


def test_smash_strictly_associative_and_unital():
    rng = random.Random(5)

    def rand_map(a, b):
        return PointedMap(
            FinPointedSet(a), FinPointedSet(b),
            (0, *(rng.randint(0, b) for _ in range(a))))

    for _ in range(100):
        f = rand_map(rng.randint(0, 3), rng.randint(0, 3))
        g = rand_map(rng.randint(0, 3), rng.randint(0, 3))
        h = rand_map(rng.randint(0, 3), rng.randint(0, 3))
        assert smash(smash(f, g), h) == smash(f, smash(g, h))
        assert smash(identity_map(1), f) == f
        assert smash(f, identity_map(1)) == f


def test_smash_functorial():
    for f1 in all_maps(2, 1):
        for f2 in all_maps(1, 2):
            for g1 in all_maps(2, 2):
                for g2 in all_maps(2, 1):
                    lhs = smash(compose(f1, f2), compose(g1, g2))
                    rhs = compose(smash(f1, g1), smash(f2, g2))
                    assert lhs == rhs


def test_wedge_objects_and_unit():
    assert wedge(FinPointedSet(2), FinPointedSet(3)) == FinPointedSet(5)
    f = PointedMap(FinPointedSet(2), FinPointedSet(1), (0, 1, 0))
    assert wedge(identity_map(0), f) == f
    assert wedge(f, identity_map(0)) == f


def test_wedge_inclusions_block_structure():
    first, second = wedge_inclusions(2, 3)
    assert [first(s) for s in range(1, 3)] == [1, 2]
    assert [second(s) for s in range(1, 4)] == [3, 4, 5]
    fold = wedge_case(identity_map(2), identity_map(2))
    assert fold.table == (0, 1, 2, 1, 2)


def test_mu():
    f = PointedMap(FinPointedSet(2), FinPointedSet(2), (0, 2, 0))
    assert mu(1, f) == f
    assert mu(2, identity_map(3)).target == FinPointedSet(6)
    collapse = constant_map(FinPointedSet(2), FinPointedSet(2))
    assert mu(3, collapse) == constant_map(FinPointedSet(6),
                                           FinPointedSet(6))


def test_standard_inclusion():
    assert standard_inclusion(1, 1) == identity_map(1)
    assert standard_inclusion(2, 3).table == (0, 2)
    # collapsing back onto the s-th coordinate recovers the identity
    for n in range(1, 4):
        for s in range(1, n + 1):
            assert compose(standard_inclusion(s, n),
                           sharp((s,), n)) == identity_map(1)
    with pytest.raises(ValueError):
        standard_inclusion(4, 3)


# ---------------------------------------------------------------------------
# Pointed products.

def test_product_and_pair():
    assert product(FinPointedSet(1), FinPointedSet(2)).points == 6
    f = identity_map(2)
    paired = pair(f, f)
    # pair lands on the diagonal
    assert paired.table == (0, 1 * 3 + 1, 2 * 3 + 2)


def test_cofiber_chain_composite_is_constant():
    # wedge -> product -> smash kills everything
    for n, m in itertools.product(range(3), repeat=2):
        composite = compose(wedge_to_product(n, m), product_to_smash(n, m))
        assert composite == constant_map(FinPointedSet(n + m),
                                         FinPointedSet(n * m))


# ---------------------------------------------------------------------------
# The simplicial circle.

def test_circle_level_one_faces_hit_basepoint():
    assert circle_face(1, 0).table == (0, 0)
    assert circle_face(1, 1).table == (0, 0)


def test_circle_degeneracy_from_vertex():
    assert circle_degeneracy(0, 0).table == (0,)


def test_circle_simplicial_identities():
    top = 6
    for q in range(2, top + 1):
        for j in range(q + 1):
            for i in range(j):
                lhs = compose(circle_face(q, j), circle_face(q - 1, i))
                rhs = compose(circle_face(q, i), circle_face(q - 1, j - 1))
                assert lhs == rhs
    for q in range(top + 1):
        for j in range(q + 1):
            for i in range(j + 1):
                lhs = compose(circle_degeneracy(q, j),
                              circle_degeneracy(q + 1, i))
                rhs = compose(circle_degeneracy(q, i),
                              circle_degeneracy(q + 1, j + 1))
                assert lhs == rhs
    for q in range(1, top + 1):
        for j in range(q + 1):
            for i in range(q + 2):
                lhs = compose(circle_degeneracy(q, j),
                              circle_face(q + 1, i))
                if i < j:
                    rhs = compose(circle_face(q, i),
                                  circle_degeneracy(q - 1, j - 1))
                elif i in (j, j + 1):
                    rhs = identity_map(q)
                else:
                    rhs = compose(circle_face(q, i - 1),
                                  circle_degeneracy(q - 1, j))
                assert lhs == rhs
