import itertools
import random

import pytest

from doctrina.boolalg import (
    BAHom,
    BoolAlg,
    boolean_closure,
    identity_hom,
    is_hom_table,
    monotone_maps,
    right_adjoint_of,
    subalgebra_atoms,
)
from doctrina.category import chain_category, finset_category, terminal_category
from doctrina.doctrine import (
    Doctrine,
    DoctrineError,
    all_forced_universals,
    change_of_base,
    check_forall_tables,
    derive_exists,
    embedding_morphism,
    find_fibered_equalities,
    forced_universal,
    hbx_doctrine,
    injectivity_report,
    product_doctrine,
    quotient_by_filter,
    random_doctrine,
    subset_doctrine,
    verify_boolean_doctrine,
    verify_elementary,
    verify_first_order,
    verify_morphism,
)
from doctrina.category import Functor, identity_functor


def subset01():
    return subset_doctrine({"E": (), "U": ("*",)})


# --- Boolean algebra layer ------------------------------------------------------


def test_boolalg_operations():
    alg = BoolAlg(3)
    assert alg.top == 0b111 and alg.bot == 0
    assert alg.meet(0b110, 0b011) == 0b010
    assert alg.join(0b100, 0b001) == 0b101
    assert alg.neg(0b101) == 0b010
    assert alg.leq(0b001, 0b011) and not alg.leq(0b011, 0b001)


def test_bahom_is_a_homomorphism():
    src, dst = BoolAlg(3), BoolAlg(2)
    for atom_map in itertools.product(range(3), repeat=2):
        h = BAHom(src, dst, atom_map)
        assert is_hom_table(src, dst, h.table()) == []
    assert identity_hom(src).table() == tuple(src.elements())


def test_bahom_compose():
    a, b, c = BoolAlg(2), BoolAlg(3), BoolAlg(1)
    h1 = BAHom(a, b, (0, 1, 0))
    h2 = BAHom(b, c, (2,))
    comp = h2.compose(h1)
    for x in a.elements():
        assert comp(x) == h2(h1(x))


def test_right_adjoint_of_hom_is_adjoint():
    src, dst = BoolAlg(2), BoolAlg(3)
    h = BAHom(src, dst, (0, 1, 1))
    table = right_adjoint_of(src, dst, h)
    for a in src.elements():
        for b in dst.elements():
            assert src.leq(a, table[b]) == dst.leq(h(a), b)


def test_boolean_closure_and_atoms():
    alg = BoolAlg(3)
    closed = boolean_closure(alg, [0b011])
    assert closed == frozenset({0, 0b011, 0b100, 0b111})
    assert subalgebra_atoms(alg, closed) == [0b011, 0b100]
    assert boolean_closure(alg, []) == frozenset({0, alg.top})


# --- subset doctrine --------------------------------------------------------------


def test_subset_doctrine_fiber_sizes():
    d = subset01()
    assert d.fiber("E").size == 1
    assert d.fiber("U").size == 2


def test_subset_reindex_along_unique_map_to_point():
    d = subset01()
    (f,) = d.base.hom("E", "U")
    # both subsets of the point pull back to the single element of P(empty)
    assert d.reindex[f] == (0, 0)


def test_subset_doctrine_passes_all_verifiers():
    d = subset01()
    assert d.base.check() == []
    assert verify_boolean_doctrine(d) == []
    assert verify_first_order(d) == []
    assert check_forall_tables(d) == []


def test_subset_forall_displays():
    d = subset01()
    # product with the empty factor: forall over an empty set is everything
    assert d.fa("U", "E", d.product_fiber("U", "E").bot) == d.fiber("U").top
    # nonempty factor: forall of bottom is bottom
    assert d.fa("U", "U", 0) == 0
    # top always maps to top
    for x in d.base.objects:
        for y in d.base.objects:
            assert d.fa(x, y, d.product_fiber(x, y).top) == d.fiber(x).top


def test_derive_exists_trivial_fibers():
    cat = chain_category(2)
    fibers = {x: BoolAlg(0) for x in cat.objects}
    reindex = {f: (0,) for f in cat.morphisms}
    d = Doctrine(cat, fibers, reindex)
    ex = derive_exists(d)
    for table in ex.values():
        assert table == (0,)  # bottom maps to bottom in the one-point algebra


def test_subset_exists_is_direct_image():
    d = subset01()
    ex = derive_exists(d)
    assert ex[("U", "U")] == d.exists[("U", "U")]
    # adjunction, exhaustively
    for x in d.base.objects:
        for y in d.base.objects:
            p, pr1, _ = d.base.product(x, y)
            for a in d.fiber(p).elements():
                for c in d.fiber(x).elements():
                    assert d.fiber(x).leq(ex[(x, y)][a], c) == d.fiber(p).leq(
                        a, d.re(pr1, c)
                    )


def test_forced_universal_matches_and_is_unique_adjoint():
    d = subset01()
    for x in d.base.objects:
        for y in d.base.objects:
            forced = forced_universal(d, x, y)
            assert forced == d.forall[(x, y)]
    # uniqueness among all monotone maps, on a 3-atom fiber
    src, dst = BoolAlg(1), BoolAlg(3)
    h = BAHom(src, dst, (0, 0, 0))
    forced = right_adjoint_of(src, dst, h)
    adjoints = []
    for table in monotone_maps(dst, src):
        if all(
            src.leq(a, table[b]) == dst.leq(h(a), b)
            for a in src.elements()
            for b in dst.elements()
        ):
            adjoints.append(table)
    assert adjoints == [forced]


def test_verifier_pinpoints_corrupted_reindexing():
    d = subset01()
    name = d.base.ident["U"]
    bad_tables = dict(d.reindex)
    table = list(bad_tables[name])
    table[1] = 0
    bad_tables[name] = tuple(table)
    d2 = d.with_tables(reindex=bad_tables)
    violations = verify_boolean_doctrine(d2)
    assert violations
    for v in violations:
        line = v.line()
        assert name in line or "obj=U" in line, line


def test_verifier_pinpoints_corrupted_quantifier():
    d = subset01()
    bad = dict(d.forall)
    bad[("U", "U")] = (1, 1)  # forall(bot) = top is not an adjoint
    d2 = d.with_tables(forall=bad)
    violations = verify_first_order(d2)
    kinds = {v.kind for v in violations}
    assert kinds & {"forall-unit", "forall-counit", "forall-monotone"}
    assert any(("X", "U") in v.data for v in violations)
    assert check_forall_tables(d2)


def test_identity_quantifier_on_nontrivial_fiber_fails():
    # replacing a genuine quantifier by the identity breaks unit or counit
    cat = terminal_category("T")
    b = BoolAlg(2)
    d = hbx_doctrine(cat, "T", b)
    # the only diagram is (T, T) and its quantifier is the identity already;
    # corrupt it into a non-adjoint instead
    bad = dict(d.forall)
    bad[("T", "T")] = tuple(b.neg(v) for v in range(b.size))
    violations = verify_first_order(d.with_tables(forall=bad))
    assert violations


def test_one_object_terminal_base_with_two_element_fiber_passes():
    cat = terminal_category("T")
    d = hbx_doctrine(cat, "T", BoolAlg(1))
    assert verify_boolean_doctrine(d) == []
    assert verify_first_order(d) == []


# --- hom-power doctrines -----------------------------------------------------------


def test_hbx_over_terminal_base_is_the_algebra():
    cat = terminal_category("T")
    b = BoolAlg(2)
    d = hbx_doctrine(cat, "T", b)
    assert d.fiber("T").size == b.size
    table = d.forall[("T", "T")]
    assert table == tuple(b.elements())  # single hom element: identity quantifier


def test_hbx_over_chain_passes_first_order():
    for n in (2, 3):
        cat = chain_category(n)
        for x in cat.objects:
            d = hbx_doctrine(cat, x, BoolAlg(2))
            assert verify_boolean_doctrine(d) == []
            assert verify_first_order(d) == []
            assert check_forall_tables(d) == []


def test_hbx_forall_of_constant_top():
    cat = chain_category(2)
    d = hbx_doctrine(cat, "c1", BoolAlg(2))
    for x in cat.objects:
        for y in cat.objects:
            p = cat.product(x, y)[0]
            assert d.fa(x, y, d.fiber(p).top) == d.fiber(x).top


# --- embedding ----------------------------------------------------------------------


def test_embedding_one_object_base():
    cat = terminal_category("T")
    b = BoolAlg(2)
    d = Doctrine(cat, {"T": b}, {cat.ident["T"]: tuple(b.elements())})
    m = embedding_morphism(d)
    assert injectivity_report(m) == []
    assert verify_morphism(m, "boolean") == []
    # one hom element: the target fiber is the algebra itself
    assert m.target.fiber("T").size == b.size


def test_embedding_subset_doctrine():
    d = subset01()
    m = embedding_morphism(d)
    assert injectivity_report(m) == []
    assert verify_morphism(m, "boolean") == []
    assert verify_first_order(m.target) == []


def test_embedding_random_doctrines():
    rng = random.Random(42)
    for _ in range(15):
        d = random_doctrine(rng)
        assert verify_boolean_doctrine(d) == []
        m = embedding_morphism(d)
        assert injectivity_report(m) == []
        assert verify_morphism(m, "boolean") == []
        assert verify_first_order(m.target) == []


def test_embedding_components_evaluate_at_identities():
    # the component at Y, restricted to the block of Y's own identity,
    # reproduces the element: that is the injectivity witness
    d = subset01()
    m = embedding_morphism(d)
    for y in d.base.objects:
        ident = d.base.ident[y]
        homs = d.base.hom(y, y)
        idx = homs.index(ident)
        width = d.fiber(y).atoms
        offset = sum(
            d.fiber(x).atoms * len(d.base.hom(x, y))
            for x in d.base.objects[: d.base.objects.index(y)]
        )
        for gamma in d.fiber(y).elements():
            block = (m.apply(y, gamma) >> (offset + idx * width)) & d.fiber(y).top
            assert block == gamma


# --- morphism verification ------------------------------------------------------------


def test_identity_morphism_passes_all_levels():
    from doctrina.doctrine import DoctrineMorphism

    d = subset01()
    m = DoctrineMorphism(
        d, d, identity_functor(d.base),
        {x: tuple(d.fiber(x).elements()) for x in d.base.objects},
    )
    assert verify_morphism(m, "boolean") == []
    assert verify_morphism(m, "first-order") == []
    assert verify_morphism(m, "elementary") == []


def test_morphism_with_bad_component_is_reported():
    from doctrina.doctrine import DoctrineMorphism

    d = subset01()
    comps = {x: tuple(d.fiber(x).elements()) for x in d.base.objects}
    comps["U"] = (0, 0)  # not a homomorphism: top not preserved
    m = DoctrineMorphism(d, d, identity_functor(d.base), comps)
    violations = verify_morphism(m, "boolean")
    assert violations


# --- elementarity ----------------------------------------------------------------------


def test_subset_fibered_equalities_are_diagonals():
    d = subset01()
    family = find_fibered_equalities(d)
    assert family == d.delta
    assert verify_elementary(d, family) == []


def test_trivial_fibers_delta_is_top():
    cat = chain_category(2)
    fibers = {x: BoolAlg(0) for x in cat.objects}
    reindex = {f: (0,) for f in cat.morphisms}
    d = Doctrine(cat, fibers, reindex)
    family = find_fibered_equalities(d)
    assert family == {x: 0 for x in cat.objects}


def test_corrupted_delta_is_caught():
    d = subset01()
    bad = dict(d.delta)
    bad["U"] = 0  # empty relation is not reflexive
    violations = verify_elementary(d, bad)
    kinds = {v.kind for v in violations}
    assert "delta-reflexivity" in kinds


def test_delta_adjoint_form_detects_corruption():
    cat = terminal_category("T")
    d = hbx_doctrine(cat, "T", BoolAlg(2))
    ok = find_fibered_equalities(d)
    assert ok is not None
    violations = verify_elementary(d, {"T": 1})  # a non-top candidate
    assert violations


def test_delta_uniqueness_per_object():
    # the principal upset determines at most one candidate
    for build in (subset01, lambda: hbx_doctrine(chain_category(2), "c1", BoolAlg(2))):
        d = build()
        for x in d.base.objects:
            p, _, _ = d.base.product(x, x)
            diag = d.base.diagonal(x)
            upset = [b for b in d.fiber(p).elements() if d.re(diag, b) == d.fiber(x).top]
            meets = [c for c in upset if all(d.fiber(p).leq(c, b) for b in upset)]
            assert len(meets) <= 1


# --- quotients --------------------------------------------------------------------------


def test_quotient_by_trivial_filter_is_isomorphic():
    d = subset01()
    q, m = quotient_by_filter(d, {d.fiber(d.base.terminal).top})
    assert {x: q.fiber(x).size for x in q.base.objects} == {
        x: d.fiber(x).size for x in d.base.objects
    }
    assert verify_first_order(q) == []
    assert verify_morphism(m, "boolean") == []


def test_quotient_by_full_filter_is_degenerate():
    d = subset01()
    q, _ = quotient_by_filter(d, set(d.fiber(d.base.terminal).elements()))
    assert all(q.fiber(x).size == 1 for x in q.base.objects)


def test_quotient_lattice_matches_filter_lattice():
    # a four-element terminal fiber: filters are the principal upsets, and the
    # quotient sizes are exactly the generator sizes
    d1 = subset01()
    d, _ = product_doctrine([d1, d1])
    term = d.base.terminal
    alg = d.fiber(term)
    assert alg.size == 4
    quotients = {}
    sizes = {}
    for c in alg.elements():
        filt = frozenset(b for b in alg.elements() if alg.leq(c, b))
        q, m = quotient_by_filter(d, filt)
        assert verify_first_order(q) == []
        assert verify_morphism(m, "boolean") == []
        # the congruence is the kernel of the quotient morphism
        quotients[c] = tuple(m.components[x] for x in q.base.objects)
        sizes[c] = tuple(q.fiber(x).size for x in q.base.objects)
    assert len(set(quotients.values())) == alg.size
    # a smaller generator means a bigger filter, hence a more collapsed quotient
    for c1 in alg.elements():
        for c2 in alg.elements():
            if alg.leq(c1, c2):
                assert all(a <= b for a, b in zip(sizes[c1], sizes[c2]))


def test_quotient_rejects_non_filter():
    d = subset01()
    with pytest.raises(DoctrineError):
        quotient_by_filter(d, {0})


# --- change of base -----------------------------------------------------------------------


def test_change_of_base_identity():
    d = subset01()
    out = change_of_base(d, identity_functor(d.base))
    assert out.fibers == d.fibers
    assert out.reindex == d.reindex
    assert verify_first_order(out) == []


def test_change_of_base_constant_functor():
    cat = chain_category(2)
    d = hbx_doctrine(cat, "c1", BoolAlg(2))
    src = terminal_category("T")
    m = Functor(
        src,
        cat,
        {"T": "c2"},
        {src.ident["T"]: cat.ident["c2"]},
    )
    out = change_of_base(d, m)
    assert out.fiber("T") == d.fiber("c2")
    assert verify_first_order(out) == []


def test_change_of_base_between_chains():
    # embed the 2-chain into the 3-chain preserving meets and the top
    c2, c3 = chain_category(2), chain_category(3)
    obj_map = {"c1": "c1", "c2": "c3"}
    mor_map = {}
    for f, (a, b) in c2.morphisms.items():
        mor_map[f] = f"le[{obj_map[a]}<={obj_map[b]}]"
    m = Functor(c2, c3, obj_map, mor_map)
    assert m.check() == []
    d = hbx_doctrine(c3, "c1", BoolAlg(2))
    out = change_of_base(d, m)
    assert verify_boolean_doctrine(out) == []
    assert verify_first_order(out) == []


def test_change_of_base_rejects_malformed_functor():
    c2 = chain_category(2)
    d = hbx_doctrine(c2, "c1", BoolAlg(1))
    bad = Functor(c2, c2, {"c1": "c1", "c2": "c1"}, {f: c2.ident["c1"] for f in c2.morphisms})
    with pytest.raises(DoctrineError):
        change_of_base(d, bad)
