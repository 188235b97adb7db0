import random
from fractions import Fraction as Fr

import pytest

from triharmonic.algebra import (
    BASIS,
    CYCLIC,
    E1,
    E2,
    E3,
    LAMELLAR_NORMAL,
    N,
    V1,
    V2,
    V3,
    W2,
    W3,
    ZERO,
    AlgebraParams,
    Element,
    Membership,
    associativity_check,
    cyclic_multiply,
    det3,
    homomorphism_check,
    invert,
    invert_general,
    matmul,
    matvec,
    membership,
    multiply,
    nu,
    pi_complex_inverse,
    pi_complex_iso,
    pi_divide,
    random_element,
    random_params,
    rep,
    representation,
    tangential,
    v_map,
)
from triharmonic.errors import DegenerateDivisor, NotInPlane, SingularElement
from triharmonic.scalars import SQRT3, Surd


def el(*c):
    return Element.of([Fr(x) for x in c])


def plane_element(rng):
    a, b = random_element(rng), random_element(rng)
    x, y = a.c1, b.c2
    return Element(x, y, -x - y)


def trisector_element(rng):
    t = random_element(rng).c1
    return Element(t, t, t)


# -- structure constants and products ---------------------------------------------


def test_derived_constants_of_cyclic():
    assert (CYCLIC.p7, CYCLIC.p8, CYCLIC.p9) == (0, 1, 0)


def test_derived_constants_formula():
    P = AlgebraParams.of([Fr(v) for v in (1, 2, 3, 4, 5, 6)])
    assert P.p7 == -1 * 4 + 2 * 3 - 2 * 6 + 16
    assert P.p8 == 2 * 5 - 3 * 4
    assert P.p9 == -1 * 5 + 9 - 3 * 6 + 4 * 5


def test_general_e2_squared():
    P = AlgebraParams.of([Fr(v) for v in (1, 2, 3, 4, 5, 6)])
    assert multiply(E2, E2, P) == Element(P.p7, P.p1, P.p2)
    assert multiply(E2, E3, P) == Element(P.p8, P.p3, P.p4)
    assert multiply(E3, E3, P) == Element(P.p9, P.p5, P.p6)


def test_identity_and_commutativity():
    rng = random.Random(0)
    for _ in range(20):
        P = random_params(rng)
        u, v = random_element(rng), random_element(rng)
        assert multiply(E1, u, P) == u
        assert multiply(u, v, P) == multiply(v, u, P)


def test_cyclic_example_product():
    a, b = el(1, 1, 0), el(0, 1, 1)
    assert multiply(a, b) == el(1, 1, 2)
    # oracle: representation matrix applied to coordinates
    assert matvec(rep(a), list(b)) == el(1, 1, 2)


def test_cyclic_table():
    assert cyclic_multiply(E2, E3) == E1
    assert cyclic_multiply(E2, E2) == E3
    assert cyclic_multiply(E3, E3) == E2
    assert cyclic_multiply(el(1, 1, 0), Element(Fr(1, 2), Fr(-1, 2), Fr(1, 2))) == E1


def test_cyclic_multiply_agrees_with_general():
    rng = random.Random(1)
    for _ in range(50):
        u, v = random_element(rng), random_element(rng)
        assert cyclic_multiply(u, v) == multiply(u, v, CYCLIC)


# -- representation -----------------------------------------------------------------


def test_cyclic_representation_is_a_permutation():
    R1, R2, R3 = representation(CYCLIC)
    identity = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert R1 == identity
    assert sorted(sum(R2, ())) == [0] * 6 + [1] * 3
    assert matmul(matmul(R2, R2), R2) == identity
    assert matmul(R2, R2) == R3


def test_representation_homomorphism_random_params():
    rng = random.Random(2)
    for _ in range(10):
        P = random_params(rng)
        assert rep(multiply(E2, E3, P), P) == matmul(rep(E2, P), rep(E3, P))
        assert homomorphism_check(P, pairs=10, seed=rng.randint(0, 99)).passed
    assert homomorphism_check(CYCLIC, pairs=100).passed


def test_representation_acts_as_product():
    rng = random.Random(3)
    P = random_params(rng)
    u, v = random_element(rng), random_element(rng)
    assert matvec(rep(u, P), list(v)) == multiply(u, v, P)


# -- associativity --------------------------------------------------------------------


def test_associativity_cyclic():
    rep_ = associativity_check(CYCLIC)
    assert rep_.passed and rep_.max_residual == 0 and rep_.details["triples"] == 27


def test_associativity_random_params():
    rng = random.Random(4)
    for _ in range(100):
        assert associativity_check(random_params(rng)).passed


def test_associativity_detects_perturbation():
    P = random_params(random.Random(5))
    rep_ = associativity_check(P, p789=(P.p7 + 1, P.p8, P.p9))
    assert not rep_.passed
    assert rep_.max_residual > 0
    assert rep_.details["failures"]


# -- regularity and inverses -----------------------------------------------------------


def test_nu_examples():
    assert nu(E1) == 1
    assert nu(el(1, 1, 1)) == 0
    assert nu(el(1, 1, 0)) == 2


def test_nu_equals_determinant():
    rng = random.Random(6)
    for _ in range(200):
        u = random_element(rng)
        assert det3(rep(u)) == nu(u)


def test_invert_examples():
    assert invert(E1) == E1
    assert invert(el(1, 1, 0)) == Element(Fr(1, 2), Fr(-1, 2), Fr(1, 2))
    with pytest.raises(SingularElement) as info:
        invert(el(1, 1, 1))
    assert info.value.factor == "trisector"
    with pytest.raises(SingularElement) as info:
        invert(el(1, -1, 0))
    assert info.value.factor == "plane"
    with pytest.raises(SingularElement) as info:
        invert(ZERO)
    assert info.value.factor == "both"


def test_invert_general_agrees():
    assert invert_general(E1) == E1
    assert invert_general(el(1, 1, 0)) == invert(el(1, 1, 0))
    with pytest.raises(SingularElement):
        invert_general(el(1, 1, 1))
    rng = random.Random(7)
    for _ in range(50):
        u = random_element(rng)
        if nu(u) != 0:
            w = invert(u)
            assert cyclic_multiply(u, w) == E1
            assert invert_general(u, CYCLIC) == w


def test_invert_general_random_algebra():
    rng = random.Random(8)
    P = random_params(rng)
    u = random_element(rng)
    w = invert_general(u, P)
    assert multiply(u, w, P) == E1


# -- geometry of the cyclic algebra ----------------------------------------------------


def test_membership():
    assert membership(el(1, -1, 0)) is Membership.PI
    assert membership(el(2, 2, 2)) is Membership.TRISECTOR
    assert membership(el(1, 0, 0)) is Membership.NEITHER
    assert membership(ZERO) is Membership.ZERO


def test_basis_orthogonality_and_norms():
    assert V2.dot(V3) == 0
    assert V2.dot(V2) == Fr(2, 3) and V3.dot(V3) == Fr(2, 3)
    assert W2.dot(W2) == 2 and W3.dot(W3) == 2
    assert W2 == Element(0, -1, -1)
    assert W3 == Element(-2 * SQRT3 / 3, -SQRT3 / 3, SQRT3 / 3)


def test_basis_multiplication_table():
    assert cyclic_multiply(V1, V1) == V1
    assert cyclic_multiply(V1, V2).is_zero(0)
    assert cyclic_multiply(V2, V2) == V2
    assert cyclic_multiply(V2, V3) == V3
    assert cyclic_multiply(V3, V3) == -V2
    assert V1 + V2 == E1


def test_ideal_absorption_annihilation():
    rng = random.Random(9)
    for _ in range(100):
        u, p, t = random_element(rng), plane_element(rng), trisector_element(rng)
        assert cyclic_multiply(u, p).coord_sum() == 0
        prod = cyclic_multiply(u, t)
        assert prod.c1 == prod.c2 == prod.c3
        assert cyclic_multiply(p, t).is_zero(0)


def test_zero_divisors_of_the_plane_lie_on_the_trisector():
    rng = random.Random(10)
    for _ in range(50):
        p = plane_element(rng)
        if p.is_zero(0):
            continue
        t = trisector_element(rng)
        if t.is_zero(0):
            continue
        assert cyclic_multiply(t, p).is_zero(0)
        assert membership(t) is Membership.TRISECTOR


def test_pi_divide():
    d = el(0, 1, -1)
    assert pi_divide(d, d) == V2
    assert pi_divide(ZERO, d).is_zero(0)
    u = el(1, -1, 0)
    mu = cyclic_multiply(u, u)
    w = pi_divide(mu, u)
    assert cyclic_multiply(w, u) == mu
    assert w.coord_sum() == 0
    with pytest.raises(DegenerateDivisor):
        pi_divide(d, ZERO)
    with pytest.raises(DegenerateDivisor):
        pi_divide(d, el(1, 0, 0))
    with pytest.raises(NotInPlane):
        pi_divide(el(1, 0, 0), d)


def test_v_map():
    assert v_map(N).is_zero(0)
    assert v_map(E1) == el(0, -1, -1)
    assert v_map(V3) == W3
    rng = random.Random(11)
    for _ in range(50):
        u = random_element(rng)
        assert v_map(u) == v_map(tangential(u))
        assert v_map(u).dot(LAMELLAR_NORMAL) == 0
        assert v_map(u).is_zero(0) == (membership(u) in (Membership.TRISECTOR, Membership.ZERO))
    assert v_map(trisector_element(rng)).is_zero(0)


def test_pi_complex_iso():
    assert pi_complex_iso(V2) == (1, 0)
    assert pi_complex_iso(cyclic_multiply(V3, V3)) == (-1, 0)
    with pytest.raises(NotInPlane):
        pi_complex_iso(E1)
    rng = random.Random(12)
    for _ in range(50):
        u, w = plane_element(rng), plane_element(rng)
        a, b = pi_complex_iso(u)
        c, d = pi_complex_iso(w)
        assert pi_complex_iso(cyclic_multiply(u, w)) == (a * c - b * d, a * d + b * c)
        assert pi_complex_inverse(a, b) == u


def test_surd_arithmetic():
    s = Surd(1, 2)
    assert s * s.conjugate() == 1 - 12
    assert (s / s) == 1
    assert Surd(0, 1) ** 2 == 3
    assert Surd(-1, 1).sign() == 1 and Surd(2, -1).sign() == 1 and Surd(1, -1).sign() == -1


def test_floats_use_tolerance():
    u = Element(1.0, 1.0, 1.0 + 1e-14)
    assert membership(u) is Membership.TRISECTOR
    with pytest.raises(SingularElement):
        invert(u)


def test_basis_tuple():
    assert BASIS == (E1, E2, E3)
