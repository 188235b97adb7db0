import random
from fractions import Fraction as Fr

import pytest

from triharmonic.algebra import V2, V3, W2, W3, Element, random_element
from triharmonic.fields import (
    UvField,
    expand,
    field_to_uv,
    first_integral_check,
    from_rotated,
    implied_constant,
    lamellarize,
    plane_pair,
    plane_pair_poly,
    to_rotated,
    uv_cr_residual,
    uv_from_field,
    uv_to_field,
)
from triharmonic.grid import GridSpec, sample_grid
from triharmonic.harmonic import EQ_A
from triharmonic.poly import PolyField, TriPoly, field_multiply, format_poly, laplacian_scalar
from triharmonic.pretwisted import Context, PhiPoly, cr_residual, phi_power
from triharmonic.scalars import SQRT3

x, y, z = TriPoly.var("x"), TriPoly.var("y"), TriPoly.var("z")
s, t = TriPoly.var(0), TriPoly.var(1)


def random_plane_element(rng):
    u = random_element(rng)
    return Element(u.c1, u.c2, -u.c1 - u.c2)


def random_phi_poly(rng, plane=False):
    deg = rng.randint(1, 5)
    coeffs = [Element.of([Fr(rng.randint(-12, 12), 4) for _ in range(3)]) for _ in range(deg + 1)]
    k = random_element(rng)
    if plane:
        coeffs[0] = random_plane_element(rng)
        k = random_plane_element(rng)
    return PhiPoly(tuple(coeffs), Context(phi=EQ_A.with_offset(k)))


# -- polynomial plumbing ------------------------------------------------------------------------


def test_tripoly_basics():
    p = (x + y) ** 2 - 2 * x * y
    assert p == x**2 + y**2
    assert p.degree == 2
    assert (x - x).is_zero() and (x - x).degree == -1
    assert p.diff("x") == 2 * x
    assert p((Fr(1, 2), 3, 0)) == Fr(1, 4) + 9
    assert laplacian_scalar(x**2 - y**2) == TriPoly()
    assert format_poly(-4 * x + 4 * y + 8 * z) == "-4*x + 4*y + 8*z"
    assert format_poly(TriPoly()) == "0"


def test_tripoly_substitute():
    p = x**2 * y + 3
    q = p.substitute((y + z, x, TriPoly.const(Fr(0))))
    assert q == (y + z) ** 2 * x + 3


def test_polyfield_operators():
    F = PolyField(x * y, y * z, z * x)
    assert F.divergence() == y + z + x
    assert F.curl() == PolyField(-y, -z, -x)
    assert F.laplacian().is_zero()
    assert F.partial("y") == PolyField(x, z, TriPoly())


# -- expansion ---------------------------------------------------------------------------------


def test_expand_phi():
    assert expand(phi_power(1)) == PolyField(-x - y, x - z, y + z)


def test_expand_phi_squared_matches_printed_components():
    F = expand(phi_power(2))
    assert F.F1 == (x + y) ** 2 + 2 * (x - z) * (y + z)
    assert F.F2 == (y + z) ** 2 - 2 * (x + y) * (x - z)
    assert F.F3 == (x - z) ** 2 - 2 * (x + y) * (y + z)


def test_expand_constant():
    c = Element(1, -2, 3)
    assert expand(PhiPoly((c,))) == PolyField.constant(c)


def test_phi_squared_operators():
    F = expand(phi_power(2))
    assert F.laplacian().is_zero()
    assert F.divergence() == -4 * x + 4 * y + 8 * z
    assert F.curl() == PolyField(-4 * (x + 2 * y + z), TriPoly(), -4 * (2 * x + y - z))


def test_expand_matches_pointwise_evaluation():
    rng = random.Random(0)
    F = random_phi_poly(rng)
    E = expand(F)
    for _ in range(10):
        q = tuple(Fr(rng.randint(-9, 9), 3) for _ in range(3))
        assert E(q) == F(q)


def test_field_multiply_matches_algebra():
    F = PolyField(x, y, z)
    G = PolyField(y, TriPoly.const(1), x)
    prod = field_multiply(F, G)
    q = (Fr(1), Fr(2), Fr(3))
    from triharmonic.algebra import cyclic_multiply

    assert prod(q) == cyclic_multiply(F(q), G(q))


# -- lamellar fields and first integrals -----------------------------------------------------------


def test_lamellarize_examples():
    p = x**2 + y
    assert lamellarize(PolyField(p, p, p)).is_zero()
    V = lamellarize(expand(phi_power(2)))
    assert V.divergence().is_zero() and V.curl().is_zero()
    F = expand(phi_power(1))
    V = lamellarize(F)
    assert V == PolyField((y + z) - (x - z), (y + z) - (-x - y), (x - z) - (-x - y))
    assert V.laplacian().is_zero()


def test_first_integral_examples():
    F = expand(phi_power(2))
    assert first_integral_check(F, (1, 1, 1)).is_zero()
    assert first_integral_check(lamellarize(F), (1, -1, 1)).is_zero()
    assert first_integral_check(PolyField.constant(Element(1, 0, 0)), (0, 0, 1)).is_zero()
    assert not first_integral_check(F, (1, 0, 0)).is_zero()


def test_harmonic_and_lamellar_properties_sample():
    rng = random.Random(1)
    for _ in range(10):
        F = expand(random_phi_poly(rng))
        assert F.laplacian().is_zero()
        V = lamellarize(F)
        assert V.divergence().is_zero() and V.curl().is_zero() and V.laplacian().is_zero()
        assert first_integral_check(V, (1, -1, 1)).is_zero()


def test_plane_parallel_when_data_in_plane():
    rng = random.Random(2)
    for _ in range(10):
        F = expand(random_phi_poly(rng, plane=True))
        assert first_integral_check(F, (1, 1, 1)).is_zero()


def test_cr_fields_are_harmonic():
    # hand-built linear and quadratic fields that satisfy the CR rows
    G = PolyField(x - y, 2 * z, TriPoly.const(7))
    for F in (expand(phi_power(1)), expand(phi_power(2)) + expand(phi_power(1)).scale(3)):
        assert cr_residual(F, probes=[(0, 0, 0), (1, 2, 3)]).passed
        assert F.laplacian().is_zero()
    assert not cr_residual(G, probes=[(0, 0, 0)]).passed


# -- rotated coordinates and the (u, v) picture ------------------------------------------------------


def test_rotated_coordinates():
    assert to_rotated((1, 0, 0)) == (1, 1, 0)
    assert from_rotated((1, 1, 0)) == (1, 0, 0)
    q = (Fr(2), Fr(-1, 3), Fr(5))
    assert from_rotated(to_rotated(q)) == q


def test_uv_constants_give_v2():
    F = uv_to_field(UvField(TriPoly.const(Fr(1)), TriPoly()))
    assert F == PolyField.constant(V2)


def test_uv_linear_field_is_plane_parallel():
    xi, eta = TriPoly.var(1), TriPoly.var(2)
    F = uv_to_field(UvField(xi, eta))
    assert (F.F1 + F.F2 + F.F3).is_zero()
    assert F.degree == 1


def test_uv_round_trip():
    F = expand(phi_power(2))
    U = uv_from_field(F)
    assert uv_to_field(U) == F
    assert field_to_uv(V2.scale(3) + V3.scale(Fr(1, 2))) == (3, Fr(1, 2))


def test_uv_lamellar_form_equals_lamellarize():
    F = expand(phi_power(3))
    U = uv_from_field(F)
    assert uv_to_field(U, lamellar=True) == lamellarize(F)


def test_uv_residuals_constants():
    U = UvField(TriPoly.const(Fr(2)), TriPoly.const(Fr(-1)))
    rep = uv_cr_residual(U, [(0, 0, 0), (1, 1, 1)])
    assert all(rep.passed.values())


def test_uv_residuals_of_harmonic_field():
    rng = random.Random(3)
    probes = [tuple(Fr(rng.randint(-6, 6), 3) for _ in range(3)) for _ in range(5)]
    U = uv_from_field(expand(phi_power(3)))
    rep = uv_cr_residual(U, probes)
    assert rep.exact
    assert rep.passed["cr_uv"] and rep.passed["lamellar"]
    # the printed 1/3 is not what the lamellar equations imply
    assert not rep.passed["cr_2d"]
    assert uv_cr_residual(U, probes, constant=1).passed["cr_2d"]
    assert all(abs(c - 1) < 1e-12 for c in implied_constant(U, probes))


def test_uv_xi_only_fails_first_2d_row():
    U = UvField(TriPoly.var(1), TriPoly())
    rep = uv_cr_residual(U, [(0, 0, 0)])
    assert rep.blocks["cr_2d"][0] > 0
    assert not rep.passed["cr_2d"]


def test_uv_derived_block_rejects_non_differentiable():
    # u = zeta (normal direction) does not come from a differentiable field
    U = UvField(TriPoly.var(0), TriPoly())
    rep = uv_cr_residual(U, [(0, 0, 0)])
    assert not rep.passed["cr_uv"]


def test_plane_pair_conjugate_is_lamellar_and_harmonic():
    P = plane_pair_poly(s**3 - 3 * s * t**2, -(3 * s**2 * t - t**3))
    probes = [(0, 0, 0), (1, 2, 3), (Fr(-1, 2), 1, 0)]
    rep = uv_cr_residual(P, probes, constant=1)
    assert all(rep.passed.values())
    V = uv_to_field(P, lamellar=True)
    assert V.divergence().is_zero() and V.curl().is_zero() and V.laplacian().is_zero()
    u, v = P.in_xyz()
    assert laplacian_scalar(u).is_zero() and laplacian_scalar(v).is_zero()


def test_plane_pair_with_printed_constant_is_not_harmonic():
    # a_s = -b_t, a_t = b_s / 3 holds for (s^2 - t^2/3, -2 s t)
    P = plane_pair_poly(s**2 - t**2 * Fr(1, 3), -2 * s * t)
    probes = [(0, 0, 0), (1, 2, 3)]
    rep = uv_cr_residual(P, probes)
    assert rep.passed["cr_2d"]
    assert not rep.passed["lamellar"]
    u, _ = P.in_xyz()
    assert not laplacian_scalar(u).is_zero()


def test_plane_pair_numeric_2d_block_and_grid_laplacian():
    a = lambda s_, t_: s_**3 - 3 * s_ * t_**2  # noqa: E731
    b = lambda s_, t_: -(3 * s_**2 * t_ - t_**3)  # noqa: E731
    U = plane_pair(a, b)
    rep = uv_cr_residual(U, [(0.1, 0.2, 0.3), (-0.4, 0.5, 0.0)], constant=1)
    assert not rep.exact
    assert rep.passed["cr_2d"] and rep.passed["lamellar"] and rep.passed["cr_uv"]
    fu, fv = U.samplers()
    table = sample_grid(lambda q: (fu(q), fv(q), 0.0), GridSpec.of([-1] * 3, [1] * 3, 9), with_stencils=True)
    assert table.stats()["lap"] < 1e-6


def test_plane_pair_callable_matches_poly():
    P = plane_pair_poly(s**2 - t**2, 2 * s * t)
    U = plane_pair(lambda a, b: a**2 - b**2, lambda a, b: 2 * a * b)
    q = (0.3, -0.7, 0.2)
    pu, _ = P.samplers()
    cu, _ = U.samplers()
    assert abs(pu(q) - cu(q)) < 1e-12


def test_w_vectors_used_by_lamellar_form():
    U = UvField(TriPoly.const(Fr(1)), TriPoly.const(Fr(1)))
    V = uv_to_field(U, lamellar=True)
    assert V == PolyField.constant(W2 + W3)
    assert W3.c1 == -2 * SQRT3 / 3


@pytest.mark.parametrize("n", [2, 3])
def test_phi_power_cr_in_uv_block(n):
    U = uv_from_field(expand(phi_power(n)))
    assert uv_cr_residual(U, [(1, 0, 0), (0, 1, 2)]).passed["cr_uv"]
