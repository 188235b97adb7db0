import io

import numpy as np
import pytest

from triharmonic.algebra import Element
from triharmonic.errors import EmptyGrid
from triharmonic.fields import lamellarize
from triharmonic.grid import (
    BASE_COLUMNS,
    STENCIL_COLUMNS,
    GridSpec,
    infer_spec,
    read_csv,
    read_json,
    sample_grid,
    to_csv,
    to_json,
)
from triharmonic.poly import PolyField, TriPoly
from triharmonic.pretwisted import PhiPoly, PhiRational, PhiTranscendental, phi_power

CUBE = GridSpec.of([-1] * 3, [1] * 3, 21)
x, y, z = TriPoly.var("x"), TriPoly.var("y"), TriPoly.var("z")


def control_field():
    """Fixed degree-5, non-harmonic test field."""
    return PolyField(x**5 + x * y**2 * z**2, y**4 * z - x**3, x**2 * y**3 + z**5)


def test_constant_field_rows():
    table = sample_grid(PolyField.constant(Element(1, 2, 3)), GridSpec.of([0] * 3, [1] * 3, 2))
    assert table.values.shape == (8, 3)
    assert all((row == [1, 2, 3]).all() for row in table.values)


def test_x_fastest_order():
    spec = GridSpec.of([0, 10, 20], [1, 11, 21], [2, 2, 2])
    pts = spec.points()
    assert pts[:4].tolist() == [[0, 10, 20], [1, 10, 20], [0, 11, 20], [1, 11, 20]]
    assert infer_spec(pts) == spec


def test_empty_grid():
    with pytest.raises(EmptyGrid):
        GridSpec.of([0] * 3, [1] * 3, [0, 2, 2])


def test_phi_squared_stencils_exact_on_quadratics():
    F = phi_power(2).expand()
    assert sample_grid(F, CUBE, with_stencils=True).stats()["lap"] < 1e-9
    V = lamellarize(F)
    stats = sample_grid(V, CUBE, with_stencils=True).stats()
    assert stats["div"] < 1e-9 and stats["curl"] < 1e-9


def test_stencils_match_exact_operators_on_quadratics():
    F = PolyField(x * y + z**2, y * z - x**2, x * z + 3 * y)
    table = sample_grid(F, GridSpec.of([-1] * 3, [1] * 3, 5), with_stencils=True)
    interior = ~np.isnan(table.stencils[:, 0])
    assert interior.sum() == 27
    pts = table.points[interior]
    np.testing.assert_allclose(table.stencils[interior, 0], F.divergence().eval_array(pts), atol=1e-12)
    np.testing.assert_allclose(table.stencils[interior, 1:4], F.curl().eval_array(pts), atol=1e-12)
    np.testing.assert_allclose(table.stencils[interior, 4:7], F.laplacian().eval_array(pts), atol=1e-12)


def test_boundary_is_nan():
    table = sample_grid(PolyField(x, y, z), GridSpec.of([0] * 3, [1] * 3, 3), with_stencils=True)
    assert np.isnan(table.stencils[0]).all()
    assert not np.isnan(table.stencils[13]).any()


def _interior_error(field, spec, ref_pts):
    table = sample_grid(field, spec, with_stencils=True)
    lap_exact = field.laplacian().eval_array(table.points)
    err = np.abs(table.stencils[:, 4:7] - lap_exact)
    keep = np.array([any(np.allclose(p, r) for r in ref_pts) for p in table.points])
    return err[keep].max()


def test_order_two_convergence():
    F = control_field()
    coarse = GridSpec.of([-0.5] * 3, [0.5] * 3, 5)
    fine = GridSpec.of([-0.5] * 3, [0.5] * 3, 9)
    coarse_table = sample_grid(F, coarse, with_stencils=True)
    ref = coarse_table.points[~np.isnan(coarse_table.stencils[:, 0])]
    ratio = _interior_error(F, coarse, ref) / _interior_error(F, fine, ref)
    assert abs(ratio - 4.0) <= 0.3


def test_exp_stencil_laplacian_decays_at_fourth_order():
    E = PhiTranscendental("exp")
    errs = [sample_grid(E, GridSpec.of([-1] * 3, [1] * 3, n), with_stencils=True).stats()["lap"]
            for n in (11, 21)]
    assert errs[0] < 1e-2
    assert errs[0] / errs[1] > 10


def test_singular_points_become_nan():
    F = PhiRational(phi_power(0), phi_power(1))
    table = sample_grid(F, GridSpec.of([-1] * 3, [1] * 3, 3))
    assert table.singular == 27
    assert np.isnan(table.values).all()


def test_csv_round_trip_and_header():
    F = PhiTranscendental("sin", Element(1.0, 0.5, -0.25))
    table = sample_grid(F, GridSpec.of([-1] * 3, [1] * 3, 4), with_stencils=True)
    text = to_csv(table)
    assert text.splitlines()[0] == ",".join(BASE_COLUMNS + STENCIL_COLUMNS)
    back = read_csv(io.StringIO(text))
    assert np.array_equal(back.values, table.values)
    assert back.spec == table.spec
    assert back.stats() == table.stats()


def test_json_round_trip():
    table = sample_grid(phi_power(2).expand(), GridSpec.of([-1] * 3, [1] * 3, 3), with_stencils=True)
    back = read_json(io.StringIO(to_json(table)))
    assert np.array_equal(back.values, table.values)
    assert np.array_equal(np.isnan(back.stencils), np.isnan(table.stencils))


def test_deterministic_across_workers():
    F = PhiPoly.of([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    G = lambda q: F(q).to_float()  # noqa: E731
    spec = GridSpec.of([-1] * 3, [1] * 3, 5)
    a = to_csv(sample_grid(G, spec, workers=1))
    b = to_csv(sample_grid(G, spec, workers=4))
    assert a == b


def test_csv_formatting_is_locale_free():
    table = sample_grid(PolyField.constant(Element(0.1, -2.5, 0.25)), GridSpec.of([0] * 3, [1] * 3, 1))
    row = to_csv(table).splitlines()[1]
    assert row == "0,0,0,0.10000000000000001,-2.5,0.25"
    assert [float(v) for v in row.split(",")][3] == 0.1
