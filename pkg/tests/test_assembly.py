import numpy as np
import pytest
import scipy.io

from z22susy.assembly import (
    GridSpec,
    alpha3_grid,
    build_ladder,
    build_model,
    central_relation_residual,
    export_binary,
    export_matrix_market,
    interior_max,
    momentum_matrix,
    parity_residuals,
    read_binary,
    residual_report,
    supertranslation_residuals,
)
from z22susy.grading import Degree
from z22susy.potential import parse

OSC = parse("-sqrt(m/2)*omega*x")
CUBIC = parse("x + 0.3*x^3")
SMALL = GridSpec(-8.0, 8.0, 256)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(1.0, -1.0, 64)
    with pytest.raises(ValueError):
        GridSpec(-1.0, 1.0, 4)
    g = GridSpec(-1.0, 1.0, 17)
    assert g.h == 0.125
    assert g.refined().n_points == 34


def test_momentum_on_linear_and_constant():
    g = GridSpec(-2.0, 2.0, 41)
    p = momentum_matrix(g)
    assert p.hermiticity_defect() == 0.0
    x = g.x.astype(complex)
    assert np.allclose((p.matrix @ x)[1:-1], -1j, atol=1e-12)
    assert interior_max(g, p.matrix @ np.ones(g.n_points), margin=1) == 0.0


def test_momentum_respects_hbar():
    g = GridSpec(-2.0, 2.0, 41)
    p = momentum_matrix(g, {"hbar": 0.5})
    assert np.allclose((p.matrix @ g.x)[1:-1], -0.5j, atol=1e-12)


def test_free_particle_ladder():
    lad = build_ladder(parse("0"), SMALL)
    assert np.array_equal(lad.H_plus.dense(), lad.H_minus.dense())
    d, e = lad.H_plus.tridiagonal
    h = SMALL.h
    assert np.allclose(d, 1.0 / h**2) and np.allclose(e, -0.5 / h**2)


def test_oscillator_direct_hamiltonian():
    lad = build_ladder(OSC, SMALL)
    d, _ = lad.H_plus.tridiagonal
    x = SMALL.x
    # H+ = p^2/2 + x^2/2 - 1/2 for hbar = m = omega = 1
    assert np.allclose(d, 1.0 / SMALL.h**2 + x**2 / 2 - 0.5, atol=1e-12)
    dm, _ = lad.H_minus.tridiagonal
    assert np.allclose(dm - d, 1.0, atol=1e-12)


def test_adjoint_is_transpose():
    lad = build_ladder(CUBIC, SMALL)
    assert (lad.A_dag.matrix - lad.A.matrix.conj().T).nnz == 0


def test_product_residual_second_order():
    coarse = build_ladder(OSC, GridSpec(-12, 12, 256)).product_residual()["AAdag-H+"]
    fine = build_ladder(OSC, GridSpec(-12, 12, 512)).product_residual()["AAdag-H+"]
    assert 3.2 < coarse / fine < 4.8


def test_model_blocks():
    m = build_model(OSC, SMALL)
    lad = m.ladder
    hp, hm = lad.H_plus.matrix, lad.H_minus.matrix
    for s, want in enumerate((hp, hm, hp, hm)):
        assert (m.H00.block(s, s) - want).nnz == 0
    for r in range(4):
        for c in range(4):
            if r != c:
                assert m.H00.block(r, c).nnz == 0
    assert (m.Q10.block(0, 3) + 0.5 * lad.A.matrix).nnz == 0
    assert (m.Q10.block(3, 0) + 0.5 * lad.A_dag.matrix).nnz == 0


def test_hermiticity_and_degrees():
    m = build_model(CUBIC, SMALL)
    for op in (m.Q01, m.Q10, m.H00):
        assert op.hermiticity_defect() == 0.0
    assert m.Z11.antihermiticity_defect() == 0.0
    want = {"Q01": Degree.D01, "Q10": Degree.D10, "H00": Degree.D00, "Z11": Degree.D11}
    for name, op in m.generators().items():
        assert op.degree is want[name]
        assert op.respects_degree()
    assert alpha3_grid(SMALL).respects_degree()


def test_central_relation_on_grid():
    m = build_model(CUBIC, SMALL)
    assert central_relation_residual(m) == 0.0
    # opposite sign: residual is 2 |H00|
    assert central_relation_residual(m, sign=+1) > 1.0


def test_parity_relations_exact():
    for W in (OSC, CUBIC, parse("x^2")):
        res = parity_residuals(build_model(W, SMALL))
        assert len(res) == 11
        assert all(v == 0.0 for v in res.values()), res


def test_parity_signs():
    m = build_model(OSC, SMALL)
    n = SMALL.n_points
    k2 = m.K2.matrix.diagonal().real
    assert [k2[s * n] for s in range(4)] == [1, -1, -1, 1]
    k1 = m.K1.matrix.diagonal().real
    assert [k1[s * n] for s in range(4)] == [1, 1, -1, -1]


def test_algebra_residuals_small_and_decreasing():
    res = residual_report(OSC, [GridSpec(-12, 12, 256), GridSpec(-12, 12, 512), GridSpec(-12, 12, 1024)])
    for name, order in res.fitted_order.items():
        if order is not None:
            assert 1.7 <= order <= 2.3, (name, order)
    assert all(v == 0.0 for p in res.parity for v in p.values())


def test_product_form_algebra_is_exact_to_rounding():
    m = build_model(CUBIC, SMALL, form="product")
    res = supertranslation_residuals(m)
    assert max(res.values()) < 1e-9


def test_constant_superpotential_product_form():
    m = build_model(parse("1.5"), SMALL, form="product")
    assert max(supertranslation_residuals(m).values()) < 1e-12


def test_residual_report_rejects_unnested_grids():
    with pytest.raises(ValueError):
        residual_report(OSC, [GridSpec(-12, 12, 256), GridSpec(-12, 12, 384)])
    with pytest.raises(ValueError):
        residual_report(OSC, [GridSpec(-12, 12, 256)])


def test_unknown_form():
    with pytest.raises(ValueError):
        build_model(OSC, SMALL, form="weird")


def test_export_round_trip(tmp_path):
    g = GridSpec(-2.0, 2.0, 16)
    m = build_model(CUBIC, g)
    path = tmp_path / "q01.bin"
    export_binary(m.Q01, path)
    assert path.stat().st_size == (4 * 16) ** 2 * 16
    assert np.array_equal(read_binary(path), m.Q01.dense())
    mm = tmp_path / "z11.mtx"
    export_matrix_market(m.Z11, mm)
    back = scipy.io.mmread(str(mm))
    assert np.array_equal(back.toarray(), m.Z11.dense())
