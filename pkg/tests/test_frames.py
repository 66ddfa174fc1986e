import numpy as np
import pytest

from heiscurves.curve import HorizontalJet, SampledCurve, derivative_array
from heiscurves.exceptions import ConditioningError, DegeneracyError, ResolutionError
from heiscurves.frames import (FrameState, InvariantProfile, build_frame, complete_unitary, darboux_from_values,
                               darboux_matrix, frame_fields, hermitian_gram_schmidt, invariants_along)
from heiscurves.geodesics import GeodesicSpec, geodesic_curve
from heiscurves.heis_core import j_matrix, origin, random_symmetry
from heiscurves.synth import synthesize_curve
from oracles import constant_profile_curve, darboux_by_hand, exact_beta_jet, kappas_from_jet

S = np.linspace(0.0, 1.0, 1001)


def varying_profile():
    return InvariantProfile(S, [1 + 0.3 * np.sin(S), 0.5 * np.cos(S)], 0.2 * S)


def test_frame_from_single_velocity():
    f = build_frame(HorizontalJet([[1.0]]))
    np.testing.assert_allclose(f.e, np.eye(2), atol=1e-15)


def test_frame_two_step_gram_schmidt():
    for c in (0.0, 0.7, -3.0):
        f = build_frame(HorizontalJet([[1.0, 0.0], [c, 1.0]]))
        np.testing.assert_allclose(f.e[0], [1, 0, 0, 0], atol=1e-14)
        np.testing.assert_allclose(f.e[1], [0, 1, 0, 0], atol=1e-14)
        np.testing.assert_allclose(f.e[2:], f.e[:2] @ j_matrix(2).T, atol=1e-14)


def test_frame_orientation_and_adaptation(rng):
    for n in (1, 2, 3):
        jet = HorizontalJet(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        f = build_frame(jet)
        e = f.e[:n, :n] + 1j * f.e[:n, n:]
        for k in range(n):
            assert np.real(np.vdot(e[k], jet.beta_derivs[k])) > 0
        np.testing.assert_allclose(f.e @ f.e.T, np.eye(2 * n), atol=1e-12)
        np.testing.assert_allclose(f.matrix()[1:2 * n + 1, 1:2 * n + 1], f.e.T, atol=1e-15)


def test_frame_of_partial_jet_is_completed(rng):
    jet = HorizontalJet(rng.standard_normal((1, 3)) + 1j * rng.standard_normal((1, 3)))
    f = build_frame(jet)
    np.testing.assert_allclose(f.e @ f.e.T, np.eye(6), atol=1e-12)
    b = jet.beta_derivs[0]
    np.testing.assert_allclose(f.e[0, :3] + 1j * f.e[0, 3:], b / np.linalg.norm(b), atol=1e-14)


def test_geodesic_frame_is_velocity():
    spec = GeodesicSpec(2, 0.8, [0.6, 0.0], [0.0, 0.8])
    c = geodesic_curve(spec, S)
    e, derivs, _ = frame_fields(c, 1)
    np.testing.assert_allclose(e[:, 0], derivs[:, 0], atol=1e-8)


def test_degenerate_jet_rejected():
    with pytest.raises(DegeneracyError):
        build_frame(HorizontalJet([[1.0, 0.0], [2j, 0.0]]))
    with pytest.raises(DegeneracyError):
        frame_fields(geodesic_curve(GeodesicSpec(2, 1.0, [1, 0], [0, 0]), S), 2)


def test_frame_state_validation():
    with pytest.raises(ConditioningError):
        FrameState(origin(1), 1.1 * np.eye(2))
    with pytest.raises(ValueError):
        FrameState(origin(1), np.diag([1.0, -1.0]))


def test_hermitian_gram_schmidt_batch(rng):
    v = rng.standard_normal((7, 3, 3)) + 1j * rng.standard_normal((7, 3, 3))
    e, norms = hermitian_gram_schmidt(v)
    gram = np.einsum("skn,sln->skl", e.conj(), e)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(3), gram.shape), atol=1e-13)
    assert np.all(norms > 0)
    full = complete_unitary(e[0, :2])
    np.testing.assert_allclose(full.conj() @ full.T, np.eye(3), atol=1e-13)


def test_geodesic_invariants():
    for lam in (-1.0, 0.5, 2.0):
        c = geodesic_curve(GeodesicSpec(1, lam, [1.0], [0.0]), S)
        p = invariants_along(c)
        assert np.max(np.abs(p.kappas[0] + 2 * lam)) < 1e-6
        assert np.max(np.abs(p.tau)) < 1e-8


def test_line_invariants():
    c = SampledCurve(1, S, np.column_stack([S, 0 * S, 0 * S]), is_arclength=True)
    p = invariants_along(c)
    assert np.max(np.abs(p.kappas)) < 1e-10
    assert np.max(np.abs(p.tau)) < 1e-12


def test_unit_circle_matches_geodesic_constant():
    # radius 1/(2|lam|) = 1 needs lam = 1/2
    s = np.linspace(0, 2 * np.pi, 3001)
    c = geodesic_curve(GeodesicSpec(1, 0.5, [0.0], [1.0]), s)
    r = np.abs(c.beta[:, 0] - np.mean(c.beta[:, 0]))
    np.testing.assert_allclose(r, 1.0, atol=1e-3)
    p = invariants_along(c)
    assert np.max(np.abs(p.kappas[0] + 1.0)) < 1e-6


def test_jet_oracle_agrees_with_exact_constant_profiles():
    kap, tau = [1.0, 0.7, -0.4], 0.2
    for s0 in (0.0, 0.37, 2.0):
        np.testing.assert_allclose(kappas_from_jet(exact_beta_jet(kap, tau, s0, 4)), kap, atol=1e-12)


def test_invariants_of_exact_constant_profile_curves():
    for kap, tau in (([1.3], -0.5), ([1.0, -0.6], 0.3), ([1.0, 0.7, -0.4], 0.2)):
        p = invariants_along(constant_profile_curve(kap, tau, S))
        err = np.max(np.abs(p.kappas - np.array(kap)[:, None]), axis=1)
        assert np.all(err < 1e-4), err
        assert np.max(np.abs(p.tau - tau)) < 1e-10


def test_darboux_small_case():
    k, t = 0.8, -0.3
    expected = np.array([[0, 0, 0, 0], [1, 0, -k, 0], [0, k, 0, 0], [t, 0, -1, 0]], dtype=float)
    np.testing.assert_array_equal(darboux_from_values([k], t), expected)


def test_darboux_zero_invariants():
    for n in (1, 2, 3):
        phi = darboux_from_values(np.zeros(n), 0.0)
        nz = {tuple(ix) for ix in np.argwhere(phi != 0)}
        assert nz == {(1, 0), (2 * n + 1, n + 1)}
        assert phi[1, 0] == 1 and phi[2 * n + 1, n + 1] == -1


def test_darboux_matches_hand_transcription(rng):
    for n in (2, 3, 4):
        kap = rng.standard_normal(n)
        tau = float(rng.standard_normal())
        np.testing.assert_array_equal(darboux_from_values(kap, tau), darboux_by_hand(kap, tau))


def test_darboux_lie_algebra_pattern(rng):
    jm = j_matrix(3)
    for _ in range(10):
        n = 3
        phi = darboux_from_values(rng.standard_normal(n), float(rng.standard_normal()))
        assert np.all(phi[0] == 0) and np.all(phi[:, -1] == 0)
        block = phi[1:2 * n + 1, 1:2 * n + 1]
        np.testing.assert_array_equal(block, -block.T)
        np.testing.assert_array_equal(jm @ block @ jm.T, block)
        # last row pairs with the translation column like the group matrices do
        np.testing.assert_array_equal(phi[-1, 1:n + 1], phi[n + 1:2 * n + 1, 0])
        np.testing.assert_array_equal(phi[-1, n + 1:2 * n + 1], -phi[1:n + 1, 0])


def test_darboux_matrix_from_profile():
    p = varying_profile()
    np.testing.assert_array_equal(darboux_matrix(p, 10), darboux_from_values(p.kappas[:, 10], p.tau[10]))


def test_frame_equations_structure():
    p = InvariantProfile(S, [1 + 0.3 * np.sin(S), 0.8 + 0.2 * S, -0.4 + 0.5 * np.sin(S)], 0.1 - 0.3 * S ** 2)
    c = synthesize_curve(p)
    e, _, _ = frame_fields(c)
    de = derivative_array(e, S, 1)
    coef = np.einsum("sin,sjn->sij", e.conj(), de)
    n = 3
    for j in range(n):
        for i in range(n):
            if abs(i - j) >= 2:
                assert np.max(np.abs(coef[:, i, j])) < 5e-4
        if j + 1 < n:
            assert np.max(np.abs(coef[:, j + 1, j].real - p.kappas[j])) < 5e-4
        if j > 0:
            assert np.max(np.abs(coef[:, j - 1, j].real + p.kappas[j - 1])) < 5e-4
    assert np.max(np.abs(coef[:, n - 1, n - 1].imag - p.kappas[n - 1])) < 5e-4


def test_invariants_unchanged_by_symmetries(rng):
    c = synthesize_curve(varying_profile())
    base = invariants_along(c)
    for _ in range(5):
        moved = invariants_along(c.transformed(random_symmetry(2, rng, scale=2.0)))
        assert np.max(base.sup_differences(moved)) < 1e-6


def test_invariants_unchanged_by_symmetries_h3(rng):
    # kappa_3 differentiates a frame built from fourth derivatives, so round-off is larger
    p = InvariantProfile(S, [1.2 + 0.2 * np.cos(2 * S), 0.8 + 0.3 * S, -0.4 + 0.5 * np.sin(S)], 0.1 - 0.3 * S ** 2)
    c = synthesize_curve(p)
    base = invariants_along(c)
    for _ in range(3):
        moved = invariants_along(c.transformed(random_symmetry(3, rng)))
        diff = base.sup_differences(moved)
        assert np.max(diff[:2]) < 1e-6 and diff[2] < 1e-4 and diff[3] < 1e-10


def test_reversal_flips_contact_normality():
    c = synthesize_curve(varying_profile())
    fwd = invariants_along(c)
    back = invariants_along(c.reversed())
    np.testing.assert_allclose(back.tau, -fwd.tau[::-1], atol=1e-10)


def test_arclength_required():
    c = SampledCurve(1, S, np.column_stack([2 * S, 0 * S, 0 * S]), is_arclength=True)
    with pytest.raises(ValueError):
        invariants_along(c)
    with pytest.raises(ValueError):
        invariants_along(SampledCurve(1, S, np.column_stack([S, 0 * S, 0 * S])))


def test_coarse_grid_reported():
    s = np.linspace(0, 40, 60)
    c = geodesic_curve(GeodesicSpec(1, 3.0, [1.0], [0.0]), s)
    with pytest.raises(ResolutionError):
        invariants_along(c)


def test_profile_validation():
    with pytest.raises(ValueError):
        InvariantProfile(S, np.zeros((2, 10)), np.zeros(1001))
    with pytest.raises(ValueError):
        varying_profile().sup_differences(InvariantProfile(S, np.zeros((1, 1001)), S))
    assert varying_profile().as_table().shape == (1001, 4)


def _last_row_defect(m, n):
    p = m[1:2 * n + 1, 0]
    expected = np.concatenate([p[n:], -p[:n]]) @ m[1:2 * n + 1, 1:2 * n + 1]
    return np.max(np.abs(m[-1, 1:2 * n + 1] - expected))


def test_darboux_flow_stays_in_group():
    from scipy.linalg import expm
    n = 2
    phi = darboux_from_values([0.7, -0.3], 0.4)
    assert _last_row_defect(expm(0.8 * phi), n) < 1e-14
    # the -1 moved to column 2n no longer generates symmetries
    moved = phi.copy()
    moved[-1, n + 1] = 0.0
    moved[-1, 2 * n] = -1.0
    assert _last_row_defect(expm(0.8 * moved), n) > 1e-2
