import numpy as np
import pytest
import torch
from hypothesis import given, settings, strategies as st

from netreduce.graph import WeightedDigraph
from netreduce.reduction import ReducedSystem, ReductionVectors
from netreduce.dynamics import (make_dynamics, eval_f_g_g1, full_rhs, reduced_rhs, project_observables,
                                Neuronal, SIS, Ecological)

admissible = {'neuronal': (-5.0, 20.0), 'sis': (0.0, 1.0), 'ecological': (0.0, 10.0)}


def test_neuronal_values():
    spec = Neuronal(tau=0.3, mu_loc=10.0)
    _, g, g1 = eval_f_g_g1(spec, 2.0, 10.0)
    assert g == pytest.approx(0.5)
    assert g1 == 0.0


def test_sis_values():
    spec = SIS(gamma=1.7)
    f, g, _ = eval_f_g_g1(spec, 0.0, 1.0)
    assert f == 0.0
    assert g == pytest.approx(1.7)


def test_ecological_values():
    spec = Ecological()
    f, _, _ = eval_f_g_g1(spec, spec.Kcap, 1.0)
    assert f == pytest.approx(spec.B)


def test_eval_keeps_array_shape():
    f, g, g1 = eval_f_g_g1(SIS(), np.array([0.1, 0.2]), np.array([0.3, 0.4]))
    assert f.shape == g.shape == g1.shape == (2,)


@pytest.mark.parametrize('name', ['neuronal', 'sis', 'ecological'])
@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_g1_matches_finite_difference(name, data):
    lo, hi = admissible[name]
    x = data.draw(st.floats(lo + 1e-3, hi - 1e-3))
    y = data.draw(st.floats(lo, hi))
    spec = make_dynamics(name)
    h = 1e-5
    _, g_plus, _ = eval_f_g_g1(spec, x + h, y)
    _, g_minus, _ = eval_f_g_g1(spec, x - h, y)
    _, _, g1 = eval_f_g_g1(spec, x, y)
    fd = (g_plus - g_minus) / (2 * h)
    assert abs(fd - g1) <= 1e-6 * max(1.0, abs(g1))


def test_full_rhs_examples():
    x = np.array([0.3, 1.2, -0.4])
    np.testing.assert_allclose(full_rhs(Neuronal(), WeightedDigraph(np.zeros((3, 3))), x), -x)
    np.testing.assert_array_equal(full_rhs(SIS(), WeightedDigraph(np.ones((3, 3))), np.zeros(3)), 0.0)

    W = WeightedDigraph([[0.0, 1.0], [0.0, 0.0]])
    xdot = full_rhs(SIS(gamma=1.0), W, np.array([0.5, 0.5]))
    assert xdot[0] == pytest.approx(-0.25)
    assert xdot[1] == pytest.approx(-0.5)


def test_full_rhs_generic_coupling_matches_specialised(rng):
    W = rng.uniform(0, 1, size=(6, 6))
    x = rng.uniform(0, 1, size=6)
    for spec in (Neuronal(), SIS(gamma=0.7)):
        weights = torch.as_tensor(W)
        generic = super(type(spec), spec).coupling(weights, torch.as_tensor(x))
        np.testing.assert_allclose(spec.coupling(weights, torch.as_tensor(x)).numpy(), generic.numpy(), rtol=1e-12)


def test_full_rhs_validation():
    with pytest.raises(ValueError):
        full_rhs(SIS(), WeightedDigraph(np.ones((3, 3))), np.zeros(2))
    with pytest.raises(ValueError):
        full_rhs(SIS(), WeightedDigraph(np.ones((2, 2))), np.array([0.1, np.nan]))


def test_sis_keeps_unit_box(rng):
    W = WeightedDigraph(rng.uniform(0.1, 1.0, size=(8, 8)))
    x = rng.uniform(0, 1, size=8)
    x[:3], x[3:5] = 0.0, 1.0
    xdot = full_rhs(SIS(), W, x)
    assert np.all(xdot[:3] >= 0)
    assert np.all(xdot[3:5] <= 0)


def single_group_system(W, mu):
    return ReducedSystem(W_reduced=np.array([[W]]), mu=np.array([[mu]]), lam=np.array([[W]]), sizes=np.array([1]))


def test_reduced_rhs_sis_example():
    Xdot = reduced_rhs(SIS(gamma=1.0), single_group_system(2.0, 2.0), np.array([0.25]))
    assert Xdot[0] == pytest.approx(0.125)


def test_reduced_rhs_correction():
    X = np.array([0.25])
    # neuronal g1 vanishes, mu has no effect
    a = reduced_rhs(Neuronal(), single_group_system(2.0, 2.0), X)
    b = reduced_rhs(Neuronal(), single_group_system(2.0, 5.0), X)
    np.testing.assert_array_equal(a, b)
    # SIS: (mu - W) g1(X, X) X = 1 * (-0.25) * 0.25
    c = reduced_rhs(SIS(), single_group_system(2.0, 3.0), X)
    assert c[0] == pytest.approx(0.125 - 0.0625)


def test_reduced_rhs_validation():
    with pytest.raises(ValueError):
        reduced_rhs(SIS(), single_group_system(2.0, 2.0), np.array([0.1, 0.2]))


def test_project_observables():
    V = ReductionVectors(partials=(np.array([0.25, 0.75]), np.array([0.5, 0.5])), method='test')
    np.testing.assert_allclose(project_observables(V, np.array([1.0, 3.0, 2.0, 4.0])), [2.5, 3.0])
    np.testing.assert_allclose(project_observables(V, np.full(4, 0.7)), [0.7, 0.7])
    t = project_observables(V, torch.tensor([1.0, 3.0, 2.0, 4.0], dtype=torch.float64))
    assert torch.is_tensor(t)
    with pytest.raises(ValueError):
        project_observables(V, np.ones(3))


def test_project_observables_is_linear(rng):
    V = ReductionVectors(partials=(rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4))), method='test')
    x, y = rng.standard_normal(7), rng.standard_normal(7)
    lhs = project_observables(V, 2.0 * x - 3.0 * y)
    rhs = 2.0 * project_observables(V, x) - 3.0 * project_observables(V, y)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_clipping():
    np.testing.assert_array_equal(SIS().clip(torch.tensor([-0.1, 0.5, 1.2])).numpy(), [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(Ecological().clip(torch.tensor([-0.1, 3.0])).numpy(), [0.0, 3.0])
    assert torch.all(SIS().low_state(3) == 0.01)
    assert torch.all(Neuronal().low_state(3) == 0)


def test_make_dynamics():
    spec = make_dynamics('SIS', gamma=2.0)
    assert isinstance(spec, SIS)
    assert spec.gamma == 2.0
    assert repr(spec) == 'SIS(gamma=2.0)'
    with pytest.raises(ValueError):
        make_dynamics('kuramoto')
    with pytest.raises(ValueError):
        make_dynamics('sis', tau=1.0)


def test_ecological_parameter_validation():
    with pytest.raises(ValueError, match='C, D'):
        Ecological(C=0, D=-1)
    with pytest.raises(FloatingPointError):
        eval_f_g_g1(Ecological(D=1.0, E=1.0), -1.0, 0.0)
