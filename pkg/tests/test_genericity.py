import numpy as np
import pytest

from sixr import genericity as G
from sixr import kinematics as K
from sixr import torus_field as T
from sixr.io import fixture


def _run(name, n=24, **kw):
    m = fixture(name)
    f = T.sample_field(m, T.GridSpec.uniform(n))
    return m, G.check_genericity(m, T.sign_field(f), f, **kw)


def test_adjugate_against_inverse(rng):
    M = rng.normal(size=(6, 6))
    assert np.allclose(G.adjugate(M), np.linalg.det(M) * np.linalg.inv(M), atol=1e-10)
    S = M.copy()
    S[5] = S[0] + S[1]
    # rank 5: adjugate is rank one and annihilates the matrix
    assert np.allclose(G.adjugate(S) @ S, 0, atol=1e-10)


def test_spherical_wrist_is_non_generic():
    m, res = _run("wrist")
    assert res.verdict == G.NON_GENERIC
    bad = [w for w in res.witnesses if not w.transverse]
    assert bad
    for w in bad:
        # independent singular-value check at the witness
        sv = np.linalg.svd(K.spatial_jacobian(m, [0.0, *w.config, 0.0]), compute_uv=False)
        assert np.sum(sv / sv[0] < 1e-8) >= 2


def test_perturbed_wrist_is_generic():
    m, res = _run("wrist_perturbed")
    assert res.verdict == G.GENERIC
    assert res.located >= 100
    assert set(res.coranks) == {1}
    assert all(w.transverse for w in res.witnesses)


@pytest.mark.parametrize("name", ["arm_a", "arm_d"])
def test_fixture_arms_generic(name):
    _, res = _run(name)
    assert res.verdict == G.GENERIC


def test_zero_model_short_circuits():
    m = fixture("zero")
    f = T.sample_field(m, T.GridSpec.uniform(16))
    signs = T.SignField(f.grid, np.ones(f.grid.n))
    assert G.check_genericity(m, signs, f).verdict == G.NON_GENERIC


def test_requires_enough_samples():
    m = fixture("arm_a")
    f = T.sample_field(m, T.GridSpec.uniform(16))
    with pytest.raises(ValueError):
        G.check_genericity(m, T.sign_field(f), f, samples=50)


def test_undetermined_without_crossings():
    m = fixture("arm_a")
    g = T.GridSpec.uniform(16)
    signs = T.SignField(g, np.ones(g.n))
    assert G.check_genericity(m, signs).verdict == G.UNDETERMINED


def test_located_points_lie_on_the_surface():
    m = fixture("arm_b")
    f = T.sample_field(m, T.GridSpec.uniform(16))
    s = T.sign_field(f)
    arm = G._Arm(m)
    rng = np.random.Generator(np.random.Philox(0))
    for a, b in G._edge_points(s, 20, rng):
        y = G._bisect(arm, a, b, arm.det(a), arm.det(b))
        assert K.jacobian_corank(m, arm.full(y)) == 1


def test_deterministic():
    _, a = _run("arm_c", n=16)
    _, b = _run("arm_c", n=16)
    assert a.as_dict() == b.as_dict()
