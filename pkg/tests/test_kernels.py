import numpy as np
import pytest

from eekit import _kernels_py, kernels
from eekit.channel import Rayleigh


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="extension not built")
@pytest.mark.parametrize("beta", [0.0, 1e-9, 0.3, 1.0, 144.27, 5000.0])
@pytest.mark.parametrize("with_mu", [False, True])
def test_backends_agree(beta, with_mu):
    lam = Rayleigh().sample(100_000, seed=1)
    mu = np.linspace(0.5, 1.5, lam.size) if with_mu else None
    a = kernels.rate_stats(lam, 0.05, beta, mu)
    b = _kernels_py.rate_stats(lam, 0.05, beta, mu)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-300)


def test_kernel_moments():
    lam = np.array([0.0, 1.0, 3.0])
    mean_x, var_x, lme, rel_var = kernels.rate_stats(lam, 1.0, 1.0)
    x = np.log1p(lam)
    assert mean_x == pytest.approx(x.mean())
    assert var_x == pytest.approx(x.var())
    assert lme == pytest.approx(np.log(np.mean(1 / (1 + lam))))
    w = 1 / (1 + lam)
    assert rel_var == pytest.approx(w.var() / w.mean() ** 2)


def test_kernel_rejects_empty():
    with pytest.raises(ValueError):
        kernels.rate_stats(np.empty(0), 0.1, 1.0)
