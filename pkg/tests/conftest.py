import numpy as np
import pytest

from xorrigid.matcore import BipartiteState


def random_observable(rng, dim, balanced=False):
    """Haar-ish random observable; balanced means trace zero."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(z)
    if balanced:
        signs = np.repeat([1.0, -1.0], dim // 2)
    else:
        signs = rng.choice([1.0, -1.0], size=dim)
    return (q * signs) @ q.conj().T


def random_state(rng, da, db):
    m = rng.standard_normal((da, db)) + 1j * rng.standard_normal((da, db))
    return BipartiteState.from_matrix(m, normalize=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
