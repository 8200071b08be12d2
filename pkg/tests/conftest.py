import numpy as np
import pytest
import scipy.linalg

from hyperlyap.sampling import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


def random_hermitian(rng, n):
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return b + b.conj().T


def count_below(a, lam):
    """Number of eigenvalues of Hermitian ``a`` below ``lam``, by Sylvester inertia of LDL*."""
    _, d, _ = scipy.linalg.ldl(a - lam * np.eye(a.shape[0]), hermitian=True)
    # d is block diagonal with 1x1 and 2x2 blocks; a 2x2 block is tiny enough for its own formula
    count, i, n = 0, 0, d.shape[0]
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0:
            blk = d[i:i + 2, i:i + 2]
            tr, dt = blk[0, 0].real + blk[1, 1].real, (blk[0, 0] * blk[1, 1] - abs(blk[0, 1]) ** 2).real
            count += 1 if dt < 0 else (2 if tr < 0 else 0)
            i += 2
        else:
            count += int(d[i, i].real < 0)
            i += 1
    return count


def bisect_eigenvalues(a, iters=200):
    """All eigenvalues of Hermitian ``a`` by bisection on the inertia count."""
    n = a.shape[0]
    bound = float(np.abs(a).sum(axis=1).max()) + 1.0
    out = []
    for k in range(n):
        lo, hi = -bound, bound
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if count_below(a, mid) > k:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-14 * bound:
                break
        out.append(0.5 * (lo + hi))
    return np.array(out)
