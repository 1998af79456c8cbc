"""Complex Fresnel integral under the pi/2 kernel.

F(x) = integral of exp(j*pi*t^2/2) dt from 0 to x, i.e. F = C + jS with the
classic cosine and sine Fresnel integrals. This normalization is the one
convention used across the package; nothing else is accepted at interfaces.
"""

from __future__ import annotations

import numpy as np
import scipy.special


def fresnel(x):
    """F(x) for real x, scalar or array, complex result.

    Accuracy is that of the underlying cephes evaluation (power series for
    small arguments, rational/asymptotic forms beyond), well inside 1e-10
    absolute. F is odd; sign folding happens inside scipy. Re and Im are
    each bounded by about 0.9.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("fresnel requires finite arguments")
    # scipy returns (S, C) in that order
    s, c = scipy.special.fresnel(arr)
    out = c + 1j * s
    if np.isscalar(x) or arr.ndim == 0:
        return complex(out)
    return out


def fresnel_conj(x):
    """Conjugate Fresnel integral F*(x), the form the pair coefficients use."""
    return np.conj(fresnel(x))
