"""Pure numpy RK4 kernel for the linear matrix ODE g' = -M(t) g."""

import numpy as np


def rk4_linear(Mn, Mm, g0, h):
    """Classic RK4 on a uniform grid.

    ``Mn[k]`` is M at node k (K+1 entries), ``Mm[k]`` is M at the midpoint of
    step k (K entries).  Returns the trajectory of shape (K+1, d, d).
    """
    Mn = np.ascontiguousarray(Mn, dtype=float)
    Mm = np.ascontiguousarray(Mm, dtype=float)
    K = Mm.shape[0]
    out = np.empty((K + 1,) + np.shape(g0))
    g = np.array(g0, dtype=float)
    out[0] = g
    half = 0.5 * h
    for k in range(K):
        k1 = -Mn[k] @ g
        k2 = -Mm[k] @ (g + half * k1)
        k3 = -Mm[k] @ (g + half * k2)
        k4 = -Mn[k + 1] @ (g + h * k3)
        g = g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = g
    return out
