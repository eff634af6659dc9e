"""Pure-NumPy no-jump propagation loop (used when the extension is not built).

Time is an integer count of the finest ladder step.  ``ladder[j]`` is the
non-unitary propagator over ``2**(L-1-j)`` units.  From the current time the
loop takes the largest aligned step that does not overshoot ``t_stop``.  When
a step would push the squared norm below ``threshold`` it is discarded and
the search continues with the next finer level only, which is a bisection of
the jump time down to one unit.  The step of finest level that crosses the
threshold is kept and marks the jump.

``psi`` is updated in place.  At every multiple of ``sample_units`` the
normalized state goes into ``snapshots[t // sample_units]`` and its squared
norm into ``snap_norms``.  Returns ``(t, jumped)``.
"""

import numpy as np


def advance(psi, ladder, threshold, t, t_stop, sample_units, snapshots, snap_norms):
    n_levels = ladder.shape[0]
    min_level = 0
    t = int(t)
    t_stop = int(t_stop)
    while t < t_stop:
        j = min_level
        size = 1 << (n_levels - 1 - j)
        while size > t_stop - t or t % size:
            j += 1
            size >>= 1
        tmp = ladder[j] @ psi
        nrm = float(np.vdot(tmp, tmp).real)
        if nrm < threshold and j < n_levels - 1:
            min_level = j + 1
            continue
        psi[:] = tmp
        t += size
        if t % sample_units == 0:
            idx = t // sample_units
            snapshots[idx] = psi / np.sqrt(nrm)
            snap_norms[idx] = nrm
        if nrm < threshold:
            return t, True
    return t, False
