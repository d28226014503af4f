"""Hot-kernel backend selection.

The compiled extension is preferred when it was built; otherwise the numpy
fallback in ``_kernels_py`` takes over.  Both produce bit-identical output,
so the choice only affects speed.  Set ``ZRATIO_PURE_PYTHON=1`` to force the
fallback (used by the backend-comparison benchmark and parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("ZRATIO_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

sample_categorical = _impl.sample_categorical
sample_alias = _impl.sample_alias
run_glauber_chains = _impl.run_glauber_chains


def build_alias_table(pmf) -> tuple:
    """Vose's alias construction; shared by both backends so the tables,
    and therefore the draws, are bit-identical across them.

    Returns (prob float64[m], alias int32[m]).
    """
    import numpy as np

    pmf = np.asarray(pmf, dtype=np.float64)
    m = len(pmf)
    if m == 0:
        raise ValueError("empty distribution")
    prob = np.ones(m, dtype=np.float64)
    alias = np.zeros(m, dtype=np.int32)
    scaled = pmf * m
    small = [i for i in range(m) if scaled[i] < 1.0]
    large = [i for i in range(m) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        big = large.pop()
        prob[s] = scaled[s]
        alias[s] = big
        scaled[big] = (scaled[big] + scaled[s]) - 1.0
        if scaled[big] < 1.0:
            small.append(big)
        else:
            large.append(big)
    # float leftovers on either worklist carry probability 1 of themselves
    return prob, alias
