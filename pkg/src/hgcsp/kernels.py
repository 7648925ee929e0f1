"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set HGCSP_PURE=1 in the environment to force the pure implementation
(used by the benchmark and by the equivalence tests).
"""

import os

from . import _purekern

try:
    from . import _fastkern
except ImportError:  # extension not built
    _fastkern = None

_FORCE_PURE = os.environ.get("HGCSP_PURE", "") not in ("", "0")

HAVE_COMPILED = _fastkern is not None and not _FORCE_PURE


def _impl(n):
    if HAVE_COMPILED and n <= 64:
        return _fastkern
    return _purekern


def implementation_name(n=0):
    return _impl(n).IMPLEMENTATION


def reachable(n, adj, seed_mask, allowed_mask=-1):
    return _impl(n).reachable(n, adj, seed_mask, allowed_mask)


def connected_components(n, adj, within_mask=-1):
    return _impl(n).connected_components(n, adj, within_mask)


def is_clique(n, adj, mask):
    return _impl(n).is_clique(adj, mask)


def enumerate_minimal_paths(n, adj, xmask, ymask):
    return _impl(n).enumerate_minimal_paths(n, adj, xmask, ymask)
