"""Hot Fock-space kernels with a compiled core and a NumPy fallback.

The compiled ``_ccore`` extension is used when it imports; otherwise, or when
the environment variable ``ETHF_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the NumPy implementations in ``_pycore`` are bound instead.

Kernels
-------
apply_creation(state, coeffs, nsites, jw_sign)
    Apply ``sum_i coeffs[i] c_i^+`` to a full ``2**nsites`` Fock vector.
reorder_signs(nsites, sub_mask, jw_sign)
    Fermionic sign of every basis state after moving a subsystem to the front.
sector_hopping(masks, i, j, jw_sign)
    Sparse triplets of ``c_i^+ c_j`` restricted to a fixed-particle sector.
sector_correlation(masks, psi, nsites, jw_sign)
    Full two-point matrix ``<psi| c_i^+ c_j |psi>`` of a sector vector.
"""
import os

from . import _pycore

try:
    from . import _ccore
except ImportError:  # extension not built
    _ccore = None

_BACKENDS = {"python": _pycore}
if _ccore is not None:
    _BACKENDS["cython"] = _ccore

if os.environ.get("ETHF_PURE_PYTHON", "0") not in ("", "0") or _ccore is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = BACKEND if name is None else name
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; have {available_backends()}") from None


_active = get_backend()
apply_creation = _active.apply_creation
reorder_signs = _active.reorder_signs
sector_hopping = _active.sector_hopping
sector_correlation = _active.sector_correlation

__all__ = [
    "BACKEND",
    "apply_creation",
    "available_backends",
    "get_backend",
    "reorder_signs",
    "sector_correlation",
    "sector_hopping",
]
