"""Kernel selection: the compiled extension when it imports, else pure Python.

Set ``KISIN_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("KISIN_PURE_PYTHON") != "1":
    try:
        from ._ccore import poly_addshift, poly_mul, poly_mul_trunc, series_inv

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._pycore import poly_addshift, poly_mul, poly_mul_trunc, series_inv

__all__ = ["BACKEND", "poly_addshift", "poly_mul", "poly_mul_trunc", "series_inv"]
