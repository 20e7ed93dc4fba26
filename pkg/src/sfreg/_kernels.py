"""Select the integration backend: compiled core when importable, else pure Python.

Set SFREG_PURE_PYTHON=1 to force the fallback.
"""
import os

if os.environ.get("SFREG_PURE_PYTHON") == "1":
    from ._core_py import eval_program, integrate
    BACKEND = "python"
else:
    try:
        from ._core import eval_program, integrate
        BACKEND = "cython"
    except ImportError:
        from ._core_py import eval_program, integrate
        BACKEND = "python"

__all__ = ["BACKEND", "eval_program", "integrate"]
