"""Transform backend selection: compiled extension if built, numpy otherwise.

``VILENKIN_BACKEND=python`` forces the fallback; ``set_backend`` switches at
runtime (the benchmark uses both).
"""

import os

from . import _dft_py

try:
    from . import _fastdft
except ImportError:
    _fastdft = None

_active = _dft_py if os.environ.get("VILENKIN_BACKEND") == "python" or _fastdft is None else _fastdft


def available_backends() -> list[str]:
    names = ["python"]
    if _fastdft is not None:
        names.insert(0, "compiled")
    return names


def backend_name() -> str:
    return "compiled" if _active is _fastdft else "python"


def set_backend(name: str) -> None:
    global _active
    if name == "python":
        _active = _dft_py
    elif name == "compiled":
        if _fastdft is None:
            raise RuntimeError("compiled backend not built")
        _active = _fastdft
    elif name == "auto":
        _active = _fastdft if _fastdft is not None else _dft_py
    else:
        raise ValueError(f"unknown backend {name!r}")


def get_module(name: str | None = None):
    if name is None:
        return _active
    if name == "python":
        return _dft_py
    if name == "compiled":
        if _fastdft is None:
            raise RuntimeError("compiled backend not built")
        return _fastdft
    raise ValueError(f"unknown backend {name!r}")
