"""Uniform handle on the two kernel backends."""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

from . import scalar, simd


@dataclass(frozen=True)
class Backend:
    kind: str
    apply: Callable
    batch_apply: Callable
    kernels: Mapping[str, Callable] = field(repr=False)


_BACKENDS = {
    "scalar": Backend("scalar", scalar.apply, scalar.batch_apply, MappingProxyType(scalar.KERNELS)),
    "vector": Backend("vector", simd.apply, simd.batch_apply, MappingProxyType(simd.KERNELS)),
}

BACKEND_NAMES = tuple(_BACKENDS)


def get_backend(kind: str) -> Backend:
    try:
        return _BACKENDS[kind]
    except KeyError:
        raise ValueError(f"unknown backend {kind!r}; expected one of {BACKEND_NAMES}") from None
