"""Built-in instances and the name registry used by the CLI."""

from __future__ import annotations

from typing import Callable

from ..instance_api import Instance
from .crypto import CryptoInstance
from .names import ConstraintInstance, FusionInstance, PiInstance, PoolInstance
from .structured import PolyadicInstance, PolySyncInstance


def pi_instance() -> Instance:
    return PiInstance()


def polyadic_pi_instance() -> Instance:
    return PolyadicInstance()


def poly_sync_instance() -> Instance:
    return PolySyncInstance()


def fusion_instance() -> Instance:
    return FusionInstance()


def constraint_instance() -> Instance:
    return ConstraintInstance()


def crypto_instance() -> Instance:
    return CryptoInstance()


def channel_pool_instance() -> Instance:
    return PoolInstance()


REGISTRY: dict[str, Callable[[], Instance]] = {
    "pi": pi_instance,
    "polyadic": polyadic_pi_instance,
    "polysync": poly_sync_instance,
    "fusion": fusion_instance,
    "constraint": constraint_instance,
    "crypto": crypto_instance,
    "pool": channel_pool_instance,
}


def get_instance(name: str) -> Instance:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown instance {name!r}; choose from {', '.join(sorted(REGISTRY))}") from None


__all__ = [
    "REGISTRY",
    "get_instance",
    "pi_instance",
    "polyadic_pi_instance",
    "poly_sync_instance",
    "fusion_instance",
    "constraint_instance",
    "crypto_instance",
    "channel_pool_instance",
]
