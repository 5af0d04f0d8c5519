# ============================================================================
# EWP-SCS - LOSS REGISTRY
# ============================================================================
"""
Central registry for loss functions.

Losses register themselves using the @register decorator. Spec strings
name a registered loss and its keyword parameters:

    "mv:gamma=0.5"   "mv:gamma=1,scale=0.5"   "sharpe"   "es:level=0.1"
"""

from typing import Callable, Dict, List, Type

from .base import LossError, LossSpec

_REGISTRY: Dict[str, Type[LossSpec]] = {}


def register(name: str) -> Callable[[Type[LossSpec]], Type[LossSpec]]:
    """
    Decorator to register a loss class under a spec-string name.

    Example:
        @register("sharpe")
        class Sharpe(LossSpec):
            ...
    """
    def decorator(cls: Type[LossSpec]) -> Type[LossSpec]:
        cls.name = name
        _REGISTRY[name] = cls
        return cls
    return decorator


def is_registered(name: str) -> bool:
    """True if a loss class is registered under `name`."""
    return name in _REGISTRY


def get_loss(name: str, **params: float) -> LossSpec:
    """
    Instantiate a registered loss.

    Raises:
        LossError: If the name is unknown or the parameters are invalid
    """
    if not is_registered(name):
        available = ", ".join(sorted(_REGISTRY)) or "none"
        raise LossError(f"Unknown loss: {name}. Available: {available}")
    try:
        return _REGISTRY[name](**params)
    except TypeError as e:
        raise LossError(f"Bad parameters for loss {name}: {e}") from e


def parse_loss_spec(text: str) -> LossSpec:
    """
    Parse a spec string such as 'mv:gamma=1,scale=0.5'.

    Raises:
        LossError: On malformed strings, unknown names or bad values
    """
    text = text.strip()
    name, _, arg_text = text.partition(":")
    params: Dict[str, float] = {}
    if arg_text.strip():
        for item in arg_text.split(","):
            key, sep, raw = item.partition("=")
            if not sep or not key.strip():
                raise LossError(f"Malformed loss parameter {item!r} in {text!r}")
            try:
                params[key.strip()] = float(raw)
            except ValueError:
                raise LossError(f"Non-numeric value {raw!r} for {key.strip()} in {text!r}") from None
    return get_loss(name.strip().lower(), **params)


def list_losses() -> List[str]:
    """Return list of all registered loss names."""
    return sorted(_REGISTRY)
