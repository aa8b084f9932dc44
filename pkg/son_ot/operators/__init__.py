"""Operator 实现：可插拔的传输方法"""
from .methods import SonMethod, SinkhornMethod, ExactMethod, MethodRegistry, default_registry

__all__ = [
    "SonMethod",
    "SinkhornMethod",
    "ExactMethod",
    "MethodRegistry",
    "default_registry",
]
