"""Combinatorial orbit-space windows and the sections, bases and boundary map built on them."""

from .model import OrbitModel, load_fixture, load_model, parse_model, serialize_model, validate_model

__all__ = ["OrbitModel", "load_fixture", "load_model", "parse_model", "serialize_model", "validate_model"]
__version__ = "0.1.0"
