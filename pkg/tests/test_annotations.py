"""
Tests that the public API carries type annotations.
"""
import importlib
import inspect

import pytest

MODULES = [
    "aggregate",
    "attack",
    "channel",
    "cli",
    "config",
    "da",
    "errors",
    "experiment",
    "file_watcher",
    "fl",
    "inflector",
    "model",
    "registry",
    "robust",
    "runner",
    "seeding",
    "tbma",
    "waveform",
]


def _public_functions(module):
    for name, obj in vars(module).items():
        if name.startswith("_") or getattr(obj, "__module__", None) != module.__name__:
            continue
        if inspect.isclass(obj):
            for attr, member in vars(obj).items():
                if attr.startswith("_"):
                    continue
                if isinstance(member, (classmethod, staticmethod)):
                    member = member.__func__
                elif isinstance(member, property):
                    member = member.fget
                if inspect.isfunction(member):
                    yield f"{name}.{attr}", member
        elif callable(obj) and inspect.isfunction(inspect.unwrap(obj)):
            yield name, inspect.unwrap(obj)


def _missing(fn):
    sig = inspect.signature(fn)
    missing = [
        param.name
        for param in sig.parameters.values()
        if param.name not in ("self", "cls")
        and param.kind not in (param.VAR_POSITIONAL, param.VAR_KEYWORD)
        and param.annotation is inspect.Parameter.empty
    ]
    if sig.return_annotation is inspect.Signature.empty:
        missing.append("return")
    return missing


class TestPublicAnnotations:
    """Test suite for the annotation convention of the public API."""

    @pytest.mark.parametrize("module_name", MODULES)
    def test_public_functions_annotated(self, module_name):
        """Test that every public function and method annotates its parameters and return."""
        module = importlib.import_module(f"pyaircomp.{module_name}")
        bare = {}
        for name, fn in _public_functions(module):
            missing = _missing(fn)
            if missing:
                bare[name] = missing
        assert bare == {}

    def test_registry_methods_found(self):
        """Test that the walk reaches methods, properties and cached functions."""
        registry = dict(_public_functions(importlib.import_module("pyaircomp.registry")))
        assert "EstimatorRegistry.get_all_methods" in registry
        waveform = dict(_public_functions(importlib.import_module("pyaircomp.waveform")))
        assert "template_bank" in waveform
        channel = dict(_public_functions(importlib.import_module("pyaircomp.channel")))
        assert "ChannelGains.K" in channel
