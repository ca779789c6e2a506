"""Tests for the design file helpers"""

from dataclasses import dataclass
from typing import Tuple

import pytest

from elbowsig.utils.design_utils import build_design, load_design, read_flat_toml
from elbowsig.utils.error_utils import ConfigError


@dataclass(frozen=True)
class ToyDesign:
    name: str = "toy"
    replicates: int = 10
    methods: Tuple[str, ...] = ("kmeans",)


def test_read_flat_toml(tmp_path):
    path = tmp_path / "design.toml"
    path.write_text('name = "demo"\nreplicates = 5\nmethods = ["kmeans", "fcm"]\n')
    assert read_flat_toml(path) == {"name": "demo", "replicates": 5, "methods": ["kmeans", "fcm"]}


def test_read_flat_toml_rejects_tables(tmp_path):
    path = tmp_path / "design.toml"
    path.write_text("[section]\nvalue = 1\n")
    with pytest.raises(ConfigError, match="must be flat"):
        read_flat_toml(path)


def test_read_flat_toml_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        read_flat_toml(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("name = \n")
    with pytest.raises(ConfigError, match="not valid TOML"):
        read_flat_toml(bad)


def test_build_design_lists_become_tuples():
    design = build_design(ToyDesign, {"methods": ["kmeans", "gmm"]})
    assert design.methods == ("kmeans", "gmm")
    assert design.replicates == 10


def test_build_design_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown keys"):
        build_design(ToyDesign, {"replicats": 3})


def test_load_design_overrides(tmp_path):
    path = tmp_path / "design.toml"
    path.write_text('name = "demo"\nreplicates = 5\n')
    design = load_design(ToyDesign, path, replicates=2, name=None)
    assert design.name == "demo"
    assert design.replicates == 2


if __name__ == "__main__":
    test_build_design_lists_become_tuples()
    test_build_design_rejects_unknown_keys()
    print("All design_utils tests passed!")
