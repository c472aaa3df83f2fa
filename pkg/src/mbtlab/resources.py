"""Locations of the shipped demo artifacts."""

from __future__ import annotations

import glob
import os

from .dsl.parser import parse_model

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def data_path(*parts):
    return os.path.join(DATA, *parts)


def read_model(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), path)


def load_demo_model():
    return read_model(data_path("netmaster.afm"))


def load_demo_sut():
    return read_model(data_path("netmaster_sut.afm"))


def demo_spec_files():
    return sorted(glob.glob(data_path("specs", "*.spec.json")))


def load_demo_specs():
    from .dsl.suites import load_specs

    return [s for f in demo_spec_files() for s in load_specs(f)]
