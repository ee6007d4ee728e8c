"""Embedding workbench: skipgram, additive bilingual and neural translation
models plus an evaluation battery for any embedding space."""

__version__ = "0.1.0"
