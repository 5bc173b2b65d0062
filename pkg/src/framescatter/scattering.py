"""Generalized scattering cascade over a frame collection.

A path ``q = (l1, ..., lm)`` picks one non-output atom per layer.
``U[q] f = |...||f * g_l1| * g_l2| ... * g_lm|`` and the feature attached to
``q`` is ``U[q] f * phi_{m+1}``, where ``phi_{m+1}`` is the output-generating
atom of layer ``m + 1``.
"""
from __future__ import annotations

import warnings
from collections.abc import Mapping
from typing import Iterator

import numpy as np

from .errors import ConfigurationError, HypothesisError
from .frames import FrameCollection, SemiDiscreteFrame
from .signal import Grid, Signal, apply_filter, feature_norm, translate

__all__ = [
    "FeatureSet",
    "FeatureKeyMismatch",
    "u_step",
    "u_path",
    "extract_features",
    "feature_distance",
    "hm_norm_partial",
    "enumerate_paths",
    "B_TOLERANCE",
]

# Slack on the hypothesis B <= 1 for bounds certified in floating point.
B_TOLERANCE = 1e-9


class FeatureKeyMismatch(UserWarning):
    pass


def _path_order(q: tuple) -> tuple:
    return (len(q), q)


class FeatureSet(Mapping):
    """Features keyed by path, iterated in (length, entries) order."""

    def __init__(self, grid: Grid, entries: Mapping):
        self.grid = grid
        items = sorted(((tuple(q), s) for q, s in entries.items()), key=lambda kv: _path_order(kv[0]))
        for _, s in items:
            if s.grid != grid:
                raise ConfigurationError("feature on a foreign grid")
        self._entries = dict(items)

    def __getitem__(self, q):
        return self._entries[tuple(q)]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def norm(self) -> float:
        return feature_norm(self._entries)

    def translated(self, t) -> "FeatureSet":
        return FeatureSet(self.grid, {q: translate(s, t) for q, s in self._entries.items()})

    def energy_by_depth(self) -> dict[int, float]:
        """Sum of squared feature norms per path length."""
        out: dict[int, float] = {}
        for q, s in self._entries.items():
            out[len(q)] = out.get(len(q), 0.0) + s.norm ** 2
        return out

    def __repr__(self):
        return f"FeatureSet({len(self)} paths, grid={self.grid})"


def u_step(frame: SemiDiscreteFrame, index: int, f: Signal) -> Signal:
    """``|f * g_index|`` for a non-output atom of ``frame``."""
    if index == frame.output_index:
        raise ValueError(
            f"atom {index} is the output-generating atom of this layer and cannot head a path")
    if not 0 <= index < len(frame.atoms):
        raise ValueError(f"atom index {index} out of range for {len(frame.atoms)} atoms")
    return abs(apply_filter(f, frame.atoms[index].freq_response))


def u_path(collection: FrameCollection, q, f: Signal) -> Signal:
    """Compose :func:`u_step` along ``q``; the empty path returns ``f``."""
    for layer, index in enumerate(q, start=1):
        f = u_step(collection.layer(layer), index, f)
    return f


def _walk(collection: FrameCollection, f: Signal, max_depth: int,
          threshold: float) -> Iterator[tuple[tuple, Signal]]:
    """Depth-first ``(q, U[q] f)`` pairs, children of a pruned node skipped."""
    stack = [((), f)]
    while stack:
        q, u = stack.pop()
        if u.norm < threshold:
            continue
        yield q, u
        if len(q) < max_depth:
            frame = collection.layer(len(q) + 1)
            children = [(q + (i,), u_step(frame, i, u)) for i in frame.path_indices]
            stack.extend(reversed(children))


def enumerate_paths(collection: FrameCollection, max_depth: int) -> list[tuple]:
    """All paths up to ``max_depth`` in (length, entries) order."""
    paths = [()]
    frontier = [()]
    for depth in range(1, max_depth + 1):
        frame = collection.layer(depth)
        frontier = [q + (i,) for q in frontier for i in frame.path_indices]
        paths.extend(frontier)
    return paths


def _check_hypotheses(collection: FrameCollection, f: Signal) -> None:
    if f.grid != collection.grid:
        raise ConfigurationError(f"signal grid {f.grid} does not match collection grid")
    if collection.B > 1 + B_TOLERANCE:
        raise HypothesisError(
            f"upper frame bound B={collection.B:.6g} exceeds 1; normalize the collection first")


def extract_features(collection: FrameCollection, f: Signal, max_depth: int = 3,
                     prune_rel: float = 0.0) -> FeatureSet:
    """Feature set ``{U[q] f * phi[q]}`` over paths of length <= ``max_depth``.

    Paths with ``||U[q] f|| < prune_rel * ||f||`` are dropped together with
    their subtree.
    """
    _check_hypotheses(collection, f)
    if max_depth < 0:
        raise ConfigurationError(f"max_depth must be >= 0, got {max_depth}")
    if not 0 <= prune_rel < 1:
        raise ConfigurationError(f"prune_rel must lie in [0, 1), got {prune_rel}")
    entries = {}
    for q, u in _walk(collection, f, max_depth, prune_rel * f.norm):
        phi = collection.layer(len(q) + 1).output_atom
        entries[q] = apply_filter(u, phi.freq_response)
    return FeatureSet(f.grid, entries)


def feature_distance(s: FeatureSet, t: FeatureSet) -> float:
    """``|||s - t|||`` over the common paths; warns if the key sets differ."""
    if s.grid != t.grid:
        raise ConfigurationError(f"grid mismatch: {s.grid} vs {t.grid}")
    common = [q for q in s if q in t]
    if len(common) != len(s) or len(common) != len(t):
        warnings.warn(
            f"feature sets differ: {len(s)} vs {len(t)} paths, {len(common)} shared",
            FeatureKeyMismatch, stacklevel=2)
    total = 0.0
    for q in common:
        total += float(np.sum(np.abs(s[q].values - t[q].values) ** 2))
    return float(np.sqrt(total * s.grid.cell_volume))


def hm_norm_partial(collection: FrameCollection, f: Signal, max_depth: int) -> float:
    """Truncated ``sum over paths of ||U[q] f||`` up to ``max_depth`` layers."""
    _check_hypotheses(collection, f)
    return float(sum(u.norm for _, u in _walk(collection, f, max_depth, 0.0)))
