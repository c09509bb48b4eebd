"""Candidate-center sampler for constrained 2-means, with exact small-instance oracles."""

import json as _json

from ._core import (
    InfeasibleError,
    InputError,
    ValidationError,
    assign,
    brute_opt2,
    centroid,
    f2,
    kth_largest_distance,
    max_bisection,
    reduce_to_points,
    vibrate,
)
from . import _core

__all__ = [
    "InfeasibleError",
    "InputError",
    "ValidationError",
    "assign",
    "brute_opt2",
    "centroid",
    "check_case_lemmas",
    "f2",
    "kth_largest_distance",
    "max_bisection",
    "reduce_to_points",
    "resolve",
    "run_2means",
    "verify_identity",
    "vibrate",
]


def resolve(epsilon, overrides=None, require_faithful=False):
    """All sampler constants for `epsilon` as a dict (plus the failure budget)."""
    return _json.loads(_core._resolve(float(epsilon), dict(overrides or {}), bool(require_faithful)))


def run_2means(points, epsilon, overrides=None, seed=0, cap=None):
    """Run the sampler; returns (report dict, c1 array, c2 array, phases, iterations)."""
    report, c1, c2, phase, iteration = _core._run_2means(points, float(epsilon), dict(overrides or {}), int(seed), cap)
    return _json.loads(report), c1, c2, phase, iteration


def verify_identity(n, edges):
    return _json.loads(_core._verify_identity(n, list(edges)))


def check_case_lemmas(points, labels, c1, c2, epsilon):
    return _json.loads(_core._check_case_lemmas(points, list(labels), c1, c2, float(epsilon)))
