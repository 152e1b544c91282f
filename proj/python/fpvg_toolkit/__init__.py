"""Python bindings for the FPVG grounding-metric toolkit."""

from ._core import (
    BoundingBox,
    IoError,
    RelevanceAssignment,
    RelevanceConfig,
    ValidationError,
    assign_relevance,
    build_condition_manifests,
    build_loo_manifests,
    comprehensiveness,
    coverage_fraction,
    degradation,
    evaluate,
    fpvg_question,
    iou,
    manifest,
    mod_fpvg_question,
    normalize_answer,
    prepare,
    ranking_match,
    sufficiency,
    synth,
)

__all__ = [
    "BoundingBox",
    "IoError",
    "RelevanceAssignment",
    "RelevanceConfig",
    "ValidationError",
    "assign_relevance",
    "build_condition_manifests",
    "build_loo_manifests",
    "comprehensiveness",
    "coverage_fraction",
    "degradation",
    "evaluate",
    "fpvg_question",
    "iou",
    "manifest",
    "mod_fpvg_question",
    "normalize_answer",
    "prepare",
    "ranking_match",
    "sufficiency",
    "synth",
]
