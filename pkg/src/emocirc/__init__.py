"""Emotion circumplexes from labelled text via latent semantic clustering."""

from .circumplex import TABLE2, CentroidReport, CircumplexPoint, EmotionCategories
from .corpus import EMOTIONS, Document, InsufficientDocuments, RegionSpec, Subcorpus
from .delsar import ClusteringMatrix, run_delsar
from .semspace import SemanticSpace, build_space

__version__ = "0.1.0"

__all__ = [
    "EMOTIONS",
    "TABLE2",
    "CentroidReport",
    "CircumplexPoint",
    "ClusteringMatrix",
    "Document",
    "EmotionCategories",
    "InsufficientDocuments",
    "RegionSpec",
    "SemanticSpace",
    "Subcorpus",
    "build_space",
    "run_delsar",
]
