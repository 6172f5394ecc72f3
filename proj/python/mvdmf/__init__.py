"""Multi-view clustering by deep semi-NMF with a learned consensus graph."""

import json

from ._core import (
    DimensionMismatch,
    InfeasibleGeometry,
    InvalidArgument,
    IoError,
    LabelRangeError,
    LengthMismatch,
    MissingFile,
    MissingManifest,
    MvdmfError,
    NonFiniteEntry,
    ParseError,
    SchemaVersionMismatch,
    SolverStall,
    accuracy,
    cluster_graph,
    fit,
    fit_seminmf,
    generate_hierarchical,
    generate_synthetic,
    hungarian,
    kmeans,
    load_dataset,
    nmi,
    normalize_views,
    parse_beta,
    project_row_to_simplex,
    purity,
    save_dataset,
    solve_weight_qp,
    spectral_embed,
    update_consensus_graph,
)
from . import _core


def cluster(views, layers, labels=None, **options):
    """Full pipeline; returns the clustering report as a dict.

    Options mirror the CLI: beta, max_outer_iters, pretrain_iters, tol,
    patience, restarts, seed, k, normalization, nmi, kmeans_restarts, jobs.
    """
    return json.loads(_core.cluster_json(views, labels=labels, layers=list(layers), **options))


def save_report(report, path):
    _core.save_report_json(json.dumps(report), str(path))


def load_report(path):
    return json.loads(_core.load_report_json(str(path)))
