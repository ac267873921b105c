"""Conformal ROC bands for graph classifiers."""

from ._core import (
    ArgumentError,
    CprocError,
    DegenerateTestError,
    Graph,
    NumericalError,
    ParseError,
    PersistenceDiagram,
    ScoreIngestError,
    SplitError,
    StratumError,
    TuDataset,
    band_pipeline,
    bootstrap_bands,
    cap_diagram,
    compute_filtration,
    coverage_experiment,
    empirical_roc,
    parse_tu_dataset,
    persistence_image,
    quantile,
    similarity_matrix,
    split_dataset,
    sublevel_persistence,
    wasserstein_distance,
    write_tu_dataset,
)

__all__ = [name for name in dir() if not name.startswith("_")]
