"""tsembed: time-series embeddings and a classification benchmark harness.

The package turns labeled multivariate time series into fixed-length vectors
by seven methods (DFT magnitudes, Morlet wavelet energies, PCA, locally
linear embedding, visibility-graph features, sublevel-set persistence
features, and a window autoencoder), classifies the vectors with six seeded
classifiers, and aggregates accuracies into per-method average ranks.
"""

from .errors import (CapacityError, ConfigError, ContractError, DataError,
                     NumericError, ParseError, SchemaError, ShapeError,
                     TsembedError)

__all__ = [
    "CapacityError", "ConfigError", "ContractError", "DataError",
    "NumericError", "ParseError", "SchemaError", "ShapeError", "TsembedError",
]

__version__ = "0.1.0"
