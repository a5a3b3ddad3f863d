"""Cardinality estimation over relational join schemas.

Thin dict-friendly layer over the compiled `_core` module: queries move
across the boundary as JSON strings, so the wrappers here serialize and
deserialize for you.
"""

import json as _json

from cardest._core import (  # noqa: F401
    CardestError,
    Model,
    gen_data_csv,
    load_model,
)
from cardest import _core


def train(schema_path, budget=1, structure="chow-liu", alpha=1.0,
          sample_size=500000, seed=0, max_parents=3):
    """Build an ensemble model from a schema description file."""
    return _core.train(str(schema_path), budget, structure, alpha,
                       sample_size, seed, max_parents)


def estimate(model, query, backend="cve", k=10000, seed=0):
    """Estimate the cardinality of a query given as a dict."""
    return model.estimate(_json.dumps(query), backend, k, seed)


def explain(model, query):
    """Inference-plan listing for a query given as a dict."""
    return model.explain(_json.dumps(query))


def gen_workload(schema_path, label=True, **options):
    """Generate (optionally labeled) queries as a list of dicts."""
    lines = _core.gen_workload(
        str(schema_path),
        options.get("count", 100),
        options.get("min_filters", 1),
        options.get("max_filters", 4),
        options.get("min_tables", 1),
        options.get("max_tables", 1),
        options.get("max_in_values", 5),
        options.get("seed", 0),
        label,
    )
    return [_json.loads(line) for line in lines]


def eval_workload(model, queries, backend="cve", k=10000, seed=0):
    """Run labeled query dicts through the model; returns the report dict."""
    payload = _core.eval_workload(
        model, [_json.dumps(q) for q in queries], backend, k, seed)
    return _json.loads(payload)
