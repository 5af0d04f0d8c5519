# ============================================================================
# EWP-SCS - ARTIFACT WRITERS
# ============================================================================
"""
Every file EWP-SCS writes into an output directory.

    scs.json        full ScsResult (validated against SCS_SCHEMA on read)
    records.csv     one row per stored mask
    metrics.csv     post-selection metrics, one row per confidence level
    inclusion.csv   inclusion importance per asset and level
    cii.csv         co-inclusion matrix
    cii_edges.csv   thresholded co-inclusion edges
    cii.dot         co-inclusion graph
    ii_profile.csv  inclusion importance over an alpha grid
    table.csv       Monte Carlo table, one row per (N, loss, T)
    runs.json       per-run Monte Carlo records
    theory.csv      asymptotic expected SCS size and bounds

JSON never carries bare NaN or infinities: non-finite floats are written
as the strings "inf", "-inf" and "nan".
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from jsonschema import ValidationError, validate

from .errors import InputError, InvariantError
from .metrics import CiiEdge, ScsMetrics, to_dot
from .screening import ScsResult
from .selection import SelectionError, SelectionMask
from .simulate import McEstimates, TheoryResult

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FORMAT = "ewp-scs/1"
FLOAT_FORMAT = "%.17g"


class ArtifactError(InputError):
    """Raised when an artifact is missing or malformed."""
    pass


_REAL = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}

SCS_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": [
        "format", "reference", "reference_loss", "alpha", "q", "loss", "cov_mode",
        "asset_labels", "period_count", "universe_size", "records",
    ],
    "properties": {
        "format": {"const": FORMAT},
        "reference": {"type": "string", "pattern": "^0x[0-9a-f]+/[0-9]+$"},
        "reference_loss": _REAL,
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "screened_alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "q": _REAL,
        "loss": {"type": "string", "minLength": 1},
        "cov_mode": {"enum": ["iid", "gaussian"]},
        "asset_labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "period_count": {"type": "integer", "minimum": 2},
        "universe_size": {"type": "integer", "minimum": 1},
        "records_truncated": {"type": "boolean"},
        "scale": {"enum": ["fraction", "percent"]},
        "z_quantiles": {"type": "object", "additionalProperties": _REAL},
        "records": {
            "type": "object",
            "required": ["mask", "mean", "variance", "loss", "z", "included", "degenerate", "code"],
            "properties": {
                key: {"type": "array"}
                for key in ("mask", "mean", "variance", "loss", "z", "included", "degenerate", "code")
            },
        },
    },
}


# ----------------------------------------------------------------------------
# Float codec
# ----------------------------------------------------------------------------

def encode_float(value: float) -> Union[float, str]:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def decode_float(value: Union[float, int, str]) -> float:
    return float(value)


def _encode_array(values: np.ndarray) -> List[Union[float, str]]:
    return [encode_float(v) for v in values.tolist()]


# ----------------------------------------------------------------------------
# scs.json
# ----------------------------------------------------------------------------

def scs_to_dict(result: ScsResult, scale: Optional[str] = None) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "format": FORMAT,
        "reference": result.reference.to_hex(),
        "reference_loss": encode_float(result.reference_loss),
        "alpha": result.alpha,
        "screened_alpha": result.screened_alpha if result.screened_alpha is not None else result.alpha,
        "q": encode_float(result.q),
        "loss": result.loss_spec,
        "cov_mode": result.cov_mode,
        "asset_labels": list(result.asset_labels),
        "period_count": result.period_count,
        "universe_size": result.universe_size,
        "records_truncated": result.records_truncated,
        "z_quantiles": {k: encode_float(v) for k, v in result.z_quantiles.items()},
        "records": {
            "mask": [int(b) for b in result.masks.tolist()],
            "mean": _encode_array(result.means),
            "variance": _encode_array(result.variances),
            "loss": _encode_array(result.losses),
            "z": _encode_array(result.z),
            "included": [bool(b) for b in result.included.tolist()],
            "degenerate": [bool(b) for b in result.degenerate.tolist()],
            "code": [str(c) for c in result.codes.tolist()],
        },
    }
    if scale is not None:
        data["scale"] = scale
    return data


def scs_from_dict(data: Dict[str, Any]) -> ScsResult:
    """
    Rebuild an ScsResult and re-check its invariants.

    Raises:
        ArtifactError: If the document fails the schema or is inconsistent
    """
    try:
        validate(instance=data, schema=SCS_SCHEMA)
    except ValidationError as e:
        raise ArtifactError(f"Invalid scs.json: {e.message}") from None

    records = data["records"]
    lengths = {key: len(values) for key, values in records.items()}
    if len(set(lengths.values())) != 1:
        raise ArtifactError(f"scs.json record columns differ in length: {lengths}")

    n = len(data["asset_labels"])
    try:
        reference = SelectionMask.from_hex(data["reference"])
    except SelectionError as e:
        raise ArtifactError(str(e)) from None
    if reference.n_assets != n:
        raise ArtifactError(f"Reference over N={reference.n_assets}, labels give N={n}")

    result = ScsResult(
        reference=reference,
        reference_loss=decode_float(data["reference_loss"]),
        alpha=float(data["alpha"]),
        q=decode_float(data["q"]),
        loss_spec=data["loss"],
        cov_mode=data["cov_mode"],
        asset_labels=tuple(data["asset_labels"]),
        period_count=int(data["period_count"]),
        universe_size=int(data["universe_size"]),
        masks=np.asarray(records["mask"], dtype=np.int64),
        losses=np.asarray([decode_float(v) for v in records["loss"]], dtype=np.float64),
        z=np.asarray([decode_float(v) for v in records["z"]], dtype=np.float64),
        included=np.asarray(records["included"], dtype=bool),
        degenerate=np.asarray(records["degenerate"], dtype=bool),
        codes=np.asarray(records["code"], dtype="<U14"),
        records_truncated=bool(data.get("records_truncated", False)),
        screened_alpha=float(data.get("screened_alpha", data["alpha"])),
        z_quantiles={k: decode_float(v) for k, v in data.get("z_quantiles", {}).items()},
        means=np.asarray([decode_float(v) for v in records["mean"]], dtype=np.float64),
        variances=np.asarray([decode_float(v) for v in records["variance"]], dtype=np.float64),
    )
    try:
        result.check_invariants()
    except InvariantError as e:
        raise ArtifactError(f"Inconsistent scs.json: {e}") from None
    return result


def write_scs_json(result: ScsResult, out_dir: PathLike, scale: Optional[str] = None) -> Path:
    path = _prepare(out_dir) / "scs.json"
    path.write_text(json.dumps(scs_to_dict(result, scale), allow_nan=False) + "\n", encoding="utf-8")
    return path


def load_scs(path: PathLike) -> ScsResult:
    """
    Raises:
        ArtifactError: If the file is missing, not JSON or invalid
    """
    path = Path(path)
    if path.is_dir():
        path = path / "scs.json"
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ArtifactError(f"No such file: {path}") from None
    except json.JSONDecodeError as e:
        raise ArtifactError(f"{path} is not valid JSON: {e}") from None
    return scs_from_dict(data)


# ----------------------------------------------------------------------------
# CSV tables
# ----------------------------------------------------------------------------

def records_frame(result: ScsResult) -> pd.DataFrame:
    """One row per stored mask; mean and sd place it on the mean/sd plane."""
    labels = result.asset_labels
    masks = [SelectionMask(int(b), result.n_assets) for b in result.masks.tolist()]
    return pd.DataFrame({
        "mask": [m.to_hex() for m in masks],
        "labels": [";".join(m.labels(labels)) for m in masks],
        "weight": [m.weight for m in masks],
        "mean": result.means,
        "sd": np.sqrt(result.variances),
        "loss": result.losses,
        "z": result.z,
        "included": result.included.astype(int),
        "degenerate": result.degenerate.astype(int),
        "code": result.codes,
    })


def write_records_csv(result: ScsResult, out_dir: PathLike) -> Path:
    path = _prepare(out_dir) / "records.csv"
    records_frame(result).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def metrics_frame(metrics: Sequence[ScsMetrics]) -> pd.DataFrame:
    """Post-selection metrics, one row per level; *_pct columns are x100."""
    rows = []
    for m in metrics:
        rows.append({
            "confidence": round(1.0 - m.alpha, 10),
            "alpha": m.alpha,
            "scs_size": m.scs_size,
            "lb_size": len(m.lower_boundary),
            "universe_size": m.universe_size,
            "relative_size": m.relative_size,
            "rmi_pct": 100.0 * m.rmi,
            "loss_min_pct": 100.0 * m.loss_min,
            "loss_max_pct": 100.0 * m.loss_max,
            "spread_pct": 100.0 * m.spread,
            "loss_min": m.loss_min,
            "loss_max": m.loss_max,
            "spread": m.spread,
        })
    return pd.DataFrame(rows)


def write_metrics_csv(metrics: Sequence[ScsMetrics], out_dir: PathLike) -> Path:
    path = _prepare(out_dir) / "metrics.csv"
    metrics_frame(metrics).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_inclusion_csv(metrics: Sequence[ScsMetrics], labels: Sequence[str], out_dir: PathLike) -> Path:
    frame = pd.DataFrame({"asset": list(labels)})
    for m in metrics:
        frame[f"ii_{m.alpha:g}"] = m.inclusion
    path = _prepare(out_dir) / "inclusion.csv"
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_cii_csv(matrix: np.ndarray, labels: Sequence[str], out_dir: PathLike) -> Path:
    frame = pd.DataFrame(matrix, index=pd.Index(list(labels), name="asset"), columns=list(labels))
    path = _prepare(out_dir) / "cii.csv"
    frame.to_csv(path, float_format=FLOAT_FORMAT)
    return path


def write_cii_edges(edges: Sequence[CiiEdge], labels: Sequence[str], out_dir: PathLike) -> List[Path]:
    """cii_edges.csv and cii.dot."""
    out = _prepare(out_dir)
    frame = pd.DataFrame(
        [(labels[e.i], labels[e.j], e.weight) for e in edges],
        columns=["source", "target", "cii"],
    )
    frame.to_csv(out / "cii_edges.csv", index=False, float_format=FLOAT_FORMAT)
    (out / "cii.dot").write_text(to_dot(edges, labels), encoding="utf-8")
    return [out / "cii_edges.csv", out / "cii.dot"]


def write_ii_profile_csv(profile: pd.DataFrame, out_dir: PathLike) -> Path:
    path = _prepare(out_dir) / "ii_profile.csv"
    profile.to_csv(path, float_format=FLOAT_FORMAT)
    return path


def mc_table(estimates: McEstimates) -> pd.DataFrame:
    """
    One row per (N, loss, T); per confidence level the columns kappa, p (%)
    and kappa_lower, each followed by its standard error.
    """
    rows: Dict[tuple, Dict[str, Any]] = {}
    for c in estimates.cells:
        row = rows.setdefault((c.n, c.loss, c.T), {"n": c.n, "loss": c.loss, "T": c.T})
        level = f"{100.0 * (1.0 - c.alpha):g}"
        row[f"kappa_{level}"] = c.kappa
        row[f"kappa_{level}_se"] = c.kappa_se
        row[f"p_{level}"] = 100.0 * c.coverage
        row[f"p_{level}_se"] = 100.0 * c.coverage_se
        row[f"kappa_lower_{level}"] = c.kappa_lower
        row[f"kappa_lower_{level}_se"] = c.kappa_lower_se
        row[f"excluded_{level}"] = c.excluded
    return pd.DataFrame(list(rows.values()))


def write_mc_outputs(estimates: McEstimates, out_dir: PathLike) -> List[Path]:
    """table.csv and runs.json."""
    out = _prepare(out_dir)
    mc_table(estimates).to_csv(out / "table.csv", index=False, float_format="%.6f")
    runs = [
        {k: encode_float(v) if isinstance(v, float) else v for k, v in record.items()}
        for record in estimates.records_as_dicts()
    ]
    (out / "runs.json").write_text(json.dumps(runs, indent=1, allow_nan=False) + "\n", encoding="utf-8")
    return [out / "table.csv", out / "runs.json"]


def write_theory_csv(rows: Sequence[Dict[str, Any]], out_dir: PathLike) -> Path:
    path = _prepare(out_dir) / "theory.csv"
    pd.DataFrame(list(rows)).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def theory_row(result: TheoryResult, **context: Any) -> Dict[str, Any]:
    return {
        **context,
        "expected": result.expected,
        "lower_bound": result.lower_bound,
        "upper_bound": result.upper_bound,
        "gamma_min": result.gamma_min,
        "optimal_count": result.optimal_count,
    }


def _prepare(out_dir: PathLike) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path
