"""CSV and JSON input/output for the command line."""

import json
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from .. import __version__
from ..core.errors import SchemaError
from ..models import Dataset, FrontierModel, RunConfig

logger = logging.getLogger(__name__)


def check_input_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    return path


def check_output_path(path: Union[str, Path, None]) -> Optional[Path]:
    if path is None:
        return None
    path = Path(path)
    if not path.parent.exists() or not path.parent.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {path.parent}")
    return path


def _rows(mask: np.ndarray, limit: int = 5) -> str:
    # 1-based data rows, header excluded
    rows = (np.flatnonzero(mask) + 1).tolist()
    shown = ", ".join(str(r) for r in rows[:limit])
    return shown + (f" (+{len(rows) - limit} more)" if len(rows) > limit else "")


def read_table(path: Union[str, Path], columns: Sequence[str]) -> pd.DataFrame:
    """
    Read the named numeric columns of a headed CSV.

    Raises:
        SchemaError: missing column, non-numeric or empty cells (with row numbers)
    """
    try:
        frame = pd.read_csv(path, comment="#", skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise SchemaError(f"{path}: not a readable CSV with a header row ({exc})") from exc
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: column(s) {', '.join(repr(c) for c in missing)} not found; have {list(frame.columns)}")
    out = {}
    for name in columns:
        values = pd.to_numeric(frame[name], errors="coerce")
        bad = ~np.isfinite(values.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            raise SchemaError(f"{path}: column {name!r} has missing or non-numeric cells in row(s) {_rows(bad)}")
        out[name] = values.astype(float)
    return pd.DataFrame(out)


def read_dataset(path: Union[str, Path], output_col: str, input_cols: Sequence[str]) -> Dataset:
    """Production units from a CSV; Y must be strictly positive."""
    if not 1 <= len(input_cols) <= 2:
        raise SchemaError(f"need one or two input columns, got {len(input_cols)}")
    frame = read_table(path, [output_col, *input_cols])
    Y = frame[output_col].to_numpy()
    if np.any(Y <= 0):
        raise SchemaError(f"{path}: output column {output_col!r} must be > 0; offending row(s) {_rows(Y <= 0)}")
    if Y.shape[0] < 10:
        raise SchemaError(f"{path}: need at least 10 rows, got {Y.shape[0]}")
    return Dataset(
        Y=Y,
        X=frame[list(input_cols)].to_numpy(),
        input_names=list(input_cols),
        output_name=output_col,
    )


def read_unit_sample(path: Union[str, Path], column: Optional[str] = None) -> np.ndarray:
    """A sample of M(p) variates from one CSV column (the first if unnamed)."""
    if column is None:
        try:
            header = pd.read_csv(path, comment="#", nrows=0)
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
            raise SchemaError(f"{path}: not a readable CSV with a header row ({exc})") from exc
        if header.columns.empty:
            raise SchemaError(f"{path}: no columns")
        column = str(header.columns[0])
    x = read_table(path, [column])[column].to_numpy()
    outside = (x <= 0) | (x >= 1)
    if outside.any():
        raise SchemaError(f"{path}: values of {column!r} must lie in (0, 1); offending row(s) {_rows(outside)}")
    return x


def write_frame(frame: pd.DataFrame, path: Path, run_config: Optional[RunConfig] = None) -> Path:
    with path.open("w", encoding="utf-8", newline="") as fh:
        if run_config is not None:
            fh.write("\n".join(run_config.header_lines()) + "\n")
        frame.to_csv(fh, index=False, float_format="%.17g", lineterminator="\n")
    return path


def scores_frame(model: FrontierModel, scores: np.ndarray) -> pd.DataFrame:
    """unit, Y, inputs, g_hat, f_hat, efficiency."""
    names = model.input_names or [f"x{j + 1}" for j in range(model.m)]
    frame = pd.DataFrame({"unit": np.arange(1, model.Y.shape[0] + 1), "Y": model.Y})
    for j, name in enumerate(names):
        frame[name] = model.X[:, j]
    frame["g_hat"] = model.fitted
    frame["f_hat"] = model.frontier_at_observations()
    frame["efficiency"] = scores
    return frame


def components_frame(model: FrontierModel) -> pd.DataFrame:
    """g-hat_j on each component grid, side by side."""
    data = {}
    for j, (grid, values) in enumerate(zip(model.grids, model.grid_values), start=1):
        data[f"x{j}"] = grid
        data[f"g{j}"] = values
    return pd.DataFrame(data)


def write_model(model: FrontierModel, path: Path, run_config: RunConfig) -> Path:
    doc = model.to_document(run_config=run_config.model_dump(), version=__version__)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path
