"""
Converter for the matrix-file distribution of Ciao and Epinions.

`rating.mat` holds one row per rating: userid, productid, categoryid, rating,
helpfulness (Epinions adds a timestamp). `trustnetwork.mat` holds one row per
trust statement: userid, friendid.
"""
from pathlib import Path
from typing import List, Tuple

import numpy as np
import pandas as pd
from scipy.io import loadmat

from dscf.exceptions import ParseError
from dscf.utils.logger import log

MODULE_NAME = "convert"

RATING_COLUMNS = (0, 1, 3)
TRUST_COLUMNS = (0, 1)


def _matrix(path) -> np.ndarray:
    contents = loadmat(str(path))
    names = [key for key in contents if not key.startswith("__")]
    if not names:
        raise ParseError(path, 0, "no matrix variable in file")
    return np.asarray(contents[names[0]])


def read_mat_columns(path, n_fields: int) -> List[np.ndarray]:
    """
    Read the rating (3 fields) or trust (2 fields) columns of a `.mat` file as raw-id strings.
    """
    matrix = _matrix(path)
    columns: Tuple[int, ...] = RATING_COLUMNS if n_fields == 3 else TRUST_COLUMNS
    if matrix.ndim != 2 or matrix.shape[1] <= max(columns):
        raise ParseError(path, 1, f"expected at least {max(columns) + 1} columns, got shape {matrix.shape}")
    return [matrix[:, c].astype(np.int64).astype(str) for c in columns]


def convert_mat_to_tsv(ratings_mat, trust_mat, out_dir) -> Tuple[Path, Path]:
    """
    Write the canonical `ratings.tsv` and `trust.tsv` from the `.mat` pair.

    Returns:
        Tuple[Path, Path]: Paths of the written rating and trust files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    user, item, rating = read_mat_columns(ratings_mat, 3)
    source, target = read_mat_columns(trust_mat, 2)

    ratings_path = out_dir / "ratings.tsv"
    trust_path = out_dir / "trust.tsv"
    pd.DataFrame({"user": user, "item": item, "rating": rating}).to_csv(
        ratings_path, sep="\t", header=False, index=False)
    pd.DataFrame({"user": source, "friend": target}).to_csv(
        trust_path, sep="\t", header=False, index=False)
    log(MODULE_NAME, f"Converted {len(user)} ratings and {len(source)} trust rows into {out_dir}")
    return ratings_path, trust_path
