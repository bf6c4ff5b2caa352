"""
Ingest of rating and trust files.

Canonical format is TSV, `user<TAB>item<TAB>rating` for ratings and
`user<TAB>friend` for trust. Whitespace-separated files (the trustlet Epinions
dumps) and the distributed `.mat` files of Ciao/Epinions are accepted too.
Raw ids are remapped to dense 0-based indices in order of first appearance.
"""
import re
from enum import Enum
from pathlib import Path
from typing import Dict, List

import numpy as np
import pandas as pd
from pydantic import BaseModel

from dscf.config import settings
from dscf.exceptions import ParseError, ValidationError
from dscf.schema.schemas import RatingTriple, TrustEdge, TrustLoadReport
from dscf.utils.logger import log

MODULE_NAME = "dataset"

_LINE_PATTERN = re.compile(r"line (\d+)")


class IngestFormat(str, Enum):
    TSV = "tsv"
    SPACE = "space"
    MAT = "mat"


class IdMap(BaseModel):
    """
    Bijection between raw ids (as strings) and dense indices 0..n-1.
    """
    raw_ids: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    def __len__(self) -> int:
        return len(self.raw_ids)

    def to_index(self) -> Dict[str, int]:
        return {raw: index for index, raw in enumerate(self.raw_ids.tolist())}

    def raw(self, index: int) -> str:
        return str(self.raw_ids[index])


class RatingLog(BaseModel):
    """
    Deduplicated rating triples with dense ids and the id mapping tables.

    `record_rows` maps every input record, in file order, to the retained triple of its
    (user, item) pair; only the last record of a pair is the one kept.
    """
    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray
    user_ids: IdMap
    item_ids: IdMap
    n_levels: int
    record_rows: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    def __len__(self) -> int:
        return len(self.ratings)

    def triples(self) -> List[RatingTriple]:
        """
        The triples as `RatingTriple` models, in file order.
        """
        return [RatingTriple(user=user, item=item, rating=rating)
                for user, item, rating in zip(self.users.tolist(), self.items.tolist(), self.ratings.tolist())]

    @classmethod
    def from_arrays(cls, users, items, ratings, n_levels: int) -> "RatingLog":
        """
        Build a log from integer arrays whose ids already are the raw ids.

        Duplicated (user, item) pairs keep their last rating, as in file ingest.
        """
        frame = pd.DataFrame({
            "user": np.asarray(users).astype(str),
            "item": np.asarray(items).astype(str),
            "rating": np.asarray(ratings, dtype=np.int64),
        })
        return _build_log(frame, n_levels)


class TrustNetwork(BaseModel):
    """
    Trust edges over dense user ids plus the ingest counters.
    """
    sources: np.ndarray
    targets: np.ndarray
    report: TrustLoadReport

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    def __len__(self) -> int:
        return len(self.sources)

    def edges(self) -> List[TrustEdge]:
        return [TrustEdge(source=s, target=t) for s, t in zip(self.sources.tolist(), self.targets.tolist())]


def _read_frame(path, n_fields: int, fmt: IngestFormat) -> pd.DataFrame:
    """
    Read a delimited file as strings, keeping the 1-based line number of each record.
    """
    path = Path(path)
    if fmt == IngestFormat.MAT:
        from dscf.dataset.convert import read_mat_columns
        columns = read_mat_columns(path, n_fields)
        frame = pd.DataFrame({i: col for i, col in enumerate(columns)})
        frame["line"] = np.arange(1, len(frame) + 1)
        return frame

    sep = "\t" if fmt == IngestFormat.TSV else r"\s+"
    try:
        frame = pd.read_csv(path, sep=sep, header=None, dtype=str, skip_blank_lines=False,
                            keep_default_na=False, na_values=[""],
                            engine="c" if fmt == IngestFormat.TSV else "python")
    except pd.errors.EmptyDataError:
        return pd.DataFrame({**{i: pd.Series(dtype=str) for i in range(n_fields)},
                             "line": pd.Series(dtype=np.int64)})
    except pd.errors.ParserError as error:
        found = _LINE_PATTERN.search(str(error))
        line = int(found.group(1)) if found else 0
        raise ParseError(path, line, f"expected {n_fields} fields") from error

    frame["line"] = np.arange(1, len(frame) + 1)
    fields = [c for c in frame.columns if c != "line"]
    frame = frame[frame[fields].notna().any(axis=1)]  # blank lines
    if frame.empty:
        return pd.DataFrame({**{i: pd.Series(dtype=str) for i in range(n_fields)},
                             "line": pd.Series(dtype=np.int64)})

    if len(fields) > n_fields:
        extra = frame[frame[fields[n_fields:]].notna().any(axis=1)]
        raise ParseError(path, int(extra["line"].iloc[0]), f"expected {n_fields} fields")
    short = frame[frame[fields[:n_fields]].isna().any(axis=1)] if len(fields) == n_fields else frame
    if len(fields) < n_fields or len(short):
        line = int(short["line"].iloc[0]) if len(short) else 1
        raise ParseError(path, line, f"expected {n_fields} fields")
    for column in fields:
        frame[column] = frame[column].str.strip()
    return frame


def _build_log(records: pd.DataFrame, n_levels: int) -> RatingLog:
    frame = records.drop_duplicates(subset=["user", "item"], keep="last").reset_index(drop=True)
    rows = records[["user", "item"]].merge(frame[["user", "item"]].reset_index(), on=["user", "item"], how="left")
    user_codes, user_raw = pd.factorize(frame["user"], sort=False)
    item_codes, item_raw = pd.factorize(frame["item"], sort=False)
    return RatingLog(
        users=user_codes.astype(np.int64),
        items=item_codes.astype(np.int64),
        ratings=frame["rating"].to_numpy(dtype=np.int64),
        user_ids=IdMap(raw_ids=np.asarray(user_raw, dtype=str)),
        item_ids=IdMap(raw_ids=np.asarray(item_raw, dtype=str)),
        n_levels=n_levels,
        record_rows=rows["index"].to_numpy(dtype=np.int64),
    )


def load_ratings(path, fmt: IngestFormat = IngestFormat.TSV, n_levels: int = None) -> RatingLog:
    """
    Load a rating file into dense-id triples.

    Args:
        path: Rating file.
        fmt: Ingest format.
        n_levels: Number of rating levels I; ratings must be integers in [1, I].

    Raises:
        ParseError: A record has the wrong number of fields or a non-numeric rating.
        ValidationError: A rating is not an integer in [1, I].

    Returns:
        RatingLog: Triples with duplicates resolved to the last occurrence.
    """
    n_levels = n_levels or settings.n_levels
    fmt = IngestFormat(fmt)
    frame = _read_frame(path, 3, fmt)
    frame = frame.rename(columns={0: "user", 1: "item", 2: "rating"})

    values = pd.to_numeric(frame["rating"], errors="coerce")
    bad = values.isna()
    if bad.any():
        raise ParseError(path, int(frame.loc[bad, "line"].iloc[0]), "rating is not a number")
    invalid = (values != np.round(values)) | (values < 1) | (values > n_levels)
    if invalid.any():
        first = invalid.idxmax()
        raise ValidationError(
            f"{path}:{int(frame.loc[first, 'line'])}: rating {frame.loc[first, 'rating']} "
            f"is not an integer level in [1, {n_levels}]")
    frame["rating"] = values.astype(np.int64)

    n_records = len(frame)
    ratings = _build_log(frame[["user", "item", "rating"]], n_levels)
    log(MODULE_NAME, f"Loaded {len(ratings)} ratings ({n_records - len(ratings)} duplicates dropped) "
                     f"over {ratings.n_users} users and {ratings.n_items} items from {path}")
    return ratings


def remap_trust(raw_sources, raw_targets, user_ids: IdMap) -> TrustNetwork:
    """
    Map raw trust endpoints through the rating file's user ids.

    Edges touching users unseen in the ratings and self-loops are dropped and
    counted; repeated edges are kept once.
    """
    index = user_ids.to_index()
    sources = pd.Series(np.asarray(raw_sources).astype(str)).map(index)
    targets = pd.Series(np.asarray(raw_targets).astype(str)).map(index)
    known = sources.notna() & targets.notna()

    sources = sources[known].to_numpy(dtype=np.int64)
    targets = targets[known].to_numpy(dtype=np.int64)
    loops = sources == targets
    sources, targets = sources[~loops], targets[~loops]

    pairs = pd.DataFrame({"s": sources, "t": targets}).drop_duplicates()
    report = TrustLoadReport(
        raw_edges=len(known),
        kept_edges=len(pairs),
        dropped_unknown=int((~known).sum()),
        dropped_self_loops=int(loops.sum()),
        dropped_duplicates=len(sources) - len(pairs),
    )
    return TrustNetwork(sources=pairs["s"].to_numpy(dtype=np.int64), targets=pairs["t"].to_numpy(dtype=np.int64),
                        report=report)


def load_trust(path, user_ids: IdMap, fmt: IngestFormat = IngestFormat.TSV) -> TrustNetwork:
    """
    Load a trust file against the user remapping of the rating file.

    Raises:
        ParseError: A record has the wrong number of fields.

    Returns:
        TrustNetwork: Directed edges over dense user ids; see `remap_trust`
        for what is dropped.
    """
    frame = _read_frame(path, 2, IngestFormat(fmt))
    trust = remap_trust(frame[0].to_numpy(), frame[1].to_numpy(), user_ids)
    log(MODULE_NAME, f"Loaded trust from {path}: {trust.report.json()}")
    return trust
