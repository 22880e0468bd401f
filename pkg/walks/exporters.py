"""
Data files written by the management commands.

CSV schema (stable, LF line endings, 9 significant digits):
- distribution: t,x,a,prob            (trajectory runs add a stderr column)
- moments:      channel,T,p,mean,second_moment,sigma

JSON files carry the same rows under "rows" plus a "metadata" block.
"""
import csv
from dataclasses import asdict
import logging
from pathlib import Path
from typing import Iterable, Optional

from rest_framework.renderers import JSONRenderer

from . import __version__
from .analysis import MomentsRecord
from .lattice import Distribution
from .serializers import DistributionRowSerializer, MomentsRecordSerializer

logger = logging.getLogger(__name__)

DISTRIBUTION_FIELDS = ["t", "x", "a", "prob"]
MOMENTS_FIELDS = ["channel", "T", "p", "mean", "second_moment", "sigma"]


def format_number(value) -> str:
    """9 significant digits; negative zero is written as 0."""
    if isinstance(value, int):
        return str(value)
    return format(float(value) + 0.0, ".9g")


def distribution_rows(dist: Distribution, standard_errors=None) -> list[dict]:
    rows = []
    for x, label, prob in dist.support_rows():
        row = {"t": dist.time, "x": x, "a": int(label), "prob": prob}
        if standard_errors is not None:
            row["stderr"] = float(standard_errors[x + dist.horizon, label.index])
        rows.append(row)
    return rows


def _write_csv(path: Path, fields: list[str], rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([format_number(row[name]) if name != "channel" else row[name] for name in fields])


def _write_json(path: Path, rows: list, metadata: dict) -> None:
    payload = {"metadata": {"engine_version": __version__, **metadata}, "rows": rows}
    with open(path, "wb") as f:
        f.write(JSONRenderer().render(payload, renderer_context={"indent": 2}))
        f.write(b"\n")


class ResultWriter:
    """
    Writes distribution/moments files into one output directory.
    The directory is created on first write.
    """

    def __init__(self, out_dir: str, fmt: str = "csv", metadata: Optional[dict] = None):
        self.out_dir = Path(out_dir)
        self.fmt = fmt
        self.metadata = metadata or {}
        self.written: list[Path] = []

    def _target(self, stem: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{stem}.{self.fmt}"
        self.written.append(path)
        return path

    def write_distribution(self, dist: Distribution, standard_errors=None) -> Path:
        rows = distribution_rows(dist, standard_errors)
        path = self._target("distribution")
        if self.fmt == "csv":
            fields = DISTRIBUTION_FIELDS + (["stderr"] if standard_errors is not None else [])
            _write_csv(path, fields, rows)
        else:
            _write_json(path, DistributionRowSerializer(rows, many=True).data, self.metadata)
        logger.info(f"Wrote {len(rows)} distribution rows to {path}")
        return path

    def write_moments(self, records: list[MomentsRecord]) -> Path:
        path = self._target("moments")
        if self.fmt == "csv":
            _write_csv(path, MOMENTS_FIELDS, (asdict(record) for record in records))
        else:
            _write_json(path, MomentsRecordSerializer(records, many=True).data, self.metadata)
        logger.info(f"Wrote {len(records)} moments rows to {path}")
        return path

    def write_analysis(self, payload: dict) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / "analysis.json"
        self.written.append(path)
        _write_json(path, [payload], self.metadata)
        return path
