"""Sample containers, validation helpers, and CSV input/output.

CSV data format: first row holds the variable labels, every following row is
one observation, comma separated, '.' decimal point. Parse failures report the
1-based row and column of the first offending cell.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CsvFormatError,
    InsufficientSamplesError,
    ValidationError,
)

SYMMETRY_RTOL = 1e-12


def default_names(p: int) -> tuple[str, ...]:
    return tuple(f"v{i + 1}" for i in range(p))


def check_finite(values: np.ndarray, what: str = "matrix") -> None:
    if not np.all(np.isfinite(values)):
        raise ValidationError(f"{what} contains non-finite entries")


def check_square_symmetric(values: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Validate a square symmetric matrix; asymmetric inputs are rejected,
    never silently symmetrized."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {values.shape}")
    check_finite(values, what)
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    asym = float(np.max(np.abs(values - values.T))) if values.size else 0.0
    if asym > SYMMETRY_RTOL * scale:
        raise ValidationError(
            f"{what} is not symmetric (max asymmetry {asym:.3e}, tolerance "
            f"{SYMMETRY_RTOL * scale:.3e})"
        )
    return values


@dataclass(frozen=True)
class SampleMatrix:
    """n x p observation matrix (rows are observations) with variable labels."""

    data: np.ndarray
    names: tuple[str, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        # always copy: the array is frozen and must not alias caller state
        data = np.array(self.data, dtype=float, order="C")
        if data.ndim != 2:
            raise ValidationError(f"sample matrix must be 2-D, got ndim {data.ndim}")
        n, p = data.shape
        if p < 1:
            raise ValidationError("sample matrix needs at least one variable")
        if n < 2:
            raise InsufficientSamplesError(
                f"need at least 2 observations, got {n}"
            )
        check_finite(data, "sample matrix")
        names = self.names
        if names is None:
            names = default_names(p)
        names = tuple(str(x) for x in names)
        if len(names) != p:
            raise ValidationError(
                f"got {len(names)} variable labels for {p} variables"
            )
        if len(set(names)) != p:
            dupes = sorted({x for x in names if names.count(x) > 1})
            raise ValidationError(f"duplicate variable labels: {dupes}")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class TwoGroupDataset:
    """A pair of samples over the same variables, in the same order."""

    group1: SampleMatrix
    group2: SampleMatrix

    def __post_init__(self):
        if self.group1.p != self.group2.p:
            raise ValidationError(
                f"groups have different dimensions: {self.group1.p} vs {self.group2.p}"
            )
        if self.group1.names != self.group2.names:
            for a, b in zip(self.group1.names, self.group2.names):
                if a != b:
                    raise ValidationError(
                        f"variable labels differ between groups: {a!r} vs {b!r}"
                    )

    @property
    def p(self) -> int:
        return self.group1.p

    @property
    def names(self) -> tuple[str, ...]:
        return self.group1.names


def _parse_header(row, path):
    names = [cell.strip() for cell in row]
    if not names or all(x == "" for x in names):
        raise CsvFormatError(f"{path}: empty header row", row=1)
    return names


def _parse_cell(cell, path, row_no, col_no):
    try:
        value = float(cell)
    except ValueError:
        raise CsvFormatError(
            f"{path}: cell {cell!r} is not numeric", row=row_no, column=col_no
        ) from None
    if not np.isfinite(value):
        raise CsvFormatError(
            f"{path}: cell {cell!r} is not finite", row=row_no, column=col_no
        )
    return value


def read_sample_csv(path) -> SampleMatrix:
    """Read an observations CSV (header row of labels, then data rows)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise CsvFormatError(f"{path}: file is empty", row=1)
    names = _parse_header(rows[0], path)
    p = len(names)
    data = np.empty((len(rows) - 1, p))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != p:
            raise CsvFormatError(
                f"{path}: expected {p} cells, got {len(row)}", row=i
            )
        for j, cell in enumerate(row):
            data[i - 2, j] = _parse_cell(cell, path, i, j + 1)
    return SampleMatrix(data, tuple(names))


def parse_group_spec(spec: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Parse a --groups mapping like "A+B:C" into (group1 labels, group2 labels)."""
    parts = spec.split(":")
    if len(parts) != 2:
        raise ValidationError(
            f"group spec {spec!r} must have the form LABELS:LABELS"
        )
    sides = []
    for part in parts:
        labels = tuple(x.strip() for x in part.split("+") if x.strip())
        if not labels:
            raise ValidationError(f"group spec {spec!r} has an empty side")
        sides.append(labels)
    return sides[0], sides[1]


def read_labeled_csv(path, label_column: str, groups: str | None = None) -> TwoGroupDataset:
    """Read a single labeled CSV and split rows into two groups.

    Without a group spec the label column must contain exactly two distinct
    labels; group1 is the label seen first. With a spec like "A+B:C" the left
    side is pooled into group1 and the right into group2; rows with other
    labels are dropped.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise CsvFormatError(f"{path}: file is empty", row=1)
    header = _parse_header(rows[0], path)
    if label_column not in header:
        raise ValidationError(
            f"{path}: label column {label_column!r} not found in header {header}"
        )
    label_idx = header.index(label_column)
    names = tuple(x for i, x in enumerate(header) if i != label_idx)
    if not names:
        raise ValidationError(f"{path}: no variable columns besides the label column")

    labels = []
    values = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvFormatError(
                f"{path}: expected {len(header)} cells, got {len(row)}", row=i
            )
        labels.append(row[label_idx].strip())
        values.append(
            [
                _parse_cell(cell, path, i, j + 1)
                for j, cell in enumerate(row)
                if j != label_idx
            ]
        )

    if groups is None:
        distinct = list(dict.fromkeys(labels))
        if len(distinct) != 2:
            raise ValidationError(
                f"{path}: expected exactly 2 distinct group labels, got "
                f"{distinct}; use --groups to pool or select labels"
            )
        side1, side2 = (distinct[0],), (distinct[1],)
    else:
        side1, side2 = parse_group_spec(groups)
        present = set(labels)
        missing = [x for x in side1 + side2 if x not in present]
        if missing:
            raise ValidationError(
                f"{path}: group labels {missing} do not occur in column "
                f"{label_column!r}"
            )
        overlap = set(side1) & set(side2)
        if overlap:
            raise ValidationError(f"group labels {sorted(overlap)} appear on both sides")

    rows1 = [v for v, lab in zip(values, labels) if lab in side1]
    rows2 = [v for v, lab in zip(values, labels) if lab in side2]
    for side, got in ((side1, rows1), (side2, rows2)):
        if len(got) < 2:
            raise InsufficientSamplesError(
                f"{path}: group {'+'.join(side)} has {len(got)} rows, need at least 2"
            )
    return TwoGroupDataset(
        SampleMatrix(np.array(rows1), names), SampleMatrix(np.array(rows2), names)
    )


def write_matrix_csv(path, values: np.ndarray, row_labels, col_labels) -> None:
    """Write a labeled matrix CSV with 17 significant digits (exact round trip)."""
    values = np.asarray(values, dtype=float)
    if values.shape != (len(row_labels), len(col_labels)):
        raise ValidationError(
            f"matrix shape {values.shape} does not match labels "
            f"({len(row_labels)}, {len(col_labels)})"
        )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(col_labels))
        for label, row in zip(row_labels, values):
            writer.writerow([label] + [format(x, ".17g") for x in row])


def read_matrix_csv(path) -> tuple[np.ndarray, tuple[str, ...], tuple[str, ...]]:
    """Read a labeled matrix CSV as written by write_matrix_csv."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvFormatError(f"{path}: file is empty", row=1)
    col_labels = tuple(x.strip() for x in rows[0][1:])
    row_labels = []
    data = np.empty((len(rows) - 1, len(col_labels)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(col_labels) + 1:
            raise CsvFormatError(
                f"{path}: expected {len(col_labels) + 1} cells, got {len(row)}", row=i
            )
        row_labels.append(row[0].strip())
        for j, cell in enumerate(row[1:]):
            data[i - 2, j] = _parse_cell(cell, path, i, j + 2)
    return data, tuple(row_labels), col_labels
