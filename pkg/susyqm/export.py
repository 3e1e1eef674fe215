"""
Grid sampling and file output for the command-line driver.

Every CSV starts with a `# susyqm-kit vX.Y` line followed by a header row; numbers are written with "{:.17g}" so
values round-trip exactly and files are byte-identical between runs. The manifest is a flat key=value text file
listing the parameters and the sha256 digest of every emitted file.
"""

import csv
import hashlib
import io
import os
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from susyqm import GridPlane, __version__
from susyqm.data_models import GridSpec, RunManifest

CSV_PREAMBLE = f"# susyqm-kit v{'.'.join(__version__.split('.')[:2])}"
MANIFEST_NAME = "manifest.txt"

_PLANE_AXES: Dict[GridPlane, Tuple[int, ...]] = {
    GridPlane.XY: (0, 1),
    GridPlane.XZ: (0, 2),
    GridPlane.YZ: (1, 2),
    GridPlane.X: (0,),
    GridPlane.Y: (1,),
    GridPlane.Z: (2,),
}


def plane_axes(plane: GridPlane) -> Tuple[int, ...]:
    return _PLANE_AXES[plane]


def grid_points(spec: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Lay a grid on the plane (or axis line) of `spec`.

    Returns:
        The in-plane coordinates, shape (M, k) for k = 2 on planes and k = 1 on lines (u varies slowest), and the
        matching 3-D points, shape (M, 3).
    """
    axes = plane_axes(spec.plane)
    offsets = spec.axis_coordinates
    mesh = np.meshgrid(*([offsets] * len(axes)), indexing="ij")
    plane_coords = np.stack([m.ravel() for m in mesh], axis=-1)
    points = np.tile(spec.center, (plane_coords.shape[0], 1))
    for column, axis in enumerate(axes):
        points[:, axis] = spec.center[axis] + plane_coords[:, column]
    return plane_coords, points


def plane_column_names(plane: GridPlane) -> List[str]:
    return [["x", "y", "z"][axis] for axis in plane_axes(plane)]


def _format_number(v: float) -> str:
    return "{:.17g}".format(v)


def _write_table(header: Sequence[str], records: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    buffer.write(CSV_PREAMBLE + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(records)
    return buffer.getvalue()


def csv_text(header: Sequence[str], rows: np.ndarray) -> str:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    return _write_table(header, ([_format_number(v) for v in row] for row in rows))


def labeled_csv_text(labels: Sequence[str], header: Sequence[str], rows: np.ndarray) -> str:
    """Like `csv_text`, with a leading text column (header[0]) holding one label per row.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if len(labels) != rows.shape[0]:
        raise ValueError(f"Got {len(labels)} labels for {rows.shape[0]} rows")
    return _write_table(header, ([label] + [_format_number(v) for v in row] for label, row in zip(labels, rows)))


def sha256_digest(text: str) -> str:
    return hashlib.sha256(text.encode("ascii")).hexdigest()


class RunRecorder:
    """Writes a command's output files and the manifest that records them.

    Attributes:
        directory: Output folder; when None nothing is written and the manifest text is only returned.
        manifest: Provenance record; `outputs` is filled in as files are written.
    """

    def __init__(self, command: str, parameters: Dict[str, object], seed: Optional[int] = None,
                 directory: Optional[str] = None):
        self.directory: Optional[str] = directory
        self.manifest = RunManifest(command=command, parameters={key: str(value) for key, value in parameters.items()},
                                    seed=seed)
        if directory is not None:
            os.makedirs(directory, exist_ok=True)

    def write_text(self, file_name: str, text: str) -> str:
        """Write a file (if there is an output folder) and record its digest.
        """
        digest = sha256_digest(text)
        if self.directory is not None:
            with open(os.path.join(self.directory, file_name), "w", encoding="ascii", newline="\n") as out_file:
                out_file.write(text)
        self.manifest.outputs[file_name] = digest
        return digest

    def write_csv(self, file_name: str, header: Sequence[str], rows: np.ndarray) -> str:
        return self.write_text(file_name, csv_text(header, rows))

    def finish(self, manifest_name: Optional[str] = None) -> str:
        """Write the manifest next to the outputs (as manifest.txt unless named otherwise) and return its text.
        """
        text = self.manifest.to_text()
        if self.directory is not None:
            with open(os.path.join(self.directory, manifest_name or MANIFEST_NAME), "w", encoding="ascii",
                      newline="\n") as manifest_file:
                manifest_file.write(text)
        return text


def _read_table(path: str) -> Tuple[List[str], List[List[str]]]:
    with open(path, "r", encoding="ascii", newline="") as csv_file:
        preamble = csv_file.readline().rstrip("\r\n")
        if preamble != CSV_PREAMBLE:
            raise ValueError(f"{path} does not start with {CSV_PREAMBLE!r}")
        records = list(csv.reader(csv_file))
    if not records:
        raise ValueError(f"{path} has no header row")
    return records[0], records[1:]


def read_csv(path: str) -> Tuple[List[str], np.ndarray]:
    """Read back a CSV written by `csv_text`: the header names and the data rows.
    """
    header, records = _read_table(path)
    rows = np.array([[float(v) for v in record] for record in records]).reshape(-1, len(header))
    return header, rows


def read_labeled_csv(path: str) -> Tuple[List[str], List[str], np.ndarray]:
    """Read back a CSV written by `labeled_csv_text`: the header names, the row labels and the numeric columns.
    """
    header, records = _read_table(path)
    labels = [record[0] for record in records]
    rows = np.array([[float(v) for v in record[1:]] for record in records]).reshape(-1, len(header) - 1)
    return header, labels, rows


def component_rows(plane_coords: np.ndarray, values: np.ndarray) -> Iterable[np.ndarray]:
    """One (M, k + 1) array per vector component: in-plane coordinates followed by that component.
    """
    for component in range(values.shape[-1]):
        yield np.column_stack([plane_coords, values[:, component]])
