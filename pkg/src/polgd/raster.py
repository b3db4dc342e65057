"""Flat-binary raster I/O in the PolSARpro directory layout.

A matrix directory holds one little-endian float32 row-major ``.bin`` file
per real plane plus a ``config.txt`` with the raster dimensions. The nine
coherency planes are T11, T12_real, T12_imag, T13_real, T13_imag, T22,
T23_real, T23_imag, T33 (diagonals real); covariance directories use the
same pattern with C in place of T.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

__all__ = [
    "LoadError",
    "RasterStack",
    "read_config",
    "write_config",
    "read_t3",
    "read_c3",
    "write_t3",
    "write_bands",
    "write_byte_band",
    "write_class_map",
    "write_png",
]

_T3_PLANES = (
    ("T11", 0, 0, "real"),
    ("T12_real", 0, 1, "real"),
    ("T12_imag", 0, 1, "imag"),
    ("T13_real", 0, 2, "real"),
    ("T13_imag", 0, 2, "imag"),
    ("T22", 1, 1, "real"),
    ("T23_real", 1, 2, "real"),
    ("T23_imag", 1, 2, "imag"),
    ("T33", 2, 2, "real"),
)
_C3_PLANES = tuple((n.replace("T", "C", 1), i, j, part) for n, i, j, part in _T3_PLANES)


class LoadError(Exception):
    """Raster directory or file cannot be read as described."""


@dataclass
class RasterStack:
    """In-memory raster: named planes over one (height, width) grid.

    Matrix planes have shape (h, w, 3, 3); scalar planes (h, w). ``mask`` is
    True where the pixel carries data; derived products map masked-out pixels
    to NaN (float planes) or 0 (byte planes).
    """

    width: int
    height: int
    bands: dict[str, np.ndarray] = field(default_factory=dict)
    mask: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mask is None:
            self.mask = np.ones((self.height, self.width), dtype=bool)
        for name, arr in self.bands.items():
            if arr.shape[:2] != (self.height, self.width):
                raise ValueError(f"band {name!r} shape {arr.shape} does not match raster")

    @property
    def valid_fraction(self) -> float:
        return float(self.mask.mean())


def read_config(directory: str | os.PathLike) -> tuple[int, int]:
    """Read (nrow, ncol) from a directory's config.txt."""
    path = os.path.join(directory, "config.txt")
    try:
        with open(path, encoding="ascii", errors="replace") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as e:
        raise LoadError(f"cannot read {path}: {e}") from e
    values: dict[str, str] = {}
    for i, ln in enumerate(lines):
        if ln.lower() in ("nrow", "ncol", "polarcase", "polartype") and i + 1 < len(lines):
            values[ln.lower()] = lines[i + 1]
    try:
        nrow = int(values["nrow"])
        ncol = int(values["ncol"])
    except (KeyError, ValueError):
        raise LoadError(f"{path} lacks parsable Nrow/Ncol entries") from None
    if nrow <= 0 or ncol <= 0:
        raise LoadError(f"{path} declares non-positive dimensions {nrow}x{ncol}")
    return nrow, ncol


def write_config(directory: str | os.PathLike, nrow: int, ncol: int,
                 polar_case: str = "monostatic", polar_type: str = "full") -> None:
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "config.txt"), "w", encoding="ascii") as fh:
        fh.write(
            f"Nrow\n{nrow}\n---------\nNcol\n{ncol}\n---------\n"
            f"PolarCase\n{polar_case}\n---------\nPolarType\n{polar_type}\n"
        )


def _read_plane(directory, name: str, nrow: int, ncol: int) -> np.ndarray:
    path = os.path.join(directory, name + ".bin")
    try:
        raw = np.fromfile(path, dtype="<f4")
    except OSError as e:
        raise LoadError(f"cannot read {path}: {e}") from e
    if raw.size != nrow * ncol:
        raise LoadError(
            f"{path} holds {raw.size} float32 values, expected {nrow}x{ncol}={nrow * ncol}"
        )
    return raw.reshape(nrow, ncol).astype(np.float64)


def _read_matrix_dir(directory, planes, band_name: str) -> RasterStack:
    nrow, ncol = read_config(directory)
    m = np.zeros((nrow, ncol, 3, 3), dtype=np.complex128)
    for name, i, j, part in planes:
        plane = _read_plane(directory, name, nrow, ncol)
        if part == "real":
            m[:, :, i, j] += plane
        else:
            m[:, :, i, j] += 1j * plane
    for i in range(3):
        for j in range(i + 1, 3):
            m[:, :, j, i] = m[:, :, i, j].conj()
    finite = np.isfinite(m).all(axis=(2, 3))
    trace = m[:, :, 0, 0].real + m[:, :, 1, 1].real + m[:, :, 2, 2].real
    mask = finite & (trace > 0.0)
    return RasterStack(width=ncol, height=nrow, bands={band_name: m}, mask=mask)


def read_t3(directory: str | os.PathLike) -> RasterStack:
    """Load a coherency directory; pixels with NaN planes or zero trace are masked."""
    return _read_matrix_dir(directory, _T3_PLANES, "t3")


def read_c3(directory: str | os.PathLike) -> RasterStack:
    """Load a covariance directory, same conventions as :func:`read_t3`."""
    return _read_matrix_dir(directory, _C3_PLANES, "c3")


def write_t3(stack: RasterStack, directory: str | os.PathLike) -> None:
    """Write the stack's ``t3`` matrix band as a coherency directory.

    Masked-out pixels are written as NaN planes so they round-trip as nodata.
    """
    t3 = stack.bands["t3"]
    write_config(directory, stack.height, stack.width)
    nod = ~stack.mask
    for name, i, j, part in _T3_PLANES:
        plane = t3[:, :, i, j]
        plane = plane.real if part == "real" else plane.imag
        plane = plane.astype(np.float32)
        plane[nod] = np.nan
        plane.astype("<f4").tofile(os.path.join(directory, name + ".bin"))


def write_bands(stack: RasterStack, directory: str | os.PathLike,
                names: list[str] | None = None) -> None:
    """Write scalar float planes as ``<name>.bin`` float32 files plus config.txt.

    Masked-out pixels are forced to NaN in every written plane.
    """
    write_config(directory, stack.height, stack.width)
    nod = ~stack.mask
    for name in names if names is not None else sorted(stack.bands):
        arr = stack.bands[name]
        if arr.ndim != 2:
            continue
        if arr.dtype == np.uint8:
            write_byte_band(arr, stack.mask, os.path.join(directory, name + ".bin"))
            continue
        plane = arr.astype(np.float32)
        plane[nod] = np.nan
        plane.astype("<f4").tofile(os.path.join(directory, name + ".bin"))


def write_byte_band(labels: np.ndarray, mask: np.ndarray, path: str | os.PathLike) -> None:
    """Write a label plane as raw uint8, masked-out pixels as 0."""
    out = labels.astype(np.uint8).copy()
    out[~mask] = 0
    out.tofile(path)


def write_class_map(labels: np.ndarray, mask: np.ndarray,
                    directory: str | os.PathLike, name: str,
                    legend: list[str]) -> None:
    """Write labels as ``<name>.bin`` (uint8) plus a text legend sidecar."""
    os.makedirs(directory, exist_ok=True)
    write_byte_band(labels, mask, os.path.join(directory, name + ".bin"))
    with open(os.path.join(directory, name + ".txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(legend) + "\n")


def write_png(rgb: np.ndarray, mask: np.ndarray, path: str | os.PathLike,
              clip_sigma: float = 2.0) -> None:
    """Render a (h, w, 3) float power composite to an 8-bit PNG.

    Each channel is clipped at mean + clip_sigma * std over valid pixels and
    stretched linearly to 0..255 (clip_sigma <= 0 stretches to the channel
    maximum instead). Masked-out pixels render black.
    """
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (h, w, 3) composite")
    out = np.zeros(rgb.shape, dtype=np.uint8)
    for ch in range(3):
        plane = rgb[:, :, ch]
        vals = plane[mask & np.isfinite(plane)]
        if vals.size == 0:
            continue
        vals = np.maximum(vals, 0.0)
        top = float(vals.mean() + clip_sigma * vals.std()) if clip_sigma > 0 else float(vals.max())
        if top <= 0.0:
            continue
        scaled = np.clip(plane / top, 0.0, 1.0)
        out[:, :, ch] = np.nan_to_num(scaled * 255.0).astype(np.uint8)
    out[~mask] = 0
    Image.fromarray(out, mode="RGB").save(path)
