"""File formats: binary PGM images, stack manifests, and SQNF field files.

PGM is binary "P5" with 8- or 16-bit samples (16-bit big-endian per the
format); intensities are normalized to [0, 1] on load by dividing by maxval.
A stack manifest is plain text: a header line ``spacing h1 h2`` followed by
one relative frame path per line.  Vector fields use a little-endian binary
format with a fixed 24-byte header:

    magic "SQNF" | u32 m1 | u32 m2 | u32 components | f32 h1 | f32 h2

followed by the component planes as row-major float32.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DataError
from .grid import Grid, Image, ImageSequence, VectorField

FIELD_MAGIC = b"SQNF"


def _read_pgm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comment lines
    while pos < len(data):
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise DataError("truncated PGM header")
    return data[start:pos], pos


def read_pgm(path: str | Path, spacing: tuple[float, float] = (1.0, 1.0)) -> Image:
    """Read a binary (P5) PGM file; values come back normalized to [0, 1]."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if data[:2] != b"P5":
        raise DataError(f"{path}: not a binary PGM (magic {data[:2]!r}, expected b'P5')")
    pos = 2
    try:
        wtok, pos = _read_pgm_token(data, pos)
        htok, pos = _read_pgm_token(data, pos)
        mtok, pos = _read_pgm_token(data, pos)
        width, height, maxval = int(wtok), int(htok), int(mtok)
    except (ValueError, DataError) as exc:
        raise DataError(f"{path}: malformed PGM header ({exc})") from exc
    if not (0 < maxval < 65536):
        raise DataError(f"{path}: maxval {maxval} out of range")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    raster = data[pos : pos + count * dtype.itemsize]
    if len(raster) != count * dtype.itemsize:
        raise DataError(f"{path}: raster truncated ({len(raster)} bytes)")
    arr = np.frombuffer(raster, dtype=dtype).reshape(height, width)
    grid = Grid(shape=(height, width), spacing=spacing)
    return Image(grid, arr.astype(np.float64) / maxval)


def write_pgm(image: Image, path: str | Path, maxval: int = 65535) -> None:
    """Write values (clipped to [0, 1]) as binary PGM with the given maxval."""
    if not (0 < maxval < 65536):
        raise DataError(f"maxval {maxval} out of range")
    path = Path(path)
    m1, m2 = image.grid.shape
    q = np.rint(np.clip(image.values, 0.0, 1.0) * maxval)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    header = f"P5\n{m2} {m1}\n{maxval}\n".encode("ascii")
    path.write_bytes(header + q.astype(dtype).tobytes())


def read_stack(manifest: str | Path) -> ImageSequence:
    """Load an image sequence from a manifest file."""
    manifest = Path(manifest)
    try:
        lines = manifest.read_text().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {manifest}: {exc}") from exc
    lines = [ln.strip() for ln in lines if ln.strip() and not ln.strip().startswith("#")]
    if not lines or not lines[0].startswith("spacing"):
        raise DataError(f"{manifest}: first line must be 'spacing h1 h2'")
    parts = lines[0].split()
    if len(parts) != 3:
        raise DataError(f"{manifest}: malformed spacing line {lines[0]!r}")
    try:
        spacing = (float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise DataError(f"{manifest}: malformed spacing line {lines[0]!r}") from exc
    if len(lines) < 3:
        raise DataError(f"{manifest}: need at least 2 frames, got {len(lines) - 1}")
    frames = []
    for rel in lines[1:]:
        fp = manifest.parent / rel
        img = read_pgm(fp, spacing=spacing)
        if frames and img.grid != frames[0].grid:
            raise DataError(f"frame grid mismatch: {fp} is {img.grid.shape}, "
                            f"expected {frames[0].grid.shape}")
        frames.append(img)
    return ImageSequence(tuple(frames))


def write_stack(seq: ImageSequence, out_dir: str | Path, prefix: str = "frame",
                manifest_name: str = "manifest.txt", maxval: int = 65535) -> Path:
    """Write frames as PGM plus a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    for t, frame in enumerate(seq):
        name = f"{prefix}_{t:03d}.pgm"
        write_pgm(frame, out_dir / name, maxval=maxval)
        names.append(name)
    h1, h2 = seq.grid.spacing
    manifest = out_dir / manifest_name
    manifest.write_text(
        f"spacing {h1!r} {h2!r}\n" + "\n".join(names) + "\n"
    )
    return manifest


def write_field(fld: VectorField, path: str | Path) -> None:
    """Serialize a vector field as SQNF (float32 planes)."""
    m1, m2 = fld.grid.shape
    h1, h2 = fld.grid.spacing
    header = FIELD_MAGIC + struct.pack("<IIIff", m1, m2, 2, h1, h2)
    planes = fld.data.astype("<f4").tobytes()
    Path(path).write_bytes(header + planes)


def read_field(path: str | Path) -> VectorField:
    """Read an SQNF field file back into a VectorField."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if data[:4] != FIELD_MAGIC:
        raise DataError(f"{path}: bad field magic {data[:4]!r}, expected {FIELD_MAGIC!r}")
    if len(data) < 24:
        raise DataError(f"{path}: truncated field header")
    m1, m2, comps, h1, h2 = struct.unpack("<IIIff", data[4:24])
    if comps != 2:
        raise DataError(f"{path}: expected 2 components, got {comps}")
    need = 24 + comps * m1 * m2 * 4
    if len(data) != need:
        raise DataError(f"{path}: expected {need} bytes, got {len(data)}")
    planes = np.frombuffer(data[24:], dtype="<f4").reshape(comps, m1, m2)
    grid = Grid(shape=(int(m1), int(m2)), spacing=(float(h1), float(h2)))
    return VectorField(grid, planes.astype(np.float64))
