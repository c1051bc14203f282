"""Self-describing artifact files: binary (precision-bearing) and CSV (inspectable).

Binary layout: 4 magic bytes ``FGF1``, one line of UTF-8 JSON with sorted
keys (section id in {cov, eig, ker, smp, vlt}, n, N, rows, cols, seed,
model, plus section-specific fields), a newline, then the payload as
row-major little-endian float64. CSV files carry a ``fgf-<section>,v1,n,N``
header line followed by one matrix row (or one realization) per line;
values use shortest round-trip decimal formatting, so binary and CSV
encodings of the same matrix parse to equal float64 values.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from . import equivalence, mercer, sampling
from .grid import Grid, build_grid

MAGIC = b"FGF1"
SECTIONS = ("cov", "eig", "ker", "smp", "vlt")


class FormatError(ValueError):
    """An artifact file does not match the documented encoding."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# binary format


def write_matrix(
    path,
    section: str,
    matrix: np.ndarray,
    n: int,
    N: int,
    seed: Optional[int] = None,
    model: Optional[dict] = None,
    extra: Optional[dict] = None,
) -> None:
    """Write one float64 matrix with a self-describing JSON header."""
    if section not in SECTIONS:
        raise FormatError(f"unknown section {section!r}, expected one of {SECTIONS}")
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    header = {
        "section": section,
        "n": int(n),
        "N": int(N),
        "rows": int(matrix.shape[0]),
        "cols": int(matrix.shape[1]),
        "seed": None if seed is None else int(seed),
        "model": model,
    }
    if extra:
        header.update(extra)
    line = json.dumps(header, sort_keys=True, separators=(",", ":"))
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(line.encode("utf-8"))
        f.write(b"\n")
        f.write(matrix.astype("<f8", copy=False).tobytes(order="C"))


def read_matrix(path, section: Optional[str] = None):
    """Read a binary artifact; returns (header dict, float64 matrix)."""
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        line = f.readline()
        if not line.endswith(b"\n"):
            raise FormatError("truncated file: header line has no newline")
        try:
            header = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"header is not valid JSON: {exc}") from exc
        payload = f.read()

    if not isinstance(header, dict):
        raise FormatError("header is not a JSON object")
    for key in ("section", "n", "N", "rows", "cols"):
        if key not in header:
            raise FormatError(f"header is missing required key {key!r}")
    found = header["section"]
    if found not in SECTIONS:
        raise FormatError(f"unknown section {found!r}, expected one of {SECTIONS}")
    if section is not None and found != section:
        raise FormatError(f"file holds section {found!r}, expected {section!r}")

    rows, cols = int(header["rows"]), int(header["cols"])
    if rows < 0 or cols < 0:
        raise FormatError(f"invalid payload shape {rows} x {cols}")
    expected = rows * cols * 8
    if len(payload) != expected:
        raise FormatError(
            f"payload has {len(payload)} bytes, header promises {expected}"
        )
    matrix = np.frombuffer(payload, dtype="<f8").astype(float).reshape(rows, cols)
    return header, _readonly(matrix)


def _grid_from_header(header: dict) -> Grid:
    return build_grid(int(header["n"]), int(header["N"]))


# ---------------------------------------------------------------------------
# typed binary wrappers


def save_covariance(path, matrix, grid: Grid, model: Optional[dict] = None) -> None:
    write_matrix(path, "cov", matrix, n=grid.n, N=grid.N, model=model)


def load_covariance(path):
    """Returns (grid, matrix, header) for a stored Gram matrix."""
    header, matrix = read_matrix(path, section="cov")
    grid = _grid_from_header(header)
    if matrix.shape != (grid.size, grid.size):
        raise FormatError(
            f"covariance payload is {matrix.shape}, grid has {grid.size} nodes"
        )
    return grid, matrix, header


def save_kernel(path, kernel: mercer.FredholmKernel, model: Optional[dict] = None) -> None:
    write_matrix(path, "ker", kernel.K, n=kernel.grid.n, N=kernel.grid.N, model=model)


def load_kernel(path) -> mercer.FredholmKernel:
    header, matrix = read_matrix(path, section="ker")
    grid = _grid_from_header(header)
    if matrix.shape != (grid.size, grid.size):
        raise FormatError(
            f"kernel payload is {matrix.shape}, grid has {grid.size} nodes"
        )
    return mercer.FredholmKernel(grid=grid, K=matrix)


def save_decomposition(
    path, decomp: mercer.MercerDecomposition, model: Optional[dict] = None
) -> None:
    """Payload row 0 holds the eigenvalues; rows 1.. hold the eigenfunction matrix."""
    grid = decomp.grid
    payload = np.vstack([decomp.eigenvalues[None, :], decomp.eigenfunctions])
    write_matrix(
        path,
        "eig",
        payload,
        n=grid.n,
        N=grid.N,
        model=model,
        extra={"clipped_mass": float(decomp.clipped_mass)},
    )


def load_decomposition(path) -> mercer.MercerDecomposition:
    header, payload = read_matrix(path, section="eig")
    grid = _grid_from_header(header)
    if payload.shape != (grid.size + 1, grid.size):
        raise FormatError(
            f"eigen payload is {payload.shape}, expected {(grid.size + 1, grid.size)}"
        )
    return mercer.MercerDecomposition(
        grid=grid,
        eigenvalues=_readonly(payload[0].copy()),
        eigenfunctions=_readonly(payload[1:].copy()),
        clipped_mass=float(header.get("clipped_mass", 0.0)),
    )


def save_samples(
    path, samples: sampling.FieldSamples, model: Optional[dict] = None
) -> None:
    meta = samples.meta
    write_matrix(
        path,
        "smp",
        samples.data,
        n=samples.grid.n,
        N=samples.grid.N,
        seed=meta.seed,
        model=model,
        extra={
            "generator": meta.generator,
            "basis": meta.basis,
            "truncation": int(meta.truncation),
        },
    )


def load_samples(path) -> sampling.FieldSamples:
    header, data = read_matrix(path, section="smp")
    grid = _grid_from_header(header)
    if data.shape[1] != grid.size:
        raise FormatError(
            f"sample rows have {data.shape[1]} values, grid has {grid.size} nodes"
        )
    for key in ("generator", "truncation", "seed"):
        if header.get(key) is None:
            raise FormatError(f"sample header is missing {key!r}")
    meta = sampling.SampleMeta(
        generator=str(header["generator"]),
        basis=None if header.get("basis") is None else str(header["basis"]),
        truncation=int(header["truncation"]),
        seed=int(header["seed"]),
    )
    return sampling.FieldSamples(grid=grid, data=data, meta=meta)


def save_volterra(path, volterra: equivalence.VolterraKernel) -> None:
    write_matrix(
        path,
        "vlt",
        volterra.L,
        n=volterra.grid.n,
        N=volterra.grid.N,
        extra={"zeroed_mass": float(volterra.zeroed_mass)},
    )


def load_volterra(path) -> equivalence.VolterraKernel:
    """Ingest a perturbation matrix; entries off the support region are zeroed."""
    header, matrix = read_matrix(path, section="vlt")
    grid = _grid_from_header(header)
    if matrix.shape != (grid.size, grid.size):
        raise FormatError(
            f"perturbation payload is {matrix.shape}, grid has {grid.size} nodes"
        )
    return equivalence.volterra_project(matrix, grid)


# ---------------------------------------------------------------------------
# CSV format


def write_matrix_csv(path, section: str, matrix: np.ndarray, n: int, N: int) -> None:
    """Human-inspectable twin of the binary format (same header fields)."""
    if section not in SECTIONS:
        raise FormatError(f"unknown section {section!r}, expected one of {SECTIONS}")
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"fgf-{section},v1,{int(n)},{int(N)}\n")
        for row in matrix:
            f.write(",".join(repr(float(v)) for v in row))
            f.write("\n")


def read_matrix_csv(path, section: Optional[str] = None):
    """Returns (n, N, matrix) from a CSV artifact, checking the header tag."""
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().strip()
        parts = first.split(",")
        if len(parts) != 4 or not parts[0].startswith("fgf-") or parts[1] != "v1":
            raise FormatError(
                f"bad CSV header {first!r}, expected 'fgf-<section>,v1,<n>,<N>'"
            )
        found = parts[0][len("fgf-"):]
        if found not in SECTIONS:
            raise FormatError(f"unknown section {found!r}, expected one of {SECTIONS}")
        if section is not None and found != section:
            raise FormatError(f"file holds section {found!r}, expected {section!r}")
        try:
            n, N = int(parts[2]), int(parts[3])
        except ValueError as exc:
            raise FormatError(f"bad CSV header {first!r}: {exc}") from exc
        rows = []
        width = None
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(v) for v in line.split(",")]
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}") from exc
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise FormatError(
                    f"line {lineno} has {len(row)} values, earlier rows have {width}"
                )
            rows.append(row)
    if not rows:
        raise FormatError("CSV artifact has a header but no data rows")
    return n, N, _readonly(np.array(rows, dtype=float))


def read_vector_csv(path) -> np.ndarray:
    """Plain CSV vector in canonical flat order; commas and newlines both split."""
    values = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            for tok in line.split(","):
                tok = tok.strip()
                if not tok:
                    continue
                try:
                    values.append(float(tok))
                except ValueError as exc:
                    raise FormatError(f"line {lineno}: {exc}") from exc
    if not values:
        raise FormatError("vector file holds no values")
    return _readonly(np.array(values, dtype=float))


def write_vector_csv(path, vector: np.ndarray) -> None:
    vector = np.asarray(vector, dtype=float).reshape(-1)
    with open(path, "w", encoding="utf-8") as f:
        for v in vector:
            f.write(repr(float(v)))
            f.write("\n")
