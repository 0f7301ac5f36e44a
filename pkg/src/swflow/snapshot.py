"""Binary snapshot files and on-disk histories.

Layout (little-endian)::

    b"SWFL"  u32 version=1  u32 m  u32 n  f64 L  f64 t  f64 S  u32 N
    spinor payload      n^m * N * (re, im) f64, sites lexicographic, last axis fastest
    connection payload  n^m * m f64, per site the m link components

A history directory is any directory of ``*.swfl`` files; snapshots are
ordered by their stored time.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError, FormatError, ShapeError
from .fields import ConnectionField, SpinorField
from .flow import FlowHistory, FlowState
from .functional import ModelParams
from .lattice import Lattice

MAGIC = b"SWFL"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdddI")


def encode_snapshot(state: FlowState, params: ModelParams) -> bytes:
    lat = state.lattice
    if lat != params.lattice:
        raise ShapeError("state and params use different lattices")
    header = _HEADER.pack(MAGIC, VERSION, lat.m, lat.n, lat.L, state.t, params.S, state.phi.N)
    spinor = np.ascontiguousarray(state.phi.values, dtype="<c16").tobytes()
    links = np.ascontiguousarray(np.moveaxis(state.a.values, 0, -1), dtype="<f8").tobytes()
    return header + spinor + links


def decode_snapshot(data: bytes) -> tuple[FlowState, ModelParams]:
    if len(data) < _HEADER.size:
        raise FormatError(f"snapshot too short for header ({len(data)} bytes)")
    magic, version, m, n, L, t, S, N = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    try:
        lat = Lattice(m=m, n=n, L=L)
    except ConfigurationError as exc:
        raise FormatError(f"invalid lattice in header: {exc}") from None
    if N < 1:
        raise FormatError(f"invalid fiber dimension {N}")
    sites = lat.site_count
    spinor_bytes = sites * N * 16
    link_bytes = sites * m * 8
    if len(data) != _HEADER.size + spinor_bytes + link_bytes:
        raise FormatError(
            f"payload length {len(data) - _HEADER.size} does not match header "
            f"(expected {spinor_bytes + link_bytes})"
        )
    off = _HEADER.size
    phi = np.frombuffer(data, dtype="<c16", count=sites * N, offset=off)
    links = np.frombuffer(data, dtype="<f8", count=sites * m, offset=off + spinor_bytes)
    phi = phi.astype(np.complex128).reshape(lat.shape + (N,))
    a = np.moveaxis(links.astype(np.float64).reshape(lat.shape + (m,)), -1, 0).copy()
    if not (np.isfinite(t) and np.isfinite(S)):
        raise FormatError("non-finite time or S in header")
    try:
        state = FlowState(float(t), SpinorField(lat, phi), ConnectionField(lat, a))
        params = ModelParams(S=float(S), lattice=lat, N=N)
    except (ConfigurationError, DomainError) as exc:
        raise FormatError(f"invalid payload: {exc}") from None
    return state, params


def write_snapshot(state: FlowState, params: ModelParams, path) -> None:
    Path(path).write_bytes(encode_snapshot(state, params))


def read_snapshot(path) -> FlowState:
    return read_snapshot_with_params(path)[0]


def read_snapshot_with_params(path) -> tuple[FlowState, ModelParams]:
    return decode_snapshot(Path(path).read_bytes())


def snapshot_name(step: int) -> str:
    return f"snap_{step:08d}.swfl"


def read_history(directory) -> FlowHistory:
    paths = sorted(Path(directory).glob("*.swfl"))
    if not paths:
        raise FormatError(f"no snapshot files in {directory}")
    loaded = [(*read_snapshot_with_params(p), p) for p in paths]
    loaded.sort(key=lambda item: item[0].t)
    params = loaded[0][1]
    history = FlowHistory(params)
    for state, p, path in loaded:
        if p != params:
            raise FormatError(f"{path.name}: lattice or model differs from the rest of the history")
        tail = path.stem.split("_")[-1]
        try:
            history.append(state, int(tail) if tail.isdigit() else len(history))
        except ShapeError as exc:
            raise FormatError(str(exc)) from None
    return history
