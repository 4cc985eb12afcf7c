"""Byte-reproducible agent checkpoints.

A checkpoint is an uncompressed zip of ``.npy`` members (readable with
``numpy.load``). Members are written in sorted name order with a fixed
timestamp, so equal agent states give identical files. Every file carries
``schema_version`` and ``agent_kind`` members.
"""
from __future__ import annotations

import io
import zipfile
from pathlib import Path

import numpy as np

CHECKPOINT_VERSION = 1
_EPOCH = (1980, 1, 1, 0, 0, 0)


def save_arrays(path: str | Path, arrays: dict[str, np.ndarray]) -> None:
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name in sorted(arrays):
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.asarray(arrays[name]), allow_pickle=False)
            info = zipfile.ZipInfo(f"{name}.npy", date_time=_EPOCH)
            info.external_attr = 0o644 << 16
            zf.writestr(info, buf.getvalue())


def load_arrays(path: str | Path) -> dict[str, np.ndarray]:
    with np.load(path, allow_pickle=False) as data:
        return {k: data[k] for k in data.files}


def save_agent(path: str | Path, agent) -> None:
    arrays = dict(agent.state_arrays())
    arrays["schema_version"] = np.array(CHECKPOINT_VERSION)
    arrays["agent_kind"] = np.array(agent.kind)
    save_arrays(path, arrays)


def load_agent(path: str | Path, agent) -> None:
    arrays = load_arrays(path)
    version = int(arrays.get("schema_version", -1))
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint schema_version {version}")
    if str(arrays["agent_kind"]) != agent.kind:
        raise ValueError(f"checkpoint holds a {arrays['agent_kind']} agent, not {agent.kind}")
    agent.load_arrays(arrays)
