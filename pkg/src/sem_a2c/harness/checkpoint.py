"""Checkpoint file format.

Layout, all integers little-endian:

    bytes 0..7    magic  b"SEMA2CKP"
    bytes 8..11   format version, uint32 (currently 1)
    bytes 12..19  manifest length in bytes, uint64
    manifest      UTF-8 JSON: parameter names/shapes/offsets, the task-id
                  table, model name and architecture sizes, a config echo
                  and the training seed
    payload       raw float32 little-endian parameter data, row-major,
                  at the byte offsets recorded in the manifest

Parameters are serialized sorted by name and the manifest is dumped with
sorted keys, so save -> load -> save reproduces the file byte for byte.
The payload is explicitly '<f4': files move across platforms unchanged.
"""

import dataclasses
import json
import struct

import numpy as np

from ..env import TaskId
from ..models import ModelConfig, make_model
from ..nn import Parameter

MAGIC = b"SEMA2CKP"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def _manifest_doc(params, model_name, model_cfg, config_echo, seed):
    entries = []
    offset = 0
    for name in sorted(params):
        p = params[name]
        entries.append({
            "name": name,
            "shape": list(p.shape),
            "offset": offset,
            "frozen": bool(p.frozen),
        })
        offset += p.size * 4
    return {
        "params": entries,
        "payload_bytes": offset,
        "model": model_name,
        "model_config": dataclasses.asdict(model_cfg),
        "task_table": {t.name.lower(): int(t) for t in TaskId},
        "config": config_echo,
        "seed": seed,
    }


def save_checkpoint(path, params, model_name, model_cfg, config_echo=None, seed=None):
    doc = _manifest_doc(params, model_name, model_cfg, config_echo, seed)
    manifest = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", len(manifest)))
        fh.write(manifest)
        for name in sorted(params):
            value = np.ascontiguousarray(params[name].value, dtype="<f4")
            fh.write(value.tobytes())
    return doc


def load_checkpoint(path):
    """Read a checkpoint; returns (params, manifest). Verifies integrity
    before building anything, so a truncated file loads nothing."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 20 or blob[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file (bad magic)")
    (version,) = struct.unpack_from("<I", blob, 8)
    if version != VERSION:
        raise CheckpointError(
            f"{path}: unsupported checkpoint version {version} (expected {VERSION})")
    (mlen,) = struct.unpack_from("<Q", blob, 12)
    header_end = 20 + mlen
    if len(blob) < header_end:
        raise CheckpointError(f"{path}: truncated manifest")
    manifest = json.loads(blob[20:header_end].decode())
    payload = blob[header_end:]
    if len(payload) != manifest["payload_bytes"]:
        raise CheckpointError(
            f"{path}: payload is {len(payload)} bytes, manifest expects "
            f"{manifest['payload_bytes']}")
    params = {}
    for entry in manifest["params"]:
        n = int(np.prod(entry["shape"])) if entry["shape"] else 1
        flat = np.frombuffer(payload, dtype="<f4", count=n, offset=entry["offset"])
        p = Parameter(flat.reshape(entry["shape"]).copy(), frozen=entry["frozen"])
        params[entry["name"]] = p
    return params, manifest


def load_net(path, dtype=np.float32):
    """Rebuild the model a checkpoint was saved from and load its weights."""
    params, manifest = load_checkpoint(path)
    cfg = ModelConfig(**manifest["model_config"])
    net = make_model(manifest["model"], cfg, dtype=dtype)
    missing = set(net.params) ^ set(params)
    if missing:
        raise CheckpointError(f"{path}: parameter name mismatch: {sorted(missing)}")
    for name, p in net.params.items():
        saved = params[name]
        if tuple(saved.shape) != tuple(p.shape):
            raise CheckpointError(
                f"{path}: {name} has shape {saved.shape}, model expects {p.shape}")
        p.value[...] = saved.value.astype(dtype)
        p.frozen = saved.frozen
    return net, manifest
