"""CSV and manifest serialization with metadata headers.

All numeric columns are written with 12 significant digits in
scientific notation and LF line endings, so reruns with identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bcf import CorrelationFunction, FilteredSpectrum
from .chainmap import ChainCoefficients, DiscreteEnvironment
from .dynamics import AbsorptionSpectrum, DipoleCorrelation
from .errors import ValidationError

TOOL_VERSION = "0.1.0"


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _write(path, header_pairs, columns, names) -> None:
    path = Path(path)
    lines = [f"# {key} = {value}" for key, value in header_pairs]
    lines.append(",".join(names))
    arrays = [np.asarray(c) for c in columns]
    for row in zip(*arrays):
        lines.append(",".join(_fmt(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="\n")


def _read_metadata(lines) -> dict:
    meta = {}
    for line in lines:
        if not line.startswith("#"):
            break
        body = line.lstrip("#").strip()
        if "=" in body:
            key, _, val = body.partition("=")
            meta[key.strip()] = val.strip()
    return meta


def write_correlation_csv(path, corr: CorrelationFunction | DipoleCorrelation, extra=()) -> None:
    pairs = [("tool_version", TOOL_VERSION)]
    if isinstance(corr, CorrelationFunction):
        pairs += [
            ("kind", "correlation"),
            ("temperature_K", _fmt(corr.temperature)),
            ("label", corr.label),
            ("filter_sigma_fs", _fmt(corr.filter_sigma)),
        ]
    else:
        pairs += [
            ("kind", "dipole-correlation"),
            ("label", corr.label),
            ("window_sigma_fs", _fmt(corr.window_sigma)),
            ("n_samples", str(corr.n_samples)),
            ("seed", str(corr.seed)),
        ]
    pairs += list(extra)
    _write(
        path, pairs,
        [corr.t_fs, corr.values.real, corr.values.imag],
        ["t_fs", "re", "im"],
    )


def read_correlation_csv(path) -> CorrelationFunction:
    lines = Path(path).read_text().splitlines()
    meta = _read_metadata(lines)
    rows = [l for l in lines if l and not l.startswith("#")]
    if not rows or rows[0].split(",") != ["t_fs", "re", "im"]:
        raise ValidationError(f"{path}: expected header t_fs,re,im")
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    return CorrelationFunction(
        t_fs=data[:, 0],
        values=data[:, 1] + 1j * data[:, 2],
        temperature=float(meta.get("temperature_K", "0") or 0.0),
        label=meta.get("label", ""),
        filter_sigma=float(meta.get("filter_sigma_fs", "0") or 0.0),
    )


def write_spectrum_csv(path, spec: FilteredSpectrum | AbsorptionSpectrum, extra=()) -> None:
    pairs = [("tool_version", TOOL_VERSION)]
    if isinstance(spec, FilteredSpectrum):
        pairs += [
            ("kind", "filtered-spectrum"),
            ("label", spec.label),
            ("filter_sigma_fs", _fmt(spec.filter_sigma)),
        ]
        cols = [spec.omega_cm1, spec.values]
    else:
        pairs += [
            ("kind", "absorption-spectrum"),
            ("label", spec.label),
            ("window_sigma_fs", _fmt(spec.window_sigma)),
            ("n_samples", str(spec.n_samples)),
            ("seed", str(spec.seed)),
            ("n_clipped", str(spec.n_clipped)),
        ]
        cols = [spec.omega_cm1, spec.intensity]
    pairs += list(extra)
    _write(path, pairs, cols, ["omega_cm1", "value"])


def write_chain_csv(path, chain: ChainCoefficients, extra=()) -> None:
    pairs = [("tool_version", TOOL_VERSION), ("kind", "chain"), ("label", chain.label)]
    pairs += list(extra)
    _write(
        path, pairs,
        [np.arange(chain.length), chain.alphas, chain.betas],
        ["n", "alpha_cm1", "beta_cm2"],
    )


def write_modes_csv(path, env: DiscreteEnvironment, extra=()) -> None:
    pairs = [
        ("tool_version", TOOL_VERSION),
        ("kind", "discrete-environment"),
        ("label", env.label),
        ("chain_length", str(env.chain_length)),
        ("signed_frequencies", "true"),
    ]
    pairs += list(extra)
    _write(path, pairs, [env.omegas, env.couplings], ["omega_cm1", "g_cm1"])


def sha256_of(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record emitted next to every command's outputs."""

    command_line: list[str] = field(default_factory=lambda: list(sys.argv))
    tool_version: str = TOOL_VERSION
    inputs: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    wall_time_s: float = 0.0
    _t0: float = field(default_factory=time.monotonic, repr=False)

    def add_input(self, path) -> None:
        self.inputs[str(path)] = sha256_of(path)

    def add_output(self, path) -> None:
        self.outputs.append(str(path))

    def write(self, path) -> None:
        self.wall_time_s = time.monotonic() - self._t0
        doc = {
            "tool_version": self.tool_version,
            "command_line": self.command_line,
            "inputs_sha256": self.inputs,
            "seeds": self.seeds,
            "outputs": self.outputs,
            "wall_time_s": round(self.wall_time_s, 3),
        }
        Path(path).write_text(json.dumps(doc, indent=1) + "\n", newline="\n")
