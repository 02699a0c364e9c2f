"""Model file format: one JSON header line, then raw little-endian float32.

Layout: the first line is a JSON object {"format", "version", "endianness",
"spec"} terminated by a newline; the remainder is the concatenation of each
parameterized layer's weight tensor followed by its bias, row-major, as
little-endian IEEE-754 float32. Loading promotes back to float64, so a
save/load round trip is value-exact at 32-bit precision.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .network import Network, NetworkSpec

FORMAT_NAME = "driveuq-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def save_model(net: Network, path) -> None:
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "endianness": "little",
        "spec": net.spec.to_dict(),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for i in net.spec.param_layer_indices():
            fh.write(np.ascontiguousarray(net.weights[i]["w"], dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(net.weights[i]["b"], dtype="<f4").tobytes())


def load_model(path) -> Network:
    path = Path(path)
    with open(path, "rb") as fh:
        header_line = fh.readline()
        blob = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: bad header: {exc}") from exc
    if header.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path}: not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {header.get('version')!r}")
    if header.get("endianness") != "little":
        raise ModelFormatError(f"{path}: unsupported endianness {header.get('endianness')!r}")
    spec = NetworkSpec.from_dict(header["spec"])

    shapes = []
    for i in spec.param_layer_indices():
        ls = spec.layers[i]
        if ls.kind == "convolution":
            in_c = spec.layer_input_shape(i)[2]
            shapes.append(((ls.kernel, ls.kernel, in_c, ls.filters), (ls.filters,)))
        else:
            shapes.append(((spec.layer_input_shape(i)[0], ls.units), (ls.units,)))
    expected = sum(int(np.prod(w)) + int(np.prod(b)) for w, b in shapes) * 4
    if len(blob) != expected:
        raise ModelFormatError(
            f"{path}: expected {expected} weight bytes, got {len(blob)} (truncated or corrupt)")

    flat = np.frombuffer(blob, dtype="<f4")
    weights: list[dict] = []
    pos = 0
    it = iter(shapes)
    for ls in spec.layers:
        if ls.kind not in ("convolution", "dense"):
            weights.append({})
            continue
        w_shape, b_shape = next(it)
        w_n, b_n = int(np.prod(w_shape)), int(np.prod(b_shape))
        w = flat[pos:pos + w_n].reshape(w_shape).astype(np.float64)
        pos += w_n
        b = flat[pos:pos + b_n].reshape(b_shape).astype(np.float64)
        pos += b_n
        weights.append({"w": w, "b": b})
    return Network(spec, weights)
