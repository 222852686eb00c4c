"""Pajek .net / .vec / .clu files.

Output is canonical: UTF-8, ``\\n`` line endings, labels always double-quoted,
numbers with at most six significant digits in plain positional notation.
Writing what was read reproduces the file byte for byte.
"""

from __future__ import annotations

import os
import re
from decimal import Decimal
from typing import Sequence

from rankgroup.errors import NegativeVector, ParseFailure
from rankgroup.netbuild import StatNetwork

SUFFIX = {"z": "", "w": "_w", "overlap": "_o"}


def format_value(value: float) -> str:
    """Six significant digits, no exponent: 1.211, 0.0000001, 12000000."""
    value = float(value)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"cannot write non-finite value {value}")
    text = format(Decimal(f"{value:.6g}"), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _quote(label: str) -> str:
    if '"' in label or "\n" in label or "\r" in label:
        raise ValueError(f"label cannot be written to Pajek: {label!r}")
    return f'"{label}"'


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def net_text(network: StatNetwork) -> str:
    lines = [f"*Vertices {network.n}"]
    lines += [f"{k} {_quote(label)}" for k, label in enumerate(network.nodes, start=1)]
    lines.append("*Edges")
    lines += [f"{i + 1} {j + 1} {format_value(v)}" for i, j, v in network.edges]
    return "\n".join(lines) + "\n"


def write_net(network: StatNetwork, path) -> None:
    _write_text(path, net_text(network))


def write_vec(values: Sequence[float], path, n_vertices: int | None = None) -> None:
    if n_vertices is not None and len(values) != n_vertices:
        raise ValueError(f"{len(values)} values for {n_vertices} vertices")
    if any(v < 0 for v in values):
        raise NegativeVector("vector values must be clamped to >= 0 before writing")
    _write_text(path, "\n".join([f"*Vertices {len(values)}", *map(format_value, values)]) + "\n")


def write_clu(classes: Sequence[int], path, n_vertices: int | None = None) -> None:
    if n_vertices is not None and len(classes) != n_vertices:
        raise ValueError(f"{len(classes)} classes for {n_vertices} vertices")
    _write_text(path, "\n".join([f"*Vertices {len(classes)}", *(str(int(c)) for c in classes)]) + "\n")


_VERTEX = re.compile(r'^\s*(\d+)\s*(?:"([^"]*)"|(\S+))?')


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8-sig") as fh:
        return fh.read().splitlines()


def _header(lines: list[str], path) -> tuple[int, int]:
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        parts = text.split()
        if parts[0].lower() != "*vertices" or len(parts) < 2:
            raise ParseFailure(lineno, f"expected '*Vertices N' in {path}")
        try:
            return int(parts[1]), lineno
        except ValueError:
            raise ParseFailure(lineno, f"vertex count is not an integer: {parts[1]!r}") from None
    raise ParseFailure(len(lines) + 1, f"no '*Vertices' header in {path}")


def read_net(path) -> StatNetwork:
    """Read vertices and valued lines; ``*Arcs`` are symmetrized keeping the larger value."""
    lines = _read_lines(path)
    n, lineno = _header(lines, path)
    labels = [str(k) for k in range(1, n + 1)]
    section = "vertices"
    values: dict[tuple[int, int], float] = {}
    seen_vertices = 0

    for lineno, line in enumerate(lines[lineno:], start=lineno + 1):
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        if text.startswith("*"):
            head = text.split()[0].lower()
            if head not in ("*edges", "*arcs"):
                raise ParseFailure(lineno, f"unsupported section {head!r}")
            section = head[1:]
            continue
        if section == "vertices":
            m = _VERTEX.match(text)
            if not m:
                raise ParseFailure(lineno, f"malformed vertex line: {text!r}")
            k = int(m.group(1))
            if not 1 <= k <= n:
                raise ParseFailure(lineno, f"vertex id {k} out of range 1..{n}")
            labels[k - 1] = m.group(2) if m.group(2) is not None else (m.group(3) or str(k))
            seen_vertices += 1
            continue
        parts = text.split()
        try:
            i, j = int(parts[0]), int(parts[1])
            value = float(parts[2]) if len(parts) > 2 else 1.0
        except (ValueError, IndexError):
            raise ParseFailure(lineno, f"malformed line: {text!r}") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseFailure(lineno, f"line endpoint out of range 1..{n}: {text!r}")
        if i == j:
            continue
        key = (min(i, j) - 1, max(i, j) - 1)
        values[key] = max(values.get(key, value), value)

    if section == "vertices" and seen_vertices < n:
        raise ParseFailure(len(lines), f"file ends after {seen_vertices} of {n} vertices")
    edges = tuple((i, j, v) for (i, j), v in sorted(values.items()))
    return StatNetwork(tuple(labels), edges, "external")


def _read_column(path, cast):
    lines = _read_lines(path)
    n, lineno = _header(lines, path)
    out = []
    for lineno, line in enumerate(lines[lineno:], start=lineno + 1):
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        try:
            out.append(cast(text.split()[0]))
        except ValueError:
            raise ParseFailure(lineno, f"not a number: {text!r}") from None
    if len(out) != n:
        raise ParseFailure(len(lines), f"expected {n} values, found {len(out)}")
    return out


def read_vec(path) -> list[float]:
    return _read_column(path, float)


def read_clu(path) -> list[int]:
    return _read_column(path, int)


def bundle_names(scope: str, criterion: str = "z", slugify: bool = False) -> dict[str, str]:
    """File names for one scope: the criterion's network plus the shared .vec and .clu."""
    if not scope:
        raise ValueError("scope must be non-empty")
    if criterion not in SUFFIX:
        raise ValueError(f"unknown criterion {criterion!r}")
    root = re.sub(r"\s+", "_", scope) if slugify else scope
    return {
        "net": f"{root}{SUFFIX[criterion]}.net",
        "vec": f"{root}.vec",
        "clu": f"{root}.clu",
    }


def write_bundle(networks: dict[str, StatNetwork], directory, scope: str, slugify: bool = False) -> list[str]:
    """Write every criterion network of a scope plus its .vec/.clu; returns written paths."""
    written = []
    annotated = None
    for criterion in ("z", "w", "overlap"):
        net = networks.get(criterion)
        if net is None:
            continue
        path = os.path.join(directory, bundle_names(scope, criterion, slugify)["net"])
        write_net(net, path)
        written.append(path)
        annotated = annotated or net
    if annotated is not None and annotated.baseline_vec is not None:
        names = bundle_names(scope, "z", slugify)
        vec_path = os.path.join(directory, names["vec"])
        clu_path = os.path.join(directory, names["clu"])
        write_vec(annotated.baseline_vec, vec_path, annotated.n)
        write_clu(annotated.sign_partition, clu_path, annotated.n)
        written += [vec_path, clu_path]
    return written
