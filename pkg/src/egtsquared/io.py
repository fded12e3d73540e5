"""Game and system files, trajectory CSVs and output headers.

Game and system documents are JSON, optionally preceded by ``#`` comment
lines. Every file this module writes starts with one such comment line
recording the tool version, the command and its parameters.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import Trajectory
from .game import EdgeGame, GameError, PolymatrixGame, SelfLoop
from .reduction import Coupling, TimeEvolvingSystem

FLOAT_FMT = "%.17g"


class FormatError(ValueError):
    """A document that could not be parsed; carries file, line and field path."""

    def __init__(self, message, path=None, line=None, field=None):
        where = str(path) if path is not None else "<input>"
        if line is not None:
            where += f":{line}"
        if field:
            where += f" [{field}]"
        super().__init__(f"{where}: {message}")
        self.path, self.line, self.field = path, line, field


def header_line(command: str, params: dict) -> str:
    """Deterministic header comment (sorted keys, no timestamps)."""
    return f"# egtsquared {__version__} {command} " + json.dumps(params, sort_keys=True, default=str)


def parse_header(line: str) -> dict:
    """Recover the parameter dict from a ``header_line``; empty if the line is foreign."""
    parts = line.lstrip("#").split(None, 3)
    if len(parts) == 4 and parts[0] == "egtsquared":
        try:
            return json.loads(parts[3])
        except json.JSONDecodeError:
            pass
    return {}


# -- JSON with positions -------------------------------------------------------

_WS = " \t\n\r"


def _locate(text: str) -> dict[tuple, int]:
    """Map each field path (tuple of keys / indices) to the offset where its value starts."""
    dec = json.JSONDecoder()
    where: dict[tuple, int] = {}

    def skip(k):
        while k < len(text) and text[k] in _WS:
            k += 1
        return k

    def walk(k, path):
        k = skip(k)
        where[path] = k
        if text[k] == "{":
            k = skip(k + 1)
            if text[k] == "}":
                return k + 1
            while True:
                key, k = dec.raw_decode(text, skip(k))
                k = skip(k) + 1  # ':'
                k = skip(walk(k, path + (key,)))
                if text[k] == "}":
                    return k + 1
                k += 1
        if text[k] == "[":
            k = skip(k + 1)
            if text[k] == "]":
                return k + 1
            idx = 0
            while True:
                k = skip(walk(k, path + (idx,)))
                idx += 1
                if text[k] == "]":
                    return k + 1
                k += 1
        return dec.raw_decode(text, k)[1]

    walk(0, ())
    return where


class _Doc:
    """Parsed document plus enough bookkeeping to point errors at lines."""

    def __init__(self, text: str, path):
        self.path = path
        # comment lines become blank so line numbers stay true
        lines = text.split("\n")
        lines = ["" if ln.lstrip().startswith("#") else ln for ln in lines]
        self.text = "\n".join(lines)
        try:
            self.data = json.loads(self.text)
        except json.JSONDecodeError as exc:
            raise FormatError(exc.msg, path, exc.lineno) from None
        self._pos = _locate(self.text)

    def line(self, field_path):
        fp = tuple(field_path)
        while fp not in self._pos and fp:
            fp = fp[:-1]
        return self.text.count("\n", 0, self._pos.get(fp, 0)) + 1

    def fail(self, msg, field_path):
        name = ".".join(str(p) if isinstance(p, str) else f"[{p}]" for p in field_path).replace(".[", "[")
        raise FormatError(msg, self.path, self.line(field_path), name or None)

    def get(self, obj, key, fp, kind, optional=False):
        if not isinstance(obj, dict):
            self.fail("expected an object", fp)
        if key not in obj:
            if optional:
                return None
            self.fail(f"missing field '{key}'", fp)
        value = obj[key]
        fp = fp + (key,)
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                self.fail("expected an integer", fp)
        elif kind == "list":
            if not isinstance(value, list):
                self.fail("expected a list", fp)
        elif kind == "matrix":
            return self.matrix(value, fp)
        elif kind == "vector":
            if not isinstance(value, list) or not all(_is_num(v) for v in value):
                self.fail("expected a list of numbers", fp)
            return [float(v) for v in value]
        return value

    def matrix(self, value, fp):
        if not isinstance(value, list) or not value:
            self.fail("expected a non-empty list of rows", fp)
        for r, row in enumerate(value):
            if not isinstance(row, list):
                self.fail("expected a row (list of numbers)", fp + (r,))
            for c, v in enumerate(row):
                if not _is_num(v):
                    self.fail("expected a number", fp + (r, c))
            if len(row) != len(value[0]):
                self.fail("ragged matrix", fp + (r,))
        return np.array(value, dtype=float)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


# -- games ---------------------------------------------------------------------

def parse_game(text: str, path=None) -> PolymatrixGame:
    doc = _Doc(text, path)
    root = doc.data
    if not isinstance(root, dict):
        doc.fail("top level must be an object", ())
    players = doc.get(root, "players", (), "list")
    counts = [doc.get(p, "actions", ("players", k), "int") for k, p in enumerate(players)]
    edges = []
    for k, e in enumerate(doc.get(root, "edges", (), "list", optional=True) or []):
        fp = ("edges", k)
        edges.append((fp, doc.get(e, "i", fp, "int"), doc.get(e, "j", fp, "int"),
                      doc.get(e, "A_ij", fp, "matrix"), doc.get(e, "A_ji", fp, "matrix")))
    loops = []
    for k, s in enumerate(doc.get(root, "self_loops", (), "list", optional=True) or []):
        fp = ("self_loops", k)
        loops.append((fp, doc.get(s, "i", fp, "int"), doc.get(s, "A", fp, "matrix")))
    eta = doc.get(root, "eta", (), "vector", optional=True)
    # structural errors from the model are re-anchored at the offending entry
    try:
        game = PolymatrixGame(tuple(counts), tuple(EdgeGame(i, j, a, b) for _, i, j, a, b in edges),
                              tuple(SelfLoop(i, A) for _, i, A in loops), eta,
                              name=Path(path).stem if path else "")
    except GameError as exc:
        _reanchor(doc, exc, edges, loops)
    return game


def _reanchor(doc, exc, edges, loops):
    msg = str(exc)
    for fp, i, j, *_ in edges:
        if msg.startswith(f"edge ({i},{j})"):
            doc.fail(msg, fp)
    for fp, i, _ in loops:
        if msg.startswith(f"self-loop {i}"):
            doc.fail(msg, fp)
    doc.fail(msg, ("eta",) if msg.startswith("eta") else ())


def load_game(path) -> PolymatrixGame:
    return parse_game(_read_text(path), path)


def _row(v):
    return json.dumps([float(a) + 0.0 for a in np.asarray(v).ravel()])  # + 0.0 drops negative zeros


def _mat(A):
    return "[" + ", ".join(_row(r) for r in np.asarray(A)) + "]"


def _list_block(name, items, last=False):
    if not items:
        return [f'  "{name}": []' + ("" if last else ",")]
    out = [f'  "{name}": [']
    out += ["    " + it + ("," if k < len(items) - 1 else "") for k, it in enumerate(items)]
    out.append("  ]" + ("" if last else ","))
    return out


def format_game(game: PolymatrixGame) -> str:
    lines = ["{"]
    lines += _list_block("players", [f'{{"actions": {n}}}' for n in game.action_counts])
    lines += _list_block("edges", [
        f'{{"i": {e.i}, "j": {e.j}, "A_ij": {_mat(e.A_ij)}, "A_ji": {_mat(e.A_ji)}}}' for e in game.edges])
    lines += _list_block("self_loops", [f'{{"i": {s.i}, "A": {_mat(s.A)}}}' for s in game.self_loops])
    lines.append(f'  "eta": {_row(game.eta)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_game(game: PolymatrixGame, path, header: str | None = None):
    _write(path, format_game(game), header)


# -- time-evolving systems -----------------------------------------------------

def parse_system(text: str, path=None) -> TimeEvolvingSystem:
    doc = _Doc(text, path)
    root = doc.data
    if not isinstance(root, dict):
        doc.fail("top level must be an object", ())
    n = doc.get(root, "n", (), "int")
    pops = [doc.get(p, "P", ("populations", k), "matrix")
            for k, p in enumerate(doc.get(root, "populations", (), "list"))]
    n_env = doc.get(root, "environments", (), "int")
    couplings = []
    for k, c in enumerate(doc.get(root, "couplings", (), "list")):
        fp = ("couplings", k)
        couplings.append((fp, Coupling(doc.get(c, "pop", fp, "int"), doc.get(c, "env", fp, "int"),
                                       doc.get(c, "A_pop_env", fp, "matrix"),
                                       doc.get(c, "A_env_pop", fp, "matrix"))))
    eta = doc.get(root, "eta", (), "vector", optional=True)
    try:
        return TimeEvolvingSystem(n, tuple(pops), n_env, tuple(c for _, c in couplings),
                                  tuple(eta) if eta is not None else None)
    except GameError as exc:
        msg = str(exc)
        for fp, c in couplings:
            if msg.startswith(f"coupling ({c.pop},{c.env})"):
                doc.fail(msg, fp)
        if msg.startswith("population "):
            doc.fail(msg, ("populations", int(msg.split()[1].rstrip(":"))))
        doc.fail(msg, ("eta",) if msg.startswith("eta") else ())


def load_system(path) -> TimeEvolvingSystem:
    return parse_system(_read_text(path), path)


def format_system(system: TimeEvolvingSystem) -> str:
    lines = ["{", f'  "n": {system.n},']
    lines += _list_block("populations", [f'{{"P": {_mat(P)}}}' for P in system.populations])
    lines.append(f'  "environments": {system.environments},')
    lines += _list_block("couplings", [
        f'{{"pop": {c.pop}, "env": {c.env}, "A_pop_env": {_mat(c.A_pop_env)}, '
        f'"A_env_pop": {_mat(c.A_env_pop)}}}' for c in system.couplings], last=system.eta is None)
    if system.eta is not None:
        lines.append(f'  "eta": {_row(system.eta)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_system(system: TimeEvolvingSystem, path, header: str | None = None):
    _write(path, format_system(system), header)


# -- CSV -----------------------------------------------------------------------

def _write(path, body: str, header: str | None):
    text = (header + "\n" if header else "") + body
    if str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def format_csv(columns, rows, header: str | None = None) -> str:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    out = [header] if header else []
    out.append(",".join(columns))
    out += [",".join(FLOAT_FMT % v for v in r) for r in rows]
    return "\n".join(out) + "\n"


def write_csv(path, columns, rows, header: str | None = None):
    Path(path).write_text(format_csv(columns, rows, header), encoding="utf-8")


def state_columns(action_counts) -> list[str]:
    return [f"x_{i}_{a}" for i, n in enumerate(action_counts) for a in range(n)]


def write_trajectory(path, traj: Trajectory, header: str | None = None):
    if traj.states.ndim != 2:
        raise ValueError("write one orbit at a time; use Trajectory.member for batches")
    rows = np.column_stack([traj.times, traj.states])
    write_csv(path, ["t"] + state_columns(traj.action_counts), rows, header)


def read_trajectory(path) -> Trajectory:
    """Inverse of ``write_trajectory``. Step and method come from the header when present."""
    text = _read_text(path)
    lines = text.splitlines()
    params = {}
    body_start = 0
    while body_start < len(lines) and lines[body_start].startswith("#"):
        params = params or parse_header(lines[body_start])
        body_start += 1
    if body_start >= len(lines):
        raise FormatError("no header row", path, body_start + 1)
    cols = lines[body_start].split(",")
    if cols[0] != "t":
        raise FormatError("first column must be 't'", path, body_start + 1, "t")
    counts = []
    for c in cols[1:]:
        parts = c.split("_")
        if len(parts) != 3 or parts[0] != "x" or not (parts[1].isdigit() and parts[2].isdigit()):
            raise FormatError(f"bad column name {c!r}", path, body_start + 1, c)
        i, a = int(parts[1]), int(parts[2])
        if i == len(counts) and a == 0:
            counts.append(1)
        elif i == len(counts) - 1 and a == counts[-1]:
            counts[-1] += 1
        else:
            raise FormatError(f"column {c!r} out of player-major order", path, body_start + 1, c)
    rows = []
    for k, ln in enumerate(lines[body_start + 1:], start=body_start + 2):
        if not ln.strip():
            continue
        try:
            vals = [float(v) for v in ln.split(",")]
        except ValueError:
            raise FormatError("non-numeric entry", path, k) from None
        if len(vals) != len(cols):
            raise FormatError(f"expected {len(cols)} values, got {len(vals)}", path, k)
        rows.append(vals)
    if not rows:
        raise FormatError("trajectory has no samples", path, body_start + 2)
    data = np.array(rows)
    times = data[:, 0]
    step = float(params.get("step", times[1] - times[0] if len(times) > 1 else 0.0))
    return Trajectory(times, data[:, 1:], step, str(params.get("method", "unknown")), tuple(counts))
