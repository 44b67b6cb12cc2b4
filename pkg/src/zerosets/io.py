"""Zero-set files, config files and atomic report writing.

Zero-set files are UTF-8, either CSV with a ``re,im`` header or a JSON
array of ``[re, im]`` pairs.

Config files are INI.  Sections flatten to dotted keys, so

    [zeroset]
    generator = integer_lattice
    n = 40000

is the same as ``zeroset.generator = integer_lattice`` and ``zeroset.n =
40000`` in the flat schema that command-line overrides use.  Keys of the
``[experiment]`` section are top level (``scenario``, ``seed``, ...).
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .errors import ConfigError, ParseError
from .zero_model import ZeroSequence, validate_sequence

TOP_SECTION = "experiment"


def ingest_zeroset(path) -> ZeroSequence:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read zero-set file: {e.strerror}", None, str(path)) from e
    if path.suffix.lower() == ".json" or text.lstrip().startswith("["):
        return validate_sequence(_parse_json(text, path))
    return validate_sequence(_parse_csv(text, path))


def _parse_csv(text: str, path: Path) -> list[tuple[float, float]]:
    rows = csv.reader(io.StringIO(text))
    out = []
    header_seen = False
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
            continue
        if not header_seen:
            if [c.strip().lower() for c in row] != ["re", "im"]:
                raise ParseError("expected header 're,im'", lineno, str(path))
            header_seen = True
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", lineno, str(path))
        try:
            out.append((float(row[0]), float(row[1])))
        except ValueError:
            raise ParseError(f"not a number: {','.join(row)!r}", lineno, str(path)) from None
    if not header_seen:
        raise ParseError("empty zero-set file", 1, str(path))
    return out


def _parse_json(text: str, path: Path) -> list[tuple[float, float]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, str(path)) from None
    if not isinstance(data, list):
        raise ParseError("expected a JSON array of [re, im] pairs", 1, str(path))
    out = []
    for i, item in enumerate(data):
        ok = isinstance(item, list) and len(item) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)
        if not ok:
            raise ParseError(f"entry {i} is not an [re, im] pair", _json_line(text, i),
                             str(path))
        out.append((float(item[0]), float(item[1])))
    return out


def _json_line(text: str, index: int) -> int:
    # line of the index-th element of the top-level array
    dec = json.JSONDecoder()
    pos = text.index("[") + 1
    for _ in range(index + 1):
        while text[pos] in " \t\r\n,":
            pos += 1
        start = pos
        try:
            _, pos = dec.raw_decode(text, pos)
        except json.JSONDecodeError:
            break
    return text.count("\n", 0, start) + 1


def write_zeroset_csv(zs: ZeroSequence, path) -> None:
    rows = ["re,im"] + [f"{z.real!r},{z.imag!r}" for z in zs]
    atomic_write(path, "\n".join(rows) + "\n")


# --- config ----------------------------------------------------------------

def load_config(path) -> dict[str, str]:
    """Read an INI file into the flat dotted-key dict."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from e
    except configparser.Error as e:
        raise ConfigError(f"malformed config {path}: {e}") from e
    flat: dict[str, str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            name = key if section == TOP_SECTION else f"{section}.{key}"
            flat[name] = value
    return flat


# --- output ----------------------------------------------------------------

def atomic_write(path, text: str) -> None:
    """Write ``text`` next to ``path`` and rename over it."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as e:
        raise OSError(e.errno, f"writing {path}: {e.strerror}") from e


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
