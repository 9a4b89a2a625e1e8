"""Touchstone v1 (.s1p/.s2p) reading and writing.

Supports S-parameters only, frequency units Hz/kHz/MHz/GHz and the RI, MA
(angle in degrees) and DB (dB magnitude, angle in degrees) formats.  Two-port
rows follow the v1 column order S11 S21 S12 S22.  Output is deterministic:
numbers are printed with 17 significant digits and a lowercase exponent, so
identical inputs always produce byte-identical text and a write/read
round-trip reproduces every value to better than 1e-12 relative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError
from .network import SParameterSet

_UNIT_SCALE = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_UNIT_NAME = {"hz": "Hz", "khz": "kHz", "mhz": "MHz", "ghz": "GHz"}
_FORMATS = ("RI", "MA", "DB")


@dataclass(frozen=True)
class TouchstoneOptions:
    """Contents of the ``#`` option line."""

    frequency_unit: str = "GHz"
    parameter: str = "S"
    format: str = "MA"
    reference_ohms: float = 50.0


@dataclass(frozen=True)
class TouchstoneDocument:
    """Parsed document: option line, raw numeric rows, trailing comments."""

    options: TouchstoneOptions
    rows: tuple
    trailing_comments: tuple = ()


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def parse_touchstone(text: str) -> TouchstoneDocument:
    """Parse Touchstone v1 text into a document (no S conversion yet)."""
    options = None
    rows = []
    arity = None
    comments_after_data = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line, _, comment = raw.partition("!")
        comment = comment.strip()
        line = line.strip()
        if not line:
            if comment and rows:
                comments_after_data.append(comment)
            continue
        if line.startswith("#"):
            if options is not None:
                raise ParseError("multiple option lines", line=lineno)
            options = _parse_option_line(line, lineno)
            continue
        tokens = line.split()
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            raise ParseError(f"non-numeric data {line!r}", line=lineno) from None
        if arity is None:
            if len(values) not in (3, 9):
                raise ParseError(
                    f"expected 3 (one-port) or 9 (two-port) columns, got {len(values)}",
                    line=lineno,
                )
            arity = len(values)
        elif len(values) != arity:
            raise ParseError(
                f"row has {len(values)} columns, expected {arity}", line=lineno
            )
        if rows and values[0] <= rows[-1][0]:
            raise ParseError("frequencies must be strictly increasing", line=lineno)
        rows.append(tuple(values))
        comments_after_data = [comment] if comment else []
    if options is None:
        options = TouchstoneOptions()  # v1 defaults: GHz S MA R 50
    if not rows:
        raise ParseError("no data rows found")
    return TouchstoneDocument(
        options=options, rows=tuple(rows), trailing_comments=tuple(comments_after_data)
    )


def _parse_option_line(line: str, lineno: int) -> TouchstoneOptions:
    tokens = line[1:].split()
    unit = "ghz"
    fmt = "MA"
    parameter = "S"
    reference = 50.0
    i = 0
    seen_unit = seen_fmt = seen_param = False
    while i < len(tokens):
        tok = tokens[i].lower()
        if tok in _UNIT_SCALE and not seen_unit:
            unit, seen_unit = tok, True
        elif tok.upper() in _FORMATS and not seen_fmt:
            fmt, seen_fmt = tok.upper(), True
        elif tok.upper() in ("S", "Y", "Z", "G", "H") and not seen_param:
            parameter, seen_param = tok.upper(), True
            if parameter != "S":
                raise ParseError(
                    f"only S-parameters are supported, got {parameter}", line=lineno
                )
        elif tok == "r":
            if i + 1 >= len(tokens):
                raise ParseError("option R needs a resistance value", line=lineno)
            try:
                reference = float(tokens[i + 1])
            except ValueError:
                raise ParseError(
                    f"bad reference resistance {tokens[i + 1]!r}", line=lineno
                ) from None
            if reference <= 0:
                raise ParseError("reference resistance must be > 0", line=lineno)
            i += 1
        else:
            raise ParseError(f"unrecognized option token {tokens[i]!r}", line=lineno)
        i += 1
    return TouchstoneOptions(
        frequency_unit=_UNIT_NAME[unit],
        parameter=parameter,
        format=fmt,
        reference_ohms=reference,
    )


def _pair_to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    phase = np.deg2rad(b)
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    return mag * np.exp(1j * phase)


def _complex_to_pair(s: np.ndarray, fmt: str) -> tuple[np.ndarray, np.ndarray]:
    if fmt == "RI":
        return s.real, s.imag
    angle = np.rad2deg(np.angle(s))
    if fmt == "MA":
        return np.abs(s), angle
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.abs(s)), angle


def document_to_sparameters(doc: TouchstoneDocument) -> SParameterSet:
    """Convert a parsed document to an :class:`SParameterSet`."""
    rows = np.asarray(doc.rows, dtype=float)
    scale = _UNIT_SCALE[doc.options.frequency_unit.lower()]
    grid = rows[:, 0] * scale
    fmt = doc.options.format
    n = rows.shape[0]
    if rows.shape[1] == 3:
        data = _pair_to_complex(rows[:, 1], rows[:, 2], fmt).reshape(n, 1, 1)
    else:
        data = np.empty((n, 2, 2), dtype=complex)
        # v1 two-port column order: S11 S21 S12 S22
        data[:, 0, 0] = _pair_to_complex(rows[:, 1], rows[:, 2], fmt)
        data[:, 1, 0] = _pair_to_complex(rows[:, 3], rows[:, 4], fmt)
        data[:, 0, 1] = _pair_to_complex(rows[:, 5], rows[:, 6], fmt)
        data[:, 1, 1] = _pair_to_complex(rows[:, 7], rows[:, 8], fmt)
    return SParameterSet(grid, data, doc.options.reference_ohms)


def read_touchstone(text) -> SParameterSet:
    """Parse Touchstone v1 text (str or UTF-8 bytes) into S-parameters."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return document_to_sparameters(parse_touchstone(text))


def write_touchstone(sparams: SParameterSet, format: str = "RI", frequency_unit: str = "GHz") -> str:
    """Serialize S-parameters as deterministic Touchstone v1 text."""
    fmt = format.upper()
    if fmt not in _FORMATS:
        raise DomainError(f"format must be one of {_FORMATS}, got {format!r}")
    unit = frequency_unit.lower()
    if unit not in _UNIT_SCALE:
        raise DomainError(f"unknown frequency unit {frequency_unit!r}")
    scale = _UNIT_SCALE[unit]
    z0 = sparams.reference_impedance
    lines = [f"# {_UNIT_NAME[unit]} S {fmt} R {_fmt(z0)}"]
    freqs = sparams.grid / scale
    if sparams.ports == 1:
        pairs = [_complex_to_pair(sparams.data[:, 0, 0], fmt)]
    else:
        pairs = [
            _complex_to_pair(sparams.data[:, 0, 0], fmt),
            _complex_to_pair(sparams.data[:, 1, 0], fmt),
            _complex_to_pair(sparams.data[:, 0, 1], fmt),
            _complex_to_pair(sparams.data[:, 1, 1], fmt),
        ]
    for k in range(freqs.size):
        cells = [_fmt(freqs[k])]
        for a, b in pairs:
            cells.append(_fmt(float(a[k])))
            cells.append(_fmt(float(b[k])))
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"
