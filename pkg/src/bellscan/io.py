"""Reading and writing event files, scan tables and p-value histograms.

All formats are ASCII CSV with LF line endings. Undefined statistics are empty
cells; reals carry six significant digits.
"""

from __future__ import annotations

import io
import json
import math
from typing import BinaryIO, Iterable, Optional, Union

from .model import CandidateEvent, DomainError, ScanResult, StatWithSigma, validate_event
from .stats import p_two_tailed

EVENT_HEADER = "run_id,sync_index,click1_ps,click2_ps,clean_attempts,a,b,x,y"
EVENT_FIELDS = EVENT_HEADER.split(",")

SCAN_HEADER = (
    "start_offset_ps,invalid_threshold,N,S_chsh,sigma_chsh,p_chsh_gauss,p_chsh_binom,"
    "S_AB0,sig_AB0,S_AB1,sig_AB1,S_BA0,sig_BA0,S_BA1,sig_BA1,chi2,p_chi2"
)
SCAN_FIELDS = SCAN_HEADER.split(",")

HISTOGRAM_HEADER = "bin_low,count"


class EventParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class HeaderError(EventParseError):
    pass


Source = Union[bytes, str, BinaryIO]


def _read_text(source: Source) -> str:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise EventParseError(data[:exc.start].count(b"\n") + 1, "non-ASCII byte in input") from None


def _lines(text: str):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, 1):
        yield lineno, line.rstrip("\r")


def _parse_int(token: str) -> int:
    body = token[1:] if token[:1] in "+-" else token
    if not body.isdigit() or not body.isascii():
        raise ValueError(token)
    return int(token)


def read_events(source: Source) -> list:
    """Parse an event file; every record goes through ``validate_event``."""
    events = []
    header_seen = False
    for lineno, line in _lines(_read_text(source)):
        if not header_seen:
            if line.strip() != EVENT_HEADER:
                raise HeaderError(lineno, f"expected header {EVENT_HEADER!r}, got {line!r}")
            header_seen = True
            continue
        if not line.strip():
            continue
        tokens = line.split(",")
        if len(tokens) != len(EVENT_FIELDS):
            raise EventParseError(lineno, f"expected {len(EVENT_FIELDS)} fields, got {len(tokens)}")
        values = []
        for name, token in zip(EVENT_FIELDS, tokens):
            try:
                values.append(_parse_int(token.strip()))
            except ValueError:
                raise EventParseError(lineno, f"field {name}: not an integer: {token!r}") from None
        try:
            events.append(validate_event(*values))
        except DomainError as exc:
            raise EventParseError(lineno, str(exc)) from exc
    if not header_seen:
        raise HeaderError(1, "missing header line")
    return events


def _sign(v: int) -> str:
    return "+1" if v == 1 else "-1"


def format_events(events: Iterable[CandidateEvent]) -> bytes:
    out = [EVENT_HEADER]
    for e in events:
        out.append(
            f"{e.run_id},{e.sync_index},{e.click1_ps},{e.click2_ps},{e.clean_attempts},"
            f"{e.setting_a},{e.setting_b},{_sign(e.outcome_x)},{_sign(e.outcome_y)}"
        )
    return ("\n".join(out) + "\n").encode("ascii")


def write_events(events: Iterable[CandidateEvent], sink: BinaryIO) -> None:
    sink.write(format_events(events))


def format_real(value: Optional[float]) -> str:
    if value is None:
        return ""
    return format(float(value), ".6g")


def scan_row(result: ScanResult) -> list:
    """Cell values of one scan row, in header order, before string formatting."""
    row = [result.start_offset_ps, result.invalid_threshold, result.sample_size]
    if result.chsh is None:
        row += [None] * 4
    else:
        row += [result.chsh.value, result.chsh.sigma, result.p_chsh_gaussian, result.p_chsh_binomial]
    if result.nosig is None:
        row += [None] * 8
    else:
        for stat in result.nosig:
            row += [stat.value, stat.sigma]
    row += [result.chi2, result.p_chi2]
    return row


def _format_row(row: list) -> str:
    cells = [str(int(v)) for v in row[:3]]
    cells += [format_real(v) for v in row[3:]]
    return ",".join(cells)


def format_scan_csv(results: Iterable[ScanResult]) -> bytes:
    lines = [SCAN_HEADER] + [_format_row(scan_row(r)) for r in results]
    return ("\n".join(lines) + "\n").encode("ascii")


def write_scan_csv(results: Iterable[ScanResult], sink: BinaryIO) -> None:
    sink.write(format_scan_csv(results))


def scan_record(result: ScanResult) -> dict:
    """The scan row as a mapping keyed by column name, rounded exactly as in
    the CSV; undefined cells are None."""
    row = scan_row(result)
    record = dict(zip(SCAN_FIELDS[:3], (int(v) for v in row[:3])))
    for name, v in zip(SCAN_FIELDS[3:], row[3:]):
        record[name] = None if v is None else float(format_real(v))
    return record


def format_scan_json(result: ScanResult) -> str:
    return json.dumps(scan_record(result), indent=2) + "\n"


def _stat_from_cells(value: float, sigma: float) -> StatWithSigma:
    if sigma > 0:
        z = abs(value) / sigma
        return StatWithSigma(value, sigma, z=z, p=p_two_tailed(z))
    if value == 0:
        return StatWithSigma(value, 0.0, z=0.0, p=1.0)
    return StatWithSigma(value, 0.0, z=math.inf, p=0.0, degenerate=True)


def read_scan_csv(source: Source) -> list:
    """Parse a scan table back into ScanResult values.

    Cells hold six significant digits, so derived fields (z, individual
    signalling p-values) are recomputed from the rounded values.
    """
    results = []
    header_seen = False
    for lineno, line in _lines(_read_text(source)):
        if not header_seen:
            if line.strip() != SCAN_HEADER:
                raise HeaderError(lineno, "not a scan table header")
            header_seen = True
            continue
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(SCAN_FIELDS):
            raise EventParseError(lineno, f"expected {len(SCAN_FIELDS)} cells, got {len(cells)}")
        try:
            offset, threshold, n = (_parse_int(c) for c in cells[:3])
            reals = [float(c) if c else None for c in cells[3:]]
        except ValueError:
            raise EventParseError(lineno, "malformed numeric cell") from None
        s, sig, p_gauss, p_binom = reals[:4]
        chsh = None
        if s is not None:
            dev = (s - 2.0) / sig if sig > 0 else (math.inf if s > 2 else 0.0)
            chsh = StatWithSigma(s, sig, z=max(0.0, dev), p=p_gauss, degenerate=sig == 0 and s > 2)
        nosig = None
        if reals[4] is not None:
            nosig = tuple(_stat_from_cells(reals[4 + 2 * k], reals[5 + 2 * k]) for k in range(4))
        results.append(ScanResult(
            start_offset_ps=offset,
            invalid_threshold=threshold,
            sample_size=n,
            chsh=chsh,
            nosig=nosig,
            chi2=reals[12],
            p_chi2=reals[13],
            p_chsh_gaussian=p_gauss,
            p_chsh_binomial=p_binom,
        ))
    if not header_seen:
        raise HeaderError(1, "missing header line")
    return results


def format_histogram_csv(hist) -> bytes:
    lines = [HISTOGRAM_HEADER]
    for low, count in zip(hist.bin_edges[:-1], hist.counts):
        lines.append(f"{format_real(low)},{count}")
    return ("\n".join(lines) + "\n").encode("ascii")


def write_histogram_csv(hist, sink: BinaryIO) -> None:
    sink.write(format_histogram_csv(hist))


def events_from_bytes(data: bytes) -> list:
    return read_events(io.BytesIO(data))
