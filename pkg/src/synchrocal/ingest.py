"""External data ingestion: calibrator CSV reports and binary data frames.

Two on-disk interfaces live here.  The calibrator CSV schema is
``n,true_mag,meas_mag,true_ang_deg,meas_ang_deg[,rel_err_pct,ang_err_deg]``
(UTF-8, '.' decimal separator, '#' comment lines); when the optional
precomputed error columns are present they must agree with the errors
recomputed from the raw columns within 1e-6.  The binary frame layout is
big-endian:

    SYNC(2, 0xAA + data-type/version byte) | FRAMESIZE(2) | IDCODE(2) |
    SOC(4) | FRACSEC(4, 8-bit quality + 24-bit fraction) | STAT(2) |
    phasor payload per FrameConfig | CHK(2, CRC-16/CCITT-FALSE)

Error-series CSV (shared with the stats CLI) is ``n,error`` plus '#'
metadata comments.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    BadCrc,
    BadLength,
    BadSync,
    IdCodeMismatch,
    InconsistentErrorColumns,
    MalformedRow,
    MissingColumn,
    ValueOutOfRange,
)
from .metrics import ErrorChannel, ErrorSeries
from .signals import wrap_degrees

CANONICAL_COLUMNS = ("n", "true_mag", "meas_mag", "true_ang_deg", "meas_ang_deg")
OPTIONAL_COLUMNS = ("rel_err_pct", "ang_err_deg")
ERROR_COLUMN_TOL = 1e-6

SYNC_BYTE = 0xAA
DATA_FRAME_TYPE_BYTE = 0x01  # type nibble 0 (data), version 1
HEADER_FMT = ">BBHHIIH"      # sync, type, framesize, idcode, soc, fracsec, stat
HEADER_SIZE = struct.calcsize(HEADER_FMT)
CRC_SIZE = 2


@dataclass
class CalibratorRecord:
    n: int
    true_mag: float
    meas_mag: float
    true_ang_deg: float
    meas_ang_deg: float
    rel_err_pct: float = None
    ang_err_deg: float = None


def _decode_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return data.decode("utf-8")
    return data


def parse_calibrator_csv(data, column_map: dict = None) -> list:
    """Parse a calibrator test-report CSV into CalibratorRecord rows.

    `column_map` maps canonical names to the file's actual header names,
    e.g. {"true_mag": "NominalMagnitude"}.
    """
    column_map = column_map or {}
    text = _decode_text(data)
    lines = []
    line_numbers = []
    for i, line in enumerate(text.splitlines(), start=1):
        if line.strip().startswith("#") or not line.strip():
            continue
        lines.append(line)
        line_numbers.append(i)
    if not lines:
        raise MissingColumn("file has no header row")

    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    actual_for = {c: column_map.get(c, c) for c in CANONICAL_COLUMNS + OPTIONAL_COLUMNS}
    col_idx = {}
    for canon, actual in actual_for.items():
        if actual in header:
            col_idx[canon] = header.index(actual)
    for canon in CANONICAL_COLUMNS:
        if canon not in col_idx:
            raise MissingColumn(f"required column '{actual_for[canon]}' not found")

    has_errs = all(c in col_idx for c in OPTIONAL_COLUMNS)
    records = []
    for row_i, row in enumerate(reader, start=1):
        lineno = line_numbers[row_i]
        try:
            rec = CalibratorRecord(
                n=int(row[col_idx["n"]]),
                true_mag=float(row[col_idx["true_mag"]]),
                meas_mag=float(row[col_idx["meas_mag"]]),
                true_ang_deg=float(row[col_idx["true_ang_deg"]]),
                meas_ang_deg=float(row[col_idx["meas_ang_deg"]]),
            )
            if has_errs:
                rec.rel_err_pct = float(row[col_idx["rel_err_pct"]])
                rec.ang_err_deg = float(row[col_idx["ang_err_deg"]])
        except (ValueError, IndexError) as exc:
            raise MalformedRow(lineno, str(exc)) from exc
        if has_errs:
            if rec.true_mag == 0:
                raise MalformedRow(lineno, "zero true magnitude")
            rme = 100.0 * (rec.true_mag - rec.meas_mag) / rec.true_mag
            pe = wrap_degrees(rec.true_ang_deg - rec.meas_ang_deg)
            if abs(rme - rec.rel_err_pct) > ERROR_COLUMN_TOL \
                    or abs(pe - rec.ang_err_deg) > ERROR_COLUMN_TOL:
                raise InconsistentErrorColumns(
                    lineno,
                    f"recomputed ({rme:.9g}, {pe:.9g}) vs stated "
                    f"({rec.rel_err_pct:.9g}, {rec.ang_err_deg:.9g})",
                )
        records.append(rec)
    return records


def calibrator_error_series(records, test_id: str = "calibrator") -> dict:
    """RME and PE series recomputed from a calibrator file's raw columns."""
    n = np.array([r.n for r in records])
    true_mag = np.array([r.true_mag for r in records])
    meas_mag = np.array([r.meas_mag for r in records])
    rme = 100.0 * (true_mag - meas_mag) / true_mag
    pe = wrap_degrees(np.array([r.true_ang_deg for r in records])
                      - np.array([r.meas_ang_deg for r in records]))
    return {
        ErrorChannel.RME: ErrorSeries(test_id, ErrorChannel.RME, n, rme),
        ErrorChannel.PE: ErrorSeries(test_id, ErrorChannel.PE, n, pe),
    }


# -- error-series CSV (shared schema) ------------------------------------------

def write_error_series_csv(series: ErrorSeries) -> str:
    buf = io.StringIO()
    buf.write(f"# test_id: {series.test_id}\n")
    buf.write(f"# channel: {series.channel.value}\n")
    buf.write("n,error\n")
    for n, v in zip(series.n, series.values):
        buf.write(f"{int(n)},{float(v)!r}\n")
    return buf.getvalue()


def read_error_series_csv(data) -> ErrorSeries:
    text = _decode_text(data)
    test_id = ""
    channel = ErrorChannel.PE
    ns, values = [], []
    header_seen = False
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s.lstrip("#").strip()
            if body.startswith("test_id:"):
                test_id = body.split(":", 1)[1].strip()
            elif body.startswith("channel:"):
                channel = ErrorChannel(body.split(":", 1)[1].strip())
            continue
        if not header_seen:
            if [c.strip() for c in s.split(",")] != ["n", "error"]:
                raise MissingColumn("expected header 'n,error'")
            header_seen = True
            continue
        try:
            a, b = s.split(",")
            ns.append(int(a))
            values.append(float(b))
        except ValueError as exc:
            raise MalformedRow(i, str(exc)) from exc
    if not header_seen:
        raise MissingColumn("expected header 'n,error'")
    return ErrorSeries(test_id=test_id, channel=channel, n=ns, values=values)


# -- CRC ------------------------------------------------------------------------

def _build_crc_table():
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
        table.append(crc)
    return tuple(table)


_CRC_TABLE = _build_crc_table()


def crc16_ccitt(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection or XOR."""
    crc = 0xFFFF
    for byte in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ byte]
    return crc


# -- frame codec ------------------------------------------------------------------

class PhasorFormat(str, Enum):
    RECT_INT16 = "RECT_INT16"
    POLAR_INT16 = "POLAR_INT16"
    RECT_FLOAT32 = "RECT_FLOAT32"
    POLAR_FLOAT32 = "POLAR_FLOAT32"


_PHASOR_BYTES = {
    PhasorFormat.RECT_INT16: 4,
    PhasorFormat.POLAR_INT16: 4,
    PhasorFormat.RECT_FLOAT32: 8,
    PhasorFormat.POLAR_FLOAT32: 8,
}

# Polar int16 angle is stored in units of 1e-4 radian.
ANGLE_QUANTUM_RAD = 1e-4


@dataclass(frozen=True)
class FrameConfig:
    id_code: int
    num_phasors: int
    phasor_format: PhasorFormat
    scale: tuple = None           # per-phasor magnitude units per count
    nominal_freq: float = 60.0
    time_base: int = 1_000_000

    def __post_init__(self):
        object.__setattr__(self, "phasor_format", PhasorFormat(self.phasor_format))
        if not 0 <= self.id_code <= 0xFFFF:
            raise ValueOutOfRange("id_code must fit in 16 bits")
        if self.num_phasors < 1:
            raise ValueOutOfRange("num_phasors must be >= 1")
        scale = self.scale
        if scale is None:
            scale = (1.0,) * self.num_phasors
        scale = tuple(float(s) for s in scale)
        if len(scale) != self.num_phasors:
            raise ValueOutOfRange("need one scale factor per phasor")
        if self.phasor_format in (PhasorFormat.RECT_INT16, PhasorFormat.POLAR_INT16) \
                and any(s <= 0 for s in scale):
            raise ValueOutOfRange("integer formats require positive scale factors")
        object.__setattr__(self, "scale", scale)

    @property
    def frame_size(self) -> int:
        return HEADER_SIZE + self.num_phasors * _PHASOR_BYTES[self.phasor_format] + CRC_SIZE


@dataclass
class DataFrame:
    soc: int
    fraction: int            # 24-bit fraction of a second, in time_base units
    time_quality: int        # 8-bit quality flags
    stat: int
    phasors: list            # [(magnitude, angle_deg), ...]
    crc_ok: bool = True
    id_code: int = 0


def _encode_phasor(mag: float, angle_deg: float, fmt: PhasorFormat,
                   scale: float) -> bytes:
    ang_rad = np.radians(angle_deg)
    if fmt == PhasorFormat.POLAR_FLOAT32:
        return struct.pack(">ff", mag, ang_rad)
    if fmt == PhasorFormat.RECT_FLOAT32:
        # quantize to float32 first, then add +0.0 in float32 to
        # canonicalize signed zeros (including underflow to -0.0), so
        # encode(decode(...)) is byte-stable
        re = np.float32(mag * np.cos(ang_rad)) + np.float32(0.0)
        im = np.float32(mag * np.sin(ang_rad)) + np.float32(0.0)
        return struct.pack(">ff", re, im)
    if fmt == PhasorFormat.POLAR_INT16:
        raw_mag = round(mag / scale)
        raw_ang = round(ang_rad / ANGLE_QUANTUM_RAD)
        if not 0 <= raw_mag <= 0xFFFF:
            raise ValueOutOfRange(f"magnitude {mag} exceeds uint16 at scale {scale}")
        if not -0x8000 <= raw_ang <= 0x7FFF:
            raise ValueOutOfRange(f"angle {angle_deg} deg exceeds int16 range")
        return struct.pack(">Hh", raw_mag, raw_ang)
    re = round(mag * np.cos(ang_rad) / scale)
    im = round(mag * np.sin(ang_rad) / scale)
    if not (-0x8000 <= re <= 0x7FFF and -0x8000 <= im <= 0x7FFF):
        raise ValueOutOfRange("rectangular components exceed int16 range")
    return struct.pack(">hh", re, im)


def _decode_phasor(payload: bytes, fmt: PhasorFormat, scale: float):
    if fmt == PhasorFormat.POLAR_FLOAT32:
        mag, ang = struct.unpack(">ff", payload)
        return float(mag), wrap_degrees(float(np.degrees(ang)))
    if fmt == PhasorFormat.RECT_FLOAT32:
        re, im = struct.unpack(">ff", payload)
    elif fmt == PhasorFormat.POLAR_INT16:
        raw_mag, raw_ang = struct.unpack(">Hh", payload)
        return (raw_mag * scale,
                wrap_degrees(float(np.degrees(raw_ang * ANGLE_QUANTUM_RAD))))
    else:
        re16, im16 = struct.unpack(">hh", payload)
        re, im = re16 * scale, im16 * scale
    z = complex(re, im)
    return float(abs(z)), wrap_degrees(float(np.degrees(np.angle(z))))


def encode_data_frame(soc: int, fraction: int, time_quality: int, stat: int,
                      phasors, config: FrameConfig) -> bytes:
    """Serialize one measurement frame, appending the CRC."""
    if len(phasors) != config.num_phasors:
        raise ValueOutOfRange(
            f"got {len(phasors)} phasors, config declares {config.num_phasors}"
        )
    if not 0 <= fraction < (1 << 24):
        raise ValueOutOfRange("fraction must fit in 24 bits")
    if not 0 <= time_quality < (1 << 8):
        raise ValueOutOfRange("time_quality must fit in 8 bits")
    fracsec = (time_quality << 24) | fraction
    body = struct.pack(HEADER_FMT, SYNC_BYTE, DATA_FRAME_TYPE_BYTE,
                       config.frame_size, config.id_code,
                       soc & 0xFFFFFFFF, fracsec, stat & 0xFFFF)
    for (mag, ang), scale in zip(phasors, config.scale):
        body += _encode_phasor(mag, ang, config.phasor_format, scale)
    return body + struct.pack(">H", crc16_ccitt(body))


def decode_data_frame(data: bytes, config: FrameConfig) -> DataFrame:
    """Parse and CRC-verify one measurement frame."""
    if len(data) < HEADER_SIZE + CRC_SIZE:
        raise BadLength(f"frame truncated at {len(data)} bytes")
    sync, ftype, framesize, idcode, soc, fracsec, stat = \
        struct.unpack(HEADER_FMT, data[:HEADER_SIZE])
    if sync != SYNC_BYTE or ((ftype >> 4) & 0x7) != 0:
        raise BadSync(f"bad sync word 0x{sync:02X}{ftype:02X}")
    if framesize != len(data):
        raise BadLength(f"FRAMESIZE {framesize} != byte count {len(data)}")
    if framesize != config.frame_size:
        raise BadLength(
            f"FRAMESIZE {framesize} != configured size {config.frame_size}"
        )
    (stated_crc,) = struct.unpack(">H", data[-CRC_SIZE:])
    if crc16_ccitt(data[:-CRC_SIZE]) != stated_crc:
        raise BadCrc("checksum mismatch")
    if idcode != config.id_code:
        raise IdCodeMismatch(f"frame id {idcode} != configured {config.id_code}")

    step = _PHASOR_BYTES[config.phasor_format]
    phasors = []
    offset = HEADER_SIZE
    for scale in config.scale:
        phasors.append(_decode_phasor(data[offset:offset + step],
                                      config.phasor_format, scale))
        offset += step
    return DataFrame(soc=soc, fraction=fracsec & 0xFFFFFF,
                     time_quality=fracsec >> 24, stat=stat,
                     phasors=phasors, crc_ok=True, id_code=idcode)


def iter_frames(data: bytes, config: FrameConfig):
    """Split a capture of back-to-back frames and decode each one."""
    offset = 0
    while offset < len(data):
        if offset + 4 > len(data):
            raise BadLength("trailing bytes too short for a frame header")
        (framesize,) = struct.unpack(">H", data[offset + 2:offset + 4])
        if framesize < HEADER_SIZE + CRC_SIZE or offset + framesize > len(data):
            raise BadLength(f"frame at offset {offset} overruns the capture")
        yield decode_data_frame(data[offset:offset + framesize], config)
        offset += framesize
