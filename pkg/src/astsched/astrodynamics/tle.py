"""Two-Line Element parsing and formatting (standard 69-column layout)."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime

from ..errors import ChecksumError, FormatError
from ..timebase import jd_from_year_days

LINE_LENGTH = 69


def checksum(line: str) -> int:
    """Modulo-10 TLE checksum of the first 68 columns ('-' counts as 1)."""
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


@dataclass(frozen=True)
class TwoLineElement:
    satellite_id: int
    epoch_year: int
    epoch_days: float
    epoch_jd: float
    mean_motion: float          # rev/day
    eccentricity: float
    inclination: float          # deg
    raan: float                 # deg
    arg_perigee: float          # deg
    mean_anomaly: float         # deg
    bstar: float                # 1/earth-radii
    ndot: float                 # rev/day^2 (already multiplied by 2 out of the field)
    nddot: float                # rev/day^3
    raw_lines: tuple[str, str] = field(repr=False, default=("", ""))


def _float_field(line: str, start: int, end: int, name: str, line_no: int) -> float:
    text = line[start:end].strip()
    try:
        return float(text)
    except ValueError:
        raise FormatError(
            f"line {line_no}: field '{name}' is not numeric: {text!r}"
        ) from None


def _exp_field(line: str, start: int, end: int, name: str, line_no: int) -> float:
    """Parse the TLE assumed-decimal exponent notation, e.g. ' 34123-3'."""
    text = line[start:end]
    mantissa = text[:-2].strip() or "0"
    exponent = text[-2:].strip() or "0"
    try:
        sign = -1.0 if mantissa.startswith("-") else 1.0
        digits = mantissa.lstrip("+-")
        value = sign * float("0." + digits) if digits else 0.0
        return value * 10.0 ** int(exponent.replace("+", ""))
    except ValueError:
        raise FormatError(
            f"line {line_no}: field '{name}' is not numeric: {text!r}"
        ) from None


def parse_tle(line1: str, line2: str) -> TwoLineElement:
    """Decode a standard two-line element set.

    Raises FormatError on layout problems and ChecksumError when a line's
    modulo-10 checksum digit does not match.
    """
    lines = (line1.rstrip("\r\n"), line2.rstrip("\r\n"))
    for i, line in enumerate(lines, start=1):
        if len(line) != LINE_LENGTH:
            raise FormatError(
                f"line {i}: expected {LINE_LENGTH} characters, got {len(line)}"
            )
        if line[0] != str(i):
            raise FormatError(f"line {i}: line-number prefix is {line[0]!r}")
        if not line[68].isdigit():
            raise FormatError(f"line {i}: checksum column is not a digit")
        if int(line[68]) != checksum(line):
            raise ChecksumError(
                f"line {i}: checksum {line[68]} != computed {checksum(line)}"
            )
    l1, l2 = lines

    try:
        satnum = int(l1[2:7])
    except ValueError:
        raise FormatError(f"line 1: satellite number not numeric: {l1[2:7]!r}") from None
    if l2[2:7] != l1[2:7]:
        raise FormatError("satellite numbers differ between lines")

    yy = int(_float_field(l1, 18, 20, "epoch year", 1))
    epoch_year = 2000 + yy if yy < 57 else 1900 + yy
    epoch_days = _float_field(l1, 20, 32, "epoch day", 1)
    ndot = _float_field(l1, 33, 43, "ndot", 1) * 2.0
    nddot = _exp_field(l1, 44, 52, "nddot", 1) * 6.0
    bstar = _exp_field(l1, 53, 61, "bstar", 1)

    inclination = _float_field(l2, 8, 16, "inclination", 2)
    raan = _float_field(l2, 17, 25, "raan", 2)
    ecc_text = l2[26:33].strip()
    if not ecc_text.isdigit():
        raise FormatError(f"line 2: eccentricity not numeric: {ecc_text!r}")
    eccentricity = float("0." + ecc_text)
    arg_perigee = _float_field(l2, 34, 42, "arg perigee", 2)
    mean_anomaly = _float_field(l2, 43, 51, "mean anomaly", 2)
    mean_motion = _float_field(l2, 52, 63, "mean motion", 2)

    if not 0.0 <= eccentricity < 1.0:
        raise FormatError(f"eccentricity {eccentricity} outside [0, 1)")
    if not 0.0 <= inclination <= 180.0:
        raise FormatError(f"inclination {inclination} outside [0, 180]")

    return TwoLineElement(
        satellite_id=satnum,
        epoch_year=epoch_year,
        epoch_days=epoch_days,
        epoch_jd=jd_from_year_days(epoch_year, epoch_days),
        mean_motion=mean_motion,
        eccentricity=eccentricity,
        inclination=inclination,
        raan=raan,
        arg_perigee=arg_perigee,
        mean_anomaly=mean_anomaly,
        bstar=bstar,
        ndot=ndot,
        nddot=nddot,
        raw_lines=lines,
    )


def _format_exp(value: float) -> str:
    """Render a float in the TLE assumed-decimal exponent notation (8 cols)."""
    if value == 0.0:
        return " 00000-0"
    sign = "-" if value < 0 else " "
    mag = abs(value)
    exponent = 0
    while mag >= 1.0:
        mag /= 10.0
        exponent += 1
    while mag < 0.1:
        mag *= 10.0
        exponent -= 1
    mantissa = round(mag * 1e5)
    if mantissa >= 1e5:  # rounding pushed it to 1.0
        mantissa = 10000
        exponent += 1
    if exponent < -9:    # below the single-digit exponent field: flush to zero
        return " 00000-0"
    if exponent > 9:
        raise FormatError(f"value {value!r} too large for the exponent field")
    esign = "+" if exponent >= 0 else "-"
    return f"{sign}{mantissa:05d}{esign}{abs(exponent)}"


def format_tle(
    satellite_id: int,
    epoch_year: int,
    epoch_days: float,
    inclination: float,
    raan: float,
    eccentricity: float,
    arg_perigee: float,
    mean_anomaly: float,
    mean_motion: float,
    bstar: float = 0.0,
    intl_designator: str = "25001A",
) -> tuple[str, str]:
    """Encode elements as a valid 69-column TLE pair (checksums computed)."""
    yy = epoch_year % 100
    l1 = (
        f"1 {satellite_id:05d}U {intl_designator:<8s} {yy:02d}{epoch_days:012.8f} "
        f" .00000000  00000-0 {_format_exp(bstar)} 0  999"
    )
    l2 = (
        f"2 {satellite_id:05d} {inclination:8.4f} {raan:8.4f} "
        f"{round(eccentricity * 1e7):07d} {arg_perigee:8.4f} {mean_anomaly:8.4f} "
        f"{mean_motion:11.8f}    1"
    )
    if len(l1) != 68 or len(l2) != 68:
        raise FormatError(f"internal TLE formatting error ({len(l1)}, {len(l2)})")
    return l1 + str(checksum(l1)), l2 + str(checksum(l2))
