"""Time plumbing: UTC anchor strings, Julian dates, sidereal time.

Scenario time is real-valued seconds since a UTC anchor instant.  Leap
seconds are ignored (horizons are a few days).
"""

from __future__ import annotations

from datetime import datetime, timezone

from .astrodynamics._sgp4core import gstime

JD_UNIX_EPOCH = 2440587.5
SECONDS_PER_DAY = 86400.0


def parse_utc(anchor: str) -> datetime:
    """Parse an ISO-8601 UTC instant such as '2025-07-17T12:00:00Z'."""
    s = anchor.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def jd_from_utc(anchor: str | datetime) -> float:
    """Julian date of a UTC instant."""
    dt = parse_utc(anchor) if isinstance(anchor, str) else dt_utc(anchor)
    return JD_UNIX_EPOCH + dt.timestamp() / SECONDS_PER_DAY


def dt_utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def jd_from_year_days(year: int, days: float) -> float:
    """Julian date from a TLE-style (two-digit-expanded year, fractional day-of-year)."""
    start = datetime(year, 1, 1, tzinfo=timezone.utc)
    return JD_UNIX_EPOCH + start.timestamp() / SECONDS_PER_DAY + (days - 1.0)


def gmst(jd_ut1: float) -> float:
    """Greenwich mean sidereal time in radians, [0, 2*pi)."""
    return gstime(jd_ut1)
