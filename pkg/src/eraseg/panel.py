"""Monthly multi-country price panel: loading, validation and windowing.

The on-disk format is a wide CSV::

    date,USA,FRA,JPN
    1955-01,12.1,,3.4
    1955-02,12.3,,3.5

Empty cells are missing observations. A country may start late (or stop
early) but may not have holes inside its observed range.
"""
from __future__ import annotations

import csv
import io
import math
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

import numpy as np

from .errors import BadValue, GapInSeries, MalformedDates, PanelError, PanelTooShort

_MONTH_RE = re.compile(r"^\s*(\d{4})-(\d{2})\s*$")

Source = Union[str, os.PathLike, TextIO]


def _parse_month(text: str, row: int) -> np.datetime64:
    m = _MONTH_RE.match(text)
    if m is None or not 1 <= int(m.group(2)) <= 12:
        raise MalformedDates(f"data row {row}: cannot parse {text!r} as YYYY-MM")
    return np.datetime64(f"{m.group(1)}-{m.group(2)}", "M")


def month_year(month: np.datetime64) -> int:
    """Calendar year of a ``datetime64[M]`` stamp."""
    return int(month.astype("datetime64[Y]").astype(int)) + 1970


@dataclass(frozen=True, eq=False)
class PricePanel:
    """Dates x countries matrix of price-index levels, NaN where missing."""

    dates: np.ndarray
    countries: tuple
    values: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[M]")
        values = np.array(self.values, dtype=float)
        countries = tuple(str(c) for c in self.countries)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "countries", countries)
        dates.flags.writeable = False
        values.flags.writeable = False

        if values.shape != (len(dates), len(countries)):
            raise PanelError(
                f"values shape {values.shape} does not match "
                f"{len(dates)} dates x {len(countries)} countries"
            )
        if len(set(countries)) != len(countries):
            raise PanelError("duplicate country codes")
        if len(dates) > 1 and np.any(np.diff(dates).astype(int) != 1):
            raise MalformedDates("dates must increase by exactly one month")
        present = ~np.isnan(values)
        bad = present & ~(np.isfinite(values) & (values > 0))
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise BadValue(int(r), countries[c], values[r, c])
        for j, code in enumerate(countries):
            obs = np.flatnonzero(present[:, j])
            if obs.size and obs[-1] - obs[0] + 1 != obs.size:
                raise GapInSeries(code)

    @property
    def n_months(self) -> int:
        return len(self.dates)

    @property
    def observed(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def observed_counts(self) -> np.ndarray:
        """Number of observed countries per month."""
        return self.observed.sum(axis=1)

    def __eq__(self, other):
        if not isinstance(other, PricePanel):
            return NotImplemented
        return (
            self.countries == other.countries
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


def load_panel(source: Source) -> PricePanel:
    """Read a wide CSV price panel from a path or an open text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8-sig") as fh:
            return _read_rows(csv.reader(fh))
    return _read_rows(csv.reader(source))


def loads_panel(text: str) -> PricePanel:
    return load_panel(io.StringIO(text, newline=""))


def _read_rows(reader: Iterable[list]) -> PricePanel:
    rows = iter(reader)
    try:
        header = next(rows)
    except StopIteration:
        raise PanelError("empty input: header row missing") from None
    countries = [h.strip() for h in header[1:]]
    if not countries or any(not c for c in countries):
        raise PanelError("header must be 'date' followed by non-empty country codes")

    dates, values = [], []
    for i, row in enumerate(rows):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise PanelError(f"data row {i}: expected {len(header)} fields, got {len(row)}")
        dates.append(_parse_month(row[0], i))
        parsed = []
        for code, cell in zip(countries, row[1:]):
            cell = cell.strip()
            if not cell:
                parsed.append(math.nan)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise BadValue(i, code, cell) from None
            if not math.isfinite(v) or v <= 0:
                raise BadValue(i, code, cell)
            parsed.append(v)
        values.append(parsed)

    if not dates:
        raise PanelError("no data rows")
    d = np.array(dates, dtype="datetime64[M]")
    if np.any(np.diff(d).astype(int) != 1):
        raise MalformedDates("dates must be consecutive months in increasing order")
    return PricePanel(d, tuple(countries), np.array(values, dtype=float))


def write_panel(panel: PricePanel, dest: Source) -> None:
    """Write ``panel`` in the format read by :func:`load_panel`.

    Floats use ``repr`` so a reload is bit-identical.
    """
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            _write_rows(panel, fh)
    else:
        _write_rows(panel, dest)


def _write_rows(panel: PricePanel, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["date", *panel.countries])
    for d, row in zip(panel.dates, panel.values):
        w.writerow([str(d)] + ["" if math.isnan(v) else repr(float(v)) for v in row])


# -- windows ---------------------------------------------------------------

@dataclass(frozen=True)
class WindowSpec:
    length_months: int = 72
    step_months: int = 12

    def __post_init__(self):
        if int(self.length_months) != self.length_months or int(self.step_months) != self.step_months:
            raise ValueError("window length and step must be integers")
        if self.length_months < 24:
            raise ValueError("length_months must be at least 24")
        if not 1 <= self.step_months <= self.length_months:
            raise ValueError("step_months must be in [1, length_months]")


@dataclass(frozen=True, eq=False)
class WindowView:
    window_index: int
    start: np.datetime64
    end: np.datetime64
    label_year: int
    countries: tuple
    values: np.ndarray = field(repr=False)

    @property
    def length(self) -> int:
        return self.values.shape[0]


def window_count(n_months: int, spec: WindowSpec) -> int:
    if n_months < spec.length_months:
        return 0
    return (n_months - spec.length_months) // spec.step_months + 1


def slice_windows(panel: PricePanel, spec: WindowSpec = WindowSpec()) -> list[WindowView]:
    """Cut ``panel`` into overlapping windows starting at its first month.

    Only windows lying fully inside the panel are returned; a trailing
    partial window is dropped.
    """
    n = window_count(panel.n_months, spec)
    if n == 0:
        raise PanelTooShort(
            f"panel has {panel.n_months} months, window needs {spec.length_months}"
        )
    out = []
    for t in range(n):
        lo = t * spec.step_months
        hi = lo + spec.length_months
        end = panel.dates[hi - 1]
        out.append(
            WindowView(
                window_index=t,
                start=panel.dates[lo],
                end=end,
                label_year=month_year(end),
                countries=panel.countries,
                values=panel.values[lo:hi],
            )
        )
    return out
