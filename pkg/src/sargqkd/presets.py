"""Named channel presets and a flat ``key=value`` preset-file reader."""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .decoy import ChannelParams
from .errors import DomainError


@dataclass(frozen=True)
class Preset:
    """A named set of channel parameters."""

    name: str
    params: ChannelParams

    @property
    def f_ec(self) -> float:
        return self.params.f_ec


GYS = Preset("gys", ChannelParams(alpha=0.21, eta_bob=0.045, e_detector=0.033,
                                  p_dark=1.7e-6, f_ec=1.22))
BRANCIARD = Preset("branciard", ChannelParams(alpha=0.25, eta_bob=0.1, e_detector=0.0,
                                              p_dark=1e-5, f_ec=1.0))

BUILTIN = {p.name: p for p in (GYS, BRANCIARD)}

_FIELDS = tuple(f.name for f in fields(ChannelParams))


def parse_preset_text(text: str, name: str = "custom") -> Preset:
    """Parse ``key=value`` lines into a preset.

    Blank lines and ``#`` comments are ignored.  ``name`` may be set inside
    the file.  Keys must be the field names of :class:`ChannelParams`; a
    missing ``f_ec`` defaults to 1.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "name":
            name = value
            continue
        if key not in _FIELDS:
            raise DomainError(f"line {lineno}: unknown key {key!r}; expected one of {_FIELDS}")
        if key in values:
            raise DomainError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value)
        except ValueError as exc:
            raise DomainError(f"line {lineno}: {key} is not a number: {value!r}") from exc
    missing = [k for k in _FIELDS if k not in values and k != "f_ec"]
    if missing:
        raise DomainError(f"preset is missing {missing}")
    return Preset(name, ChannelParams(**values))


def load_preset_file(path: str | Path) -> Preset:
    path = Path(path)
    return parse_preset_text(path.read_text(), name=path.stem)


def format_preset(preset: Preset) -> str:
    """Inverse of :func:`parse_preset_text`."""
    lines = [f"name={preset.name}"]
    lines += [f"{k}={getattr(preset.params, k)!r}" for k in _FIELDS]
    return "\n".join(lines) + "\n"


def get_preset(name: str, extra: dict[str, Preset] | None = None) -> Preset:
    table = dict(BUILTIN)
    if extra:
        table.update(extra)
    try:
        return table[name.lower()] if name.lower() in table else table[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; known: {sorted(table)}") from None


__all__ = ["Preset", "GYS", "BRANCIARD", "BUILTIN", "parse_preset_text",
           "load_preset_file", "format_preset", "get_preset"]
