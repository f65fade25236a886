"""Run configuration for the command-line tools.

INI-style sections of ``key = value`` pairs, parsed with the standard
library's configparser, with typed getters, a stable content hash that every
report embeds, and the error type the CLI maps to exit code 2.  Values set
from command-line flags override the file through `override`.
"""

import configparser
import hashlib

_MISSING = object()


class ConfigError(Exception):
    """Configuration problem: unreadable file, missing key, bad value."""


class RunConfig:
    def __init__(self, text="", source="<defaults>"):
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        self._cp = cp
        self._overrides = {}
        self.source = source
        self.text = text
        self.hash = hashlib.sha256(text.encode()).hexdigest()[:16]

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config '{path}': {exc}") from exc
        return cls(text, source=str(path))

    def override(self, section, key, value):
        """Pin a value (CLI flag) that wins over the file."""
        if value is not None:
            self._overrides[(section, key)] = str(value)

    @property
    def overrides(self):
        return {f"{s}.{k}": v for (s, k), v in sorted(self._overrides.items())}

    def get(self, section, key, default=_MISSING):
        if (section, key) in self._overrides:
            return self._overrides[(section, key)]
        if self._cp.has_option(section, key):
            return self._cp.get(section, key).strip()
        if default is _MISSING:
            raise ConfigError(f"missing config value [{section}] {key}")
        return default

    def _typed(self, section, key, default, cast, what):
        raw = self.get(section, key, default)
        if raw is default or raw is None:
            return default
        if isinstance(raw, str):
            try:
                return cast(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"[{section}] {key} = {raw!r}: not {what}") from exc
        return raw

    def get_int(self, section, key, default=_MISSING):
        return self._typed(section, key, default, int, "an integer")

    def get_float(self, section, key, default=_MISSING, positive=False):
        val = self._typed(section, key, default, float, "a number")
        if positive and val is not None and not val > 0:
            raise ConfigError(f"[{section}] {key} must be positive, got {val}")
        return val

    def get_bool(self, section, key, default=_MISSING):
        raw = self.get(section, key, default)
        if not isinstance(raw, str):
            return raw
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key} = {raw!r}: not a boolean")

    def get_floats(self, section, key, default=_MISSING):
        """Comma- or whitespace-separated list of numbers."""
        raw = self.get(section, key, default)
        if not isinstance(raw, str):
            return raw
        parts = [p for p in raw.replace(",", " ").split() if p]
        try:
            return [float(p) for p in parts]
        except ValueError as exc:
            raise ConfigError(
                f"[{section}] {key} = {raw!r}: not a number list") from exc

    def get_ints(self, section, key, default=_MISSING):
        vals = self.get_floats(section, key, default)
        if not isinstance(vals, list):
            return vals
        out = []
        for v in vals:
            if v != int(v):
                raise ConfigError(f"[{section}] {key}: {v} is not an integer")
            out.append(int(v))
        return out
