"""Run configuration: a JSON file merged under command-line overrides.

The file is a flat object of model parameter names (see ``ModelParams``),
optionally with a ``scaling`` object (``d_m``, ``d_n``, ``d_t``) used by
``predict`` and a ``candidates`` object (``spatial``, ``temporal``,
``square``) used by ``optimize`` and ``sweep``.
"""

import json
from dataclasses import fields

from .exceptions import ValidationError, VideoIOError
from .params import ModelParams

SECTION_KEYS = ("scaling", "candidates")
MODEL_KEYS = tuple(f.name for f in fields(ModelParams))


def read_json(path, what="config"):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise VideoIOError(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} file {path} is not valid JSON: {exc}") from None
    except OSError as exc:
        raise VideoIOError(f"cannot read {what} file {path}: {exc}") from None


def split_config(raw):
    """Return ``(model_dict, sections)`` and reject unknown keys."""
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    unknown = set(raw) - set(MODEL_KEYS) - set(SECTION_KEYS)
    if unknown:
        raise ValidationError(f"unknown config key(s): {sorted(unknown)}")
    model = {k: v for k, v in raw.items() if k in MODEL_KEYS}
    sections = {k: raw[k] for k in SECTION_KEYS if k in raw}
    for k, v in sections.items():
        if not isinstance(v, dict):
            raise ValidationError(f"config section {k!r} must be an object")
    return model, sections


def parse_override(text):
    """``KEY=VALUE``; the value is read as JSON when possible, else as a string."""
    key, sep, value = text.partition("=")
    key = key.strip().replace("-", "_")
    if not sep or not key:
        raise ValidationError(f"override must look like KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def build_model_params(file_model, overrides):
    merged = dict(file_model)
    merged.update(overrides)
    return ModelParams.from_dict(merged)
