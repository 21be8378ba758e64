"""Flat key=value experiment configs with [oracle] / [attack] / [suite]
sections, canonical serialization and hashing."""

from __future__ import annotations

import configparser
import hashlib
from pathlib import Path

from .attack import AttackConfig, ConfigError, VARIANT_NAMES
from .suite import ExperimentSuite


def parse_config_text(text: str) -> dict:
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",),
                                       interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    return {section: dict(parser.items(section)) for section in parser.sections()}


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())


def serialize_config(sections: dict) -> str:
    """Canonical text form: sorted sections and keys, one pair per line."""
    out = []
    for section in sorted(sections):
        out.append(f"[{section}]")
        for key in sorted(sections[section]):
            out.append(f"{key} = {sections[section][key]}")
        out.append("")
    return "\n".join(out)


def config_hash(sections: dict) -> str:
    return hashlib.sha256(serialize_config(sections).encode()).hexdigest()


def _typed(section: dict, key: str, cast, default, section_name: str):
    if key not in section:
        return default
    try:
        return cast(section[key])
    except ValueError:
        raise ConfigError(
            f"[{section_name}] {key}: cannot parse {section[key]!r}") from None


def oracle_spec_from(sections: dict) -> dict:
    if "oracle" not in sections:
        raise ConfigError("missing [oracle] section")
    sec = sections["oracle"]
    if "kind" not in sec:
        raise ConfigError("[oracle] kind is required")
    spec = {"kind": sec["kind"]}
    for key in ("height", "width", "channels", "n", "seed"):
        val = _typed(sec, key, int, None, "oracle")
        if val is not None:
            spec[key] = val
    for key in ("target", "strength", "gamma", "coupling", "beta"):
        val = _typed(sec, key, float, None, "oracle")
        if val is not None:
            spec[key] = val
    if "mask" in sec:
        spec["mask"] = sec["mask"]
    kind = spec["kind"]
    if kind in ("channel-shift", "local-blur-residual"):
        for key in ("height", "width", "channels"):
            if key not in spec:
                raise ConfigError(f"[oracle] {key} is required for {kind}")
    elif kind == "diag-smooth":
        if "n" not in spec:
            raise ConfigError("[oracle] n is required for diag-smooth")
    else:
        raise ConfigError(f"[oracle] unknown kind {kind!r}")
    return spec


def attack_config_from(sections: dict) -> AttackConfig:
    sec = sections.get("attack", {})
    cfg = AttackConfig(
        delta=_typed(sec, "delta", float, 0.001, "attack"),
        epsilon=_typed(sec, "epsilon", float, 0.1, "attack"),
        eta=_typed(sec, "eta", float, 1.0, "attack"),
        q=_typed(sec, "q", int, 8, "attack"),
        S=_typed(sec, "s", int, 10, "attack"),
        R=_typed(sec, "r", int, 10, "attack"),
        budget=_typed(sec, "budget", int, 100_000, "attack"),
        threshold=_typed(sec, "threshold", float, 75.0, "attack"),
        variant=sec.get("variant", "LaS-GSA"),
        loss_kind=sec.get("loss", "nullify"),
        scale_mode=sec.get("scale_mode", "min"),
        max_slide_steps=_typed(sec, "max_slide_steps", int, 20, "attack"),
        seed=_typed(sec, "seed", int, 0, "attack"),
        fd_h=_typed(sec, "fd_h", float, 1e-4, "attack"),
        surrogate_scale=_typed(sec, "surrogate_scale", float, 0.1, "attack"),
    )
    return cfg.validate()


def suite_from(sections: dict) -> ExperimentSuite:
    sec = sections.get("suite", {})
    variants = tuple(v.strip() for v in sec.get("variants", ",".join(VARIANT_NAMES))
                     .split(",") if v.strip())
    suite = ExperimentSuite(
        oracle_spec=oracle_spec_from(sections),
        n_inputs=_typed(sec, "inputs", int, 1, "suite"),
        variants=variants,
        replications=_typed(sec, "replications", int, 1, "suite"),
        input_lo=_typed(sec, "input_lo", float, 0.2, "suite"),
        input_hi=_typed(sec, "input_hi", float, 0.6, "suite"),
        seed=_typed(sec, "seed", int, 0, "suite"),
        base_config=attack_config_from(sections),
    )
    try:
        return suite.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
