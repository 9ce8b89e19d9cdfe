"""
Configuration loader for training runs.

Precedence (highest first):
1) explicit path (``--config``)
2) fusion-gan-config.yaml in current working directory
3) FUSION_GAN_CONFIG environment variable (path to YAML or JSON)
4) Defaults from Defaults class
Overrides (command-line flags) are applied on top of whichever file was used.
"""

from __future__ import annotations

import logging
import os
from typing import Any, Dict, Optional

from pydantic import ValidationError
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from fusion_gan.errors import ConfigError

from .defaults import Defaults
from .types import TrainConfig

logger = logging.getLogger(__name__)


def _read_yaml(path: str) -> Dict[str, Any]:
    yaml = YAML(typ="safe")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.load(f) or {}
    except (OSError, YAMLError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping, got {type(data).__name__}")
    return dict(data)


def resolve_config_path(explicit: Optional[str] = None) -> Optional[str]:
    """Pick the config file to use, or ``None`` for defaults only.

    Raises
    ------
    ConfigError
        If ``explicit`` is given but does not exist.
    """
    if explicit:
        if not os.path.isfile(explicit):
            raise ConfigError(f"config file not found: {explicit}")
        return explicit
    pwd_cfg = os.path.join(os.getcwd(), Defaults.CONFIG_FILE)
    if os.path.isfile(pwd_cfg):
        return pwd_cfg
    env_path = os.getenv(Defaults.CONFIG_ENV)
    if env_path and os.path.isfile(env_path):
        return env_path
    return None


def _merge(base: Dict[str, Any], updates: Dict[str, Any]) -> None:
    for k, v in updates.items():
        if k == "loss_toggles" and isinstance(v, dict) and isinstance(base.get(k), dict):
            base[k].update({tk: tv for tk, tv in v.items() if tv is not None})
        else:
            base[k] = v


def load_train_config(
    path: Optional[str] = None, *, overrides: Optional[Dict[str, Any]] = None
) -> TrainConfig:
    """Load TrainConfig with file precedence and optional overrides.

    Parameters
    ----------
    path : str, optional
        Explicit config file (YAML or JSON).
    overrides : dict, optional
        Values applied last (e.g. from CLI flags). ``None`` values are ignored;
        ``loss_toggles`` merges per key.

    Raises
    ------
    ConfigError
        On unreadable files, unknown keys or invalid values.
    """
    cfg_dict: Dict[str, Any] = Defaults.as_dict()
    resolved = resolve_config_path(path)
    if resolved:
        logger.debug("reading config from %s", resolved)
        _merge(cfg_dict, _read_yaml(resolved))
    if overrides:
        _merge(cfg_dict, {k: v for k, v in overrides.items() if v is not None})
    try:
        return TrainConfig.model_validate(cfg_dict)
    except ValidationError as e:
        errors = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid training config: {errors}") from e
