"""实验配置加载：JSON 文件 + 命令行 `--set key.sub=value` 覆盖"""
import json
import os
from typing import Any, Dict, Iterable, Optional

from son_ot.core.config import ExperimentConfig
from son_ot.core.exceptions import ConfigError


def parse_override(item: str):
    """`a.b=value`：value 按 JSON 解析，失败时当作字符串"""
    if "=" not in item:
        raise ConfigError(f"override must look like key.sub=value, got {item!r}")
    key, raw = item.split("=", 1)
    key = key.strip().lstrip("-")
    if not key:
        raise ConfigError(f"override has an empty key: {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_overrides(data: Dict[str, Any], overrides: Optional[Iterable[str]]) -> Dict[str, Any]:
    for item in overrides or ():
        path, value = parse_override(item)
        node = data
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ConfigError(f"cannot override '{'.'.join(path)}': '{part}' is not an object")
            node = child
        node[path[-1]] = value
    return data


def read_config_dict(path: str) -> Dict[str, Any]:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return data


def load_config(path: str, overrides: Optional[Iterable[str]] = None) -> ExperimentConfig:
    """读取、覆盖、校验；任何问题都以 ConfigError 报告"""
    return ExperimentConfig.from_dict(apply_overrides(read_config_dict(path), overrides))
