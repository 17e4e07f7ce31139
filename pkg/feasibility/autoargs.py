"""
Dataclass-driven command options: every field becomes a ConfigArgParse option,
so each command reads flags, a `--config` file, or both.
"""

from __future__ import annotations

import types
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from inspect import signature
from io import StringIO
from pathlib import Path
from typing import get_args, get_origin

import ruamel.yaml
from configargparse import ArgumentParser

try:
    from docstring_parser import parse as doc_parse
except Exception:
    doc_parse = None

config_help = "config file path (key: value per line)"


def _unwrap_optional(annotation):
    """`X | None` -> X"""
    if get_origin(annotation) is types.UnionType:
        inner = [a for a in get_args(annotation) if a is not types.NoneType]
        if len(inner) != 1:
            raise NotImplementedError("UnionType", inner)
        return inner[0]
    return annotation


def _cast(value, annotation):
    annotation = _unwrap_optional(annotation)
    if value is None:
        return None
    if get_origin(annotation) is list:
        (elem,) = get_args(annotation)
        return [elem(v) for v in value]
    return value


def data_class_to_arg_parse(cls, parser: ArgumentParser | None = None, default_config=None, prog: str | None = None) -> ArgumentParser:
    """Add one option per dataclass field. Help comes from the `Args:` section of the class docstring."""
    help_texts = {}
    if parser is None:
        parser = ArgumentParser(prog=prog, description=(cls.__doc__ or "").strip().split("\n")[0] or None)
        parser.add_argument("-config", "--config", is_config_file_arg=True, default=default_config, type=str, help=config_help)
    if doc_parse is not None and cls.__doc__:
        for param in doc_parse(cls.__doc__).params:
            help_texts[param.arg_name] = param.description

    parameters = signature(cls).parameters
    for name in parameters:
        if name.startswith("_"):
            continue
        key = "--" + name
        default = parameters[name].default
        annotation = _unwrap_optional(parameters[name].annotation)
        hlp = help_texts.get(name)
        if annotation is bool:
            parser.add_argument(key, action="store_false" if default else "store_true", default=default, help=hlp)
        elif get_origin(annotation) is list:
            (elem,) = get_args(annotation)
            parser.add_argument(key, nargs="+", default=default, type=elem, help=hlp or f"list of {elem.__name__}")
        else:
            parser.add_argument(key, default=default, type=annotation, help=hlp)
    return parser


@dataclass
class Class_to_ArgParse:
    """Base for command option dataclasses."""

    @classmethod
    def get_opt(cls, argv: Sequence[str] | None = None, default_config=None, prog: str | None = None):
        parser = data_class_to_arg_parse(cls, default_config=default_config, prog=prog)
        ns = parser.parse_args(None if argv is None else list(argv))
        return cls.from_kwargs(**vars(ns))

    @classmethod
    def from_kwargs(cls, **kwargs):
        parameters = signature(cls).parameters
        native = {}
        for name, value in kwargs.items():
            if name == "config":
                continue
            if name not in parameters:
                raise NotImplementedError(name, value)
            native[name] = _cast(value, parameters[name].annotation)
        return cls(**native)

    def to_dict(self) -> dict:
        return {k: str(v) if isinstance(v, Path) else v for k, v in asdict(self).items() if not k.startswith("_")}

    def save_config(self, outfile: str | Path) -> None:
        """Write the options as a config file that `--config` reads back; unset options become comments."""
        parameters = signature(self.__class__).parameters
        data = ruamel.yaml.CommentedMap()
        pending = []
        for k, v in self.to_dict().items():
            if v is None:
                pending.append(f"{k}: None # {parameters[k].annotation}")
                continue
            data[k] = v
            if pending:
                data.yaml_set_comment_before_after_key(k, before="\n".join(pending), indent=0)
                pending = []
        y = ruamel.yaml.YAML()
        y.default_flow_style = None
        stream = StringIO()
        y.dump(data, stream)
        text = stream.getvalue() + "".join(f"# {p}\n" for p in pending)
        with open(outfile, "w", encoding="utf-8") as f:
            f.write(text.replace("'", '"'))
