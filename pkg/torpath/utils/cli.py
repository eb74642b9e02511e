from typing import Any, List
import argparse
import enum

ALL = 'all'


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):

    """Parser whose errors are raised, leaving the exit code to the caller."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


class EnumListAction(argparse.Action):
    """
    Argparse action collecting Enum members from repeated or comma-separated
    values; 'all' selects every member
    """

    def __init__(self, **kwargs):
        e = kwargs.pop("type", None)
        if e is None:
            raise ValueError("type must be assigned an Enum when using EnumListAction")
        if not issubclass(e, enum.Enum):
            raise TypeError("type must be an Enum when using EnumListAction")
        kwargs.setdefault("metavar", '{' + ','.join([ALL] + [x.value for x in e]) + '}')
        super().__init__(**kwargs)
        self._enum = e

    def __call__(self, parser, namespace, values, option_string=None):
        members = list(getattr(namespace, self.dest, None) or [])
        for name in parse_names(values):
            if name == ALL:
                members.extend(self._enum)
                continue
            try:
                members.append(self._enum(name.lower().replace('-', '_')))
            except ValueError:
                parser.error(f"argument {option_string}: unknown {self.dest} '{name}'")
        setattr(namespace, self.dest, list(dict.fromkeys(members)))


class IntListAction(argparse.Action):
    """
    Argparse action collecting integers out of ``allowed`` from repeated or
    comma-separated values; 'all' selects every allowed value
    """

    def __init__(self, **kwargs):
        allowed = kwargs.pop("allowed")
        kwargs.setdefault("metavar", '{' + ','.join([ALL] + [str(c) for c in allowed]) + '}')
        super().__init__(**kwargs)
        self._allowed = list(allowed)

    def __call__(self, parser, namespace, values, option_string=None):
        chosen = list(getattr(namespace, self.dest, None) or [])
        for name in parse_names(values):
            if name == ALL:
                chosen.extend(self._allowed)
                continue
            try:
                value = int(name)
            except ValueError:
                value = None
            if value not in self._allowed:
                parser.error(f"argument {option_string}: unknown {self.dest} '{name}'")
            chosen.append(value)
        setattr(namespace, self.dest, sorted(set(chosen)))


def parse_names(values: Any) -> List[str]:
    if isinstance(values, str):
        values = [values]
    return [name.strip() for value in values for name in value.split(',') if name.strip()]


def unit_interval(value: str) -> float:
    """Argparse type for a real in (0, 1]."""
    try:
        scale = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not a number")
    if not 0 < scale <= 1:
        raise argparse.ArgumentTypeError(f"{value} is not in (0, 1]")
    return scale


def seed64(value: str) -> int:
    """Argparse type for a 64-bit unsigned seed."""
    try:
        seed = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer")
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"{value} is not a 64-bit unsigned integer")
    return seed
