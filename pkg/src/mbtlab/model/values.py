"""Runtime values: arbitrary-precision ints, bools, constructor terms and Absent.

Constructor terms are tuples ``(name, arg0, arg1, ...)`` wrapped in :class:`Con`
so they hash and compare structurally and stay cheap to build.
"""

from __future__ import annotations


class Con(tuple):
    __slots__ = ()

    @staticmethod
    def make(name, args=()):
        return Con((name, *args))

    @property
    def name(self):
        return self[0]

    @property
    def args(self):
        return self[1:]

    def __repr__(self):
        return format_value(self)


class _Absent:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ε"

    def __reduce__(self):
        return (_Absent, ())


ABSENT = _Absent()


def is_absent(v):
    return v is ABSENT


def format_value(v):
    if v is ABSENT:
        return "ε"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Con):
        if len(v) == 1:
            return v[0]
        return v[0] + "(" + ", ".join(format_value(a) for a in v[1:]) + ")"
    raise TypeError(f"not a model value: {v!r}")


def value_depth(v):
    if isinstance(v, Con):
        return 1 + max((value_depth(a) for a in v[1:]), default=0)
    return 1


def value_key(v):
    """Total order key for values of mixed kinds, used for deterministic sorting."""
    if v is ABSENT:
        return (0,)
    if isinstance(v, bool):
        return (1, int(v))
    if isinstance(v, int):
        return (2, v)
    return (3, v[0], tuple(value_key(a) for a in v[1:]))


def head(v):
    """Constructor name, literal text or ε; used by failure signatures."""
    if isinstance(v, Con):
        return v[0]
    return format_value(v)
