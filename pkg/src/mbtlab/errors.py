"""Exception hierarchy shared by all subpackages."""


class MbtError(Exception):
    """Base class for every error raised by mbtlab."""


class EvalError(MbtError):
    pass


class FuelExhausted(EvalError):
    def __init__(self, fuel):
        super().__init__(f"evaluation fuel exhausted (budget {fuel})")
        self.fuel = fuel


class MatchFailure(EvalError):
    def __init__(self, value):
        super().__init__(f"no case arm matches {value!r}")
        self.value = value


class StepError(MbtError):
    """An error raised while executing one tick; carries the tick index once known."""

    def __init__(self, message, tick=None):
        super().__init__(message)
        self.message = message
        self.tick = tick

    def at_tick(self, tick):
        self.tick = tick
        self.args = (f"tick {tick}: {self.message}",)
        return self


class NondeterminismInStrictMode(StepError):
    def __init__(self, component, state, inputs, transitions):
        super().__init__(
            f"{component}: {len(transitions)} transitions enabled in state {state} "
            f"on inputs {inputs}"
        )
        self.component = component
        self.state = state
        self.inputs = inputs
        self.transitions = transitions


class InvalidModel(MbtError):
    def __init__(self, diagnostics):
        lines = "; ".join(str(d) for d in diagnostics[:5])
        super().__init__(f"model is invalid: {lines}")
        self.diagnostics = diagnostics


class ParseError(MbtError):
    def __init__(self, location, expected, found):
        super().__init__(f"{location}: expected {expected}, found {found!r}")
        self.location = location
        self.expected = expected
        self.found = found


class SchemaViolation(MbtError):
    def __init__(self, pointer, message):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


class UniverseExhausted(MbtError):
    def __init__(self, type_name, depth):
        super().__init__(f"type {type_name} has no inhabitants at depth {depth}")
        self.type_name = type_name
        self.depth = depth


class SpecUnsatisfiedWithinBound(MbtError):
    def __init__(self, spec_id):
        super().__init__(f"test case specification {spec_id} yields no trace within the bound")
        self.spec_id = spec_id


class GenerationTimeout(MbtError):
    pass


class ObservationChannelMissing(MbtError):
    pass


class UncoveredValue(MbtError):
    def __init__(self, channel, value):
        super().__init__(f"adapter has no rule for {value!r} on channel {channel}")
        self.channel = channel
        self.value = value


class UnknownId(MbtError):
    pass


class UniverseMismatch(MbtError):
    pass


class OperatorInapplicable(MbtError):
    pass


class DegenerateVariance(MbtError):
    pass


class PoolTooSmall(MbtError):
    pass


class ConfigError(MbtError):
    pass
