class TorPathError(Exception):
    @property
    def message(self) -> str:
        return Exception.__str__(self)

    def __str__(self) -> str:
        return self.message


class InvalidParameter(TorPathError):
    def __init__(self, what: str, why: str):
        super().__init__(what, why)
        self.__what = what
        self.__why = why

    @property
    def message(self) -> str:
        return f"Invalid {self.__what}: {self.__why}"


class ConfigurationError(TorPathError):
    def __init__(self, key: str, why: str):
        super().__init__(key, why)
        self.__key = key
        self.__why = why

    @property
    def key(self) -> str:
        return self.__key

    @property
    def message(self) -> str:
        return f"Configuration key '{self.__key}': {self.__why}"


class NoCandidates(TorPathError):
    def __init__(self, position: str):
        super().__init__(position)
        self.__position = position

    @property
    def message(self) -> str:
        return f"No candidate relay for position {self.__position}"


class CircuitBuildFailure(TorPathError):
    def __init__(self, strategy: str, why: str):
        super().__init__(strategy, why)
        self.__strategy = strategy
        self.__why = why

    @property
    def reason(self) -> str:
        return self.__why

    @property
    def message(self) -> str:
        return f"Circuit build failed for {self.__strategy}: {self.__why}"


class EmptyAggregate(TorPathError):
    @property
    def message(self) -> str:
        return "Cannot aggregate an empty list of circuits"


class SchemaMismatch(TorPathError):
    def __init__(self, field: str, why: str):
        super().__init__(field, why)
        self.__field = field
        self.__why = why

    @property
    def field(self) -> str:
        return self.__field

    @property
    def message(self) -> str:
        return f"Results schema mismatch at '{self.__field}': {self.__why}"
