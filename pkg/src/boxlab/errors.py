"""Exception types shared across the package."""


class BoxlabError(Exception):
    """Base class for all boxlab errors."""


class InvalidBox(BoxlabError):
    pass


class InvalidWiring(BoxlabError):
    pass


class WeightSumError(BoxlabError):
    pass


class NotInSpan(BoxlabError):
    pass


class DegenerateBasis(BoxlabError):
    pass


class DepthLimit(BoxlabError):
    pass


class UnsupportedClass(BoxlabError):
    pass


class MissingPartition(BoxlabError):
    pass


class NotSymmetric(BoxlabError):
    pass


class ImperfectStrategy(BoxlabError):
    pass


class NotAutomorphism(BoxlabError):
    pass


class ParameterTooSmall(BoxlabError):
    pass


class TooLarge(BoxlabError):
    pass


class DimensionLimit(BoxlabError):
    pass


class InvalidKey(BoxlabError):
    pass


class NotHermitianUnitary(BoxlabError):
    pass


class OutOfRange(BoxlabError):
    pass


class NonCommuting(BoxlabError):
    pass
