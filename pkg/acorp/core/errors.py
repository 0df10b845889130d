# Written by the acorp developers - 2026
#####################################################


class AcorpError(Exception):
    # Error names travel verbatim over HTTP and the CLI
    @property
    def name(self) -> str:
        return type(self).__name__


# governance_core
class EncodingUnsupported(AcorpError):
    pass


class MalformedKey(AcorpError):
    pass


# registry
class NotFound(AcorpError):
    pass


class NotActive(AcorpError):
    pass


class DuplicateMasterKey(AcorpError):
    pass


class BadSignature(AcorpError):
    pass


class IllegalTransition(AcorpError):
    pass


# capability
class ScopeEscalation(AcorpError):
    pass


class ChainTooDeep(ScopeEscalation):
    pass


class NoDelegateRight(AcorpError):
    pass


class ParentInvalid(AcorpError):
    pass


class NotAncestor(AcorpError):
    pass


class UnknownToken(AcorpError):
    pass


# ledger
class Unauthorized(AcorpError):
    def __init__(self, message: str = "", verdict=None):
        super().__init__(message)
        self.verdict = verdict


class InsufficientFunds(AcorpError):
    pass


class AcorpInactive(AcorpError):
    pass


# audit
class StorageFailure(AcorpError):
    pass


class UnknownAction(AcorpError):
    pass


# selection_sim / interface
class ConfigInvalid(AcorpError):
    pass


class BindFailure(AcorpError):
    pass


class CorruptDataDir(AcorpError):
    pass
