from hkv.primitives.models import ErrorBar, IdentityReport, VerificationReport

__all__ = ["ErrorBar", "IdentityReport", "VerificationReport"]
