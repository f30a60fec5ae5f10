class Error(Exception):
    """
    Base class of every error raised by ade_sieve
    """

    code = 'error'
    # Process exit status when the error reaches the command line
    exit_status = 1

    def __init__(self, message=None):
        super().__init__(message or self.__doc__.strip())

    def reason(self):
        """One-line machine-parseable reason"""
        return '%s: %s' % (self.code, ' '.join(str(self).split()))


class InvalidDynkinType(Error):
    """
    The family/rank pair does not name an ADE Dynkin diagram
    """

    code = 'invalid-dynkin-type'


class BasisError(Error):
    """
    A character basis does not span the restricted character lattice
    """

    code = 'basis-does-not-span'


class DomainError(Error):
    """
    An integrand variable has no bound in the integration domain
    """

    code = 'missing-domain-bound'


class ZetaDomainError(Error):
    """
    A zeta argument lies outside the half-plane of convergence
    """

    code = 'zeta-divergent'


class NotWeaklyDivisible(Error):
    """
    No shift of the polynomial has the weak-divisibility shape
    """

    code = 'not-weakly-divisible'


class BudgetExceeded(Error):
    """
    The requested enumeration exceeds its configured budget
    """

    code = 'budget-exceeded'


class VerificationFailure(Error):
    """
    A computed quantity disagrees with its transcription
    """

    code = 'verification-failed'


class UsageError(Error):
    """
    An argument is malformed or names nothing the package knows
    """

    code = 'usage'
    exit_status = 2


class InvalidPolynomial(UsageError):
    """
    The coefficient list does not describe a usable monic polynomial
    """

    code = 'invalid-polynomial'


class UnregisteredCase(UsageError):
    """
    No case record is registered under this id
    """

    code = 'unregistered-case'
