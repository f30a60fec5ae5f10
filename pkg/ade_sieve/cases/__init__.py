from ade_sieve.cases.dseries import *
from ade_sieve.cases.eseries import *
