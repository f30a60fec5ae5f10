# Import the cases module so that case records register themselves
import ade_sieve.cases
