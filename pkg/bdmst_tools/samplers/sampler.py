import logging
import time

logger = logging.getLogger(__name__)


class SamplerException(Exception):
    pass


def timed(function):
    def wrap_inner(*args, **kwargs):
        self = args[0]
        start = time.perf_counter()
        result = function(*args, **kwargs)
        logger.info("%s sampler finished in %.3f s", self.name,
                    time.perf_counter() - start)
        return result
    return wrap_inner


class Sampler:
    """Draws reads from an Ising model.

    Concrete samplers return a ReadSet of physical spin configurations
    and their energies in the model they were given.
    """

    name = 'base'

    def sample(self, ising, num_reads, seed=None):
        raise NotImplementedError

    def describe(self):
        return {'sampler': self.name}
