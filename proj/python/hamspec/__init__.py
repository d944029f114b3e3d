try:
    from ._hamspec import *  # noqa: F401,F403
except ImportError:  # extension built out-of-tree (e.g. test builds)
    from _hamspec import *  # noqa: F401,F403
