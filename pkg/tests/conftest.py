import sympy
from hypothesis import settings

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


def to_sympy(obj):
    """Oracle conversion through the printed form."""
    return sympy.sympify(str(obj).replace("^", "**"))
