"""Exception types shared across the package."""


class GimbalLockError(ValueError):
    """Attitude too close to the pitch singularity for the rate transform."""


class InfeasibleWrenchError(ValueError):
    """Requested body wrench requires a negative squared rotor speed."""


class TrajectoryInfeasibleError(ValueError):
    """No trajectory satisfies the boundary conditions under the motion limits.

    ``binding`` names the constraint that could not be met ("v_max", "j_max",
    "terminal_velocity", ...).
    """

    def __init__(self, message: str, binding: str):
        super().__init__(message)
        self.binding = binding


class NonStabilizableError(ValueError):
    """(A, B) pair has uncontrollable modes in the closed right half plane.

    ``modes`` lists the offending eigenvalues.
    """

    def __init__(self, message: str, modes):
        super().__init__(message)
        self.modes = list(modes)


class SimulationDivergedError(RuntimeError):
    """Integration produced a non-finite or absurd state.

    Carries the last valid state and the partial log collected so far.
    """

    def __init__(self, message: str, last_state=None, partial_log=None):
        super().__init__(message)
        self.last_state = last_state
        self.partial_log = partial_log


class LogSchemaError(ValueError):
    """A CSV log does not match the frozen column schema."""
