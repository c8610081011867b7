"""Eight-state mode machine: actuator routing and transform sequencing.

Transitions are a pure function of (mode, context, command); the transform
sub-sequence enforces the arm ordering (fold rear before front going to
drive, unfold front before rear going to flight). Arms stay locked in every
airborne mode.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

# altitude above terrain separating take-off from free flight; ground effect
# is negligible beyond it
ALTITUDE_HANDOFF = 0.5

UNLOCK_TIME = 0.3   # s
FOLD_TIME = 2.0     # s per arm pair
LOCK_TIME = 0.3     # s


class Mode(Enum):
    STATIC = "static"
    TRANSFORM = "transform"
    DRIVE = "drive"
    TAKEOFF = "takeoff"
    FLYING = "flying"
    HOVERING = "hovering"
    TRAJECTORY_PLANNING = "trajectory_planning"
    LANDING = "landing"


class Command(Enum):
    NONE = "none"
    TAKEOFF = "takeoff"
    DRIVE = "drive"
    LAND = "land"
    GOTO = "goto"
    STOP = "stop"


class TransformDirection(Enum):
    TO_DRIVE = "to_drive"    # fold: rear pair first, then front
    TO_FLIGHT = "to_flight"  # unfold: front pair first, then rear


class TransformStep(Enum):
    UNLOCK = "unlock"
    FIRST_PAIR = "first_pair"
    SECOND_PAIR = "second_pair"
    LOCK = "lock"
    DONE = "done"


class TransformOrderError(RuntimeError):
    """Arm pairs moved out of the mandated order."""


@dataclass(frozen=True)
class TransformPhase:
    direction: TransformDirection
    step: TransformStep = TransformStep.UNLOCK
    step_progress: float = 0.0    # 0..1 within the current step
    first_pair: float = 0.0       # servo progress of the pair that must move first
    second_pair: float = 0.0
    goal: Mode = Mode.STATIC      # mode to enter once locked

    @property
    def complete(self) -> bool:
        return self.step is TransformStep.DONE

    @property
    def fold_fraction(self) -> float:
        """Overall fold state, 0 deployed .. 1 folded."""
        moved = (self.first_pair + self.second_pair) / 2.0
        if self.direction is TransformDirection.TO_DRIVE:
            return moved
        return 1.0 - moved


def transform_step(phase: TransformPhase, dt: float) -> TransformPhase:
    """Advance the transform sub-sequence by dt.

    Raises TransformOrderError if the phase encodes an ordering breach
    (second pair moving before the first pair finished).
    """
    if phase.second_pair > 0.0 and phase.first_pair < 1.0:
        raise TransformOrderError(
            f"second arm pair moved ({phase.second_pair:.2f}) before first "
            f"completed ({phase.first_pair:.2f}) going {phase.direction.value}")
    if phase.complete or dt <= 0.0:
        return phase
    remaining = dt
    step = phase.step
    progress = phase.step_progress
    first = phase.first_pair
    second = phase.second_pair
    durations = {
        TransformStep.UNLOCK: UNLOCK_TIME,
        TransformStep.FIRST_PAIR: FOLD_TIME,
        TransformStep.SECOND_PAIR: FOLD_TIME,
        TransformStep.LOCK: LOCK_TIME,
    }
    order = [TransformStep.UNLOCK, TransformStep.FIRST_PAIR,
             TransformStep.SECOND_PAIR, TransformStep.LOCK]
    while remaining > 0.0 and step is not TransformStep.DONE:
        duration = durations[step]
        advance = min(remaining, (1.0 - progress) * duration)
        progress += advance / duration
        remaining -= advance
        if step is TransformStep.FIRST_PAIR:
            first = progress
        elif step is TransformStep.SECOND_PAIR:
            second = progress
        if progress >= 1.0 - 1e-12:
            idx = order.index(step)
            step = order[idx + 1] if idx + 1 < len(order) else TransformStep.DONE
            progress = 0.0 if step is not TransformStep.DONE else 1.0
    return replace(phase, step=step, step_progress=progress,
                   first_pair=first, second_pair=second)


class ActuatorRouting(NamedTuple):
    rotors: bool
    wheels: bool
    servos: bool


ROUTING = {
    Mode.STATIC: ActuatorRouting(False, False, False),
    Mode.TRANSFORM: ActuatorRouting(False, False, True),
    Mode.DRIVE: ActuatorRouting(False, True, False),
    Mode.TAKEOFF: ActuatorRouting(True, True, False),   # run-up window
    Mode.FLYING: ActuatorRouting(True, False, False),
    Mode.HOVERING: ActuatorRouting(True, False, False),
    Mode.TRAJECTORY_PLANNING: ActuatorRouting(True, False, False),
    Mode.LANDING: ActuatorRouting(True, True, False),   # run-out window
}


@dataclass
class FsmContext:
    """Snapshot of everything the transition function may consult."""

    altitude: float = 0.0            # m above terrain
    arms_deployed: bool = True       # locked in flight configuration
    arms_folded: bool = False        # locked in drive configuration
    at_waypoint: bool = False
    plan_ready: bool = False
    touchdown: bool = False          # confirmed by the detector
    ground_speed: float = 0.0
    transform: TransformPhase | None = None
    runout: bool = False             # land rolling instead of stopping


class FsmResult(NamedTuple):
    mode: Mode
    routing: ActuatorRouting
    accepted: bool          # False when a command had no edge
    transform: TransformPhase | None


def fsm_step(mode: Mode, ctx: FsmContext, command: Command = Command.NONE) -> FsmResult:
    """One deterministic transition. Commands without an edge are rejected."""
    accepted = True
    new_mode = mode
    transform = ctx.transform

    if mode is Mode.STATIC:
        if command is Command.TAKEOFF:
            if ctx.arms_deployed:
                new_mode = Mode.TAKEOFF
            else:
                new_mode = Mode.TRANSFORM
                transform = TransformPhase(TransformDirection.TO_FLIGHT,
                                           goal=Mode.TAKEOFF)
        elif command is Command.DRIVE:
            if ctx.arms_folded:
                new_mode = Mode.DRIVE
            else:
                new_mode = Mode.TRANSFORM
                transform = TransformPhase(TransformDirection.TO_DRIVE,
                                           goal=Mode.DRIVE)
        elif command is not Command.NONE:
            accepted = False
    elif mode is Mode.TRANSFORM:
        if command in (Command.LAND, Command.GOTO):
            accepted = False
        elif transform is not None and transform.complete:
            new_mode = transform.goal
            transform = None
    elif mode is Mode.DRIVE:
        if command is Command.TAKEOFF:
            if ctx.arms_deployed:
                new_mode = Mode.TAKEOFF
            else:
                new_mode = Mode.TRANSFORM
                transform = TransformPhase(TransformDirection.TO_FLIGHT,
                                           goal=Mode.TAKEOFF)
        elif command is Command.STOP and abs(ctx.ground_speed) < 0.1:
            new_mode = Mode.STATIC
        elif command in (Command.LAND, Command.GOTO):
            accepted = False
    elif mode is Mode.TAKEOFF:
        if command is Command.LAND:
            new_mode = Mode.LANDING
        elif ctx.altitude > ALTITUDE_HANDOFF:
            new_mode = Mode.FLYING
        elif command in (Command.DRIVE,):
            accepted = False
    elif mode is Mode.FLYING:
        if command is Command.LAND or ctx.at_waypoint:
            new_mode = Mode.HOVERING
        elif command in (Command.DRIVE, Command.STOP):
            accepted = False
    elif mode is Mode.HOVERING:
        if command is Command.LAND:
            new_mode = Mode.TRAJECTORY_PLANNING
        elif command is Command.GOTO:
            new_mode = Mode.FLYING
        elif command in (Command.DRIVE, Command.STOP):
            accepted = False
    elif mode is Mode.TRAJECTORY_PLANNING:
        if ctx.plan_ready and ctx.altitude <= ALTITUDE_HANDOFF:
            new_mode = Mode.LANDING
        elif command in (Command.DRIVE, Command.STOP):
            accepted = False
    elif mode is Mode.LANDING:
        if ctx.touchdown:
            if command is Command.TAKEOFF:
                new_mode = Mode.TAKEOFF
            elif ctx.runout:
                new_mode = Mode.DRIVE
            else:
                new_mode = Mode.STATIC
        elif command in (Command.DRIVE, Command.STOP):
            accepted = False

    return FsmResult(new_mode, ROUTING[new_mode], accepted, transform)


class TouchdownDetector:
    """All four wheels in contact with near-zero vertical speed, sustained.

    The window is a rolling record of (time, ok) samples; detection requires
    every sample over the trailing window to qualify.
    """

    def __init__(self, window: float = 0.2, speed_threshold: float = 0.05):
        self.window = window
        self.speed_threshold = speed_threshold
        self._history: deque = deque()

    def reset(self) -> None:
        self._history.clear()

    def update(self, t: float, wheels_in_contact: int, vertical_speed: float) -> bool:
        ok = wheels_in_contact == 4 and abs(vertical_speed) < self.speed_threshold
        self._history.append((t, ok))
        while self._history and self._history[0][0] < t - self.window - 1e-12:
            self._history.popleft()
        if not ok:
            return False
        if not self._history or self._history[0][0] > t - self.window + 1e-12:
            return False  # not enough history yet
        return all(flag for _, flag in self._history)


def reachability_edges() -> dict:
    """Static edge set (mode -> set of successor modes) for graph checks."""
    return {
        Mode.STATIC: {Mode.TRANSFORM, Mode.TAKEOFF, Mode.DRIVE},
        Mode.TRANSFORM: {Mode.STATIC, Mode.TAKEOFF, Mode.DRIVE},
        Mode.DRIVE: {Mode.STATIC, Mode.TRANSFORM, Mode.TAKEOFF},
        Mode.TAKEOFF: {Mode.FLYING, Mode.LANDING},
        Mode.FLYING: {Mode.HOVERING},
        Mode.HOVERING: {Mode.TRAJECTORY_PLANNING, Mode.FLYING},
        Mode.TRAJECTORY_PLANNING: {Mode.LANDING},
        Mode.LANDING: {Mode.STATIC, Mode.DRIVE, Mode.TAKEOFF},
    }
