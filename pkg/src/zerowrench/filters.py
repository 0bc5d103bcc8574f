"""Discrete first-order filters for the wrench-control loops.

Everything is built from two Tustin-discretized primitives at the control
rate: a unity-DC-gain low-pass  w/(s+w)  and a filtered differentiator
w*s/(s+w).  The composite acceleration path is a cascade of filtered
differentiators applied to sampled tip poses; its low-pass content L(s)
(the product of the stage low-passes) is exposed as the matching wrench
path so force and acceleration signals can be compared phase-aligned.

Discretization notes: the standalone low-pass supports prewarping so its
-3 dB point lands exactly on the cutoff; the differentiators and the
composite stages use the plain bilinear map (c = 2/dt), which makes the
discrete ramp gain of the differentiator exactly one and makes the
accel/wrench paths match exactly in the discrete domain.

Initialization: a low-pass passes its first sample through (y0 = u0); a
differentiator starts at zero output with its input memory primed, so a
stream with leading zeros is handled exactly time-invariantly.  Sections
can also be primed explicitly to a steady input (prime), which the
controllers use to engage bumplessly against a preloaded contact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class StreamRateMismatch(ValueError):
    """Filter stages or paired streams disagree on the sample period."""


@dataclass(frozen=True)
class FilterParams:
    """First-order filter parameters: cutoff in rad/s, sample period in s."""

    cutoff: float
    dt: float
    prewarp: bool = False

    def __post_init__(self):
        if self.cutoff <= 0.0:
            raise ValueError("cutoff must be positive")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.cutoff * self.dt >= 2.0:
            raise ValueError("cutoff * dt must stay below 2 for a usable discretization")


@dataclass
class FilterState:
    """One-sample memory of a first-order section."""

    prev_input: object = None
    prev_output: object = None
    initialized: bool = False

    def reset(self):
        self.prev_input = None
        self.prev_output = None
        self.initialized = False


def _coeffs(params):
    w = params.cutoff
    if params.prewarp:
        c = w / math.tan(0.5 * w * params.dt)
    else:
        c = 2.0 / params.dt
    a0 = c + w
    return (c - w) / a0, w / a0, w * c / a0


def lowpass_step(state, params, u):
    """Advance the low-pass one sample; first sample passes through."""
    a1, b, _ = _coeffs(params)
    u = np.asarray(u, dtype=float)
    if not state.initialized:
        y = u.copy()
        state.initialized = True
    else:
        y = a1 * state.prev_output + b * (u + state.prev_input)
    state.prev_input = u.copy()
    state.prev_output = y
    return y.copy()


def filtered_diff_step(state, params, u):
    """Advance the filtered differentiator one sample; first output is zero."""
    a1, _, bd = _coeffs(params)
    u = np.asarray(u, dtype=float)
    if not state.initialized:
        y = np.zeros_like(u)
        state.initialized = True
    else:
        y = a1 * state.prev_output + bd * (u - state.prev_input)
    state.prev_input = u.copy()
    state.prev_output = y
    return y.copy()


class LowPass:
    """Stateful low-pass section with cached coefficients."""

    def __init__(self, params):
        self.params = params
        self._a1, self._b, _ = _coeffs(params)
        self.state = FilterState()

    def reset(self):
        self.state.reset()

    def prime(self, u0):
        """Seed the section as if u0 had been the input forever (output at DC)."""
        u0 = np.asarray(u0, dtype=float)
        st = self.state
        st.prev_input = u0.copy()
        st.prev_output = u0.copy()
        st.initialized = True

    def step(self, u):
        u = np.asarray(u, dtype=float)
        st = self.state
        if not st.initialized:
            y = u.copy()
            st.initialized = True
        else:
            y = self._a1 * st.prev_output + self._b * (u + st.prev_input)
        st.prev_input = u.copy()
        st.prev_output = y
        return y

    def process(self, samples):
        return np.array([self.step(u) for u in np.asarray(samples, dtype=float)])


class FilteredDiff:
    """Stateful filtered differentiator w*s/(s+w)."""

    def __init__(self, params):
        self.params = params
        self._a1, _, self._bd = _coeffs(params)
        self.state = FilterState()

    def reset(self):
        self.state.reset()

    def prime(self, u0):
        """Seed the section as if u0 had been the input forever (zero slope)."""
        u0 = np.asarray(u0, dtype=float)
        st = self.state
        st.prev_input = u0.copy()
        st.prev_output = np.zeros_like(u0)
        st.initialized = True

    def step(self, u):
        u = np.asarray(u, dtype=float)
        st = self.state
        if not st.initialized:
            y = np.zeros_like(u)
            st.initialized = True
        else:
            y = self._a1 * st.prev_output + self._bd * (u - st.prev_input)
        st.prev_input = u.copy()
        st.prev_output = y
        return y

    def process(self, samples):
        return np.array([self.step(u) for u in np.asarray(samples, dtype=float)])


@dataclass(frozen=True)
class CompositeFilter:
    """Ordered stages shared by the acceleration path and its wrench path.

    The acceleration path differentiates twice through the cascade, so its
    transfer is s^2 * L(s) with L(s) the product of the stage low-passes;
    the wrench path applies L(s) alone.  All stages must share dt.
    """

    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if len(stages) < 1:
            raise ValueError("composite filter needs at least one stage")
        dt0 = stages[0].dt
        for st in stages:
            if st.dt != dt0:
                raise StreamRateMismatch("all composite stages must share dt")

    @property
    def dt(self):
        return self.stages[0].dt


def insertion_composite(dt, cutoffs_hz=(100.0, 15.0)):
    """Stage layout used by the insertion controller (fast stage, then slow)."""
    return CompositeFilter(tuple(FilterParams(TWO_PI * f, dt) for f in cutoffs_hz))


class CompositeAccelFilter:
    """Estimates acceleration from sampled poses: cascade of filtered differentiators."""

    def __init__(self, config):
        self.config = config
        self._stages = [FilteredDiff(p) for p in config.stages]

    def reset(self):
        for s in self._stages:
            s.reset()

    def step(self, pose):
        y = np.asarray(pose, dtype=float)
        for s in self._stages:
            y = s.step(y)
        return y


class CompositeWrenchFilter:
    """Applies the low-pass content L(s) of the acceleration path to a wrench stream."""

    def __init__(self, config):
        self.config = config
        self._stages = [LowPass(p) for p in config.stages]

    def reset(self):
        for s in self._stages:
            s.reset()

    def step(self, wrench):
        y = np.asarray(wrench, dtype=float)
        for s in self._stages:
            y = s.step(y)
        return y


def composite_accel(chain, pose_samples):
    """Run a pose stream through an acceleration chain (row per sample)."""
    return np.array([chain.step(p) for p in np.asarray(pose_samples, dtype=float)])


def apply_L(chain, wrench_samples):
    """Run a wrench stream through the matching low-pass chain."""
    return np.array([chain.step(w) for w in np.asarray(wrench_samples, dtype=float)])
