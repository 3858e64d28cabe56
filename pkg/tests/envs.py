"""Small environments for learning checks."""
import numpy as np

from wsnrl.env import StepResult


class BanditEnv:
    """One node, one step; reward 1 iff the node is commanded Active."""

    n = 1
    n_features = 4
    controlled = np.array([True])

    def __init__(self, worker=0):
        self.done = True

    def _obs(self):
        return np.array([[1.0, 0.5, 0.0, 0.0]])

    def reset(self):
        self.done = False
        return self._obs()

    def step(self, action):
        self.done = True
        r = 1.0 if int(action[0]) == 0 else 0.0
        return StepResult(self._obs(), r, True, {"r1": r, "r2": 0.0})
