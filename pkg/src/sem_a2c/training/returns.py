"""n-step discounted returns over masked rollout segments."""

import numpy as np


def compute_returns(rewards, dones, bootstrap, gamma):
    """R_t = r_t + gamma * R_{t+1}, cut at episode ends.

    rewards/dones are (T, N); bootstrap (N,) seeds the recursion at the chunk
    boundary and is dropped wherever dones marks a terminal transition.
    Returns a float64 (T, N) array.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    t_len = rewards.shape[0]
    returns = np.empty_like(rewards)
    acc = np.asarray(bootstrap, dtype=np.float64).copy()
    for t in reversed(range(t_len)):
        acc = rewards[t] + gamma * acc * (1.0 - dones[t])
        returns[t] = acc
    return returns
