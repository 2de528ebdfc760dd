"""Expected average diameter difference of the nine-point sphere test.

Each of the nine points on a 25 mm sphere is pushed along its outward normal
by N(0, sigma); a Kasa fit follows and the nine 2|d_i - r| values are averaged.
The result is the mean of that average over many trials.
"""
import numpy as np

R = 12.5
SIGMA = 0.02
TRIALS = 1_000_000
CHUNK = 100_000


def directions():
    out = []
    for lat in (0.0, 45.0):
        for lon in (0.0, 90.0, 180.0, -90.0):
            la, lo = np.radians(lat), np.radians(lon)
            out.append([np.cos(la) * np.cos(lo), np.cos(la) * np.sin(lo), np.sin(la)])
    out.append([0.0, 0.0, 1.0])
    return np.array(out)


def average_dd(noise, n):
    pts = (R + noise)[..., None] * n  # (T, 9, 3)
    mean = pts.mean(axis=1, keepdims=True)
    q = pts - mean
    a = np.concatenate([2 * q, np.ones(q.shape[:2] + (1,))], axis=2)
    b = (q ** 2).sum(axis=2)
    ata = np.einsum("tij,tik->tjk", a, a)
    atb = np.einsum("tij,ti->tj", a, b)
    x = np.linalg.solve(ata, atb[..., None])[..., 0]
    c = x[:, :3]
    r = np.sqrt(x[:, 3] + (c ** 2).sum(axis=1))
    d = np.linalg.norm(q - c[:, None, :], axis=2)
    return (2 * np.abs(d - r[:, None])).mean(axis=1)


if __name__ == "__main__":
    rng = np.random.default_rng(20241019)
    n = directions()
    acc = []
    for _ in range(TRIALS // CHUNK):
        acc.append(average_dd(rng.normal(0.0, SIGMA, size=(CHUNK, 9)), n))
    v = np.concatenate(acc)
    print(f"mean_average_dd={v.mean():.9f}")
    print(f"std_error={v.std() / np.sqrt(len(v)):.3e}")
