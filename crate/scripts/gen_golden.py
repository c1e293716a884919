"""Reference values for the test suite, computed with mpmath.

Run: python3 scripts/gen_golden.py
The printed constants are pasted into crates/kpfourier/tests/common/mod.rs.
"""
import mpmath as mp

mp.mp.dps = 30


def gamma0(s):
    # integral over [1, inf) of exp(-i s t)/t dt = E1(i s)
    direct = mp.quadosc(lambda t: mp.exp(-1j * s * t) / t, [1, mp.inf], omega=abs(s))
    e1 = mp.e1(1j * s)
    assert abs(direct - e1) < mp.mpf(10) ** -15, (s, direct, e1)
    return e1


def window_line(x, omega):
    # integral of u(x + s) sin(omega s)/(pi s) ds, u(t) = 1/t on t >= 1
    f = lambda s: mp.sin(omega * s) / (mp.pi * s * (x + s)) if s != 0 else omega / (mp.pi * x)
    lo = 1 - x
    near = mp.quad(f, mp.linspace(lo, 2, 8 + int(omega)))
    tail = mp.quadosc(f, [2, mp.inf], omega=omega)
    return near + tail


def kernel_value(x, y, alpha, beta):
    jx = window_line(x, beta) - window_line(x, alpha)
    jy = window_line(y, beta) - window_line(y, alpha)
    return jx * jy


def gauss_transform(a, b):
    f = lambda x, y: mp.exp(-(x * x + x * y + y * y)) * mp.cos(a * x + b * y)
    return mp.quad(f, [-8, 0, 8], [-8, 0, 8])


def emit(name, v):
    print(f"pub const {name}: f64 = {mp.nstr(v, 17, min_fixed=-30, max_fixed=30)};")


emit("SI_PI", mp.si(mp.pi))
emit("SI_2PI", mp.si(2 * mp.pi))
for s, tag in [(1, "1"), (2, "2"), (0.5, "HALF"), (3, "3"), (0.1, "TENTH"), (0.01, "HUNDREDTH")]:
    g = gamma0(mp.mpf(s))
    emit(f"GAMMA0_{tag}_RE", g.real)
    emit(f"GAMMA0_{tag}_IM", g.imag)
emit("GAUSS_CORR_1_1", gauss_transform(1, 1))
emit("GAUSS_CORR_1_M2", gauss_transform(1, -2))
for (x, y, a, b, tag) in [
    (2, 3, 1, 4, "K23_S1"),
    (2, 3, 0.25, 16, "K23_S2"),
    (2, 3, 0.0625, 64, "K23_S3"),
    (2, 3, 0.015625, 256, "K23_S4"),
    (2, 3, 0.5, 4, "K23_HALF_4"),
    (2, 3, 0.25, 32, "K23_QUARTER_32"),
    (2, 3, 0.25, 64, "K23_QUARTER_64"),
]:
    emit(tag, kernel_value(mp.mpf(x), mp.mpf(y), mp.mpf(a), mp.mpf(b)))

# integral of cos(t) du(t) over the line for u = 1/t on t >= 1 (jump 1 at t = 1)
one_d = mp.cos(1) - mp.quadosc(lambda t: mp.cos(t) / t**2, [1, mp.inf], omega=1)
emit("PARTS_COS_COS", one_d**2)
