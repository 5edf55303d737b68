# Arbitrary-precision reference values frozen into the Rust tests.
from mpmath import mp, mpf, pi, tanh, sech, atanh, asin, sin, sinh, cosh, exp, log, sqrt, quad, tan

mp.dps = 40

def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 25)}")

show("tanh(pi/11)", tanh(pi / 11))
show("tanh(2pi/28)", tanh(2 * pi / 28))
show("sech(2pi/28)", sech(2 * pi / 28))
show("sech(3pi/11)", sech(3 * pi / 11))
show("atanh(sin 60deg)", atanh(sin(pi / 3)))
show("asin(tanh(pi/11))", asin(tanh(pi / 11)))

m0 = atanh(mpf("0.95")) * 28 / (2 * pi)
show("m0 for h/R=0.95, N=28", m0)
show("dome ratio row2/row1", sinh(2 * pi * (1 + m0) / 28) / sinh(2 * pi * (2 + m0) / 28))

for m in range(8):
    show(f"sech(2pi*{m}/28)/sech(2pi/28)", sech(2 * pi * m / 28) / sech(2 * pi / 28))

# closed forms of the isothermal coordinate checked against direct quadrature
def xi_quad(rho, drho, z0, z1):
    return quad(lambda z: sqrt(1 + drho(z) ** 2) / rho(z), [z0, z1])

z = mpf("0.7")
show("hemisphere xi(0.7) quad", xi_quad(lambda t: sqrt(1 - t * t), lambda t: -t / sqrt(1 - t * t), 0, z))
show("hemisphere xi(0.7) atanh", atanh(z))
a = pi / 5
H = 1 / tan(a)
show("cone xi(0.5) quad", xi_quad(lambda t: tan(a) * (H - t), lambda t: -tan(a), 0, mpf("0.5")))
show("cone xi(0.5) closed", -log(1 - mpf("0.5") / H) / sin(a))
