"""Single-atom dark-state pumping.

A driven ladder |1> -- Omega1 -- |p> -- Omega2 -- |R> has one superposition
of |1> and |R> that the lasers cannot touch.  Spontaneous emission from the
lossy intermediate level |p> keeps reshuffling the rest of the population
until everything has fallen into that dark state: dissipation does the
state preparation.

Runs in about a second.
"""

import numpy as np

from ryddark import (
    AtomParams,
    build_single_atom,
    dressed_basis,
    evolve,
    population,
    single_atom_dark_state,
)

# drive and decay in rad/us; gamma_p is the workhorse dissipation
omega = 2 * np.pi * 1.0
params = AtomParams(
    omega1=omega,
    omega2=omega,
    gamma_p=0.1515 * omega,
    gamma_r=5e-5 * omega,
)

# the dressed-state picture: one zero-energy dark state, two split bright ones
basis = dressed_basis(params)
print("dressed energies (rad/us):")
print(f"  dark     {basis.e0:+.4f}")
print(f"  zeta_+   {basis.e_plus:+.4f}")
print(f"  zeta_-   {basis.e_minus:+.4f}")

model = build_single_atom(params)
dark = single_atom_dark_state(params.omega1, params.omega2)

# start in the bare ground state |1>, which overlaps the dark state by 1/2
rho0 = np.zeros((4, 4), dtype=complex)
rho0[1, 1] = 1.0
print(f"\ninitial dark-state population: {population(rho0, dark):.4f}")

t_final = 1000.0 / omega  # a thousand drive cycles
series = evolve(
    model, rho0, t_final, t_final / 500,
    observables={
        "dark": lambda r: population(r, dark),
        "p": lambda r: float(np.real(r[2, 2])),
        "R": lambda r: float(np.real(r[3, 3])),
    },
)

for frac in (0.0, 0.05, 0.1, 0.25, 0.5, 1.0):
    i = int(frac * (len(series.times) - 1))
    print(f"  omega1*t = {omega * series.times[i]:7.1f}:  "
          f"P(dark) = {series.columns['dark'][i]:.6f}")

print(f"\nfinal dark-state population: {series.columns['dark'][-1]:.6f}")
print("the lossy level |p> ends almost empty:",
      f"{series.columns['p'][-1]:.2e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(omega * series.times, series.columns["dark"])
    ax.set_xlabel(r"$\Omega_1 t$")
    ax.set_ylabel("dark-state population")
    ax.set_ylim(0.4, 1.02)
    fig.tight_layout()
    fig.savefig("single_atom_pumping.png", dpi=150)
    print("wrote single_atom_pumping.png")
except ImportError:
    pass
