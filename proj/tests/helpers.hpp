// helpers.hpp: shared fixtures for the unit tests.

#pragma once

#include "topobatt/model.hpp"

namespace topobatt::testing {

// Battery on B of cell 0, charger on A of cell -d: the phase-diagram layout.
inline ModelConfig split_cells(double delta, double g, int d = -1, double Delta = 0.0)
{
    ModelConfig c;
    c.bath.delta = delta;
    c.emitters.g = g;
    c.emitters.Delta = Delta;
    c.emitters.x1 = 0;
    c.emitters.x2 = -d;
    c.emitters.alpha = Sublattice::B;
    c.emitters.beta = Sublattice::A;
    return c;
}

// Both emitters on A of cell 0 with Delta = -Omega.
inline ModelConfig same_cavity(double delta, double g, double Delta = 1.0, double kappa_a = 0.0)
{
    ModelConfig c;
    c.bath.delta = delta;
    c.bath.kappa_a = kappa_a;
    c.emitters.g = g;
    c.emitters.Delta = Delta;
    c.emitters.Omega = -Delta;
    return c;
}

} // namespace topobatt::testing
