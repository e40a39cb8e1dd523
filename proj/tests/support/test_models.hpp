// test_models.hpp — shared model builders for the unit suites

#pragma once

#include "qcycle/model.hpp"

namespace qcycle::testing {

// single reservoir, static envelope, phi(u) = A u^2 e^{-u^2}, flat measure
inline ModelSpec static_single(double beta = 2.0, double g = 0.1, double tau = 3.0,
                               double amplitude = 1.0) {
    ModelSpec m;
    m.omega0 = 0.5;
    m.g = g;
    m.reservoirs.push_back(
        {beta, 0.0,
         FormFactor{PeriodicEnvelope::constant(tau),
                    RadialProfile::power_gaussian(2, 1.0, amplitude)}});
    return m;
}

// two reservoirs, cosine drive 1 + a cos(w t)
inline ModelSpec driven_pair(double beta1, double beta2, double g, double tau,
                             double drive_amp = 0.5, double amplitude = 2.0) {
    ModelSpec m;
    m.omega0 = 0.5;
    m.g = g;
    for (double b : {beta1, beta2})
        m.reservoirs.push_back(
            {b, 0.0,
             FormFactor{PeriodicEnvelope::cosine(tau, 1.0, drive_amp),
                        RadialProfile::power_gaussian(2, 1.0, amplitude)}});
    return m;
}

}  // namespace qcycle::testing
