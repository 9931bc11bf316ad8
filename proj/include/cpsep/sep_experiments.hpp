#pragma once

#include <cstdint>
#include <optional>

#include "cpsep/density_matrix.hpp"
#include "cpsep/random_stream.hpp"
#include "cpsep/report.hpp"

namespace cpsep {

/// <u|Z|u> with Z = diag(+1 ... +1, -1 ... -1); u must have even length.
double balanced_sign_form(const CVector& u);

// Net-relative farness certification: draw rotated spectral instances,
// take the minimum of the pure product quadratic form over a fixed seeded
// net, and call the instance certified when that minimum clears -eps.
// Reports the certified fraction, the per-state two-sided tail frequency
// at eps, and the analytic tail value 4 exp(-d c^2 / 8) at c = 2 eps
// sqrt(d). Runs with eps below the Gurvits-Barnum threshold are refused
// with a note, since certification is impossible inside the separable
// ball.
ExperimentReport farness_certification_experiment(int d, double eps, int net_size,
                                                  int instance_trials, RandomStream& rng);

// Concentration of the balanced quadratic form on a random unit vector in
// C^k: exceedance of |<u|Z|u>| over (1/2) c k^(-1/4) against the bound
// 4 exp(-sqrt(k) c^2 / 8), cross-checked by the equidistributed
// (X - Y)/(X + Y) chi-square sampler.
ExperimentReport concentration_experiment(int k, double c, std::int64_t trials,
                                          RandomStream& rng);

// Arithmetic audit of the reduction's probability budget: given a
// certification rate f, the distinguisher's error on rotated instances is
// at most (1 - f) + f/3 (5/9 at f = 2/3), while maximally mixed inputs
// pass through untouched. With no rate supplied, a small seeded farness
// run measures one.
ExperimentReport reduction_protocol_trace(int d, double eps,
                                          std::optional<double> frac_certified,
                                          RandomStream& rng);

}  // namespace cpsep
