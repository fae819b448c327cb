#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stereoscope/error.hpp"

namespace stereoscope::flow {

using Vec = std::vector<double>;

// Conditioning tag selecting which stereo format a velocity field realizes.
enum class DomainTag { Parallel, Converged };

struct FlowState {
  Vec z;
  double t = 0.0;
};

// Caller-supplied analytic velocity field v(z, t, tag).
using VelocityField = std::function<Vec(const Vec& z, double t, DomainTag tag)>;

// Straight-line interpolant z_t = (1-t) z0 + t z1, t in [0,1].
FlowState lerp_path(const Vec& z0, const Vec& z1, double t);

// Mean over t_samples of ||v(z_t, t) - (z1 - z0)||^2 (squared euclidean norm,
// summed over components).
double flow_match_loss(const VelocityField& field, const Vec& z0, const Vec& z1,
                       const std::vector<double>& t_samples,
                       DomainTag tag = DomainTag::Parallel);

// Integrates z <- z - eta * v(z, t) from t = 1 down to 0. The schedule must
// cover [1, 0]: steps * eta == 1 within 1e-9, otherwise StepOverflow.
Vec euler_integrate(const VelocityField& field, const Vec& z1, int steps, double eta,
                    DomainTag tag = DomainTag::Parallel);

// Single deterministic evaluation v(z, t0, tag).
Vec feed_forward_predict(const VelocityField& field, const Vec& z_input, DomainTag tag,
                         double t0 = 0.001);

struct CycleLosses {
  double recon = 0.0;
  double cycle = 0.0;
  double total = 0.0;
};

// recon = ||fwd(z_l) - z_r||^2 + ||bwd(z_r) - z_l||^2,
// cycle = ||z_l - bwd(fwd(z_l))||^2  (the L->R->L direction; the reverse
// direction is added when include_reverse_cycle is set),
// total = recon + lambda * cycle.
CycleLosses cycle_objective(const VelocityField& fwd, const VelocityField& bwd, const Vec& z_l,
                            const Vec& z_r, double lambda = 0.5,
                            DomainTag tag = DomainTag::Parallel, double t0 = 0.001,
                            bool include_reverse_cycle = false);

// Sample grids for the flow-matching loss.
std::vector<double> uniform_times(int n);                      // interval midpoints
std::vector<double> stratified_times(int n, uint64_t seed);    // jittered midpoints

}  // namespace stereoscope::flow
