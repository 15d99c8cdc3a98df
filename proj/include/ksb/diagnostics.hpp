#pragma once

/// @file diagnostics.hpp
/// @brief Monitored functionals: norms, boundary flux, weighted moment,
///        energy-balance residual, regularity-criterion integral, blow-up
///        detection, quench-rate fitting, buoyancy scaling slopes, and the
///        iteration-exponent product.

#include <iosfwd>
#include <vector>

#include "ksb/chemotaxis.hpp"
#include "ksb/grid.hpp"

namespace ksb {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double l2_rho = 0.0;
  double h1_rho = 0.0;
  double linf_rho = 0.0;
  double min_rho = 0.0;
  double l2_u = 0.0;
  double h1_u = 0.0;
  double flux = 0.0;                // boundary integral of the normal derivative
  double moment = 0.0;              // integral of (y - Ly) rho
  double energy_residual = 0.0;     // backward-difference energy balance defect
  double criterion_integral = 0.0;  // running trapezoid of l2_rho^2
};

/// Kinetic energy -(psi, omega)/2 in the compact stream-function metric; with
/// the enstrophy-plus-wall dissipation below it closes the discrete energy
/// balance of the flow step to first order in dt, with no grid-level floor.
double flow_energy(const FlowState& flow);
/// Dissipation |omega|^2 plus the wall half-cell term sum psi_adj wall / h_n^2.
double flow_dissipation(const FlowState& flow);

/// One record from the current state; prev supplies the accumulated criterion
/// integral, and prev_state the stream-function energy one snapshot back for
/// the energy residual (zero at the first snapshot, or when either is null).
DiagnosticsRecord snapshot(const CoupledState& state, double g,
                           const DiagnosticsRecord* prev = nullptr,
                           const CoupledState* prev_state = nullptr);

/// Max over interior sample times of the defect in the weighted-moment
/// identity; requires >= 3 uniformly spaced states.
double weighted_moment_identity_residual(const std::vector<CoupledState>& states);

struct BlowupCeilings {
  double linf_ceiling = 1e8;
  double accel_factor = 10.0;  // late/early criterion growth-rate ratio
};

enum class BlowupVerdict { alive, suspected };

BlowupVerdict detect_blowup(const std::vector<DiagnosticsRecord>& traj,
                            const BlowupCeilings& ceilings = {});

struct QuenchFit {
  bool entered = false;  // squared L2 norm dropped below the threshold
  double t_enter = 0.0;
  double rate = 0.0;  // decay rate of the squared norm; positive means decay
  double r2 = 0.0;
  int samples = 0;
  bool valid = false;  // r2 >= 0.99 over >= 20 samples
};

QuenchFit fit_quench_rate(const std::vector<DiagnosticsRecord>& traj, double eps_quench);

struct GScalingPoint {
  double g = 0.0;
  double int_l2u2 = 0.0;  // time integral of the squared velocity L2 norm
  double int_h1u2 = 0.0;  // time integral of the squared space-time H1 norm
};

struct GScalingReport {
  double slope_l2 = 0.0;
  double slope_h1 = 0.0;
  int points_used = 0;
};

/// Log-log regression slopes; requires >= 4 positive-g points spanning at
/// least two decades, else std::invalid_argument.
GScalingReport g_scaling_report(const std::vector<GScalingPoint>& points);

/// Product over j = 1..n of (2^(j+2) - d)/(2^(j+2) - 2d), computed termwise.
double moser_partial_product(int n, int d);
/// (4 - d 2^-n)/(4 - d), the telescoped value the product must match.
double moser_closed_form(int n, int d);

extern const char* const diagnostics_csv_header;
void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);

}  // namespace ksb
