#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crn/entropy.hpp"
#include "crn/network.hpp"

namespace crn {

struct SolverConfig {
    std::size_t n_x = 256;
    double dt = 0.0;        ///< 0 selects safety / (reaction Jacobian bound at the initial data)
    double t_end = 1.0;
    double epsilon = 0.0;   ///< kinetics R / (1 + epsilon |R|_1); 0 is plain mass action
    double safety = 0.9;
    std::size_t output_every = 1; ///< record diagnostics every k steps (and at t_end)
    std::size_t recheck_every = 100; ///< steps between step-size stability checks
    std::optional<Eigen::VectorXd> c_inf; ///< reference equilibrium; solved for when absent
    /// Called for each warning as it is raised, so it is seen even if the run later throws.
    std::function<void(const std::string&)> on_warning;
};

struct SimulationSeries {
    std::vector<double> times;
    std::vector<double> entropy;              ///< E(c(t) | c_inf)
    std::vector<double> dissipation;          ///< D(c(t))
    std::vector<double> dissipation_integral; ///< integral of D from 0 to t, D taken after each diffusion sub-step
    std::vector<Eigen::VectorXd> masses;      ///< Q c_bar(t)
    std::vector<Eigen::VectorXd> averages;
    std::vector<Eigen::VectorXd> minima;
    std::vector<Eigen::VectorXd> l1_distance; ///< ||c_i(t) - c_i,inf||_1
    std::vector<double> max_reaction;         ///< max over cells of |R(c)|_1 in the last step
    std::vector<double> linear_residual;      ///< max residual of the tridiagonal solves in the last step

    Eigen::VectorXd c_inf;
    Eigen::VectorXd initial_mass;
    double dt = 0.0;
    double h = 0.0;
    std::size_t steps = 0;
    std::size_t clip_events = 0;   ///< cell values that were negative after a step
    double clipped_mass = 0.0;     ///< total |value| removed by clipping
    double max_clip_per_step = 0.0;
    double min_before_clip = 0.0;  ///< smallest value seen before clipping
    std::vector<std::string> warnings;
    SpatialField initial;
    SpatialField final_state;

    SimulationSeries() : initial(1, 1), final_state(1, 1) {}
};

/// Implicit diffusion (Neumann, tridiagonal) followed by an explicit reaction
/// step, repeated until t_end with a fixed step. Throws BlowUp if a value
/// exceeds 1e12 or stops being finite.
SimulationSeries simulate(const Network& net, const SpatialField& initial, const SolverConfig& config);

/// max over cells of the infinity norm of dR/dc.
double reaction_jacobian_bound(const Network& net, const SpatialField& c);

struct DecayFit {
    double rate = 0.0;                ///< -slope of log E over the window
    std::vector<double> species_rate; ///< -slope of log ||c_i - c_i,inf||_1, NaN where not positive
    std::size_t samples = 0;
};

/// Least-squares decay rate over [t0, t1]. Throws InvalidArgument if fewer
/// than 10 samples fall in the window or E drops below 1e-14 there.
DecayFit fit_decay_rate(const SimulationSeries& series, double t0, double t1);
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& entropy, double t0, double t1);

struct WeakLawCheck {
    double max_violation = 0.0; ///< max over recorded s < t of E(t) + int_s^t D - E(s)
    double s = 0.0, t = 0.0;    ///< where it occurs
    double tolerance = 0.0;     ///< C (dt + h^2) E(0)
    bool holds = true;
};

/// Tolerance constant C in tol = C (dt + h^2) E(0).
inline constexpr double kWeakLawConstant = 10.0;

WeakLawCheck check_weak_entropy_law(const SimulationSeries& series);
WeakLawCheck check_weak_entropy_law(const std::vector<double>& times, const std::vector<double>& entropy,
                                    const std::vector<double>& dissipation_integral, double tolerance);

/// t,E,D,mass_1..mass_m,avg_1..avg_N,min_1..min_N
void write_series_csv(std::ostream& out, const SimulationSeries& series);
/// x,c_1..c_N
void write_snapshot_csv(std::ostream& out, const SpatialField& field);

} // namespace crn
