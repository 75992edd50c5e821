#pragma once

// Variable safety headway distance (VSHD) car-following law.
//
//   h_f   = b * v * t_s + h_c
//   V(dx, v) = (v_max / 2) * [tanh(dx - h_f) + tanh(h_f)]
//   a     = alpha * [V(dx, v) - v] + lambda * dv
//
// With b = 0 the headway is the constant h_c and the law is the full velocity
// difference model.

namespace vshd::model {

struct ModelParams {
	double alpha = 0.5;   // driver sensitivity, 1/s
	double lambda = 0.5;  // velocity-difference gain, 1/s
	double v_max = 20.0;  // m/s
	double h_c = 7.0;     // fixed safety headway, m
	double b = 0.0;       // headway growth coefficient
	double t_s = 1.0;     // time unit entering h_f, s; independent of the integrator step

	/// Throws InvalidConfig naming the first field that breaks its invariant.
	void validate() const;
};

struct VehicleState {
	double x = 0.0;  // m
	double v = 0.0;  // m/s
};

/// What a follower sees of the vehicle directly ahead.
struct NeighborView {
	double dx = 0.0;  // x_leader - x_self, m
	double dv = 0.0;  // v_leader - v_self, m/s
};

double variable_headway(double v, const ModelParams& p) noexcept;

/// Total in dx; negative headways (collided states) are evaluated as-is.
double ov_velocity(double dx, double v, const ModelParams& p) noexcept;

double acceleration(const NeighborView& view, double v, const ModelParams& p) noexcept;

/// Supremum of ov_velocity over dx at speed v, (v_max / 2) * (1 + tanh(h_f)).
double ov_ceiling(double v, const ModelParams& p) noexcept;

}  // namespace vshd::model
