#pragma once

// Linear string-stability analysis of the VSHD model around a uniform-flow
// equilibrium.
//
// Linearizing about (v0, dx*) with L1 = dV/d(dx) and L2 = dV/dv gives the
// headway-to-velocity transfer function
//
//   G(s) = (lambda s + alpha L1) / (s^2 + (alpha + lambda - alpha L2) s + alpha L1)
//
// p(s) is Hurwitz iff lambda > alpha L2 (alpha, L1 > 0). On the imaginary axis
// |G(jw)|^2 <= 1 for every w reduces to
//
//   alpha (1 - L2)^2 + 2 lambda (1 - L2) - 2 L1 >= 0,
//
// whose left-hand side is string_margin(). hinf_satisfied() checks the same
// property numerically by sweeping |G(jw)|^2.

#include <vshd/model.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace vshd::stability {

using model::ModelParams;

struct OperatingPoint {
	double v0 = 0.0;       // m/s
	double dx_star = 0.0;  // equilibrium headway, m
};

struct StabilityPoint {
	double lambda1 = 0.0;
	double lambda2 = 0.0;
	bool p_stable = false;
	double margin = 0.0;
};

struct FrequencyGainSample {
	double omega = 0.0;
	double gain_sq = 0.0;
};

/// Headway dx with ov_velocity(dx, v_target) == v_target, to 1e-10 m/s.
/// Throws OutOfRange unless 0 < v_target < ov_ceiling(v_target).
double ov_inverse(double v_target, const ModelParams& p);

OperatingPoint equilibrium(double v0, const ModelParams& p);

double lambda1(const OperatingPoint& point, const ModelParams& p) noexcept;
double lambda2(const OperatingPoint& point, const ModelParams& p) noexcept;

bool p_stable(double alpha, double lambda, double l2) noexcept;

/// Left-hand side of the closed-form sufficient condition. >= 0 means the
/// sufficient condition holds; < 0 means it fails (not that a jam must form).
double string_margin(double alpha, double lambda, double l1, double l2) noexcept;

/// |G(jw)|^2. Throws Degenerate when the denominator is below 1e-300.
double gain_squared(double omega, double alpha, double lambda, double l1, double l2);

StabilityPoint analyze(const OperatingPoint& point, const ModelParams& p) noexcept;

struct SweepOptions {
	double omega_max = 100.0;
	std::size_t n_samples = 2048;
	/// Lowest grid frequency as a fraction of omega_max.
	double omega_min_ratio = 1e-8;
	double rel_tolerance = 1e-9;
};

struct HinfResult {
	bool satisfied = false;  // sup <= 1 + 1e-9
	double sup = 0.0;
	double omega_at_sup = 0.0;
};

inline constexpr double kHinfTolerance = 1e-9;

/// Requires p_stable(alpha, lambda, l2); throws std::invalid_argument otherwise.
/// Samples |G|^2 on a log grid over (0, omega_max], refines the best bracket by
/// golden-section search, and includes the w -> 0 limit |G(0)|^2 = 1.
HinfResult hinf_satisfied(double alpha, double lambda, double l1, double l2,
						  const SweepOptions& opts = {});

std::vector<FrequencyGainSample> gain_profile(double alpha, double lambda, double l1, double l2,
											  double omega_max, std::size_t n_samples);

struct FixedLambda {
	double lambda = 0.0;
};

/// lambda = kappa * alpha.
struct ProportionalLambda {
	double kappa = 1.0;
};

using LambdaMode = std::variant<FixedLambda, ProportionalLambda>;

/// lambda implied by a mode once alpha is known.
double lambda_for(const LambdaMode& mode, double alpha) noexcept;

enum class NeutralStatus { Ok, Singular, NotApplicable };

struct NeutralAlpha {
	NeutralStatus status = NeutralStatus::Ok;
	std::optional<double> alpha;  // set iff status == Ok
};

inline constexpr double kSingularTolerance = 1e-9;

/// alpha at which string_margin is exactly zero.
NeutralAlpha neutral_alpha(double l1, double l2, const LambdaMode& mode) noexcept;

struct EquilibriumDx {};

/// Explicit (dx, v) mesh; dx need not be an equilibrium headway.
struct MeshDx {
	std::vector<double> dx_grid;
};

using DxMode = std::variant<EquilibriumDx, MeshDx>;

struct SurfaceSample {
	double v = 0.0;
	double dx = 0.0;
	double lambda1 = 0.0;
	double lambda2 = 0.0;
	NeutralAlpha neutral;
};

/// Samples are ordered v-major: for MeshDx, index = iv * dx_grid.size() + idx.
/// Throws OutOfRange in EquilibriumDx mode when a grid speed is unattainable.
std::vector<SurfaceSample> neutral_surface(const ModelParams& p, std::span<const double> v_grid,
										   const DxMode& dx_mode, const LambdaMode& lambda_mode);

}  // namespace vshd::stability
