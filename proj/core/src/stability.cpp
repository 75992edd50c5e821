#include <vshd/stability.hpp>

#include <vshd/errors.hpp>
#include <vshd/golden_section.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vshd::stability {

using model::ov_ceiling;
using model::ov_velocity;
using model::variable_headway;

namespace {

double sech_sq(double x) noexcept {
	const double c = std::cosh(x);
	return 1.0 / (c * c);
}

// Bisection leaves two adjacent doubles; among their close neighbours take the
// one whose evaluated residual is smallest, preferring an exact zero so that
// the equilibrium is a fixed point of the discretized dynamics too.
template <class Residual>
double polish(double lo, double hi, Residual&& residual) {
	constexpr int kReach = 8;
	double best = lo;
	double best_abs = std::abs(residual(lo));
	auto consider = [&](double x) {
		const double r = std::abs(residual(x));
		if (r < best_abs) {
			best = x;
			best_abs = r;
		}
	};
	consider(hi);
	double down = lo;
	double up = hi;
	for (int i = 0; i < kReach && best_abs != 0.0; ++i) {
		down = std::nextafter(down, -std::numeric_limits<double>::infinity());
		up = std::nextafter(up, std::numeric_limits<double>::infinity());
		consider(down);
		consider(up);
	}
	return best;
}

}  // namespace

double ov_inverse(double v_target, const ModelParams& p) {
	const double ceiling = ov_ceiling(v_target, p);
	if (!std::isfinite(v_target) || !(v_target > 0.0) || !(v_target < ceiling)) {
		throw OutOfRange("speed " + std::to_string(v_target) + " m/s is outside (0, " +
						 std::to_string(ceiling) + ") attainable by the OV function");
	}
	const auto residual = [&](double dx) { return ov_velocity(dx, v_target, p) - v_target; };

	const double h_f = variable_headway(v_target, p);
	if (residual(h_f) == 0.0) {
		return h_f;
	}

	double lo = 0.0;
	double hi = h_f + 50.0;
	for (int grow = 0; residual(hi) <= 0.0; ++grow) {
		if (grow > 64) throw OutOfRange("ov_inverse: upper bracket not found");
		lo = hi;
		hi *= 2.0;
	}
	while (true) {
		const double mid = lo + 0.5 * (hi - lo);
		if (mid <= lo || mid >= hi) break;
		if (residual(mid) < 0.0) {
			lo = mid;
		} else {
			hi = mid;
		}
	}
	const double dx = polish(lo, hi, residual);
	if (!(std::abs(residual(dx)) < 1e-10)) {
		throw OutOfRange("ov_inverse: residual above 1e-10 at speed " + std::to_string(v_target));
	}
	return dx;
}

OperatingPoint equilibrium(double v0, const ModelParams& p) {
	return {v0, ov_inverse(v0, p)};
}

double lambda1(const OperatingPoint& point, const ModelParams& p) noexcept {
	const double h_f = variable_headway(point.v0, p);
	return 0.5 * p.v_max * sech_sq(point.dx_star - h_f);
}

double lambda2(const OperatingPoint& point, const ModelParams& p) noexcept {
	if (p.b == 0.0) {
		return 0.0;
	}
	const double h_f = variable_headway(point.v0, p);
	return 0.5 * p.v_max * p.b * p.t_s * (sech_sq(h_f) - sech_sq(point.dx_star - h_f));
}

bool p_stable(double alpha, double lambda, double l2) noexcept {
	return lambda > alpha * l2;
}

double string_margin(double alpha, double lambda, double l1, double l2) noexcept {
	return alpha + alpha * l2 * l2 - 2.0 * alpha * l2 + 2.0 * lambda - 2.0 * lambda * l2 - 2.0 * l1;
}

double gain_squared(double omega, double alpha, double lambda, double l1, double l2) {
	const double w2 = omega * omega;
	const double static_gain = alpha * l1;
	const double damping = alpha + lambda - alpha * l2;
	const double num = static_gain * static_gain + w2 * lambda * lambda;
	const double real = static_gain - w2;
	const double den = real * real + damping * damping * w2;
	if (!(den >= 1e-300)) {
		throw Degenerate("|G(jw)|^2 denominator vanishes at w=" + std::to_string(omega));
	}
	return num / den;
}

StabilityPoint analyze(const OperatingPoint& point, const ModelParams& p) noexcept {
	StabilityPoint out;
	out.lambda1 = lambda1(point, p);
	out.lambda2 = lambda2(point, p);
	out.p_stable = p_stable(p.alpha, p.lambda, out.lambda2);
	out.margin = string_margin(p.alpha, p.lambda, out.lambda1, out.lambda2);
	return out;
}

HinfResult hinf_satisfied(double alpha, double lambda, double l1, double l2, const SweepOptions& opts) {
	if (!p_stable(alpha, lambda, l2)) {
		throw std::invalid_argument("hinf_satisfied: p(s) is not stable (lambda <= alpha * L2)");
	}
	if (!(opts.omega_max > 0.0) || opts.n_samples < 2 || !(opts.omega_min_ratio > 0.0) ||
		!(opts.omega_min_ratio < 1.0)) {
		throw std::invalid_argument("hinf_satisfied: need omega_max > 0 and n_samples >= 2");
	}
	const auto gain = [&](double w) { return gain_squared(w, alpha, lambda, l1, l2); };

	const double w_lo = opts.omega_max * opts.omega_min_ratio;
	const double log_span = std::log(opts.omega_max / w_lo);
	const std::size_t n = opts.n_samples;
	auto grid = [&](std::size_t k) {
		if (k + 1 == n) return opts.omega_max;
		return w_lo * std::exp(log_span * static_cast<double>(k) / static_cast<double>(n - 1));
	};

	HinfResult best{false, gain(0.0), 0.0};
	std::size_t k_best = 0;
	double g_best = -1.0;
	for (std::size_t k = 0; k < n; ++k) {
		const double g = gain(grid(k));
		if (g > g_best) {
			g_best = g;
			k_best = k;
		}
	}
	const double lo = k_best == 0 ? 0.0 : grid(k_best - 1);
	const double hi = grid(std::min(k_best + 1, n - 1));
	const double w_ref = golden_section_maximize(gain, lo, hi, opts.rel_tolerance);

	for (auto [w, g] : {std::pair{grid(k_best), g_best}, std::pair{w_ref, gain(w_ref)}}) {
		if (g > best.sup) {
			best.sup = g;
			best.omega_at_sup = w;
		}
	}
	best.satisfied = best.sup <= 1.0 + kHinfTolerance;
	return best;
}

std::vector<FrequencyGainSample> gain_profile(double alpha, double lambda, double l1, double l2,
											  double omega_max, std::size_t n_samples) {
	if (!(omega_max > 0.0) || n_samples < 2) {
		throw std::invalid_argument("gain_profile: need omega_max > 0 and n_samples >= 2");
	}
	std::vector<FrequencyGainSample> out;
	out.reserve(n_samples);
	for (std::size_t k = 0; k < n_samples; ++k) {
		const double w = omega_max * static_cast<double>(k) / static_cast<double>(n_samples - 1);
		out.push_back({w, gain_squared(w, alpha, lambda, l1, l2)});
	}
	return out;
}

double lambda_for(const LambdaMode& mode, double alpha) noexcept {
	if (const auto* fixed = std::get_if<FixedLambda>(&mode)) {
		return fixed->lambda;
	}
	return std::get<ProportionalLambda>(mode).kappa * alpha;
}

NeutralAlpha neutral_alpha(double l1, double l2, const LambdaMode& mode) noexcept {
	const double gap = 1.0 - l2;
	if (!(std::abs(gap) > kSingularTolerance)) {
		return {NeutralStatus::Singular, std::nullopt};
	}
	double alpha = 0.0;
	if (const auto* fixed = std::get_if<FixedLambda>(&mode)) {
		alpha = 2.0 * (l1 - fixed->lambda * gap) / (gap * gap);
	} else {
		const double den = gap * gap + 2.0 * std::get<ProportionalLambda>(mode).kappa * gap;
		if (!(std::abs(den) > kSingularTolerance)) {
			return {NeutralStatus::Singular, std::nullopt};
		}
		alpha = 2.0 * l1 / den;
	}
	if (!(alpha > 0.0) || !std::isfinite(alpha)) {
		return {NeutralStatus::NotApplicable, std::nullopt};
	}
	return {NeutralStatus::Ok, alpha};
}

std::vector<SurfaceSample> neutral_surface(const ModelParams& p, std::span<const double> v_grid,
										   const DxMode& dx_mode, const LambdaMode& lambda_mode) {
	if (v_grid.empty()) {
		throw std::invalid_argument("neutral_surface: empty speed grid");
	}
	const auto sample_at = [&](const OperatingPoint& op) {
		SurfaceSample s;
		s.v = op.v0;
		s.dx = op.dx_star;
		s.lambda1 = lambda1(op, p);
		s.lambda2 = lambda2(op, p);
		s.neutral = neutral_alpha(s.lambda1, s.lambda2, lambda_mode);
		return s;
	};

	std::vector<SurfaceSample> out;
	if (const auto* mesh = std::get_if<MeshDx>(&dx_mode)) {
		if (mesh->dx_grid.empty()) {
			throw std::invalid_argument("neutral_surface: empty headway grid");
		}
		out.reserve(v_grid.size() * mesh->dx_grid.size());
		for (double v : v_grid) {
			for (double dx : mesh->dx_grid) {
				out.push_back(sample_at({v, dx}));
			}
		}
	} else {
		out.reserve(v_grid.size());
		for (double v : v_grid) {
			out.push_back(sample_at(equilibrium(v, p)));
		}
	}
	return out;
}

}  // namespace vshd::stability
