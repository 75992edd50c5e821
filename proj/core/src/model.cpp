#include <vshd/model.hpp>

#include <vshd/errors.hpp>

#include <cmath>

namespace vshd::model {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void ModelParams::validate() const {
	if (!finite_positive(alpha)) throw InvalidConfig("alpha", "must be finite and > 0");
	if (!std::isfinite(lambda) || lambda < 0.0) throw InvalidConfig("lambda", "must be finite and >= 0");
	if (!finite_positive(v_max)) throw InvalidConfig("v_max", "must be finite and > 0");
	if (!finite_positive(h_c)) throw InvalidConfig("h_c", "must be finite and > 0");
	if (!std::isfinite(b) || b < 0.0) throw InvalidConfig("b", "must be finite and >= 0");
	if (!finite_positive(t_s)) throw InvalidConfig("t_s", "must be finite and > 0");
}

double variable_headway(double v, const ModelParams& p) noexcept {
	if (p.b == 0.0) {
		return p.h_c;
	}
	return p.b * v * p.t_s + p.h_c;
}

double ov_velocity(double dx, double v, const ModelParams& p) noexcept {
	const double h_f = variable_headway(v, p);
	return 0.5 * p.v_max * (std::tanh(dx - h_f) + std::tanh(h_f));
}

double acceleration(const NeighborView& view, double v, const ModelParams& p) noexcept {
	return p.alpha * (ov_velocity(view.dx, v, p) - v) + p.lambda * view.dv;
}

double ov_ceiling(double v, const ModelParams& p) noexcept {
	return 0.5 * p.v_max * (1.0 + std::tanh(variable_headway(v, p)));
}

}  // namespace vshd::model
