#pragma once

// Reference computations used by the tests. None of these call into the code
// path they are used to check.

#include <vshd/model.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace vshd::testing {

/// Closed-form equilibrium headway: dx = h_f + atanh(2 v / v_max - tanh(h_f)).
inline long double closed_form_dx_star(long double v, const model::ModelParams& p) {
	const long double h_f = static_cast<long double>(p.b) * v * p.t_s + p.h_c;
	return h_f + std::atanh(2.0L * v / p.v_max - std::tanh(h_f));
}

inline long double ov_long(long double dx, long double v, const model::ModelParams& p) {
	const long double h_f = static_cast<long double>(p.b) * v * p.t_s + p.h_c;
	return 0.5L * p.v_max * (std::tanh(dx - h_f) + std::tanh(h_f));
}

/// Central differences of the OV function in extended precision.
inline double fd_dV_ddx(double dx, double v, const model::ModelParams& p, double h = 1e-6) {
	return static_cast<double>((ov_long(dx + h, v, p) - ov_long(dx - h, v, p)) / (2.0L * h));
}

inline double fd_dV_dv(double dx, double v, const model::ModelParams& p, double h = 1e-6) {
	return static_cast<double>((ov_long(dx, v + h, p) - ov_long(dx, v - h, p)) / (2.0L * h));
}

/// |G(jw)|^2 by complex evaluation of (lambda s + alpha L1) / p(s) at s = jw.
inline double complex_gain_sq(double omega, double alpha, double lambda, double l1, double l2) {
	using C = std::complex<long double>;
	const C s(0.0L, omega);
	const C num = C(lambda) * s + C(static_cast<long double>(alpha) * l1);
	const C den = s * s + s * C(static_cast<long double>(alpha) + lambda - static_cast<long double>(alpha) * l2) +
				  C(static_cast<long double>(alpha) * l1);
	return static_cast<double>(std::norm(num / den));
}

/// Position-form full velocity difference model with the fixed headway h_c.
/// x[0], v[0] belong to the leader, which the caller drives.
struct FvdmStepper {
	double alpha, lambda, v_max, h_c;

	double accel(double dx, double dv, double v) const {
		return alpha * (0.5 * v_max * (std::tanh(dx - h_c) + std::tanh(h_c)) - v) + lambda * dv;
	}

	void euler(std::vector<double>& x, std::vector<double>& v, double dt, double v_lead_next) const {
		const std::size_t n = x.size();
		std::vector<double> a(n, 0.0);
		for (std::size_t i = 1; i < n; ++i) a[i] = accel(x[i - 1] - x[i], v[i - 1] - v[i], v[i]);
		for (std::size_t i = 0; i < n; ++i) x[i] += v[i] * dt;
		for (std::size_t i = 1; i < n; ++i) v[i] = std::max(0.0, v[i] + a[i] * dt);
		v[0] = v_lead_next;
	}

	void rk4(std::vector<double>& x, std::vector<double>& v, double dt, double v_lead_next) const {
		const std::size_t n = x.size();
		using Vec = std::vector<double>;
		auto f = [&](const Vec& xs, const Vec& vs, Vec& kx, Vec& kv) {
			kx[0] = vs[0];
			kv[0] = 0.0;
			for (std::size_t i = 1; i < n; ++i) {
				kx[i] = vs[i];
				kv[i] = accel(xs[i - 1] - xs[i], vs[i - 1] - vs[i], vs[i]);
			}
		};
		Vec kx[4] = {Vec(n), Vec(n), Vec(n), Vec(n)}, kv[4] = {Vec(n), Vec(n), Vec(n), Vec(n)};
		Vec xt(n), vt(n);
		f(x, v, kx[0], kv[0]);
		const double c[3] = {0.5 * dt, 0.5 * dt, dt};
		for (int s = 0; s < 3; ++s) {
			for (std::size_t i = 0; i < n; ++i) {
				xt[i] = x[i] + c[s] * kx[s][i];
				vt[i] = v[i] + c[s] * kv[s][i];
			}
			f(xt, vt, kx[s + 1], kv[s + 1]);
		}
		for (std::size_t i = 0; i < n; ++i) {
			x[i] += dt / 6.0 * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
			if (i > 0) v[i] = std::max(0.0, v[i] + dt / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]));
		}
		v[0] = v_lead_next;
	}
};

/// Deterministic uniform draws for property tests.
class Draw {
public:
	explicit Draw(std::uint64_t seed) : engine_(seed) {}
	double operator()(double lo, double hi) {
		return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
	}

private:
	std::mt19937_64 engine_;
};

}  // namespace vshd::testing
