#pragma once

#include <cmath>
#include <utility>

namespace vshd {

/// Maximizer of a unimodal f on [lo, hi]; stops once the bracket width drops
/// below rel_tol times its midpoint magnitude (or max_iter is reached).
template <class F>
double golden_section_maximize(F&& f, double lo, double hi, double rel_tol, int max_iter = 300) {
	constexpr double inv_phi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2
	if (hi < lo) std::swap(lo, hi);
	double c = hi - inv_phi * (hi - lo);
	double d = lo + inv_phi * (hi - lo);
	double fc = f(c);
	double fd = f(d);
	for (int i = 0; i < max_iter; ++i) {
		if (hi - lo <= rel_tol * 0.5 * std::abs(hi + lo)) break;
		if (fc >= fd) {
			hi = d;
			d = c;
			fd = fc;
			c = hi - inv_phi * (hi - lo);
			fc = f(c);
		} else {
			lo = c;
			c = d;
			fc = fd;
			d = lo + inv_phi * (hi - lo);
			fd = f(d);
		}
	}
	return fc >= fd ? c : d;
}

}  // namespace vshd
