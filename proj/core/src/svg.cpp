#include <vshd/export.hpp>

#include <vshd/errors.hpp>
#include <vshd/format.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace vshd::io {

namespace {

constexpr std::array<const char*, 10> kPalette = {
	"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
	"#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

// Sequential map (viridis control points), interpolated linearly.
constexpr std::array<std::array<int, 3>, 5> kRamp = {{
	{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
}};

constexpr std::size_t kMaxPolylinePoints = 1200;

std::string escape(std::string_view s) {
	std::string out;
	out.reserve(s.size());
	for (char c : s) {
		switch (c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

std::string px(double v) { return format_fixed(v, 2); }

std::string ramp_color(double u) {
	u = std::clamp(u, 0.0, 1.0) * static_cast<double>(kRamp.size() - 1);
	const auto i = std::min(static_cast<std::size_t>(u), kRamp.size() - 2);
	const double f = u - static_cast<double>(i);
	std::array<char, 8> hex{};
	static constexpr char kDigits[] = "0123456789abcdef";
	hex[0] = '#';
	for (int c = 0; c < 3; ++c) {
		const auto value = static_cast<int>(std::lround(kRamp[i][c] + f * (kRamp[i + 1][c] - kRamp[i][c])));
		hex[1 + 2 * c] = kDigits[(value >> 4) & 0xf];
		hex[2 + 2 * c] = kDigits[value & 0xf];
	}
	return std::string(hex.data(), 7);
}

struct Range {
	double lo = std::numeric_limits<double>::infinity();
	double hi = -std::numeric_limits<double>::infinity();

	void add(double v) {
		if (!std::isfinite(v)) return;
		lo = std::min(lo, v);
		hi = std::max(hi, v);
	}

	// 5% margin on each side; degenerate spans are widened to unit width.
	Range padded() const {
		Range r = *this;
		if (!(r.lo <= r.hi)) return {0.0, 1.0};
		if (r.hi - r.lo <= 0.0) {
			r.lo -= 0.5;
			r.hi += 0.5;
		}
		const double pad = 0.05 * (r.hi - r.lo);
		return {r.lo - pad, r.hi + pad};
	}
};

std::string tick_text(double v, double span) {
	int decimals = 0;
	if (span < 10.0) decimals = 1;
	if (span < 1.0) decimals = 2;
	if (span < 0.1) decimals = 4;
	return format_fixed(v, decimals);
}

class Canvas {
public:
	Canvas(std::ostream& out, const PlotSpec& spec, double right_gutter)
		: out_(out), spec_(spec) {
		left_ = 70.0;
		top_ = spec.title.empty() ? 20.0 : 40.0;
		right_ = static_cast<double>(spec.width) - 20.0 - right_gutter;
		bottom_ = static_cast<double>(spec.height) - 50.0;
		if (right_ - left_ < 10.0 || bottom_ - top_ < 10.0) {
			throw SpecMismatch("plot area too small for " + std::to_string(spec.width) + "x" +
							   std::to_string(spec.height));
		}
	}

	void open(Range xr, Range yr) {
		xr_ = xr.padded();
		yr_ = yr.padded();
		out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
			 << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec_.width << "\" height=\""
			 << spec_.height << "\" viewBox=\"0 0 " << spec_.width << ' ' << spec_.height << "\">\n"
			 << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
		if (!spec_.title.empty()) {
			text(0.5 * spec_.width, 24.0, spec_.title, "middle", 16);
		}
		axes();
	}

	void close() { out_ << "</svg>\n"; }

	double sx(double x) const { return left_ + (x - xr_.lo) / (xr_.hi - xr_.lo) * (right_ - left_); }
	double sy(double y) const { return bottom_ - (y - yr_.lo) / (yr_.hi - yr_.lo) * (bottom_ - top_); }
	double scale_x(double dx) const { return dx / (xr_.hi - xr_.lo) * (right_ - left_); }
	double scale_y(double dy) const { return dy / (yr_.hi - yr_.lo) * (bottom_ - top_); }
	double right() const { return right_; }
	double top() const { return top_; }
	double bottom() const { return bottom_; }

	void text(double x, double y, std::string_view s, const char* anchor, int size = 12) {
		out_ << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-family=\"sans-serif\" font-size=\""
			 << size << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
	}

	template <class Points>
	void polyline(const Points& pts, const char* color, double width = 1.0) {
		out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << px(width) << "\" points=\"";
		bool first = true;
		for (const auto& [x, y] : pts) {
			if (!first) out_ << ' ';
			first = false;
			out_ << px(sx(x)) << ',' << px(sy(y));
		}
		out_ << "\"/>\n";
	}

	void rect(double x, double y, double w, double h, const std::string& fill) {
		out_ << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(w) << "\" height=\"" << px(h)
			 << "\" fill=\"" << fill << "\"/>\n";
	}

	std::ostream& raw() { return out_; }

private:
	void axes() {
		out_ << "<rect x=\"" << px(left_) << "\" y=\"" << px(top_) << "\" width=\"" << px(right_ - left_)
			 << "\" height=\"" << px(bottom_ - top_) << "\" fill=\"none\" stroke=\"black\"/>\n";
		constexpr int kTicks = 5;
		for (int k = 0; k <= kTicks; ++k) {
			const double f = static_cast<double>(k) / kTicks;
			const double xv = xr_.lo + f * (xr_.hi - xr_.lo);
			const double yv = yr_.lo + f * (yr_.hi - yr_.lo);
			text(sx(xv), bottom_ + 16.0, tick_text(xv, xr_.hi - xr_.lo), "middle", 10);
			text(left_ - 6.0, sy(yv) + 4.0, tick_text(yv, yr_.hi - yr_.lo), "end", 10);
		}
		if (!spec_.x_label.empty()) text(0.5 * (left_ + right_), bottom_ + 38.0, spec_.x_label, "middle");
		if (!spec_.y_label.empty()) {
			const double cx = 16.0;
			const double cy = 0.5 * (top_ + bottom_);
			out_ << "<text x=\"" << px(cx) << "\" y=\"" << px(cy) << "\" font-family=\"sans-serif\" font-size=\"12\""
				 << " text-anchor=\"middle\" transform=\"rotate(-90 " << px(cx) << ' ' << px(cy) << ")\">"
				 << escape(spec_.y_label) << "</text>\n";
		}
	}

	std::ostream& out_;
	const PlotSpec& spec_;
	double left_, top_, right_, bottom_;
	Range xr_, yr_;
};

std::size_t decimation(std::size_t n) {
	return std::max<std::size_t>(1, (n + kMaxPolylinePoints - 1) / kMaxPolylinePoints);
}

template <class Value>
std::vector<std::pair<double, double>> series(const sim::TrajectoryRecord& rec, std::size_t stride, Value&& value) {
	std::vector<std::pair<double, double>> pts;
	const std::size_t n = rec.samples.size();
	for (std::size_t k = 0; k < n; k += stride) {
		pts.emplace_back(rec.samples[k].t, value(rec.samples[k]));
	}
	if ((n - 1) % stride != 0) pts.emplace_back(rec.samples.back().t, value(rec.samples.back()));
	return pts;
}

double min_gap(std::vector<double> values) {
	std::sort(values.begin(), values.end());
	values.erase(std::unique(values.begin(), values.end()), values.end());
	double gap = std::numeric_limits<double>::infinity();
	for (std::size_t i = 1; i < values.size(); ++i) gap = std::min(gap, values[i] - values[i - 1]);
	return gap;
}

}  // namespace

void render_plot(const sim::TrajectoryRecord& rec, const PlotSpec& spec, std::ostream& out) {
	if (std::holds_alternative<SurfaceHeatmap>(spec.kind)) {
		throw SpecMismatch("heatmap spec given a trajectory record");
	}
	if (rec.samples.empty() || rec.n_vehicles() == 0) {
		throw SpecMismatch("trajectory record has no samples");
	}
	const std::size_t n = rec.n_vehicles();
	const std::size_t stride = decimation(rec.samples.size());
	Range tr;
	tr.add(rec.samples.front().t);
	tr.add(rec.samples.back().t);

	if (const auto* trace = std::get_if<VelocityTrace>(&spec.kind)) {
		if (trace->vehicle_indices.empty()) throw SpecMismatch("velocity trace lists no vehicles");
		Range vr;
		for (std::size_t idx : trace->vehicle_indices) {
			if (idx >= n) {
				throw SpecMismatch("vehicle index " + std::to_string(idx) + " outside platoon of " + std::to_string(n));
			}
			for (const auto& s : rec.samples) vr.add(s.v[idx]);
		}
		Canvas canvas(out, spec, 110.0);
		canvas.open(tr, vr);
		for (std::size_t j = 0; j < trace->vehicle_indices.size(); ++j) {
			const std::size_t idx = trace->vehicle_indices[j];
			const char* color = kPalette[j % kPalette.size()];
			canvas.polyline(series(rec, stride, [idx](const sim::Sample& s) { return s.v[idx]; }), color, 1.5);
			const double ly = canvas.top() + 14.0 + 18.0 * static_cast<double>(j);
			canvas.raw() << "<line x1=\"" << px(canvas.right() + 10.0) << "\" y1=\"" << px(ly - 4.0) << "\" x2=\""
						 << px(canvas.right() + 30.0) << "\" y2=\"" << px(ly - 4.0) << "\" stroke=\"" << color
						 << "\" stroke-width=\"2.00\"/>\n";
			canvas.text(canvas.right() + 34.0, ly, "vehicle " + std::to_string(idx + 1), "start", 11);
		}
		canvas.close();
		return;
	}

	Range xr;
	for (const auto& s : rec.samples) {
		for (double x : s.x) xr.add(x);
	}
	Canvas canvas(out, spec, 0.0);
	canvas.open(tr, xr);
	for (std::size_t i = 0; i < n; ++i) {
		canvas.polyline(series(rec, stride, [i](const sim::Sample& s) { return s.x[i]; }),
						kPalette[i % kPalette.size()], 0.6);
	}
	canvas.close();
}

void render_plot(std::span<const stability::SurfaceSample> samples, const PlotSpec& spec, std::ostream& out) {
	if (!std::holds_alternative<SurfaceHeatmap>(spec.kind)) {
		throw SpecMismatch("surface data can only be rendered as a heatmap");
	}
	if (samples.empty()) throw SpecMismatch("surface has no samples");

	Range vr, dr, ar;
	std::vector<double> vs, ds;
	for (const auto& s : samples) {
		vr.add(s.v);
		dr.add(s.dx);
		vs.push_back(s.v);
		ds.push_back(s.dx);
		if (s.neutral.alpha) ar.add(*s.neutral.alpha);
	}
	double cell_v = min_gap(vs);
	double cell_d = min_gap(ds);
	if (!std::isfinite(cell_v)) cell_v = 0.1 * std::max(1.0, std::abs(vr.lo));
	if (!std::isfinite(cell_d)) cell_d = 0.1 * std::max(1.0, std::abs(dr.lo));
	vr.add(vr.lo - 0.5 * cell_v);
	vr.add(vr.hi + 0.5 * cell_v);
	dr.add(dr.lo - 0.5 * cell_d);
	dr.add(dr.hi + 0.5 * cell_d);

	Canvas canvas(out, spec, 90.0);
	canvas.open(vr, dr);
	const bool has_alpha = ar.lo <= ar.hi;
	const double a_span = has_alpha && ar.hi > ar.lo ? ar.hi - ar.lo : 1.0;
	const double w = std::max(canvas.scale_x(cell_v), 0.5);
	const double h = std::max(canvas.scale_y(cell_d), 0.5);
	for (const auto& s : samples) {
		const std::string fill = s.neutral.alpha ? ramp_color((*s.neutral.alpha - ar.lo) / a_span) : "#cccccc";
		canvas.rect(canvas.sx(s.v) - 0.5 * w, canvas.sy(s.dx) - 0.5 * h, w, h, fill);
	}

	constexpr int kBands = 32;
	const double bar_x = canvas.right() + 20.0;
	const double bar_h = canvas.bottom() - canvas.top();
	for (int k = 0; k < kBands; ++k) {
		const double f = (static_cast<double>(k) + 0.5) / kBands;
		canvas.rect(bar_x, canvas.bottom() - bar_h * (k + 1) / kBands, 18.0, bar_h / kBands + 0.5, ramp_color(f));
	}
	if (has_alpha) {
		canvas.text(bar_x + 22.0, canvas.top() + 10.0, format_fixed(ar.hi, 3), "start", 10);
		canvas.text(bar_x + 22.0, canvas.bottom(), format_fixed(ar.lo, 3), "start", 10);
	}
	canvas.text(bar_x + 9.0, canvas.top() - 6.0, "alpha", "middle", 10);
	canvas.close();
}

}  // namespace vshd::io
