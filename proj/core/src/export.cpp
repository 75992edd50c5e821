#include <vshd/export.hpp>

#include <vshd/config_file.hpp>
#include <vshd/errors.hpp>
#include <vshd/format.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vshd::io {

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
	writer(out);
	out.flush();
	if (!out) throw IoFailure("write to '" + path.string() + "' failed");
}

void check_stream(const std::ostream& out) {
	if (!out) throw IoFailure("output stream failed");
}

std::vector<std::string_view> split_commas(std::string_view line, std::size_t limit) {
	std::vector<std::string_view> fields;
	while (fields.size() + 1 < limit) {
		const auto comma = line.find(',');
		if (comma == std::string_view::npos) break;
		fields.push_back(line.substr(0, comma));
		line.remove_prefix(comma + 1);
	}
	fields.push_back(line);
	return fields;
}

double field_number(std::string_view text, std::size_t line_no) {
	double v = 0.0;
	if (!parse_number(text, v)) {
		throw IoFailure("line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
	}
	return v;
}

sim::EventKind event_kind(std::string_view s, std::size_t line_no) {
	using sim::EventKind;
	for (auto k : {EventKind::Collision, EventKind::LeaderStop, EventKind::LeaderResume, EventKind::VelocityClamp}) {
		if (s == sim::to_string(k)) return k;
	}
	throw IoFailure("line " + std::to_string(line_no) + ": unknown event kind '" + std::string(s) + "'");
}

}  // namespace

void write_trajectory_csv(const sim::TrajectoryRecord& rec, std::ostream& out) {
	for (const auto& [key, value] : config_entries(RunConfig::from_scenario(rec.config))) {
		out << "# " << key << " = " << value << '\n';
	}
	out << "t,vehicle,x,v,headway\n";
	for (const auto& s : rec.samples) {
		const std::string t = format_number(s.t);
		for (std::size_t i = 0; i < s.v.size(); ++i) {
			out << t << ',' << i << ',' << format_number(s.x[i]) << ',' << format_number(s.v[i]) << ',';
			if (i > 0) out << format_number(s.headway[i - 1]);
			out << '\n';
		}
	}
	for (const auto& e : rec.events) {
		out << "# event," << format_number(e.t) << ',' << sim::to_string(e.kind) << ",vehicle=" << e.vehicle;
		if (!e.detail.empty()) out << ';' << e.detail;
		out << '\n';
	}
	check_stream(out);
}

void write_trajectory_csv(const sim::TrajectoryRecord& rec, const std::filesystem::path& path) {
	write_file(path, [&](std::ostream& out) { write_trajectory_csv(rec, out); });
}

sim::TrajectoryRecord read_trajectory_csv(std::istream& in) {
	sim::TrajectoryRecord rec;
	RunConfig cfg;
	std::string line;
	std::size_t line_no = 0;
	bool header_seen = false;
	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') line.pop_back();
		std::string_view body = line;
		if (body.empty()) continue;
		if (body.front() == '#') {
			body.remove_prefix(1);
			if (body.substr(0, 7) == " event,") {
				const auto f = split_commas(body.substr(7), 3);
				if (f.size() != 3) throw IoFailure("line " + std::to_string(line_no) + ": malformed event");
				sim::Event e;
				e.t = field_number(f[0], line_no);
				e.kind = event_kind(f[1], line_no);
				std::string_view detail = f[2];
				if (detail.substr(0, 8) == "vehicle=") {
					detail.remove_prefix(8);
					const auto semi = detail.find(';');
					e.vehicle = static_cast<std::size_t>(field_number(detail.substr(0, semi), line_no));
					e.detail = semi == std::string_view::npos ? "" : std::string(detail.substr(semi + 1));
				}
				rec.events.push_back(std::move(e));
			} else {
				apply_assignment(cfg, body);
			}
			continue;
		}
		if (!header_seen) {
			if (body != "t,vehicle,x,v,headway") throw IoFailure("missing trajectory header");
			header_seen = true;
			continue;
		}
		const auto f = split_commas(body, 5);
		if (f.size() != 5) throw IoFailure("line " + std::to_string(line_no) + ": expected 5 fields");
		const double t = field_number(f[0], line_no);
		const auto vehicle = static_cast<std::size_t>(field_number(f[1], line_no));
		if (vehicle == 0) {
			rec.samples.push_back({});
			rec.samples.back().t = t;
		}
		if (rec.samples.empty() || rec.samples.back().v.size() != vehicle || rec.samples.back().t != t) {
			throw IoFailure("line " + std::to_string(line_no) + ": rows out of order");
		}
		auto& s = rec.samples.back();
		s.x.push_back(field_number(f[2], line_no));
		s.v.push_back(field_number(f[3], line_no));
		if (vehicle > 0) s.headway.push_back(field_number(f[4], line_no));
	}
	rec.config = cfg.to_scenario();
	return rec;
}

const char* flag_text(stability::NeutralStatus status) noexcept {
	switch (status) {
	case stability::NeutralStatus::Ok: return "ok";
	case stability::NeutralStatus::Singular: return "singular";
	case stability::NeutralStatus::NotApplicable: return "not_applicable";
	}
	return "ok";
}

void write_surface_csv(std::span<const stability::SurfaceSample> samples, std::ostream& out) {
	out << "v,dx,lambda1,lambda2,alpha_neutral,flag\n";
	for (const auto& s : samples) {
		out << format_number(s.v) << ',' << format_number(s.dx) << ',' << format_number(s.lambda1) << ','
			<< format_number(s.lambda2) << ',';
		if (s.neutral.alpha) out << format_number(*s.neutral.alpha);
		out << ',' << flag_text(s.neutral.status) << '\n';
	}
	check_stream(out);
}

void write_surface_csv(std::span<const stability::SurfaceSample> samples, const std::filesystem::path& path) {
	write_file(path, [&](std::ostream& out) { write_surface_csv(samples, out); });
}

void render_plot(const sim::TrajectoryRecord& rec, const PlotSpec& spec, const std::filesystem::path& path) {
	std::ostringstream buf;
	render_plot(rec, spec, buf);
	write_file(path, [&](std::ostream& out) { out << buf.str(); });
}

void render_plot(std::span<const stability::SurfaceSample> samples, const PlotSpec& spec,
				 const std::filesystem::path& path) {
	std::ostringstream buf;
	render_plot(samples, spec, buf);
	write_file(path, [&](std::ostream& out) { out << buf.str(); });
}

}  // namespace vshd::io
