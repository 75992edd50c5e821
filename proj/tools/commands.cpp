#include "commands.hpp"

#include <CLI11.hpp>

#include <vshd/config_file.hpp>
#include <vshd/errors.hpp>
#include <vshd/export.hpp>
#include <vshd/format.hpp>
#include <vshd/simulator.hpp>
#include <vshd/stability.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace vshd::cli {

namespace fs = std::filesystem;

namespace {

// Files are written under a temporary name and renamed only by commit();
// anything left uncommitted is removed on destruction.
class StagedOutputs {
public:
	explicit StagedOutputs(fs::path dir) : dir_(std::move(dir)) {}
	StagedOutputs(const StagedOutputs&) = delete;
	StagedOutputs& operator=(const StagedOutputs&) = delete;

	~StagedOutputs() {
		std::error_code ec;
		for (const auto& [tmp, final_path] : staged_) fs::remove(tmp, ec);
	}

	fs::path stage(const std::string& name) {
		fs::path final_path = dir_ / name;
		fs::path tmp = dir_ / ("." + name + ".tmp");
		staged_.emplace_back(tmp, final_path);
		return tmp;
	}

	std::vector<fs::path> commit() {
		std::vector<fs::path> done;
		for (const auto& [tmp, final_path] : staged_) {
			fs::rename(tmp, final_path);
			done.push_back(final_path);
		}
		staged_.clear();
		return done;
	}

private:
	fs::path dir_;
	std::vector<std::pair<fs::path, fs::path>> staged_;
};

struct Window {
	double lo = 0.0;
	double hi = 0.0;
};

Window parse_window(const std::string& text, double duration) {
	if (text.empty()) return {0.5 * duration, duration};
	const auto comma = text.find(',');
	Window w;
	if (comma == std::string::npos || !io::parse_number(std::string_view(text).substr(0, comma), w.lo) ||
		!io::parse_number(std::string_view(text).substr(comma + 1), w.hi) || !(w.lo <= w.hi)) {
		throw InvalidConfig("window", "expected 'lo,hi' with lo <= hi");
	}
	return w;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
	std::vector<double> out;
	std::string_view rest = text;
	while (!rest.empty()) {
		const auto comma = rest.find(',');
		double v = 0.0;
		if (!io::parse_number(rest.substr(0, comma), v)) {
			throw InvalidConfig(key, "bad number in list '" + text + "'");
		}
		out.push_back(v);
		if (comma == std::string_view::npos) break;
		rest.remove_prefix(comma + 1);
	}
	return out;
}

struct Grid {
	double lo = 0.0;
	double hi = 0.0;
	std::size_t n = 0;

	std::vector<double> values() const {
		std::vector<double> out(n);
		for (std::size_t k = 0; k < n; ++k) {
			out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
		}
		return out;
	}
};

Grid parse_grid(const std::string& key, const std::string& text) {
	const auto parts = [&] {
		std::vector<std::string_view> p;
		std::string_view rest = text;
		for (auto colon = rest.find(':'); colon != std::string_view::npos; colon = rest.find(':')) {
			p.push_back(rest.substr(0, colon));
			rest.remove_prefix(colon + 1);
		}
		p.push_back(rest);
		return p;
	}();
	Grid g;
	double n = 0.0;
	if (parts.size() != 3 || !io::parse_number(parts[0], g.lo) || !io::parse_number(parts[1], g.hi) ||
		!io::parse_number(parts[2], n) || n < 1.0 || n != std::floor(n) || g.hi < g.lo) {
		throw InvalidConfig(key, "expected lo:hi:count with lo <= hi and count >= 1");
	}
	g.n = static_cast<std::size_t>(n);
	return g;
}

stability::LambdaMode parse_lambda_mode(const std::string& text) {
	const auto colon = text.find(':');
	const std::string kind = text.substr(0, colon);
	double value = 0.0;
	if (colon == std::string::npos || !io::parse_number(std::string_view(text).substr(colon + 1), value)) {
		throw InvalidConfig("lambda-mode", "expected fixed:<lambda> or proportional:<kappa>");
	}
	if (kind == "fixed") return stability::FixedLambda{value};
	if (kind == "proportional") return stability::ProportionalLambda{value};
	throw InvalidConfig("lambda-mode", "expected fixed:<lambda> or proportional:<kappa>");
}

std::string lambda_mode_text(const stability::LambdaMode& mode) {
	if (const auto* f = std::get_if<stability::FixedLambda>(&mode)) return "fixed(lambda=" + io::format_number(f->lambda) + ")";
	return "proportional(lambda=" + io::format_number(std::get<stability::ProportionalLambda>(mode).kappa) + "*alpha)";
}

io::RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
	io::RunConfig cfg = path.empty() ? io::RunConfig{} : io::load_run_config(path);
	for (const auto& o : overrides) io::apply_assignment(cfg, o);
	return cfg;
}

void print_metrics(std::ostream& out, const sim::TrajectoryRecord& rec, const Window& w) {
	const auto m = sim::jam_metrics(rec, w.lo, w.hi);
	const auto collisions = std::count_if(rec.events.begin(), rec.events.end(),
										  [](const sim::Event& e) { return e.kind == sim::EventKind::Collision; });
	out << "window               [" << io::format_number(w.lo) << ", " << io::format_number(w.hi) << "] s\n"
		<< "velocity_std         " << io::format_fixed(m.velocity_std, 6) << " m/s\n"
		<< "last_min_velocity    " << io::format_fixed(m.last_min_velocity, 6) << " m/s\n"
		<< "min_headway          " << io::format_fixed(m.min_headway, 6) << " m\n"
		<< "slow_vehicles        " << m.slow_vehicles << " (below " << io::format_number(sim::kSlowSpeed) << " m/s)\n"
		<< "collision_events     " << collisions << '\n'
		<< "jam                  " << (m.slow_vehicles > 0 || m.min_headway <= 0.0 ? "yes" : "no") << '\n';
}

void stage_record(StagedOutputs& staged, const sim::TrajectoryRecord& rec, const std::string& suffix, bool plots) {
	io::write_trajectory_csv(rec, staged.stage("trajectory" + suffix + ".csv"));
	if (!plots) return;
	io::PlotSpec space;
	space.kind = io::SpaceTime{};
	space.title = "Space-time plot (b = " + io::format_number(rec.config.params.b) + ")";
	space.x_label = "t (s)";
	space.y_label = "x (m)";
	io::render_plot(rec, space, staged.stage("spacetime" + suffix + ".svg"));

	io::VelocityTrace trace;
	for (std::size_t ordinal : {1, 25, 50}) {
		if (ordinal <= rec.n_vehicles()) trace.vehicle_indices.push_back(ordinal - 1);
	}
	io::PlotSpec vel;
	vel.kind = trace;
	vel.title = "Velocity of vehicles 1, 25, 50 (b = " + io::format_number(rec.config.params.b) + ")";
	vel.x_label = "t (s)";
	vel.y_label = "v (m/s)";
	io::render_plot(rec, vel, staged.stage("velocity" + suffix + ".svg"));
}

fs::path ensure_dir(const std::string& dir) {
	fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
	std::error_code ec;
	fs::create_directories(p, ec);
	if (!fs::is_directory(p)) throw IoFailure("cannot create output directory '" + p.string() + "'");
	return p;
}

struct SimulateArgs {
	std::string config;
	std::string out_dir = ".";
	bool plots = false;
	std::vector<std::string> overrides;
	std::string window;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
	const auto cfg = load_config(a.config, a.overrides).to_scenario();
	const Window w = parse_window(a.window, cfg.duration);
	const auto dir = ensure_dir(a.out_dir);
	const auto rec = sim::run(cfg);

	StagedOutputs staged(dir);
	stage_record(staged, rec, "", a.plots);
	print_metrics(out, rec, w);
	for (const auto& p : staged.commit()) out << "wrote " << p.string() << '\n';
	return kOk;
}

struct SweepArgs {
	std::string config;
	std::string out_dir = ".";
	std::string b_values;
	std::vector<std::string> overrides;
	std::string window;
};

int cmd_sweep_b(const SweepArgs& a, std::ostream& out) {
	const auto bs = parse_list("b-values", a.b_values);
	if (bs.empty()) throw InvalidConfig("b-values", "list is empty");
	const io::RunConfig base = load_config(a.config, a.overrides);
	std::vector<sim::ScenarioConfig> scenarios;
	for (double b : bs) {
		io::RunConfig c = base;
		c.params.b = b;
		scenarios.push_back(c.to_scenario());
	}
	const Window w = parse_window(a.window, scenarios.front().duration);
	const auto dir = ensure_dir(a.out_dir);

	std::vector<std::future<sim::TrajectoryRecord>> jobs;
	for (const auto& s : scenarios) {
		jobs.push_back(std::async(std::launch::async, [s] { return sim::run(s); }));
	}
	std::vector<sim::TrajectoryRecord> records;
	for (auto& j : jobs) records.push_back(j.get());

	StagedOutputs staged(dir);
	std::ostringstream summary;
	summary << "b,velocity_std,last_min_velocity,min_headway,slow_vehicles\n";
	std::vector<double> stds;
	for (std::size_t k = 0; k < bs.size(); ++k) {
		const std::string suffix = "_b" + io::format_number(bs[k]);
		stage_record(staged, records[k], suffix, true);
		const auto m = sim::jam_metrics(records[k], w.lo, w.hi);
		stds.push_back(m.velocity_std);
		summary << io::format_number(bs[k]) << ',' << io::format_number(m.velocity_std) << ','
				<< io::format_number(m.last_min_velocity) << ',' << io::format_number(m.min_headway) << ','
				<< m.slow_vehicles << '\n';
		out << "b = " << std::left << std::setw(8) << io::format_number(bs[k])
			<< " velocity_std = " << io::format_fixed(m.velocity_std, 6)
			<< "  last_min_velocity = " << io::format_fixed(m.last_min_velocity, 6)
			<< "  min_headway = " << io::format_fixed(m.min_headway, 6)
			<< "  slow_vehicles = " << m.slow_vehicles << '\n';
	}
	{
		std::ofstream f(staged.stage("summary.csv"), std::ios::binary);
		f << summary.str();
		if (!f) throw IoFailure("cannot write summary.csv");
	}

	// Monotonicity is judged along increasing b, whatever order the user gave.
	std::vector<std::size_t> order(bs.size());
	for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
	std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return bs[i] < bs[j]; });
	bool monotone = true;
	for (std::size_t k = 1; k < order.size(); ++k) {
		if (stds[order[k]] > stds[order[k - 1]]) monotone = false;
	}
	out << "velocity_std monotone nonincreasing in b: " << (monotone ? "yes" : "no") << '\n';
	for (const auto& p : staged.commit()) out << "wrote " << p.string() << '\n';
	return kOk;
}

struct StabilityArgs {
	std::string config;
	std::vector<std::string> overrides;
	std::optional<double> point;
	bool surface = false;
	std::string lambda_mode = "proportional:1";
	std::string csv;
	std::string out_dir = ".";
	std::string v_range = "1:19:37";
	std::string dx_mode = "equilibrium";
	std::string dx_range = "0:30:61";
	double omega_max = 100.0;
	std::size_t samples = 2048;
};

int cmd_stability(const StabilityArgs& a, std::ostream& out) {
	const io::RunConfig rc = load_config(a.config, a.overrides);
	const auto& p = rc.params;
	p.validate();
	if (a.point.has_value() == a.surface) {
		throw InvalidConfig("point/surface", "give exactly one of --point or --surface");
	}

	if (a.point) {
		const auto op = stability::equilibrium(*a.point, p);
		const auto sp = stability::analyze(op, p);
		std::string sup_text = "n/a (p(s) unstable)";
		std::string verdict = "n/a";
		if (sp.p_stable) {
			stability::SweepOptions opts;
			opts.omega_max = a.omega_max;
			opts.n_samples = a.samples;
			const auto h = stability::hinf_satisfied(p.alpha, p.lambda, sp.lambda1, sp.lambda2, opts);
			sup_text = io::format_fixed(h.sup, 9) + " at omega = " + io::format_fixed(h.omega_at_sup, 6) + " rad/s";
			verdict = h.satisfied ? "satisfied" : "violated";
		}
		auto row = [&](const char* name, const std::string& value) {
			out << std::left << std::setw(18) << name << value << '\n';
		};
		row("v0", io::format_number(op.v0) + " m/s");
		row("dx_star", io::format_fixed(op.dx_star, 9) + " m");
		row("lambda1", io::format_fixed(sp.lambda1, 9));
		row("lambda2", io::format_fixed(sp.lambda2, 9));
		row("p_stable", sp.p_stable ? "true" : "false");
		row("margin", io::format_fixed(sp.margin, 9) +
						  (sp.margin >= 0.0 ? "  (sufficient condition satisfied)" : "  (sufficient condition violated)"));
		row("hinf_sup", sup_text);
		row("hinf", verdict);
		if (!a.csv.empty()) {
			const fs::path csv(a.csv);
			StagedOutputs staged(csv.has_parent_path() ? csv.parent_path() : fs::path("."));
			{
				std::ofstream f(staged.stage(csv.filename().string()), std::ios::binary);
				f << "v0,dx_star,lambda1,lambda2,p_stable,margin\n"
				  << io::format_number(op.v0) << ',' << io::format_number(op.dx_star) << ','
				  << io::format_number(sp.lambda1) << ',' << io::format_number(sp.lambda2) << ','
				  << (sp.p_stable ? "true" : "false") << ',' << io::format_number(sp.margin) << '\n';
				if (!f) throw IoFailure("cannot write '" + a.csv + "'");
			}
			for (const auto& path : staged.commit()) out << "wrote " << path.string() << '\n';
		}
		return kOk;
	}

	const auto mode = parse_lambda_mode(a.lambda_mode);
	const auto v_grid = parse_grid("v-range", a.v_range).values();
	stability::DxMode dx_mode;
	if (a.dx_mode == "equilibrium") {
		dx_mode = stability::EquilibriumDx{};
	} else if (a.dx_mode == "mesh") {
		dx_mode = stability::MeshDx{parse_grid("dx-range", a.dx_range).values()};
	} else {
		throw InvalidConfig("dx-mode", "expected 'equilibrium' or 'mesh'");
	}
	const auto surface = stability::neutral_surface(p, v_grid, dx_mode, mode);
	const auto dir = ensure_dir(a.out_dir);

	StagedOutputs staged(dir);
	io::write_surface_csv(surface, staged.stage("surface.csv"));
	io::PlotSpec spec;
	spec.kind = io::SurfaceHeatmap{};
	spec.title = "Neutral alpha, b = " + io::format_number(p.b) + ", " + lambda_mode_text(mode);
	spec.x_label = "v (m/s)";
	spec.y_label = "dx (m)";
	io::render_plot(surface, spec, staged.stage("surface.svg"));

	std::size_t ok = 0, singular = 0, not_applicable = 0;
	bool lambda2_zero = true;
	for (const auto& s : surface) {
		if (s.lambda2 != 0.0) lambda2_zero = false;
		switch (s.neutral.status) {
		case stability::NeutralStatus::Ok: ++ok; break;
		case stability::NeutralStatus::Singular: ++singular; break;
		case stability::NeutralStatus::NotApplicable: ++not_applicable; break;
		}
	}
	out << "samples              " << surface.size() << '\n'
		<< "ok                   " << ok << '\n'
		<< "singular             " << singular << '\n'
		<< "not_applicable       " << not_applicable << '\n'
		<< "lambda mode          " << lambda_mode_text(mode) << '\n';
	if (lambda2_zero) {
		out << "note                 lambda2 is identically 0 (b = " << io::format_number(p.b)
			<< "); the neutral surface degenerates to a line in (lambda1, alpha)\n";
	}
	for (const auto& path : staged.commit()) out << "wrote " << path.string() << '\n';
	return kOk;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
	CLI::App app{"Variable safety headway car-following model: simulation and string-stability analysis", "vshd"};
	app.require_subcommand(1);
	app.footer(io::config_keys_help());

	SimulateArgs sim_args;
	auto* simulate = app.add_subcommand("simulate", "Run one platoon scenario from a config file");
	simulate->add_option("config", sim_args.config, "Scenario file (key = value)")->required();
	simulate->add_option("--out", sim_args.out_dir, "Output directory");
	simulate->add_flag("--plots", sim_args.plots, "Also write space-time and velocity SVGs");
	simulate->add_option("--set", sim_args.overrides, "Override a config key, e.g. --set b=0.3");
	simulate->add_option("--window", sim_args.window, "Metric window 'lo,hi' in s (default: second half)");
	simulate->footer(io::config_keys_help());

	StabilityArgs st;
	auto* stab = app.add_subcommand("stability", "Linear string-stability analysis");
	stab->add_option("--point", st.point, "Analyze the equilibrium at this speed (m/s)");
	stab->add_flag("--surface", st.surface, "Generate the neutral-stability surface");
	stab->add_option("--config", st.config, "Read model parameters from a scenario file");
	stab->add_option("--set", st.overrides, "Override a config key");
	for (auto [flag, key] : {std::pair{"--alpha", "alpha"}, {"--lambda", "lambda"}, {"--v-max", "v_max"},
							 {"--h-c", "h_c"}, {"--b", "b"}, {"--t-s", "t_s"}}) {
		stab->add_option_function<std::string>(
			flag, [&st, key = std::string(key)](const std::string& v) { st.overrides.push_back(key + "=" + v); },
			"Model parameter " + std::string(key));
	}
	stab->add_option("--lambda-mode", st.lambda_mode, "fixed:<lambda> | proportional:<kappa> (surface mode)");
	stab->add_option("--csv", st.csv, "Point mode: also write the result as CSV");
	stab->add_option("--out", st.out_dir, "Surface mode: output directory");
	stab->add_option("--v-range", st.v_range, "Surface speed grid lo:hi:count");
	stab->add_option("--dx-mode", st.dx_mode, "equilibrium | mesh");
	stab->add_option("--dx-range", st.dx_range, "Mesh headway grid lo:hi:count");
	stab->add_option("--omega-max", st.omega_max, "Frequency sweep upper bound, rad/s");
	stab->add_option("--samples", st.samples, "Frequency sweep sample count");

	SweepArgs sw;
	auto* sweep = app.add_subcommand("sweep-b", "Run one scenario for several b values");
	sweep->add_option("config", sw.config, "Scenario file (key = value)")->required();
	sweep->add_option("--b-values", sw.b_values, "Comma-separated b values")->required();
	sweep->add_option("--out", sw.out_dir, "Output directory");
	sweep->add_option("--set", sw.overrides, "Override a config key");
	sweep->add_option("--window", sw.window, "Metric window 'lo,hi' in s (default: second half)");
	sweep->footer(io::config_keys_help());

	std::vector<const char*> cargv;
	for (const auto& s : argv) cargv.push_back(s.c_str());
	try {
		app.parse(static_cast<int>(cargv.size()), cargv.data());
	} catch (const CLI::CallForHelp&) {
		out << app.help();
		return kOk;
	} catch (const CLI::CallForAllHelp&) {
		out << app.help("", CLI::AppFormatMode::All);
		return kOk;
	} catch (const CLI::ParseError& e) {
		err << "error: " << e.what() << '\n';
		return kConfigError;
	}

	try {
		if (simulate->parsed()) return cmd_simulate(sim_args, out);
		if (stab->parsed()) return cmd_stability(st, out);
		if (sweep->parsed()) return cmd_sweep_b(sw, out);
	} catch (const InvalidConfig& e) {
		err << "config error: " << e.what() << '\n';
		return kConfigError;
	} catch (const OutOfRange& e) {
		err << "config error: " << e.what() << '\n';
		return kConfigError;
	} catch (const CollisionDetected& e) {
		err << "halted: " << e.what() << '\n';
		return kCollision;
	} catch (const IoFailure& e) {
		err << "i/o error: " << e.what() << '\n';
		return kConfigError;
	} catch (const std::exception& e) {
		err << "error: " << e.what() << '\n';
		return kFailure;
	}
	return kFailure;
}

}  // namespace vshd::cli
