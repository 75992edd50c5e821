#include <vshd/config_file.hpp>

#include <vshd/errors.hpp>
#include <vshd/format.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace vshd::io {

namespace {

std::string_view trim(std::string_view s) {
	const auto first = s.find_first_not_of(" \t\r");
	if (first == std::string_view::npos) return {};
	const auto last = s.find_last_not_of(" \t\r");
	return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value) {
	double out = 0.0;
	if (!parse_number(value, out)) {
		throw InvalidConfig(std::string(key), "expected a number, got '" + std::string(value) + "'");
	}
	return out;
}

template <class Int>
Int to_integer(std::string_view key, std::string_view value) {
	value = trim(value);
	Int out{};
	const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
	if (value.empty() || res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
		throw InvalidConfig(std::string(key), "expected a non-negative integer, got '" + std::string(value) + "'");
	}
	return out;
}

sim::InitialSpacing parse_init(std::string_view value) {
	value = trim(value);
	if (value == "equilibrium") return sim::EquilibriumInit{};
	constexpr std::string_view kPrefix = "explicit:";
	if (value.substr(0, kPrefix.size()) != kPrefix) {
		throw InvalidConfig("init", "expected 'equilibrium' or 'explicit:h1,h2,...'");
	}
	value.remove_prefix(kPrefix.size());
	sim::ExplicitInit out;
	while (!value.empty()) {
		const auto comma = value.find(',');
		out.headways.push_back(to_double("init", value.substr(0, comma)));
		if (comma == std::string_view::npos) break;
		value.remove_prefix(comma + 1);
	}
	if (out.headways.empty()) throw InvalidConfig("init", "explicit spacing lists no headways");
	return out;
}

std::string init_text(const sim::InitialSpacing& init) {
	const auto* expl = std::get_if<sim::ExplicitInit>(&init);
	if (expl == nullptr) return "equilibrium";
	std::string out = "explicit:";
	for (std::size_t i = 0; i < expl->headways.size(); ++i) {
		if (i > 0) out += ',';
		out += format_number(expl->headways[i]);
	}
	return out;
}

const char* profile_text(ProfileKind k) {
	switch (k) {
	case ProfileKind::Constant: return "constant";
	case ProfileKind::Random: return "random";
	case ProfileKind::SuddenStop: return "sudden_stop";
	}
	return "constant";
}

}  // namespace

sim::ScenarioConfig RunConfig::to_scenario() const {
	sim::ScenarioConfig cfg;
	cfg.params = params;
	cfg.n_vehicles = n_vehicles;
	cfg.duration = duration;
	cfg.dt = dt;
	cfg.sample_stride = sample_stride;
	cfg.scheme = scheme;
	cfg.collision_policy = collision_policy;
	cfg.init = init;
	switch (profile) {
	case ProfileKind::Constant: cfg.profile = sim::ConstantLeader{v0}; break;
	case ProfileKind::Random: cfg.profile = sim::RandomFluctuation{v0, a_max, seed}; break;
	case ProfileKind::SuddenStop: cfg.profile = sim::SuddenStop{v0, t_stop, t_resume}; break;
	}
	cfg.validate();
	return cfg;
}

RunConfig RunConfig::from_scenario(const sim::ScenarioConfig& cfg) {
	RunConfig out;
	out.params = cfg.params;
	out.n_vehicles = cfg.n_vehicles;
	out.duration = cfg.duration;
	out.dt = cfg.dt;
	out.sample_stride = cfg.sample_stride;
	out.scheme = cfg.scheme;
	out.collision_policy = cfg.collision_policy;
	out.init = cfg.init;
	out.v0 = sim::profile_v0(cfg.profile);
	if (const auto* rf = std::get_if<sim::RandomFluctuation>(&cfg.profile)) {
		out.profile = ProfileKind::Random;
		out.a_max = rf->a_max;
		out.seed = rf->seed;
	} else if (const auto* stop = std::get_if<sim::SuddenStop>(&cfg.profile)) {
		out.profile = ProfileKind::SuddenStop;
		out.t_stop = stop->t_stop;
		out.t_resume = stop->t_resume;
	}
	return out;
}

void set_value(RunConfig& cfg, std::string_view key, std::string_view raw) {
	const std::string_view value = trim(raw);
	const std::string k(key);
	if (key == "alpha") cfg.params.alpha = to_double(key, value);
	else if (key == "lambda") cfg.params.lambda = to_double(key, value);
	else if (key == "v_max") cfg.params.v_max = to_double(key, value);
	else if (key == "h_c") cfg.params.h_c = to_double(key, value);
	else if (key == "b") cfg.params.b = to_double(key, value);
	else if (key == "t_s") cfg.params.t_s = to_double(key, value);
	else if (key == "n_vehicles") cfg.n_vehicles = to_integer<std::size_t>(key, value);
	else if (key == "duration") cfg.duration = to_double(key, value);
	else if (key == "dt") cfg.dt = to_double(key, value);
	else if (key == "sample_stride") cfg.sample_stride = to_integer<std::size_t>(key, value);
	else if (key == "v0") cfg.v0 = to_double(key, value);
	else if (key == "a_max") cfg.a_max = to_double(key, value);
	else if (key == "seed") cfg.seed = to_integer<std::uint64_t>(key, value);
	else if (key == "t_stop") cfg.t_stop = to_double(key, value);
	else if (key == "t_resume") cfg.t_resume = to_double(key, value);
	else if (key == "init") cfg.init = parse_init(value);
	else if (key == "scheme") {
		if (value == "euler") cfg.scheme = sim::Scheme::Euler;
		else if (value == "rk4") cfg.scheme = sim::Scheme::RK4;
		else throw InvalidConfig(k, "expected 'euler' or 'rk4'");
	} else if (key == "profile") {
		if (value == "constant") cfg.profile = ProfileKind::Constant;
		else if (value == "random") cfg.profile = ProfileKind::Random;
		else if (value == "sudden_stop") cfg.profile = ProfileKind::SuddenStop;
		else throw InvalidConfig(k, "expected 'constant', 'random' or 'sudden_stop'");
	} else if (key == "collision_policy") {
		if (value == "halt") cfg.collision_policy = sim::CollisionPolicy::Halt;
		else if (value == "record") cfg.collision_policy = sim::CollisionPolicy::Record;
		else throw InvalidConfig(k, "expected 'halt' or 'record'");
	} else {
		throw InvalidConfig(k, "unknown key");
	}
}

void apply_assignment(RunConfig& cfg, std::string_view assignment) {
	const auto eq = assignment.find('=');
	if (eq == std::string_view::npos) {
		throw InvalidConfig(std::string(trim(assignment)), "expected key = value");
	}
	set_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig parse_run_config(std::istream& in) {
	RunConfig cfg;
	std::string line;
	while (std::getline(in, line)) {
		std::string_view body = line;
		if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
		if (trim(body).empty()) continue;
		apply_assignment(cfg, body);
	}
	return cfg;
}

RunConfig load_run_config(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw IoFailure("cannot open config file '" + path + "'");
	return parse_run_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
	const auto& p = cfg.params;
	return {
		{"alpha", format_number(p.alpha)},
		{"lambda", format_number(p.lambda)},
		{"v_max", format_number(p.v_max)},
		{"h_c", format_number(p.h_c)},
		{"b", format_number(p.b)},
		{"t_s", format_number(p.t_s)},
		{"n_vehicles", std::to_string(cfg.n_vehicles)},
		{"duration", format_number(cfg.duration)},
		{"dt", format_number(cfg.dt)},
		{"sample_stride", std::to_string(cfg.sample_stride)},
		{"scheme", cfg.scheme == sim::Scheme::RK4 ? "rk4" : "euler"},
		{"profile", profile_text(cfg.profile)},
		{"v0", format_number(cfg.v0)},
		{"a_max", format_number(cfg.a_max)},
		{"seed", std::to_string(cfg.seed)},
		{"t_stop", format_number(cfg.t_stop)},
		{"t_resume", format_number(cfg.t_resume)},
		{"collision_policy", cfg.collision_policy == sim::CollisionPolicy::Halt ? "halt" : "record"},
		{"init", init_text(cfg.init)},
	};
}

std::string config_keys_help() {
	return R"(Scenario file keys (`key = value`, `#` comments, unknown keys rejected):
  alpha            driver sensitivity, 1/s                     default 0.5
  lambda           velocity-difference gain, 1/s               default 0.5
  v_max            maximum velocity, m/s                       default 20
  h_c              fixed safety headway, m                     default 7
  b                headway growth coefficient                  default 0
  t_s              time unit in h_f = b*v*t_s + h_c, s         default 1
  n_vehicles       platoon size including the leader           default 100
  duration         simulated time, s                           default 300
  dt               integrator step, s                          default 0.1
  sample_stride    record every k-th step                      default 1
  scheme           euler | rk4                                 default euler
  profile          constant | random | sudden_stop             default constant
  v0               leader cruise speed, m/s                    default 15
  a_max            random-fluctuation bound, m/s^2             default 0.5
  seed             random-fluctuation seed                     default 1
  t_stop           sudden-stop start, s                        default 110
  t_resume         sudden-stop end, s                          default 115
  collision_policy halt | record                               default record
  init             equilibrium | explicit:h1,h2,...            default equilibrium
)";
}

}  // namespace vshd::io
