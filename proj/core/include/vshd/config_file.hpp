#pragma once

// Line-oriented `key = value` scenario files. `#` starts a comment; blank
// lines are ignored; unknown keys are rejected.

#include <vshd/simulator.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vshd::io {

enum class ProfileKind { Constant, Random, SuddenStop };

struct RunConfig {
	model::ModelParams params;
	std::size_t n_vehicles = 100;
	double duration = 300.0;
	double dt = 0.1;
	std::size_t sample_stride = 1;
	sim::Scheme scheme = sim::Scheme::Euler;
	ProfileKind profile = ProfileKind::Constant;
	double v0 = 15.0;
	double a_max = 0.5;
	std::uint64_t seed = 1;
	double t_stop = 110.0;
	double t_resume = 115.0;
	sim::CollisionPolicy collision_policy = sim::CollisionPolicy::Record;
	sim::InitialSpacing init = sim::EquilibriumInit{};

	/// Validated scenario; throws InvalidConfig naming the offending key.
	sim::ScenarioConfig to_scenario() const;
	static RunConfig from_scenario(const sim::ScenarioConfig& cfg);
};

inline constexpr std::array<std::string_view, 19> kConfigKeys = {
	"alpha", "lambda", "v_max", "h_c", "b", "t_s",
	"n_vehicles", "duration", "dt", "sample_stride", "scheme",
	"profile", "v0", "a_max", "seed", "t_stop", "t_resume",
	"collision_policy", "init",
};

/// Throws InvalidConfig on an unknown key or unparsable value.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` overrides of the form used on the command line.
void apply_assignment(RunConfig& cfg, std::string_view assignment);

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Every key with its canonical text, in kConfigKeys order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

/// One-paragraph description of each key and its default, for --help.
std::string config_keys_help();

}  // namespace vshd::io
