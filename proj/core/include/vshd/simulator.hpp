#pragma once

// Open-boundary platoon of N point vehicles behind a scripted leader.
//
// Followers are integrated in headway form, y_i = x_{i-1} - x_i:
//   dy_i/dt = v_{i-1} - v_i
//   dv_i/dt = acceleration({y_i, v_{i-1} - v_i}, v_i)
// Positions are rebuilt from the leader position and the headways, so a
// uniform equilibrium whose OV residual is exactly zero stays bit-exact.

#include <vshd/model.hpp>

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vshd::sim {

using model::ModelParams;
using model::VehicleState;

struct ConstantLeader {
	double v0 = 15.0;
};

/// Per-step acceleration drawn uniformly from [-a_max, a_max].
struct RandomFluctuation {
	double v0 = 15.0;
	double a_max = 0.5;
	std::uint64_t seed = 1;
};

/// Leader at v0, instantly at rest on [t_stop, t_resume), instantly back to v0.
struct SuddenStop {
	double v0 = 15.0;
	double t_stop = 110.0;
	double t_resume = 115.0;
};

using LeaderProfile = std::variant<ConstantLeader, RandomFluctuation, SuddenStop>;

double profile_v0(const LeaderProfile& profile) noexcept;

struct EquilibriumInit {};

/// headways[i] is the gap between vehicle i and vehicle i + 1; all start at v0.
struct ExplicitInit {
	std::vector<double> headways;
};

using InitialSpacing = std::variant<EquilibriumInit, ExplicitInit>;

enum class Scheme { Euler, RK4 };
enum class CollisionPolicy { Halt, Record };

struct ScenarioConfig {
	std::size_t n_vehicles = 100;
	double duration = 300.0;  // s
	double dt = 0.1;          // s
	std::size_t sample_stride = 1;
	LeaderProfile profile = ConstantLeader{};
	ModelParams params;
	InitialSpacing init = EquilibriumInit{};
	Scheme scheme = Scheme::Euler;
	CollisionPolicy collision_policy = CollisionPolicy::Record;

	void validate() const;
	std::size_t step_count() const noexcept;
};

struct PlatoonState {
	double t = 0.0;
	std::vector<VehicleState> vehicles;  // 0 = leader
};

enum class EventKind { Collision, LeaderStop, LeaderResume, VelocityClamp };

const char* to_string(EventKind kind) noexcept;

struct Event {
	double t = 0.0;
	EventKind kind = EventKind::Collision;
	std::size_t vehicle = 0;
	std::string detail;
};

/// mt19937_64 with an explicit 53-bit mantissa mapping, so draws do not depend
/// on the standard library's distribution implementations.
class LeaderRng {
public:
	explicit LeaderRng(std::uint64_t seed) : engine_(seed) {}

	/// Uniform on [lo, hi).
	double uniform(double lo, double hi);

private:
	std::mt19937_64 engine_;
};

/// Leader speed at time t given its speed one step earlier. Random draws are
/// consumed on every call for RandomFluctuation, result clamped to [0, v_max].
double leader_velocity(const LeaderProfile& profile, double t, double v_prev, double dt,
					   LeaderRng& rng, double v_max);

/// Throws OutOfRange if an equilibrium headway does not exist for v0.
PlatoonState init_platoon(const ScenarioConfig& cfg);

class Simulator {
public:
	explicit Simulator(ScenarioConfig cfg);

	/// Starts from an arbitrary state instead of cfg.init; vehicles[0] is the
	/// leader and must move at its profile speed for the step to be meaningful.
	Simulator(ScenarioConfig cfg, const PlatoonState& start);

	/// Advances by one dt. Throws CollisionDetected under CollisionPolicy::Halt.
	void step();

	double time() const noexcept;
	std::size_t steps_taken() const noexcept { return steps_; }
	PlatoonState state() const;
	/// headways()[i - 1] belongs to follower i.
	std::span<const double> headways() const noexcept { return headway_; }
	std::span<const double> velocities() const noexcept { return velocity_; }
	double leader_position() const noexcept { return leader_x_; }
	const std::vector<Event>& events() const noexcept { return events_; }
	const ScenarioConfig& config() const noexcept { return cfg_; }

private:
	void advance_followers_euler(double v_lead);
	void advance_followers_rk4(double v_lead);
	void post_step();

	ScenarioConfig cfg_;
	LeaderRng rng_;
	std::size_t steps_ = 0;
	double t0_ = 0.0;
	double leader_x_ = 0.0;
	std::vector<double> velocity_;
	std::vector<double> headway_;
	std::vector<bool> clamped_;
	std::vector<bool> collided_;
	std::vector<Event> events_;
	// RK4 scratch.
	std::vector<double> ky_[4], kv_[4], y_tmp_, v_tmp_;
};

struct Sample {
	double t = 0.0;
	std::vector<double> x;
	std::vector<double> v;
	std::vector<double> headway;  // size n - 1; headway[i - 1] belongs to vehicle i
};

struct TrajectoryRecord {
	std::vector<Sample> samples;
	std::vector<Event> events;
	ScenarioConfig config;

	std::size_t n_vehicles() const noexcept {
		return samples.empty() ? 0 : samples.front().v.size();
	}
};

/// Integrates [0, duration], keeping every sample_stride-th step plus t = 0.
TrajectoryRecord run(const ScenarioConfig& cfg);

struct JamMetrics {
	double velocity_std = 0.0;       // cross-platoon std of v, averaged over the window
	double last_min_velocity = 0.0;  // slowest speed of the tail vehicle
	double min_headway = 0.0;        // over all followers
	std::size_t slow_vehicles = 0;   // vehicles that dipped below 1 m/s
};

inline constexpr double kSlowSpeed = 1.0;

/// Statistics over samples with t in [t_lo, t_hi]. Throws EmptyWindow if none.
JamMetrics jam_metrics(const TrajectoryRecord& rec, double t_lo, double t_hi);

/// Minimum speed of one vehicle over samples in [t_lo, t_hi].
double vehicle_min_velocity(const TrajectoryRecord& rec, std::size_t index, double t_lo, double t_hi);

/// Population std over time of follower `index`'s headway in [t_lo, t_hi].
double vehicle_headway_std(const TrajectoryRecord& rec, std::size_t index, double t_lo, double t_hi);

}  // namespace vshd::sim
