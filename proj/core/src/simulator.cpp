#include <vshd/simulator.hpp>

#include <vshd/errors.hpp>
#include <vshd/format.hpp>
#include <vshd/stability.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vshd {

CollisionDetected::CollisionDetected(std::size_t index, double t)
	: std::runtime_error("collision: headway of vehicle " + std::to_string(index) +
						 " reached zero at t=" + std::to_string(t) + " s"),
	  index_(index),
	  time_(t) {}

}  // namespace vshd

namespace vshd::sim {

namespace {

bool in_stop_window(const SuddenStop& s, double t) noexcept {
	return t >= s.t_stop && t < s.t_resume;
}

double initial_leader_velocity(const LeaderProfile& profile) noexcept {
	if (const auto* stop = std::get_if<SuddenStop>(&profile)) {
		return in_stop_window(*stop, 0.0) ? 0.0 : stop->v0;
	}
	return profile_v0(profile);
}

}  // namespace

double profile_v0(const LeaderProfile& profile) noexcept {
	return std::visit([](const auto& p) { return p.v0; }, profile);
}

const char* to_string(EventKind kind) noexcept {
	switch (kind) {
	case EventKind::Collision: return "collision";
	case EventKind::LeaderStop: return "leader_stop";
	case EventKind::LeaderResume: return "leader_resume";
	case EventKind::VelocityClamp: return "velocity_clamp";
	}
	return "unknown";
}

void ScenarioConfig::validate() const {
	params.validate();
	if (n_vehicles < 2) throw InvalidConfig("n_vehicles", "must be >= 2");
	if (!std::isfinite(dt) || !(dt > 0.0)) throw InvalidConfig("dt", "must be finite and > 0");
	if (!std::isfinite(duration) || !(duration >= dt)) throw InvalidConfig("duration", "must be finite and >= dt");
	if (sample_stride < 1) throw InvalidConfig("sample_stride", "must be >= 1");

	const double v0 = profile_v0(profile);
	if (!std::isfinite(v0) || v0 < 0.0 || v0 > params.v_max) {
		throw InvalidConfig("v0", "must lie in [0, v_max]");
	}
	if (const auto* rf = std::get_if<RandomFluctuation>(&profile)) {
		if (!std::isfinite(rf->a_max) || rf->a_max < 0.0) throw InvalidConfig("a_max", "must be finite and >= 0");
	}
	if (const auto* stop = std::get_if<SuddenStop>(&profile)) {
		if (!std::isfinite(stop->t_stop) || stop->t_stop < 0.0) throw InvalidConfig("t_stop", "must be finite and >= 0");
		if (!std::isfinite(stop->t_resume) || !(stop->t_stop < stop->t_resume)) {
			throw InvalidConfig("t_resume", "must be finite and > t_stop");
		}
	}
	if (const auto* expl = std::get_if<ExplicitInit>(&init)) {
		if (expl->headways.size() != n_vehicles - 1) {
			throw InvalidConfig("init", "explicit spacing needs n_vehicles - 1 headways, got " +
											std::to_string(expl->headways.size()));
		}
		for (double h : expl->headways) {
			if (!std::isfinite(h) || !(h > 0.0)) throw InvalidConfig("init", "explicit headways must be finite and > 0");
		}
	}
}

std::size_t ScenarioConfig::step_count() const noexcept {
	return static_cast<std::size_t>(std::llround(duration / dt));
}

double LeaderRng::uniform(double lo, double hi) {
	constexpr double kScale = 0x1.0p-53;
	const double u = static_cast<double>(engine_() >> 11) * kScale;
	return lo + (hi - lo) * u;
}

double leader_velocity(const LeaderProfile& profile, double t, double v_prev, double dt,
					   LeaderRng& rng, double v_max) {
	if (const auto* rf = std::get_if<RandomFluctuation>(&profile)) {
		const double a = rng.uniform(-rf->a_max, rf->a_max);
		return std::clamp(v_prev + a * dt, 0.0, v_max);
	}
	if (const auto* stop = std::get_if<SuddenStop>(&profile)) {
		return in_stop_window(*stop, t) ? 0.0 : stop->v0;
	}
	return std::get<ConstantLeader>(profile).v0;
}

PlatoonState init_platoon(const ScenarioConfig& cfg) {
	return Simulator(cfg).state();
}

Simulator::Simulator(ScenarioConfig cfg)
	: cfg_(std::move(cfg)), rng_(0) {
	cfg_.validate();
	if (const auto* rf = std::get_if<RandomFluctuation>(&cfg_.profile)) {
		rng_ = LeaderRng(rf->seed);
	}
	const std::size_t n = cfg_.n_vehicles;
	const double v0 = profile_v0(cfg_.profile);

	velocity_.assign(n, v0);
	velocity_[0] = initial_leader_velocity(cfg_.profile);
	if (const auto* expl = std::get_if<ExplicitInit>(&cfg_.init)) {
		headway_ = expl->headways;
	} else {
		headway_.assign(n - 1, stability::ov_inverse(v0, cfg_.params));
	}
	clamped_.assign(n, false);
	collided_.assign(n, false);
	for (std::size_t i = 1; i < n; ++i) {
		collided_[i] = !(headway_[i - 1] > 0.0);
	}
	if (cfg_.scheme == Scheme::RK4) {
		for (int s = 0; s < 4; ++s) {
			ky_[s].resize(n - 1);
			kv_[s].resize(n - 1);
		}
		y_tmp_.resize(n - 1);
		v_tmp_.resize(n);
	}
}

Simulator::Simulator(ScenarioConfig cfg, const PlatoonState& start)
	: Simulator(std::move(cfg)) {
	if (start.vehicles.size() != cfg_.n_vehicles) {
		throw InvalidConfig("n_vehicles", "start state has " + std::to_string(start.vehicles.size()) + " vehicles");
	}
	t0_ = start.t;
	leader_x_ = start.vehicles[0].x;
	for (std::size_t i = 0; i < velocity_.size(); ++i) {
		velocity_[i] = start.vehicles[i].v;
		if (i > 0) {
			headway_[i - 1] = start.vehicles[i - 1].x - start.vehicles[i].x;
			collided_[i] = !(headway_[i - 1] > 0.0);
		}
	}
}

double Simulator::time() const noexcept {
	return t0_ + static_cast<double>(steps_) * cfg_.dt;
}

PlatoonState Simulator::state() const {
	PlatoonState out;
	out.t = time();
	out.vehicles.resize(velocity_.size());
	double x = leader_x_;
	for (std::size_t i = 0; i < velocity_.size(); ++i) {
		if (i > 0) x -= headway_[i - 1];
		out.vehicles[i] = {x, velocity_[i]};
	}
	return out;
}

void Simulator::advance_followers_euler(double v_lead) {
	const double dt = cfg_.dt;
	const auto& p = cfg_.params;
	// Back to front so that every update reads the pre-step speed of the vehicle ahead.
	for (std::size_t i = velocity_.size() - 1; i >= 1; --i) {
		const double ahead = i == 1 ? v_lead : velocity_[i - 1];
		const double dv = ahead - velocity_[i];
		const double a = model::acceleration({headway_[i - 1], dv}, velocity_[i], p);
		headway_[i - 1] += dv * dt;
		velocity_[i] += a * dt;
	}
}

void Simulator::advance_followers_rk4(double v_lead) {
	const double dt = cfg_.dt;
	const auto& p = cfg_.params;
	const std::size_t n = velocity_.size();

	auto deriv = [&](const std::vector<double>& y, const std::vector<double>& v, int k) {
		for (std::size_t i = 1; i < n; ++i) {
			const double dv = v[i - 1] - v[i];
			ky_[k][i - 1] = dv;
			kv_[k][i - 1] = model::acceleration({y[i - 1], dv}, v[i], p);
		}
	};
	auto stage = [&](int from, double h) {
		v_tmp_[0] = v_lead;
		for (std::size_t i = 1; i < n; ++i) {
			y_tmp_[i - 1] = headway_[i - 1] + h * ky_[from][i - 1];
			v_tmp_[i] = velocity_[i] + h * kv_[from][i - 1];
		}
	};

	deriv(headway_, velocity_, 0);
	stage(0, 0.5 * dt);
	deriv(y_tmp_, v_tmp_, 1);
	stage(1, 0.5 * dt);
	deriv(y_tmp_, v_tmp_, 2);
	stage(2, dt);
	deriv(y_tmp_, v_tmp_, 3);

	const double w = dt / 6.0;
	for (std::size_t i = 1; i < n; ++i) {
		const std::size_t j = i - 1;
		headway_[j] += w * (ky_[0][j] + 2.0 * ky_[1][j] + 2.0 * ky_[2][j] + ky_[3][j]);
		velocity_[i] += w * (kv_[0][j] + 2.0 * kv_[1][j] + 2.0 * kv_[2][j] + kv_[3][j]);
	}
}

void Simulator::step() {
	const double v_lead = velocity_[0];
	// The leader holds v_lead across the step; followers see it move linearly.
	if (cfg_.scheme == Scheme::RK4) {
		advance_followers_rk4(v_lead);
	} else {
		advance_followers_euler(v_lead);
	}
	const double t_prev = time();
	leader_x_ += v_lead * cfg_.dt;
	++steps_;
	const double t = time();

	velocity_[0] = leader_velocity(cfg_.profile, t, v_lead, cfg_.dt, rng_, cfg_.params.v_max);
	if (const auto* stop = std::get_if<SuddenStop>(&cfg_.profile)) {
		const bool was = in_stop_window(*stop, t_prev);
		const bool now = in_stop_window(*stop, t);
		if (!was && now) events_.push_back({t, EventKind::LeaderStop, 0, "v=0"});
		if (was && !now) events_.push_back({t, EventKind::LeaderResume, 0, "v=" + io::format_number(stop->v0)});
	}
	post_step();
}

void Simulator::post_step() {
	const double t = time();
	for (std::size_t i = 1; i < velocity_.size(); ++i) {
		if (velocity_[i] < 0.0) {
			velocity_[i] = 0.0;
			if (!clamped_[i]) {
				clamped_[i] = true;
				events_.push_back({t, EventKind::VelocityClamp, i, "first clamp at v=0"});
			}
		}
	}
	for (std::size_t i = 1; i < velocity_.size(); ++i) {
		const bool hit = !(headway_[i - 1] > 0.0);
		if (hit && cfg_.collision_policy == CollisionPolicy::Halt) {
			throw CollisionDetected(i, t);
		}
		if (hit && !collided_[i]) {
			events_.push_back({t, EventKind::Collision, i, "headway=" + io::format_number(headway_[i - 1])});
		}
		collided_[i] = hit;
	}
}

namespace {

Sample snapshot(const Simulator& sim) {
	Sample s;
	s.t = sim.time();
	s.v.assign(sim.velocities().begin(), sim.velocities().end());
	s.headway.assign(sim.headways().begin(), sim.headways().end());
	s.x.resize(s.v.size());
	double x = sim.leader_position();
	for (std::size_t i = 0; i < s.x.size(); ++i) {
		if (i > 0) x -= s.headway[i - 1];
		s.x[i] = x;
	}
	return s;
}

template <class Fn>
std::size_t for_window(const TrajectoryRecord& rec, double t_lo, double t_hi, Fn&& fn) {
	std::size_t count = 0;
	if (t_lo <= t_hi) {
		for (const auto& s : rec.samples) {
			if (s.t < t_lo || s.t > t_hi) continue;
			fn(s);
			++count;
		}
	}
	if (count == 0) {
		throw EmptyWindow("no samples in window [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");
	}
	return count;
}

}  // namespace

TrajectoryRecord run(const ScenarioConfig& cfg) {
	Simulator sim(cfg);
	TrajectoryRecord rec;
	rec.config = sim.config();
	const std::size_t steps = cfg.step_count();
	rec.samples.reserve(steps / cfg.sample_stride + 1);
	rec.samples.push_back(snapshot(sim));
	for (std::size_t k = 1; k <= steps; ++k) {
		sim.step();
		if (k % cfg.sample_stride == 0) {
			rec.samples.push_back(snapshot(sim));
		}
	}
	rec.events = sim.events();
	return rec;
}

JamMetrics jam_metrics(const TrajectoryRecord& rec, double t_lo, double t_hi) {
	JamMetrics m;
	m.last_min_velocity = std::numeric_limits<double>::infinity();
	m.min_headway = std::numeric_limits<double>::infinity();
	std::vector<bool> slow(rec.n_vehicles(), false);
	double std_sum = 0.0;
	const std::size_t count = for_window(rec, t_lo, t_hi, [&](const Sample& s) {
		const double n = static_cast<double>(s.v.size());
		double mean = 0.0;
		for (double v : s.v) mean += v;
		mean /= n;
		double var = 0.0;
		for (std::size_t i = 0; i < s.v.size(); ++i) {
			var += (s.v[i] - mean) * (s.v[i] - mean);
			if (s.v[i] < kSlowSpeed) slow[i] = true;
		}
		std_sum += std::sqrt(var / n);
		m.last_min_velocity = std::min(m.last_min_velocity, s.v.back());
		for (double h : s.headway) m.min_headway = std::min(m.min_headway, h);
	});
	m.velocity_std = std_sum / static_cast<double>(count);
	m.slow_vehicles = static_cast<std::size_t>(std::count(slow.begin(), slow.end(), true));
	return m;
}

double vehicle_min_velocity(const TrajectoryRecord& rec, std::size_t index, double t_lo, double t_hi) {
	if (index >= rec.n_vehicles()) throw std::out_of_range("vehicle index out of range");
	double lo = std::numeric_limits<double>::infinity();
	for_window(rec, t_lo, t_hi, [&](const Sample& s) { lo = std::min(lo, s.v[index]); });
	return lo;
}

double vehicle_headway_std(const TrajectoryRecord& rec, std::size_t index, double t_lo, double t_hi) {
	if (index == 0 || index >= rec.n_vehicles()) throw std::out_of_range("follower index out of range");
	double sum = 0.0;
	double sum_sq = 0.0;
	const std::size_t count = for_window(rec, t_lo, t_hi, [&](const Sample& s) {
		sum += s.headway[index - 1];
	});
	const double mean = sum / static_cast<double>(count);
	for_window(rec, t_lo, t_hi, [&](const Sample& s) {
		const double d = s.headway[index - 1] - mean;
		sum_sq += d * d;
	});
	return std::sqrt(sum_sq / static_cast<double>(count));
}

}  // namespace vshd::sim
