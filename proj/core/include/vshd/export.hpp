#pragma once

// Text and vector-graphics output for trajectories and stability surfaces.
//
// Trajectory CSV:
//   # <key> = <value>          one line per scenario key
//   t,vehicle,x,v,headway      header
//   ...                        one row per (sample, vehicle); leader headway empty
//   # event,<t>,<kind>,<detail>
//
// Surface CSV: `v,dx,lambda1,lambda2,alpha_neutral,flag` with flag one of
// ok | singular | not_applicable (alpha empty unless ok).

#include <vshd/simulator.hpp>
#include <vshd/stability.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vshd::io {

void write_trajectory_csv(const sim::TrajectoryRecord& rec, std::ostream& out);
void write_trajectory_csv(const sim::TrajectoryRecord& rec, const std::filesystem::path& path);

/// Parses the format written above. Config lines restore the scenario echo.
sim::TrajectoryRecord read_trajectory_csv(std::istream& in);

void write_surface_csv(std::span<const stability::SurfaceSample> samples, std::ostream& out);
void write_surface_csv(std::span<const stability::SurfaceSample> samples, const std::filesystem::path& path);

const char* flag_text(stability::NeutralStatus status) noexcept;

struct SpaceTime {};

/// Indices are 0-based (0 = leader); legends show the 1-based vehicle number.
struct VelocityTrace {
	std::vector<std::size_t> vehicle_indices;
};

/// Neutral alpha over (v, dx).
struct SurfaceHeatmap {};

using PlotKind = std::variant<SpaceTime, VelocityTrace, SurfaceHeatmap>;

struct PlotSpec {
	PlotKind kind = SpaceTime{};
	int width = 800;
	int height = 500;
	std::string title;
	std::string x_label;
	std::string y_label;
};

/// SpaceTime or VelocityTrace. Throws SpecMismatch for a heatmap spec, an empty
/// record, or vehicle indices outside the platoon.
void render_plot(const sim::TrajectoryRecord& rec, const PlotSpec& spec, std::ostream& out);
void render_plot(const sim::TrajectoryRecord& rec, const PlotSpec& spec, const std::filesystem::path& path);

/// SurfaceHeatmap only.
void render_plot(std::span<const stability::SurfaceSample> samples, const PlotSpec& spec, std::ostream& out);
void render_plot(std::span<const stability::SurfaceSample> samples, const PlotSpec& spec,
				 const std::filesystem::path& path);

}  // namespace vshd::io
