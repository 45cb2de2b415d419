#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mfc/phase_space.hpp"

namespace mfc {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

/// Flow CSV: header `t,particle,x0..x{d-1},v0..v{d-1}`, one row per
/// (node, particle), node-major.
void write_flow_csv(std::ostream& out, const MeasureFlow& flow);
MeasureFlow read_flow_csv(std::istream& in);

/// Leader CSV: header `t,leader,y0..y{d-1},w0..w{d-1}`.
void write_leader_csv(std::ostream& out, const LeaderTrajectory& traj);

/// Opens `path` for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace mfc
