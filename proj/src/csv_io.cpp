#include "mfc/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mfc/error.hpp"

namespace mfc {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

void write_header(std::ostream& out, const char* id, char a, char b, std::size_t d) {
  out << "t," << id;
  for (std::size_t j = 0; j < d; ++j) out << ',' << a << j;
  for (std::size_t j = 0; j < d; ++j) out << ',' << b << j;
  out << '\n';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s) {
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("csv: cannot parse number '" + s + "'");
  return value;
}

}  // namespace

void write_flow_csv(std::ostream& out, const MeasureFlow& flow) {
  const std::size_t d = flow.dim();
  write_header(out, "particle", 'x', 'v', d);
  for (std::size_t k = 0; k < flow.nodes(); ++k) {
    const auto& ens = flow.at(k);
    const std::string t = format_double(flow.time(k));
    for (std::size_t i = 0; i < ens.size(); ++i) {
      out << t << ',' << i;
      for (double e : ens.x(i)) out << ',' << format_double(e);
      for (double e : ens.v(i)) out << ',' << format_double(e);
      out << '\n';
    }
  }
  if (!out) throw IoError("flow csv: write failed");
}

MeasureFlow read_flow_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("flow csv: missing header");
  const auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "t" || header[1] != "particle" ||
      (header.size() - 2) % 2 != 0)
    throw Error("flow csv: malformed header");
  const std::size_t d = (header.size() - 2) / 2;
  std::vector<double> grid;
  std::vector<std::vector<double>> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error("flow csv: wrong column count");
    const double t = parse_double(cells[0]);
    if (grid.empty() || grid.back() != t) {
      grid.push_back(t);
      xs.emplace_back();
      vs.emplace_back();
    }
    for (std::size_t j = 0; j < d; ++j) xs.back().push_back(parse_double(cells[2 + j]));
    for (std::size_t j = 0; j < d; ++j) vs.back().push_back(parse_double(cells[2 + d + j]));
  }
  std::vector<ParticleEnsemble> snaps;
  snaps.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    snaps.emplace_back(d, std::move(xs[k]), std::move(vs[k]));
  return MeasureFlow(std::move(grid), std::move(snaps));
}

void write_leader_csv(std::ostream& out, const LeaderTrajectory& traj) {
  const std::size_t d = traj.states.empty() ? 1 : traj.states.front().d;
  write_header(out, "leader", 'y', 'w', d);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    const std::string t = format_double(traj.grid.at(k));
    for (std::size_t i = 0; i < s.m; ++i) {
      out << t << ',' << i;
      for (double e : s.pos(i)) out << ',' << format_double(e);
      for (double e : s.vel(i)) out << ',' << format_double(e);
      out << '\n';
    }
  }
  if (!out) throw IoError("leader csv: write failed");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace mfc
