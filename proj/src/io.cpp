#include "degen/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace degen::io {

namespace fs = std::filesystem;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf;
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return x;
}

namespace {

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return is;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = line.find(',', start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

void expect_header(std::istream& is, std::string_view want, const fs::path& path) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != want) throw std::runtime_error(path.string() + ": expected header '" + std::string(want) + "'");
}

TimeGrid grid_from_times(const std::vector<double>& t, const fs::path& path) {
  if (t.size() < 2) throw std::runtime_error(path.string() + ": need at least two time rows");
  return TimeGrid(t.front(), t.back(), t.size() - 1);
}

template <class T>
void put(std::ostream& os, T v) {
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  os.write(b.data(), sizeof(T));
}

template <class T>
T get(std::istream& is, const fs::path& path) {
  std::array<char, sizeof(T)> b;
  if (!is.read(b.data(), sizeof(T))) throw std::runtime_error(path.string() + ": truncated DGC1 file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

constexpr char kMagic[4] = {'D', 'G', 'C', '1'};

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,mode,comp1,comp2\n";
  for (std::size_t j = 0; j < tr.grid.size(); ++j) {
    const std::string t = fmt(tr.grid.at(j));
    for (std::size_t n = 0; n < tr.modes; ++n) {
      const Vec2& c = tr.at(j, n);
      os << t << ',' << n + 1 << ',' << fmt(c[0]) << ',' << fmt(c[1]) << '\n';
    }
  }
}

void write_trajectory_csv(const fs::path& path, const Trajectory& tr) {
  auto os = open_out(path);
  write_trajectory_csv(os, tr);
}

Trajectory read_trajectory_csv(const fs::path& path) {
  auto is = open_in(path);
  expect_header(is, "t,mode,comp1,comp2", path);
  std::vector<double> times;
  std::vector<Vec2> data;
  std::size_t modes = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 4) throw std::runtime_error(path.string() + ": expected 4 fields");
    const double t = parse_double(f[0]);
    const auto mode = static_cast<std::size_t>(parse_double(f[1]));
    if (mode == 1) times.push_back(t);
    if (times.empty() || times.back() != t) throw std::runtime_error(path.string() + ": rows out of order");
    if (times.size() == 1) modes = std::max(modes, mode);
    data.push_back({parse_double(f[2]), parse_double(f[3])});
  }
  if (modes == 0 || data.size() != times.size() * modes)
    throw std::runtime_error(path.string() + ": ragged trajectory table");
  Trajectory tr(grid_from_times(times, path), modes);
  tr.data = std::move(data);
  return tr;
}

void write_control_csv(std::ostream& os, const ControlSignal& v) {
  os << "t,v\n";
  for (std::size_t j = 0; j < v.values.size(); ++j) os << fmt(v.grid.at(j)) << ',' << fmt(v.values[j]) << '\n';
}

void write_control_csv(const fs::path& path, const ControlSignal& v) {
  auto os = open_out(path);
  write_control_csv(os, v);
}

ControlSignal read_control_csv(const fs::path& path) {
  auto is = open_in(path);
  expect_header(is, "t,v", path);
  std::vector<double> t, v;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 2) throw std::runtime_error(path.string() + ": expected 2 fields");
    t.push_back(parse_double(f[0]));
    v.push_back(parse_double(f[1]));
  }
  return ControlSignal(grid_from_times(t, path), std::move(v));
}

void write_state_csv(const fs::path& path, const ModalState& s) {
  auto os = open_out(path);
  os << "mode,comp1,comp2\n";
  for (std::size_t n = 0; n < s.size(); ++n) os << n + 1 << ',' << fmt(s[n][0]) << ',' << fmt(s[n][1]) << '\n';
}

ModalState read_state_csv(const fs::path& path) {
  auto is = open_in(path);
  expect_header(is, "mode,comp1,comp2", path);
  ModalState s;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 3) throw std::runtime_error(path.string() + ": expected 3 fields");
    if (parse_double(f[0]) != static_cast<double>(s.size() + 1))
      throw std::runtime_error(path.string() + ": modes out of order");
    s.push_back({parse_double(f[1]), parse_double(f[2])});
  }
  return s;
}

void write_trajectory_binary(const fs::path& path, const Trajectory& tr) {
  auto os = open_out(path, true);
  os.write(kMagic, 4);
  put<std::uint64_t>(os, tr.grid.steps);
  put<std::uint64_t>(os, tr.modes);
  for (double x : {tr.grid.t0, tr.grid.t1, tr.meta.alpha, tr.meta.a1, tr.meta.a2}) put(os, x);
  for (const auto& c : tr.data) {
    put(os, c[0]);
    put(os, c[1]);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Trajectory read_trajectory_binary(const fs::path& path) {
  auto is = open_in(path, true);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path.string() + ": not a DGC1 file");
  const auto steps = get<std::uint64_t>(is, path);
  const auto modes = get<std::uint64_t>(is, path);
  const double t0 = get<double>(is, path), t1 = get<double>(is, path);
  TrajectoryMeta meta;
  meta.alpha = get<double>(is, path);
  meta.a1 = get<double>(is, path);
  meta.a2 = get<double>(is, path);
  if (modes == 0 || steps == 0 || modes > (1u << 20) || steps > (1u << 28))
    throw std::runtime_error(path.string() + ": implausible DGC1 header");
  Trajectory tr(TimeGrid(t0, t1, steps), modes, meta);
  for (auto& c : tr.data) {
    c[0] = get<double>(is, path);
    c[1] = get<double>(is, path);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw std::runtime_error(path.string() + ": trailing bytes");
  return tr;
}

std::string family_json(const BiorthFamily& family, int digits) {
  nlohmann::ordered_json j;
  j["schema"] = "biorth.v1";
  j["horizon"] = fmt(family.horizon);
  j["precision_bits"] = family.precision_bits;
  j["log10_condition"] = fmt(family.log10_condition);
  j["residual"] = fmt(family.residual);
  auto& ex = j["exponents"] = nlohmann::ordered_json::array();
  for (const auto& z : family.exponents) ex.push_back({{"re", fmt(z.real())}, {"im", fmt(z.imag())}});
  auto& rows = j["coefficients"] = nlohmann::ordered_json::array();
  for (std::size_t n = 0; n < family.size(); ++n) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t m = 0; m < family.size(); ++m) {
      row.push_back({{"re", family.coefficient_string(n, m, false, digits)},
                     {"im", family.coefficient_string(n, m, true, digits)}});
    }
    rows.push_back(std::move(row));
  }
  return j.dump(1) + "\n";
}

void write_trace_csv(const fs::path& path, const FixedPointTrace& trace) {
  auto os = open_out(path);
  os << "iteration,increment,ratio\n";
  for (std::size_t j = 0; j < trace.increments.size(); ++j) {
    os << j + 1 << ',' << fmt(trace.increments[j]) << ',';
    if (j > 0 && j - 1 < trace.ratios.size()) os << fmt(trace.ratios[j - 1]);
    os << '\n';
  }
}

void write_text(const fs::path& path, std::string_view text) {
  auto os = open_out(path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  auto is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace degen::io
