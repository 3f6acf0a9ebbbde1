#include "degen/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "json.hpp"

using namespace degen;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "degen_test_io";
  fs::create_directories(dir);
  return dir / name;
}

Trajectory sample_trajectory() {
  Trajectory tr(TimeGrid(0.25, 1.75, 30), 5, TrajectoryMeta{0.5, 2.0, -1.0});
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (auto& v : tr.data) v = {g(rng) * 1e-7, g(rng) * 1e5};
  return tr;
}

}  // namespace

TEST(Io, NumberFormatRoundTrips) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> e(-300.0, 300.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, e(rng)) * (i % 2 ? -1.0 : 1.0);
    EXPECT_EQ(io::parse_double(io::fmt(x)), x);
  }
  EXPECT_EQ(io::fmt(0.1), "0.1");
  EXPECT_EQ(io::fmt(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isnan(io::parse_double(io::fmt(std::nan("")))));
  EXPECT_THROW(io::parse_double("1.0x"), std::invalid_argument);
  EXPECT_THROW(io::parse_double(""), std::invalid_argument);
  EXPECT_EQ(io::parse_double(" 1\r"), 1.0);
  EXPECT_THROW(io::parse_double("1 2"), std::invalid_argument);
}

TEST(Io, TrajectoryCsvRoundTrip) {
  const auto tr = sample_trajectory();
  const auto p = scratch("traj.csv");
  io::write_trajectory_csv(p, tr);
  const auto text = io::read_text(p);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,mode,comp1,comp2");
  const auto back = io::read_trajectory_csv(p);
  EXPECT_EQ(back.modes, tr.modes);
  EXPECT_EQ(back.grid.steps, tr.grid.steps);
  EXPECT_EQ(back.grid.t0, tr.grid.t0);
  EXPECT_EQ(back.grid.t1, tr.grid.t1);
  EXPECT_EQ(back.data, tr.data);
}

TEST(Io, ControlAndStateCsvRoundTrip) {
  ControlSignal v(TimeGrid(0.0, 1.0, 9));
  for (std::size_t j = 0; j < v.values.size(); ++j) v.values[j] = std::exp(static_cast<double>(j)) / 3.0;
  const auto pc = scratch("control.csv");
  io::write_control_csv(pc, v);
  const auto vb = io::read_control_csv(pc);
  EXPECT_EQ(vb.grid, v.grid);
  EXPECT_EQ(vb.values, v.values);

  const ModalState s{{1.0 / 3.0, -2e-300}, {0.0, 7.5}};
  const auto ps = scratch("state.csv");
  io::write_state_csv(ps, s);
  EXPECT_EQ(io::read_state_csv(ps), s);
}

TEST(Io, MalformedCsvIsRejected) {
  const auto p = scratch("bad.csv");
  io::write_text(p, "t,v\n0,1\n0.5,abc\n");
  EXPECT_THROW(io::read_control_csv(p), std::exception);
  io::write_text(p, "x,y\n0,1\n");
  EXPECT_THROW(io::read_control_csv(p), std::exception);
  io::write_text(p, "mode,comp1,comp2\n2,1,1\n");
  EXPECT_THROW(io::read_state_csv(p), std::exception);
  EXPECT_THROW(io::read_trajectory_csv(scratch("missing.csv")), std::exception);
}

TEST(Io, BinaryRoundTripAndLayout) {
  const auto tr = sample_trajectory();
  const auto p = scratch("traj.dgc");
  io::write_trajectory_binary(p, tr);
  EXPECT_EQ(fs::file_size(p), 4u + 2u * 8u + 5u * 8u + tr.data.size() * 16u);
  {
    std::ifstream in(p, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    EXPECT_EQ(std::string(magic, 4), "DGC1");
  }
  const auto back = io::read_trajectory_binary(p);
  EXPECT_EQ(back.grid, tr.grid);
  EXPECT_EQ(back.modes, tr.modes);
  EXPECT_EQ(back.meta.alpha, 0.5);
  EXPECT_EQ(back.meta.a1, 2.0);
  EXPECT_EQ(back.meta.a2, -1.0);
  EXPECT_EQ(back.data, tr.data);

  // Trailing bytes and truncation are both errors.
  {
    std::ofstream out(p, std::ios::binary | std::ios::app);
    out.put('\0');
  }
  EXPECT_THROW(io::read_trajectory_binary(p), std::exception);
  fs::resize_file(p, 30);
  EXPECT_THROW(io::read_trajectory_binary(p), std::exception);
  io::write_text(p, "NOPE0000000000000000000000000000000000000000000000000000000000");
  EXPECT_THROW(io::read_trajectory_binary(p), std::exception);
}

TEST(Io, FamilyJsonSchema) {
  const std::vector<cplx> L{1.0, {4.0, 0.5}, {4.0, -0.5}};
  const auto f = build_biorthogonal(L, 1.0);
  const auto j = nlohmann::json::parse(io::family_json(f, 30));
  EXPECT_EQ(j["schema"], "biorth.v1");
  ASSERT_EQ(j["exponents"].size(), 3u);
  ASSERT_EQ(j["coefficients"].size(), 3u);
  ASSERT_EQ(j["coefficients"][1].size(), 3u);
  EXPECT_EQ(io::parse_double(j["exponents"][1]["im"].get<std::string>()), 0.5);
  for (std::size_t n = 0; n < 3; ++n) {
    for (std::size_t m = 0; m < 3; ++m) {
      const double re = std::stod(j["coefficients"][n][m]["re"].get<std::string>());
      const double im = std::stod(j["coefficients"][n][m]["im"].get<std::string>());
      EXPECT_NEAR(re, f.coefficient(n, m).real(), 1e-14 * (1.0 + std::fabs(re)));
      EXPECT_NEAR(im, f.coefficient(n, m).imag(), 1e-14 * (1.0 + std::fabs(re)));
    }
  }
}

TEST(Io, TraceCsv) {
  FixedPointTrace t;
  t.increments = {1e-3, 2e-6, 4e-9};
  t.ratios = {2e-3, 2e-3};
  const auto p = scratch("trace.csv");
  io::write_trace_csv(p, t);
  const auto text = io::read_text(p);
  EXPECT_EQ(text, "iteration,increment,ratio\n1,0.001,\n2,2e-06,0.002\n3,4e-09,0.002\n");
}
