#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "degen/biorthogonal.hpp"
#include "degen/modal.hpp"
#include "degen/nonlinear_control.hpp"

namespace degen::io {

/// Shortest decimal string that parses back to the same double.
std::string fmt(double x);
/// Strict parse of a full decimal string; throws std::invalid_argument.
double parse_double(std::string_view s);

/// Header "t,mode,comp1,comp2", one row per (time, mode), modes 1-based.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr);
/// Inverse of write_trajectory_csv. The grid is rebuilt from the first and last time.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Header "t,v".
void write_control_csv(std::ostream& os, const ControlSignal& v);
void write_control_csv(const std::filesystem::path& path, const ControlSignal& v);
ControlSignal read_control_csv(const std::filesystem::path& path);

/// Header "mode,comp1,comp2", modes 1-based.
void write_state_csv(const std::filesystem::path& path, const ModalState& s);
ModalState read_state_csv(const std::filesystem::path& path);

/// Binary trajectory: magic "DGC1", then little-endian fields
/// u64 steps, u64 modes, f64 t0, t1, alpha, a1, a2, then the data time-major.
void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& tr);
Trajectory read_trajectory_binary(const std::filesystem::path& path);

/// Family export, schema "biorth.v1": exponents and coefficients as decimal strings.
std::string family_json(const BiorthFamily& family, int digits = 40);

/// Header "iteration,increment,ratio"; ratio is empty on the first row.
void write_trace_csv(const std::filesystem::path& path, const FixedPointTrace& trace);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace degen::io
