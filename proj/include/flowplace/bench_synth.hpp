#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

#include "flowplace/netlist.hpp"

namespace flowplace {

// Parameters of the synthetic systolic-array benchmark. An M x N grid of
// processing elements; each PE holds one register bank (bitwidth registers)
// and bitwidth * cells_per_bit combinational cells wired as bit slices.
// Partial sums are registered row to row down each column; operands couple
// combinationally along rows. Input/output buffer macros sit on the array
// boundary, a comb-only control block fans out from the input buffer, and a
// comb-only status block collects the right edge.
struct AcceleratorSpec {
  int pu_rows = 4;       // M
  int pes_per_pu = 8;    // N
  int bitwidth = 8;      // bits per PE datapath
  int cells_per_bit = 4; // combinational cells per bit slice
  int buffer_macros = 4; // macros per input/output buffer
  std::uint64_t seed = 1;
  double target_density = 0.7;  // movable area / core area
  double macro_util = 0.5;      // macro area / core area

  int pe_subtree_size() const { return bitwidth * (1 + cells_per_bit); }
  int pu_subtree_size() const { return pes_per_pu * pe_subtree_size(); }
  void check() const;  // throws std::invalid_argument on bad parameters
};

// Deterministic: identical spec (including seed) gives an identical netlist.
// The seed only perturbs the glue-logic connectivity; the PE grid is fixed.
Netlist generate(const AcceleratorSpec& spec);

struct ExchangeDesign {
  std::string name;
  std::filesystem::path nodes_path, nets_path, pl_path, manifest_path;
  Rect core;
  double row_height = 1.0;
};

struct parse_error : std::runtime_error {
  parse_error(const std::string& what, int line_number)
      : std::runtime_error(what), line(line_number) {}
  int line = 0;
};

struct link_error : std::runtime_error {
  explicit link_error(const std::string& what) : std::runtime_error(what) {}
};

// Plain-text design quartet (nodes / nets / pl / manifest). Reading back a
// written design reproduces it exactly; all coordinates carry four decimals.
ExchangeDesign write_design(const Netlist& netlist, const Locations& locations,
                            const std::filesystem::path& dir,
                            const std::string& name = "design");

std::pair<Netlist, Locations> read_design(const std::filesystem::path& path);

// Placement file only (the placer's output).
void write_placement(const Netlist& netlist, const Locations& locations,
                     const std::filesystem::path& path);

// Ground-truth cluster labels recoverable from generated names: PE
// granularity keeps two path levels under pu prefixes, PU granularity one;
// glue blocks always map to their first level.
std::string pe_level_label(std::string_view instance_name);
std::string pu_level_label(std::string_view instance_name);

// Rounds to the exchange-format grid (four decimals).
double quantize4(double value);

}  // namespace flowplace
