#include "flowplace/bench_synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace flowplace {

double quantize4(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return std::strtod(buf, nullptr);
}

void AcceleratorSpec::check() const {
  if (pu_rows < 1) throw std::invalid_argument("pu_rows must be >= 1");
  if (pes_per_pu < 1) throw std::invalid_argument("pes_per_pu must be >= 1");
  if (bitwidth < 1) throw std::invalid_argument("bitwidth must be >= 1");
  if (cells_per_bit < 1) throw std::invalid_argument("cells_per_bit must be >= 1");
  if (buffer_macros < 1) throw std::invalid_argument("buffer_macros must be >= 1");
  if (target_density <= 0.0 || target_density > 1.0)
    throw std::invalid_argument("target_density must be in (0, 1]");
  if (macro_util < 0.0 || macro_util + 0.05 > target_density)
    throw std::invalid_argument("macro_util must leave room under target_density");
}

namespace {

constexpr double kRegWidth = 1.5;
constexpr double kCellWidth = 1.0;
constexpr double kRowHeight = 1.0;

std::string cat(std::string_view a, int i) {
  std::string s(a);
  s += std::to_string(i);
  return s;
}

}  // namespace

Netlist generate(const AcceleratorSpec& spec) {
  spec.check();
  const int M = spec.pu_rows;
  const int N = spec.pes_per_pu;
  const int B = spec.bitwidth;
  const int C = spec.cells_per_bit;
  const int K = spec.buffer_macros;

  // Size the core from the target density, then the buffer macros from the
  // requested macro utilization.
  const double std_area = static_cast<double>(M) * N * B * (kRegWidth + C * kCellWidth) +
                          static_cast<double>(B) * C * kCellWidth +
                          static_cast<double>(B) * kCellWidth;
  const double core_area_goal = std_area / (spec.target_density - spec.macro_util);
  const double side = std::ceil(std::sqrt(core_area_goal) / kRowHeight) * kRowHeight;
  const double core_area = side * side;
  const double macro_area = spec.macro_util * core_area / (2.0 * K);
  const double macro_w = quantize4(std::sqrt(macro_area * 1.6));
  const double macro_h = quantize4(macro_area / macro_w);
  if (macro_w >= side || macro_h >= side)
    throw std::invalid_argument("buffer macros do not fit the core");

  NetlistBuilder b;
  b.set_core({0.0, 0.0, side, side});
  std::mt19937_64 rng(spec.seed);

  // instances
  std::vector<std::vector<int>> reg(M * N), mac(M * N);  // per PE: [b], [c*B+b]
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < N; ++j) {
      const std::string pe = "pu" + std::to_string(i) + "/pe" + std::to_string(j);
      auto& regs = reg[i * N + j];
      auto& macs = mac[i * N + j];
      regs.resize(B);
      macs.resize(static_cast<std::size_t>(C) * B);
      for (int bit = 0; bit < B; ++bit)
        regs[bit] = b.add_instance(pe + "/reg[" + std::to_string(bit) + "]",
                                   kRegWidth, kRowHeight, InstKind::StdCell,
                                   /*is_sequential=*/true);
      for (int c = 0; c < C; ++c)
        for (int bit = 0; bit < B; ++bit)
          macs[c * B + bit] =
              b.add_instance(pe + "/mac" + std::to_string(c) + "[" +
                                 std::to_string(bit) + "]",
                             kCellWidth, kRowHeight, InstKind::StdCell);
    }
  }
  std::vector<int> lut(static_cast<std::size_t>(C) * B);
  for (int c = 0; c < C; ++c)
    for (int bit = 0; bit < B; ++bit)
      lut[c * B + bit] = b.add_instance(
          "ctl/lut" + std::to_string(c) + "[" + std::to_string(bit) + "]",
          kCellWidth, kRowHeight, InstKind::StdCell);
  std::vector<int> stat(B);
  for (int bit = 0; bit < B; ++bit)
    stat[bit] = b.add_instance("stat/x[" + std::to_string(bit) + "]", kCellWidth,
                               kRowHeight, InstKind::StdCell);
  std::vector<int> ibuf(K), obuf(K);
  for (int k = 0; k < K; ++k)
    ibuf[k] = b.add_instance(cat("ibuf/mem", k), macro_w, macro_h, InstKind::Macro,
                             /*is_sequential=*/true);
  for (int k = 0; k < K; ++k)
    obuf[k] = b.add_instance(cat("obuf/mem", k), macro_w, macro_h, InstKind::Macro,
                             /*is_sequential=*/true);

  // boundary terminals
  std::vector<int> pad_in(K), pad_out(K), pad_stat(B);
  for (int k = 0; k < K; ++k) {
    pad_in[k] = b.add_terminal(cat("pad_in", k), 0.0,
                               quantize4((k + 0.5) / K * side));
    pad_out[k] = b.add_terminal(cat("pad_out", k), side,
                                quantize4((k + 0.5) / K * side));
  }
  for (int bit = 0; bit < B; ++bit)
    pad_stat[bit] =
        b.add_terminal(cat("pad_stat", bit), quantize4((bit + 0.5) / B * side), 0.0);

  // deterministic per-macro pin offsets along the macro outline
  std::vector<int> macro_pin_count(b.num_instances(), 0);
  auto macro_offset = [&](int inst, double& ox, double& oy) {
    const int t = macro_pin_count[inst]++;
    const double u = std::fmod(t * 0.6180339887498949, 1.0);
    const double v = std::fmod(t * 0.7548776662466927, 1.0);
    ox = quantize4((u - 0.5) * (macro_w - 0.2));
    oy = quantize4((v - 0.5) * (macro_h - 0.2));
  };

  // cell pin offsets
  const double kRegQ = 0.5, kRegD = -0.5;
  const double kIn0X = -0.25, kIn0Y = 0.25;
  const double kIn1X = -0.25, kIn1Y = -0.25;
  const double kIn2X = 0.0, kIn2Y = -0.25;
  const double kSelX = 0.0, kSelY = 0.25;
  const double kOutX = 0.25, kOutY = 0.0;

  auto net_tag = [](int i, int j) {
    return "pu" + std::to_string(i) + "_pe" + std::to_string(j);
  };

  // register fanout nets: reg[b].Q -> mac0[b].in0 and every mac[c][(b+B-1)%B].in1
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j)
      for (int bit = 0; bit < B; ++bit) {
        const int net = b.add_net(net_tag(i, j) + "_r" + std::to_string(bit));
        b.connect(reg[i * N + j][bit], net, kRegQ, 0.0);
        b.connect(mac[i * N + j][bit], net, kIn0X, kIn0Y);
        const int nb = (bit + B - 1) % B;
        for (int c = 0; c < C; ++c)
          b.connect(mac[i * N + j][c * B + nb], net, kIn1X, kIn1Y);
      }

  // mac output nets: bit-slice chain, plus the structural connections of the
  // array. The last chain cell's output pipes vertically into the next row's
  // register (or the output buffer on the bottom row); the first cell's
  // output couples combinationally into the next PE of the same row (or the
  // status block at the right edge).
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j)
      for (int bit = 0; bit < B; ++bit)
        for (int c = 0; c < C; ++c) {
          const int net = b.add_net(net_tag(i, j) + "_o" + std::to_string(bit) +
                                    "_" + std::to_string(c));
          b.connect(mac[i * N + j][c * B + bit], net, kOutX, kOutY);
          if (c < C - 1) b.connect(mac[i * N + j][(c + 1) * B + bit], net, kIn0X, kIn0Y);
          if (c == 0) {
            if (j < N - 1)
              b.connect(mac[i * N + (j + 1)][(C - 1) * B + bit], net, kIn2X, kIn2Y);
            else
              b.connect(stat[bit], net, kIn0X, kIn0Y);
          }
          if (c == C - 1) {
            if (i < M - 1) {
              b.connect(reg[(i + 1) * N + j][bit], net, kRegD, 0.0);
            } else {
              double ox, oy;
              const int macro = obuf[j % K];
              macro_offset(macro, ox, oy);
              b.connect(macro, net, ox, oy);
            }
          }
        }

  // input buffer feeds the top row
  for (int j = 0; j < N; ++j)
    for (int bit = 0; bit < B; ++bit) {
      const int net = b.add_net("in_c" + std::to_string(j) + "_" + std::to_string(bit));
      double ox, oy;
      const int macro = ibuf[j % K];
      macro_offset(macro, ox, oy);
      b.connect(macro, net, ox, oy);
      b.connect(reg[0 * N + j][bit], net, kRegD, 0.0);
    }

  // control block: each lut is fed by a seed-chosen input-buffer macro (and
  // possibly an earlier lut) and broadcasts a select to its mac across all PEs
  std::vector<int> lut_net(static_cast<std::size_t>(C) * B);
  for (int c = 0; c < C; ++c)
    for (int bit = 0; bit < B; ++bit) {
      const int g = b.add_net("ctl_g" + std::to_string(c) + "_" + std::to_string(bit));
      double ox, oy;
      const int macro = ibuf[static_cast<int>(rng() % K)];
      macro_offset(macro, ox, oy);
      b.connect(macro, g, ox, oy);
      b.connect(lut[c * B + bit], g, kIn0X, kIn0Y);

      const int l = b.add_net("ctl_l" + std::to_string(c) + "_" + std::to_string(bit));
      lut_net[c * B + bit] = l;
      b.connect(lut[c * B + bit], l, kOutX, kOutY);
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < N; ++j)
          b.connect(mac[i * N + j][c * B + bit], l, kSelX, kSelY);

      const int idx = c * B + bit;
      if (idx > 0) {
        const int earlier = static_cast<int>(rng() % static_cast<std::uint64_t>(idx));
        b.connect(lut[idx], lut_net[earlier], kIn1X, kIn1Y);
      }
    }

  // pad connections
  for (int k = 0; k < K; ++k) {
    const int pin = b.add_net(cat("padin", k));
    b.connect(pad_in[k], pin, 0.0, 0.0);
    double ox, oy;
    macro_offset(ibuf[k], ox, oy);
    b.connect(ibuf[k], pin, ox, oy);

    const int pout = b.add_net(cat("padout", k));
    macro_offset(obuf[k], ox, oy);
    b.connect(obuf[k], pout, ox, oy);
    b.connect(pad_out[k], pout, 0.0, 0.0);
  }
  for (int bit = 0; bit < B; ++bit) {
    const int net = b.add_net(cat("statout", bit));
    b.connect(stat[bit], net, kOutX, kOutY);
    b.connect(pad_stat[bit], net, 0.0, 0.0);
  }

  return b.build();
}

std::string pe_level_label(std::string_view instance_name) {
  const std::size_t first = instance_name.find('/');
  if (first == std::string_view::npos) return std::string(instance_name);
  if (instance_name.substr(0, 2) != "pu") return std::string(instance_name.substr(0, first));
  const std::size_t second = instance_name.find('/', first + 1);
  if (second == std::string_view::npos) return std::string(instance_name);
  return std::string(instance_name.substr(0, second));
}

std::string pu_level_label(std::string_view instance_name) {
  const std::size_t first = instance_name.find('/');
  if (first == std::string_view::npos) return std::string(instance_name);
  return std::string(instance_name.substr(0, first));
}

// ------------------------------ file IO ------------------------------

namespace {

std::string format4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct LineReader {
  std::istream& in;
  std::string path;
  int line_no = 0;
  std::string line;

  // next non-blank, non-comment line
  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;
      if (line[pos] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(path + ":" + std::to_string(line_no) + ": " + msg, line_no);
  }
};

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

double parse_double(LineReader& r, const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') r.fail("expected a number, got '" + tok + "'");
  return v;
}

}  // namespace

ExchangeDesign write_design(const Netlist& netlist, const Locations& locations,
                            const std::filesystem::path& dir,
                            const std::string& name) {
  std::filesystem::create_directories(dir);
  ExchangeDesign d;
  d.name = name;
  d.core = netlist.core();
  d.row_height = kRowHeight;
  d.nodes_path = dir / (name + ".nodes");
  d.nets_path = dir / (name + ".nets");
  d.pl_path = dir / (name + ".pl");
  d.manifest_path = dir / (name + ".manifest");

  {
    std::ofstream out(d.nodes_path);
    if (!out) throw std::runtime_error("cannot write " + d.nodes_path.string());
    out << "# flowplace nodes: <name> <width> <height> [terminal|macro] [seq]\n";
    for (const Instance& inst : netlist.instances()) {
      if (inst.kind == InstKind::StarCenter) continue;  // runtime-only
      out << inst.name << ' ' << format4(inst.width) << ' ' << format4(inst.height);
      if (inst.kind == InstKind::Terminal) out << " terminal";
      if (inst.kind == InstKind::Macro) out << " macro";
      if (inst.is_sequential) out << " seq";
      out << '\n';
    }
  }
  {
    std::ofstream out(d.nets_path);
    if (!out) throw std::runtime_error("cannot write " + d.nets_path.string());
    out << "# flowplace nets: NetDegree <k> <netname>\n";
    for (const Net& net : netlist.nets()) {
      if (net.is_pseudo) continue;
      std::string nname = netlist.net_name(net.id);
      if (nname.empty()) nname = cat("net", net.id);
      out << "NetDegree " << net.degree() << ' ' << nname << '\n';
      for (int pid : net.pin_ids) {
        const Pin& pin = netlist.pin(pid);
        out << netlist.instance(pin.instance).name << ' ' << format4(pin.offset_x)
            << ' ' << format4(pin.offset_y) << '\n';
      }
    }
  }
  write_placement(netlist, locations, d.pl_path);
  {
    std::ofstream out(d.manifest_path);
    if (!out) throw std::runtime_error("cannot write " + d.manifest_path.string());
    out << "design: " << name << '\n';
    out << "nodes: " << name << ".nodes\n";
    out << "nets: " << name << ".nets\n";
    out << "pl: " << name << ".pl\n";
    out << "core: " << format4(d.core.lx) << ' ' << format4(d.core.ly) << ' '
        << format4(d.core.ux) << ' ' << format4(d.core.uy) << '\n';
    out << "row_height: " << format4(d.row_height) << '\n';
  }
  return d;
}

void write_placement(const Netlist& netlist, const Locations& locations,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# flowplace placement: <name> <x> <y> (instance centers)\n";
  for (const Instance& inst : netlist.instances()) {
    if (inst.kind == InstKind::StarCenter) continue;
    out << inst.name << ' ' << format4(locations.x[inst.id]) << ' '
        << format4(locations.y[inst.id]) << '\n';
  }
}

std::pair<Netlist, Locations> read_design(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path manifest = path;
  if (fs::is_directory(path)) {
    fs::path found;
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(path)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());
    for (const auto& p : entries)
      if (p.extension() == ".manifest") {
        found = p;
        break;
      }
    if (found.empty())
      throw std::runtime_error("no .manifest file in " + path.string());
    manifest = found;
  }

  fs::path nodes_path, nets_path, pl_path;
  Rect core;
  double row_height = kRowHeight;
  {
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error("cannot read " + manifest.string());
    LineReader r{in, manifest.string()};
    while (r.next()) {
      const auto toks = tokens_of(r.line);
      if (toks.empty()) continue;
      const std::string& key = toks[0];
      if (key == "nodes:" && toks.size() == 2)
        nodes_path = manifest.parent_path() / toks[1];
      else if (key == "nets:" && toks.size() == 2)
        nets_path = manifest.parent_path() / toks[1];
      else if (key == "pl:" && toks.size() == 2)
        pl_path = manifest.parent_path() / toks[1];
      else if (key == "core:" && toks.size() == 5) {
        core.lx = parse_double(r, toks[1]);
        core.ly = parse_double(r, toks[2]);
        core.ux = parse_double(r, toks[3]);
        core.uy = parse_double(r, toks[4]);
      } else if (key == "row_height:" && toks.size() == 2)
        row_height = parse_double(r, toks[1]);
      else if (key == "design:" && toks.size() == 2)
        ;  // informational
      else
        r.fail("unrecognized manifest line");
    }
  }
  (void)row_height;
  if (nodes_path.empty() || nets_path.empty() || pl_path.empty())
    throw std::runtime_error(manifest.string() + ": manifest misses a file entry");

  NetlistBuilder builder;
  builder.set_core(core);
  std::unordered_map<std::string, int> by_name;
  {
    std::ifstream in(nodes_path);
    if (!in) throw std::runtime_error("cannot read " + nodes_path.string());
    LineReader r{in, nodes_path.string()};
    while (r.next()) {
      const auto toks = tokens_of(r.line);
      if (toks.size() < 3) r.fail("expected <name> <width> <height> [flags]");
      const double w = parse_double(r, toks[1]);
      const double h = parse_double(r, toks[2]);
      InstKind kind = InstKind::StdCell;
      bool seq = false;
      for (std::size_t t = 3; t < toks.size(); ++t) {
        if (toks[t] == "terminal") kind = InstKind::Terminal;
        else if (toks[t] == "macro") kind = InstKind::Macro;
        else if (toks[t] == "seq") seq = true;
        else r.fail("unknown node flag '" + toks[t] + "'");
      }
      if (by_name.count(toks[0])) r.fail("duplicate node '" + toks[0] + "'");
      const int id = builder.add_instance(toks[0], w, h, kind, seq);
      by_name.emplace(toks[0], id);
    }
  }
  {
    std::ifstream in(nets_path);
    if (!in) throw std::runtime_error("cannot read " + nets_path.string());
    LineReader r{in, nets_path.string()};
    while (r.next()) {
      auto toks = tokens_of(r.line);
      if (toks[0] != "NetDegree" || toks.size() != 3)
        r.fail("expected 'NetDegree <k> <netname>'");
      char* end = nullptr;
      const long degree = std::strtol(toks[1].c_str(), &end, 10);
      if (end == toks[1].c_str() || *end != '\0' || degree < 1)
        r.fail("bad net degree '" + toks[1] + "'");
      const int net = builder.add_net(toks[2]);
      for (long p = 0; p < degree; ++p) {
        if (!r.next()) r.fail("net '" + toks[2] + "' truncated");
        const auto pt = tokens_of(r.line);
        if (pt.size() != 3) r.fail("expected '<instname> <offset_x> <offset_y>'");
        const auto it = by_name.find(pt[0]);
        if (it == by_name.end())
          throw link_error(nets_path.string() + ":" + std::to_string(r.line_no) +
                           ": net '" + toks[2] + "' references unknown node '" +
                           pt[0] + "'");
        builder.connect(it->second, net, parse_double(r, pt[1]), parse_double(r, pt[2]));
      }
    }
  }

  // placement file: movable centers plus fixed terminal positions
  std::vector<double> px(by_name.size(), 0.0), py(by_name.size(), 0.0);
  std::vector<bool> placed(by_name.size(), false);
  {
    std::ifstream in(pl_path);
    if (!in) throw std::runtime_error("cannot read " + pl_path.string());
    LineReader r{in, pl_path.string()};
    while (r.next()) {
      const auto toks = tokens_of(r.line);
      if (toks.size() != 3) r.fail("expected '<name> <x> <y>'");
      const auto it = by_name.find(toks[0]);
      if (it == by_name.end())
        throw link_error(pl_path.string() + ":" + std::to_string(r.line_no) +
                         ": placement references unknown node '" + toks[0] + "'");
      px[it->second] = parse_double(r, toks[1]);
      py[it->second] = parse_double(r, toks[2]);
      placed[it->second] = true;
    }
  }
  for (int id = 0; id < builder.num_instances(); ++id)
    if (placed[id] && builder.instance(id).kind == InstKind::Terminal)
      builder.set_fixed_position(id, px[id], py[id]);

  Netlist netlist = builder.build();
  Locations locs = initial_locations(netlist);
  for (int id = 0; id < netlist.num_instances(); ++id) {
    if (!placed[id]) continue;
    locs.x[id] = px[id];
    locs.y[id] = py[id];
  }
  return {std::move(netlist), std::move(locs)};
}

}  // namespace flowplace
