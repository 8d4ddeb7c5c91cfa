#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flowplace {

struct Rect {
  double lx = 0.0, ly = 0.0, ux = 0.0, uy = 0.0;

  double width() const { return ux - lx; }
  double height() const { return uy - ly; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const {
    return x >= lx && x <= ux && y >= ly && y <= uy;
  }
};

enum class InstKind : std::uint8_t {
  StdCell,
  Macro,
  Terminal,    // fixed IO pin/pad, immovable
  StarCenter,  // zero-area pseudo vertex of a star-decomposed constraint net
};

struct Instance {
  int id = -1;
  std::string name;  // hierarchical path, '/'-separated
  double width = 0.0, height = 0.0;
  InstKind kind = InstKind::StdCell;
  bool is_sequential = false;
  // Fixed position; meaningful for terminals only.
  double fixed_x = 0.0, fixed_y = 0.0;
  std::vector<int> pin_ids;  // ascending

  bool movable() const { return kind != InstKind::Terminal; }
  double area() const { return width * height; }
};

struct Pin {
  int id = -1;
  int instance = -1;
  double offset_x = 0.0, offset_y = 0.0;  // relative to instance center
  int net = -1;
};

struct Net {
  int id = -1;
  // Ascending pin ids. Pins are created in connection order, so the first
  // pin is the driver by convention.
  std::vector<int> pin_ids;
  double weight = 1.0;
  bool is_pseudo = false;

  int degree() const { return static_cast<int>(pin_ids.size()); }
};

// Instance-center coordinates indexed by instance id. Terminal slots hold
// the fixed terminal positions and are never moved.
struct Locations {
  std::vector<double> x, y;

  std::size_t size() const { return x.size(); }
  void resize(std::size_t n) {
    x.assign(n, 0.0);
    y.assign(n, 0.0);
  }
};

class NetlistBuilder;

// Immutable after construction; safe for shared read access.
class Netlist {
 public:
  Netlist() = default;

  const std::vector<Instance>& instances() const { return instances_; }
  const std::vector<Pin>& pins() const { return pins_; }
  const std::vector<Net>& nets() const { return nets_; }
  const Rect& core() const { return core_; }

  const Instance& instance(int id) const { return instances_[id]; }
  const Pin& pin(int id) const { return pins_[id]; }
  const Net& net(int id) const { return nets_[id]; }

  // Net names are kept for file IO; empty when a netlist was built in memory
  // without names.
  const std::string& net_name(int id) const { return net_names_[id]; }

  int num_instances() const { return static_cast<int>(instances_.size()); }
  int num_pins() const { return static_cast<int>(pins_.size()); }
  int num_nets() const { return static_cast<int>(nets_.size()); }
  int num_movable() const { return num_movable_; }

  double pin_x(int pin_id, const Locations& locs) const {
    const Pin& p = pins_[pin_id];
    return locs.x[p.instance] + p.offset_x;
  }
  double pin_y(int pin_id, const Locations& locs) const {
    const Pin& p = pins_[pin_id];
    return locs.y[p.instance] + p.offset_y;
  }

 private:
  friend class NetlistBuilder;

  std::vector<Instance> instances_;
  std::vector<Pin> pins_;
  std::vector<Net> nets_;
  std::vector<std::string> net_names_;
  Rect core_;
  int num_movable_ = 0;
};

// Incremental construction; also used to extend an existing netlist with
// pseudo star nets (the base ids stay a prefix of the result).
class NetlistBuilder {
 public:
  NetlistBuilder() = default;
  explicit NetlistBuilder(const Netlist& base);

  void set_core(Rect core) { core_ = core; }

  int add_instance(std::string name, double width, double height, InstKind kind,
                   bool is_sequential = false);
  int add_terminal(std::string name, double x, double y);
  void set_fixed_position(int instance_id, double x, double y);
  int add_net(std::string name = {}, double weight = 1.0, bool is_pseudo = false);
  int connect(int instance_id, int net_id, double offset_x = 0.0, double offset_y = 0.0);

  int num_instances() const { return static_cast<int>(instances_.size()); }
  const Instance& instance(int id) const { return instances_[id]; }

  Netlist build();

 private:
  std::vector<Instance> instances_;
  std::vector<Pin> pins_;
  std::vector<Net> nets_;
  std::vector<std::string> net_names_;
  Rect core_;
};

// Weighted half-perimeter wirelength over all nets (pseudo included when
// present); single-pin nets contribute zero.
double hpwl(const Netlist& netlist, const Locations& locations);

// HPWL over design nets only; pseudo constraint nets are forces, not wire.
double hpwl_design(const Netlist& netlist, const Locations& locations);

struct StarFragment {
  int star_center = -1;        // id of the created pseudo vertex
  std::vector<int> net_ids;    // one two-pin pseudo net per member
};

// Replaces a k-member constraint group by k two-pin nets through a new
// zero-area star-center vertex. Every created net carries penalty_weight.
StarFragment star_decompose(NetlistBuilder& builder, std::span<const int> members,
                            double penalty_weight, std::string_view star_name);

// Report-only structural check: dangling references, zero-area movables,
// terminals outside the core, pin offsets off the cell.
std::vector<std::string> validate(const Netlist& netlist);

// Full-size location vector: terminals at their fixed positions, every
// movable instance at the core center.
Locations initial_locations(const Netlist& netlist);

}  // namespace flowplace
