#include "flowplace/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace flowplace {

NetlistBuilder::NetlistBuilder(const Netlist& base)
    : instances_(base.instances_),
      pins_(base.pins_),
      nets_(base.nets_),
      net_names_(base.net_names_),
      core_(base.core_) {}

int NetlistBuilder::add_instance(std::string name, double width, double height,
                                 InstKind kind, bool is_sequential) {
  Instance inst;
  inst.id = static_cast<int>(instances_.size());
  inst.name = std::move(name);
  inst.width = width;
  inst.height = height;
  inst.kind = kind;
  inst.is_sequential = is_sequential;
  instances_.push_back(std::move(inst));
  return instances_.back().id;
}

int NetlistBuilder::add_terminal(std::string name, double x, double y) {
  const int id = add_instance(std::move(name), 0.0, 0.0, InstKind::Terminal);
  instances_[id].fixed_x = x;
  instances_[id].fixed_y = y;
  return id;
}

void NetlistBuilder::set_fixed_position(int instance_id, double x, double y) {
  instances_[instance_id].fixed_x = x;
  instances_[instance_id].fixed_y = y;
}

int NetlistBuilder::add_net(std::string name, double weight, bool is_pseudo) {
  Net net;
  net.id = static_cast<int>(nets_.size());
  net.weight = weight;
  net.is_pseudo = is_pseudo;
  nets_.push_back(std::move(net));
  net_names_.push_back(std::move(name));
  return nets_.back().id;
}

int NetlistBuilder::connect(int instance_id, int net_id, double offset_x,
                            double offset_y) {
  if (instance_id < 0 || instance_id >= static_cast<int>(instances_.size()))
    throw std::invalid_argument("connect: instance id out of range");
  if (net_id < 0 || net_id >= static_cast<int>(nets_.size()))
    throw std::invalid_argument("connect: net id out of range");
  Pin pin;
  pin.id = static_cast<int>(pins_.size());
  pin.instance = instance_id;
  pin.offset_x = offset_x;
  pin.offset_y = offset_y;
  pin.net = net_id;
  pins_.push_back(pin);
  instances_[instance_id].pin_ids.push_back(pin.id);
  nets_[net_id].pin_ids.push_back(pin.id);
  return pin.id;
}

Netlist NetlistBuilder::build() {
  Netlist nl;
  nl.instances_ = std::move(instances_);
  nl.pins_ = std::move(pins_);
  nl.nets_ = std::move(nets_);
  nl.net_names_ = std::move(net_names_);
  nl.core_ = core_;
  // Pin ids are assigned in creation order, so the per-instance and per-net
  // lists are already ascending; keep that as a hard guarantee since the
  // gradient kernels accumulate in pin-id order.
  for (Instance& inst : nl.instances_)
    std::sort(inst.pin_ids.begin(), inst.pin_ids.end());
  for (Net& net : nl.nets_)
    std::sort(net.pin_ids.begin(), net.pin_ids.end());
  nl.num_movable_ = 0;
  for (const Instance& inst : nl.instances_)
    if (inst.movable()) ++nl.num_movable_;
  *this = NetlistBuilder();
  return nl;
}

double hpwl(const Netlist& netlist, const Locations& locations) {
  if (locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument("hpwl: location vector length mismatch");
  double total = 0.0;
  for (const Net& net : netlist.nets()) {
    if (net.degree() < 2) continue;
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    for (int pid : net.pin_ids) {
      const double px = netlist.pin_x(pid, locations);
      const double py = netlist.pin_y(pid, locations);
      min_x = std::min(min_x, px);
      max_x = std::max(max_x, px);
      min_y = std::min(min_y, py);
      max_y = std::max(max_y, py);
    }
    total += net.weight * ((max_x - min_x) + (max_y - min_y));
  }
  return total;
}

double hpwl_design(const Netlist& netlist, const Locations& locations) {
  if (locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument("hpwl: location vector length mismatch");
  double total = 0.0;
  for (const Net& net : netlist.nets()) {
    if (net.is_pseudo || net.degree() < 2) continue;
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    for (int pid : net.pin_ids) {
      const double px = netlist.pin_x(pid, locations);
      const double py = netlist.pin_y(pid, locations);
      min_x = std::min(min_x, px);
      max_x = std::max(max_x, px);
      min_y = std::min(min_y, py);
      max_y = std::max(max_y, py);
    }
    total += net.weight * ((max_x - min_x) + (max_y - min_y));
  }
  return total;
}

StarFragment star_decompose(NetlistBuilder& builder, std::span<const int> members,
                            double penalty_weight, std::string_view star_name) {
  if (members.size() < 2)
    throw std::invalid_argument("star_decompose: need at least 2 members");
  if (penalty_weight < 0.0)
    throw std::invalid_argument("star_decompose: negative penalty weight");
  StarFragment frag;
  frag.star_center = builder.add_instance(std::string(star_name), 0.0, 0.0,
                                          InstKind::StarCenter);
  frag.net_ids.reserve(members.size());
  for (int member : members) {
    const int net = builder.add_net({}, penalty_weight, /*is_pseudo=*/true);
    builder.connect(member, net, 0.0, 0.0);       // member center pin
    builder.connect(frag.star_center, net, 0.0, 0.0);  // pin at the star center
    frag.net_ids.push_back(net);
  }
  return frag;
}

std::vector<std::string> validate(const Netlist& netlist) {
  std::vector<std::string> report;
  const auto& instances = netlist.instances();
  const auto& pins = netlist.pins();
  const auto& nets = netlist.nets();
  const Rect& core = netlist.core();

  for (const Instance& inst : instances) {
    if ((inst.kind == InstKind::StdCell || inst.kind == InstKind::Macro) &&
        (inst.width <= 0.0 || inst.height <= 0.0))
      report.push_back("zero-area movable instance '" + inst.name + "'");
    if (inst.kind == InstKind::StarCenter && (inst.width != 0.0 || inst.height != 0.0))
      report.push_back("star center '" + inst.name + "' has nonzero area");
    if (inst.kind == InstKind::Terminal && !core.contains(inst.fixed_x, inst.fixed_y))
      report.push_back("terminal '" + inst.name + "' lies outside the core region");
    for (int pid : inst.pin_ids) {
      if (pid < 0 || pid >= netlist.num_pins()) {
        report.push_back("instance '" + inst.name + "' references missing pin");
        continue;
      }
      if (pins[pid].instance != inst.id)
        report.push_back("pin/instance back-reference mismatch at instance '" +
                         inst.name + "'");
    }
  }

  for (const Pin& pin : pins) {
    if (pin.instance < 0 || pin.instance >= netlist.num_instances()) {
      report.push_back("pin " + std::to_string(pin.id) + " has no owner instance");
      continue;
    }
    if (pin.net < 0 || pin.net >= netlist.num_nets()) {
      report.push_back("pin " + std::to_string(pin.id) + " references missing net");
      continue;
    }
    const Instance& owner = instances[pin.instance];
    const auto& owner_pins = owner.pin_ids;
    if (!std::binary_search(owner_pins.begin(), owner_pins.end(), pin.id))
      report.push_back("pin " + std::to_string(pin.id) +
                       " missing from owner's pin list");
    const auto& net_pins = nets[pin.net].pin_ids;
    if (!std::binary_search(net_pins.begin(), net_pins.end(), pin.id))
      report.push_back("pin " + std::to_string(pin.id) +
                       " missing from its net's pin list");
    if (std::abs(pin.offset_x) > owner.width / 2.0 + 1e-9 ||
        std::abs(pin.offset_y) > owner.height / 2.0 + 1e-9)
      report.push_back("pin " + std::to_string(pin.id) + " lies off instance '" +
                       owner.name + "'");
  }

  for (const Net& net : nets) {
    if (net.weight < 0.0)
      report.push_back("net " + std::to_string(net.id) + " has negative weight");
    std::unordered_set<int> seen;
    for (int pid : net.pin_ids) {
      if (pid < 0 || pid >= netlist.num_pins()) {
        report.push_back("net " + std::to_string(net.id) + " references missing pin");
        continue;
      }
      if (!seen.insert(pid).second)
        report.push_back("net " + std::to_string(net.id) + " has duplicate pin " +
                         std::to_string(pid));
      if (pins[pid].net != net.id)
        report.push_back("net/pin back-reference mismatch at net " +
                         std::to_string(net.id));
    }
  }

  return report;
}

Locations initial_locations(const Netlist& netlist) {
  Locations locs;
  locs.resize(netlist.num_instances());
  const Rect& core = netlist.core();
  const double cx = 0.5 * (core.lx + core.ux);
  const double cy = 0.5 * (core.ly + core.uy);
  for (const Instance& inst : netlist.instances()) {
    if (inst.kind == InstKind::Terminal) {
      locs.x[inst.id] = inst.fixed_x;
      locs.y[inst.id] = inst.fixed_y;
    } else {
      locs.x[inst.id] = cx;
      locs.y[inst.id] = cy;
    }
  }
  return locs;
}

}  // namespace flowplace
