// SPDX-License-Identifier: Apache-2.0
#include "dfmap/perfmodel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dfmap/error.hpp"

namespace dfmap {

UnitTime op_compute_time(const TileOp& op, const CoreGrid& units) {
  UnitTime t;
  switch (op.kind) {
    case OpKind::Matmul: {
      const ComputeUnit* u = units.unit(UnitKind::Matrix);
      if (!u) throw InputError("core '" + units.name + "' has no matrix unit for op '" + op.id + "'");
      t.kind = UnitKind::Matrix;
      t.intrinsics = ceil_div(op.iteration_space.at(0), u->shape[0]) * ceil_div(op.iteration_space.at(1), u->shape[1]) *
                     ceil_div(op.iteration_space.at(2), u->shape[2]);
      t.cycles = ceil_div(t.intrinsics, u->throughput * Rational(u->count));
      return t;
    }
    case OpKind::Vector: {
      const ComputeUnit* u = units.unit(UnitKind::Vector);
      if (!u) throw InputError("core '" + units.name + "' has no vector unit for op '" + op.id + "'");
      t.kind = UnitKind::Vector;
      t.intrinsics = ceil_div(op.iteration_space.at(0), u->shape[0]);
      t.cycles = ceil_div(t.intrinsics, u->throughput * Rational(u->count));
      return t;
    }
    case OpKind::Scalar: {
      const ComputeUnit* u = units.unit(UnitKind::Scalar);
      if (!u) throw InputError("core '" + units.name + "' has no scalar unit for op '" + op.id + "'");
      t.kind = UnitKind::Scalar;
      t.intrinsics = op.iteration_space.at(0);
      t.cycles = ceil_div(t.intrinsics * u->latency, u->count);
      return t;
    }
  }
  return t;
}

std::vector<std::vector<std::size_t>> body_segments(const std::vector<TileOp>& body) {
  std::map<std::string, std::size_t> level_of;
  std::vector<std::vector<std::size_t>> segments;
  for (std::size_t i = 0; i < body.size(); ++i) {
    std::size_t level = 0;
    for (const auto& operand : body[i].operands) {
      auto it = level_of.find(operand);
      if (it != level_of.end()) level = std::max(level, it->second + 1);
    }
    level_of[body[i].id] = level;
    if (segments.size() <= level) segments.resize(level + 1);
    segments[level].push_back(i);
  }
  return segments;
}

std::int64_t body_compute_time(const std::vector<TileOp>& body, const CoreGrid& units) {
  std::int64_t total = 0;
  for (const auto& seg : body_segments(body)) {
    std::map<UnitKind, std::int64_t> per_kind;
    for (auto i : seg) {
      const UnitTime t = op_compute_time(body[i], units);
      per_kind[t.kind] += t.cycles;
    }
    std::int64_t worst = 0;
    for (const auto& [kind, cycles] : per_kind) worst = std::max(worst, cycles);
    total += worst;
  }
  return total;
}

std::int64_t loop_time(std::int64_t iterations, std::int64_t t_load, std::int64_t t_compute, std::int64_t t_store) {
  if (iterations < 0 || t_load < 0 || t_compute < 0 || t_store < 0) {
    throw std::invalid_argument("loop_time: negative input");
  }
  if (iterations == 0) return 0;
  if (iterations == 1) return t_load + t_compute + t_store;
  const std::int64_t edges = std::max(t_load, t_compute) + std::max(t_store, t_compute) + t_load + t_store;
  return (iterations - 2) * std::max(t_load + t_store, t_compute) + edges;
}

std::int64_t transfer_time(std::int64_t bytes, Rational bandwidth) { return ceil_div(bytes, bandwidth); }

const char* to_string(Binding b) { return b == Binding::Compute ? "compute-bound" : "memory-bound"; }

namespace {

class ResourceTable {
 public:
  explicit ResourceTable(std::vector<Resource>& out) : out_(out) {}

  int get(const std::string& name, ResourceKind kind, const std::string& net, Rational bw) {
    auto [it, fresh] = ids_.emplace(name, static_cast<int>(out_.size()));
    if (fresh) out_.push_back({kind, name, net, bw});
    return it->second;
  }

 private:
  std::vector<Resource>& out_;
  std::map<std::string, int> ids_;
};

std::string line_name(const HardwareModel& hw, const std::string& net, const std::string& dim, const Index& core) {
  std::string out = net + "[";
  bool first = true;
  for (std::size_t d = 0; d < hw.cores->dims.size(); ++d) {
    if (hw.cores->dims[d] == dim) continue;
    out += (first ? "" : ",") + hw.cores->dims[d] + "=" + std::to_string(core[d]);
    first = false;
  }
  return out + "]";
}

}  // namespace

Instantiation instantiate(const ScheduleCandidate& c, const HardwareModel& hw) {
  require_level(hw, AbstractionLevel::Memory, "transfer planning");
  const MappedNest& nest = *c.nest;
  const std::size_t n = nest.loops.size();
  const std::int64_t cores = hw.num_cores();
  Instantiation inst;
  ResourceTable table(inst.resources);
  const MemoryArray* dram = hw.dram();
  const Mux* dmux = hw.dram_mux();
  const Rational dram_bw = std::min(dram->port_bandwidth, dmux->bandwidth);

  inst.active.resize(static_cast<std::size_t>(cores));
  inst.trips.resize(static_cast<std::size_t>(cores));
  inst.loads_at.assign(static_cast<std::size_t>(cores), std::vector<std::vector<std::size_t>>(n + 1));
  inst.stores_at = inst.loads_at;
  std::vector<Index> index(static_cast<std::size_t>(cores));
  for (std::int64_t lin = 0; lin < cores; ++lin) {
    const auto u = static_cast<std::size_t>(lin);
    index[u] = hw.core_from_linear(lin);
    const Env env = core_env(hw, index[u]);
    inst.active[u] = nest.core_active(env);
    for (std::size_t l = 0; l < n; ++l) inst.trips[u].push_back(inst.active[u] ? nest.trip_count(l, env) : 0);
  }
  auto issues = [&](const Index& core, int level) {
    const auto& t = inst.trips[static_cast<std::size_t>(hw.core_linear(core))];
    std::int64_t k = 1;
    for (int l = 0; l < level; ++l) k *= t[static_cast<std::size_t>(l)];
    return k;
  };
  auto dram_phase = [&](const Index& core, std::int64_t bytes) {
    const std::int64_t ch = dram_channel_of(hw, core);
    const int r = table.get(dram->name + "[" + std::to_string(ch) + "]", ResourceKind::DramChannel, "", dram_bw);
    return Phase{{r}, bytes, {0}};
  };
  std::map<std::pair<std::string, std::string>, std::int64_t> route_links;

  for (std::size_t p = 0; p < c.plans.size(); ++p) {
    const MemOpPlan& plan = c.plans[p];
    const auto level = static_cast<std::size_t>(plan.hoist_level);
    std::map<std::int64_t, std::size_t> by_producer;
    for (std::int64_t lin = 0; lin < cores; ++lin) {
      const auto u = static_cast<std::size_t>(lin);
      if (!inst.active[u]) continue;
      std::size_t t_index;
      if (plan.realization.is_global()) {
        t_index = inst.transfers.size();
        Transfer t{p, plan.hoist_level, plan.direction, index[u], {index[u]}, {}, issues(index[u], plan.hoist_level)};
        t.phases.push_back(dram_phase(index[u], plan.footprint_bytes));
        inst.transfers.push_back(std::move(t));
      } else {
        const Index producer = broadcast_producer(plan.realization, hw, index[u]);
        const std::int64_t plin = hw.core_linear(producer);
        auto it = by_producer.find(plin);
        if (it == by_producer.end()) {
          Transfer t{p, plan.hoist_level, plan.direction, producer, {}, {}, issues(producer, plan.hoist_level)};
          t.phases.push_back(dram_phase(producer, plan.footprint_bytes));
          for (std::size_t k = 0; k < plan.realization.stages.size(); ++k) {
            const BroadcastStage& st = plan.realization.stages[k];
            const Interconnect* net = hw.interconnect(st.net);
            Phase ph;
            ph.bytes = plan.footprint_bytes;
            for (const Index& line : stage_lines(plan.realization, hw, producer, k)) {
              const std::string name = line_name(hw, st.net, st.dim, line);
              ph.resources.push_back(table.get(name, ResourceKind::Line, st.net, net->link_bandwidth));
              auto [rit, fresh] = route_links.emplace(std::pair{st.net, name}, 0);
              if (fresh) {
                const auto route = multicast_route(hw, *net, st.dim, line);
                if (!route) throw InputError("net '" + st.net + "' cannot reach line " + name);
                rit->second = static_cast<std::int64_t>(route->size());
              }
              ph.links.push_back(rit->second);
            }
            t.phases.push_back(std::move(ph));
          }
          it = by_producer.emplace(plin, inst.transfers.size()).first;
          inst.transfers.push_back(std::move(t));
        }
        t_index = it->second;
        inst.transfers[t_index].members.push_back(index[u]);
      }
      auto& slot = plan.direction == Direction::Load ? inst.loads_at[u][level] : inst.stores_at[u][level];
      slot.push_back(t_index);
    }
  }
  return inst;
}

std::map<std::size_t, std::int64_t> transfer_times(const Instantiation& inst,
                                                   const std::vector<std::size_t>& transfers) {
  // Sizes of every phase touching each resource.
  std::map<int, std::vector<std::int64_t>> load;
  for (auto t : transfers) {
    for (const auto& ph : inst.transfers[t].phases) {
      for (int r : ph.resources) load[r].push_back(ph.bytes);
    }
  }
  std::map<std::size_t, std::int64_t> out;
  for (auto t : transfers) {
    std::int64_t total = 0;
    for (const auto& ph : inst.transfers[t].phases) {
      std::int64_t worst = 0;
      for (int r : ph.resources) {
        std::int64_t shared = 0;
        for (auto s : load[r]) shared += std::min(s, ph.bytes);
        worst = std::max(worst, transfer_time(shared, inst.resources[static_cast<std::size_t>(r)].bandwidth));
      }
      total += worst;
    }
    out[t] = total;
  }
  return out;
}

std::vector<ContentionGroup> contention_groups(const Instantiation& inst, const std::vector<std::size_t>& transfers) {
  std::vector<std::size_t> parent(transfers.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::map<int, std::size_t> first_user;
  for (std::size_t i = 0; i < transfers.size(); ++i) {
    for (const auto& ph : inst.transfers[transfers[i]].phases) {
      for (int r : ph.resources) {
        auto [it, fresh] = first_user.emplace(r, i);
        if (!fresh) parent[find(i)] = find(it->second);
      }
    }
  }
  const auto times = transfer_times(inst, transfers);
  std::map<std::size_t, ContentionGroup> groups;
  for (std::size_t i = 0; i < transfers.size(); ++i) {
    ContentionGroup& g = groups[find(i)];
    g.transfers.push_back(transfers[i]);
    const auto& phases = inst.transfers[transfers[i]].phases;
    const std::int64_t bytes = phases.empty() ? 0 : phases.front().bytes;
    const std::int64_t cycles = times.at(transfers[i]);
    const auto stages = static_cast<double>(std::max<std::size_t>(phases.size(), 1));
    g.effective_bandwidth.push_back(cycles > 0 ? stages * static_cast<double>(bytes) / static_cast<double>(cycles) : 0);
  }
  std::vector<ContentionGroup> out;
  for (auto& [root, g] : groups) out.push_back(std::move(g));
  return out;
}

Traffic traffic(const ScheduleCandidate& c, const HardwareModel& hw, const Instantiation& inst) {
  (void)hw;
  Traffic tr;
  for (const auto& t : inst.transfers) {
    const MemOpPlan& plan = c.plans[t.plan];
    const std::int64_t dram = t.phases.front().bytes * t.issues;
    tr.dram_bytes += dram;
    (t.direction == Direction::Load ? tr.dram_load_bytes : tr.dram_store_bytes) += dram;
    tr.tile_loads[plan.access] += t.issues * (plan.footprint_bytes / std::max<std::int64_t>(plan.tile_bytes, 1));
    for (std::size_t k = 1; k < t.phases.size(); ++k) {
      const Phase& ph = t.phases[k];
      const std::string& net = plan.realization.stages[k - 1].net;
      for (auto links : ph.links) tr.noc_bytes[net] += ph.bytes * links * t.issues;
    }
  }
  return tr;
}

Traffic traffic(const ScheduleCandidate& c, const HardwareModel& hw) { return traffic(c, hw, instantiate(c, hw)); }

CostEstimate estimate(const ScheduleCandidate& c, const HardwareModel& hw) {
  require_level(hw, AbstractionLevel::IntraCore, "performance estimation");
  const MappedNest& nest = *c.nest;
  const std::size_t n = nest.loops.size();
  const Instantiation inst = instantiate(c, hw);
  CostEstimate est;
  est.id = c.id;
  est.body_compute = body_compute_time(nest.body, *hw.cores);
  est.traffic = traffic(c, hw, inst);

  // Transfer times per level, with loads and stores as separate populations.
  std::vector<std::size_t> none;
  std::vector<std::vector<std::size_t>> loads(n + 1), stores(n + 1);
  for (std::size_t t = 0; t < inst.transfers.size(); ++t) {
    const Transfer& tr = inst.transfers[t];
    (tr.direction == Direction::Load ? loads : stores)[static_cast<std::size_t>(tr.level)].push_back(t);
  }
  std::vector<std::int64_t> ttime(inst.transfers.size(), 0);
  for (std::size_t l = 0; l <= n; ++l) {
    for (const auto* pop : {&loads[l], &stores[l]}) {
      for (const auto& [t, cyc] : transfer_times(inst, *pop)) ttime[t] = cyc;
    }
  }

  // Per-channel DRAM floor of one execution of each frame.
  std::vector<std::int64_t> floor(n + 1, 0);
  for (std::size_t f = 0; f <= n; ++f) {
    std::map<int, std::int64_t> bytes;
    for (const auto& t : inst.transfers) {
      if (static_cast<std::size_t>(t.level) < f) continue;
      const auto& trips = inst.trips[static_cast<std::size_t>(hw.core_linear(t.issuer))];
      std::int64_t reps = 1;
      for (std::size_t l = f == 0 ? 0 : f - 1; l < static_cast<std::size_t>(t.level); ++l) reps *= trips[l];
      bytes[t.phases.front().resources.front()] += t.phases.front().bytes * reps;
    }
    for (const auto& [r, b] : bytes) {
      floor[f] = std::max(floor[f], transfer_time(b, inst.resources[static_cast<std::size_t>(r)].bandwidth));
    }
  }

  std::int64_t active_cores = 0;
  std::int64_t total_iterations = 0;
  for (std::size_t u = 0; u < inst.active.size(); ++u) {
    if (!inst.active[u]) continue;
    ++active_cores;
    std::int64_t iters = 1;
    for (auto t : inst.trips[u]) iters *= t;
    total_iterations += iters;

    std::vector<LevelCost> levels(n + 1);
    std::int64_t inner = est.body_compute;
    for (std::size_t f = n + 1; f-- > 0;) {
      LevelCost& lc = levels[f];
      lc.level = static_cast<int>(f);
      lc.iterations = f == 0 ? 1 : inst.trips[u][f - 1];
      for (auto t : inst.loads_at[u][f]) lc.t_load = std::max(lc.t_load, ttime[t]);
      for (auto t : inst.stores_at[u][f]) lc.t_store = std::max(lc.t_store, ttime[t]);
      lc.t_compute = inner;
      lc.dram_floor = floor[f];
      lc.time = std::max(loop_time(lc.iterations, lc.t_load, lc.t_compute, lc.t_store), lc.dram_floor);
      inner = lc.time;
    }
    if (est.levels.empty() || levels[0].time > est.total) {
      est.total = levels[0].time;
      est.levels = std::move(levels);
      est.critical_core = hw.core_from_linear(static_cast<std::int64_t>(u));
    }
  }

  // Memory-bound when the deepest frame with traffic waits on its transfers,
  // or when any frame's time is set by a saturated DRAM channel rather than
  // by its pipeline.
  est.binding = Binding::Compute;
  for (std::size_t f = est.levels.size(); f-- > 0;) {
    const LevelCost& lc = est.levels[f];
    if (lc.t_load + lc.t_store > 0) {
      est.binding = lc.t_compute >= lc.t_load + lc.t_store ? Binding::Compute : Binding::Memory;
      break;
    }
  }
  for (const auto& lc : est.levels) {
    if (lc.dram_floor > loop_time(lc.iterations, lc.t_load, lc.t_compute, lc.t_store)) est.binding = Binding::Memory;
  }

  // Roofline lower bounds.
  if (active_cores > 0) {
    std::map<UnitKind, double> per_kind;
    for (const auto& op : nest.body) {
      const UnitTime t = op_compute_time(op, *hw.cores);
      const ComputeUnit* u = hw.cores->unit(t.kind);
      const double rate = t.kind == UnitKind::Scalar ? static_cast<double>(u->count) / static_cast<double>(u->latency)
                                                     : (u->throughput * Rational(u->count)).value();
      per_kind[t.kind] += static_cast<double>(t.intrinsics) / rate;
    }
    for (const auto& [kind, cycles] : per_kind) {
      est.compute_bound = std::max(est.compute_bound, cycles * static_cast<double>(total_iterations) /
                                                          static_cast<double>(active_cores));
    }
  }
  const Rational channel_bw = std::min(hw.dram()->port_bandwidth, hw.dram_mux()->bandwidth);
  est.dram_bound = static_cast<double>(est.traffic.dram_bytes) /
                   (channel_bw.value() * static_cast<double>(hw.num_dram_channels()));
  return est;
}

std::vector<std::size_t> rank(const std::vector<CostEstimate>& estimates, std::size_t k) {
  std::vector<std::size_t> order(estimates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (estimates[a].total != estimates[b].total) return estimates[a].total < estimates[b].total;
    return estimates[a].id < estimates[b].id;
  });
  if (order.size() > k) order.resize(k);
  return order;
}

}  // namespace dfmap
