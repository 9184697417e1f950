// SPDX-License-Identifier: Apache-2.0
#include "dfmap/simref.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "dfmap/error.hpp"

namespace dfmap {

namespace {

// Event queue plus processor-sharing resources. Each resource serves its
// active flows at bandwidth / count, tracked with a virtual clock: a flow
// finishes when the per-flow service V reaches its start V plus its size.
class Engine {
 public:
  using Callback = std::function<void()>;

  double now() const { return now_; }
  std::size_t events() const { return processed_; }

  void at(double time, int kind, std::int64_t key, Callback cb) {
    const std::uint64_t seq = next_seq_++;
    queue_.push({time, kind, key, seq, park(std::move(cb))});
  }

  int add_resource(double bandwidth) {
    resources_.emplace_back();
    resources_.back().bandwidth = bandwidth;
    return static_cast<int>(resources_.size()) - 1;
  }

  void start_flow(int r, double bytes, Callback done) {
    if (bytes <= 0) {
      at(now_, kFlowDone, r, std::move(done));
      return;
    }
    Res& res = resources_[static_cast<std::size_t>(r)];
    advance(res);
    const std::uint64_t id = next_flow_++;
    res.heap.push({res.v + bytes, id, park(std::move(done))});
    ++res.active;
    reschedule(r);
  }

  bool step() {
    if (queue_.empty()) return false;
    const Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    Callback cb = unpark(e.slot);
    ++processed_;
    cb();
    return true;
  }

 private:
  static constexpr int kFlowDone = 0;

  struct Event {
    double time;
    int kind;
    std::int64_t key;
    std::uint64_t seq;
    std::uint32_t slot;
    bool operator<(const Event& o) const {
      // Inverted for a min-heap on (time, kind, key, seq).
      if (time != o.time) return time > o.time;
      if (kind != o.kind) return kind > o.kind;
      if (key != o.key) return key > o.key;
      return seq > o.seq;
    }
  };
  struct Pending {
    double finish;
    std::uint64_t id;
    std::uint32_t slot;
    bool operator<(const Pending& o) const { return finish != o.finish ? finish > o.finish : id > o.id; }
  };
  struct Res {
    double bandwidth = 0;
    double v = 0;
    double last = 0;
    int active = 0;
    std::uint32_t version = 0;
    std::priority_queue<Pending> heap;
  };

  // Callbacks live in a recycled pool so heap entries stay small.
  std::uint32_t park(Callback cb) {
    if (free_.empty()) {
      slots_.push_back(std::move(cb));
      return static_cast<std::uint32_t>(slots_.size() - 1);
    }
    const std::uint32_t slot = free_.back();
    free_.pop_back();
    slots_[slot] = std::move(cb);
    return slot;
  }

  Callback unpark(std::uint32_t slot) {
    Callback cb = std::move(slots_[slot]);
    slots_[slot] = nullptr;
    free_.push_back(slot);
    return cb;
  }

  void advance(Res& r) {
    if (r.active > 0) r.v += (now_ - r.last) * r.bandwidth / r.active;
    r.last = now_;
  }

  void reschedule(int r) {
    Res& res = resources_[static_cast<std::size_t>(r)];
    const std::uint32_t version = ++res.version;
    if (res.heap.empty()) return;
    const double t = now_ + std::max(0.0, res.heap.top().finish - res.v) * res.active / res.bandwidth;
    at(t, kFlowDone, r, [this, r, version] { complete(r, version); });
  }

  void complete(int r, std::uint32_t version) {
    Res& res = resources_[static_cast<std::size_t>(r)];
    if (version != res.version) return;
    advance(res);
    // Callbacks only run from step(), so one scratch list is enough.
    finished_.clear();
    const double eps = 1e-9 * std::max(1.0, std::abs(res.v));
    while (!res.heap.empty() && res.heap.top().finish <= res.v + eps) {
      finished_.push_back(res.heap.top().slot);
      res.heap.pop();
      --res.active;
    }
    if (res.heap.empty()) res.v = 0;  // fresh epoch keeps the clock exact
    reschedule(r);
    for (std::size_t i = 0; i < finished_.size(); ++i) unpark(finished_[i])();
  }

  double now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_flow_ = 0;
  std::size_t processed_ = 0;
  std::priority_queue<Event> queue_;
  std::vector<Callback> slots_;
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> finished_;
  std::vector<Res> resources_;
};

struct PlanInfo {
  std::string access;
  Direction direction = Direction::Load;
  int level = 0;
  std::int64_t footprint = 0;
  std::int64_t tile_bytes = 1;
  std::vector<std::string> stage_nets;
};

// Everything the simulator needs, independent of where it came from.
struct Program {
  const Instantiation* inst = nullptr;
  std::size_t loops = 0;
  std::int64_t body = 0;
  std::vector<PlanInfo> plans;
  std::int64_t capacity = 0;
  std::vector<std::string> core_names;
};

class Simulator {
 public:
  Simulator(const Program& prog, const SimOptions& options) : p_(prog), inst_(*prog.inst), opt_(options) {
    for (const auto& r : inst_.resources) res_.push_back(eng_.add_resource(r.bandwidth.value()));
    const std::size_t ncores = inst_.active.size();
    cores_.resize(ncores);
    xfer_.assign(ncores, std::vector<std::size_t>(p_.plans.size(), SIZE_MAX));
    for (std::size_t u = 0; u < ncores; ++u) {
      for (const auto* table : {&inst_.loads_at, &inst_.stores_at}) {
        for (const auto& level : (*table)[u]) {
          for (auto t : level) xfer_[u][inst_.transfers[t].plan] = t;
        }
      }
    }
    binding_level_ = -1;
    loads_at_.resize(p_.loops + 1);
    stores_at_.resize(p_.loops + 1);
    for (std::size_t p = 0; p < p_.plans.size(); ++p) {
      const auto& pl = p_.plans[p];
      binding_level_ = std::max(binding_level_, pl.level);
      auto& table = pl.direction == Direction::Load ? loads_at_ : stores_at_;
      table[static_cast<std::size_t>(pl.level)].push_back(p);
    }
    trace_.peak_buffer_per_core.assign(ncores, 0);
    waiting_.resize(ncores * p_.plans.size());
  }

  SimTrace run() {
    for (std::size_t u = 0; u < cores_.size(); ++u) {
      if (!inst_.active[u]) {
        cores_[u].finished = true;
        continue;
      }
      push_frame(u, {});
    }
    while (eng_.step()) {
    }
    for (std::size_t u = 0; u < cores_.size(); ++u) {
      if (!cores_[u].finished) throw SimError(deadlock_report());
      trace_.makespan = std::max(trace_.makespan, cores_[u].finish);
    }
    trace_.events = eng_.events();
    trace_.binding = binding_b_ >= binding_a_ ? Binding::Compute : Binding::Memory;
    for (auto peak : trace_.peak_buffer_per_core) trace_.peak_buffer = std::max(trace_.peak_buffer, peak);
    return std::move(trace_);
  }

 private:
  struct Frame {
    int f = 0;
    std::vector<std::int64_t> prefix;  // values of loops 0..f-2
    std::int64_t iterations = 1;
    std::int64_t stage = 0;
    bool a_done = false;
    bool b_done = false;
    bool storing = false;
    int outstanding = 0;
    bool a_has_work = false;
    bool b_has_work = false;
    double stage_start = 0;
    double load_start = 0;
    double store_start = 0;
    double a_end = 0;
    double b_end = 0;
  };
  struct Core {
    std::vector<Frame> stack;
    bool finished = false;
    double finish = 0;
    std::int64_t buffer = 0;
  };
  struct Rendezvous {
    std::size_t expected = 0;
    std::vector<std::pair<std::size_t, int>> arrived;  // (core, frame)
  };

  void record(const std::string& actor, double start, const char* kind, const std::string& what = {}) {
    if (!opt_.record_intervals) return;
    trace_.intervals.push_back({actor, start, eng_.now(), what.empty() ? std::string(kind) : kind + (" " + what)});
  }

  void allocate(std::size_t u, std::int64_t bytes, const char* kind, std::size_t plan) {
    Core& core = cores_[u];
    core.buffer += bytes;
    auto& peak = trace_.peak_buffer_per_core[u];
    peak = std::max(peak, core.buffer);
    if (core.buffer > p_.capacity && trace_.overflow.empty()) {
      std::ostringstream os;
      os << p_.core_names[u] << " allocating " << bytes << " bytes for " << kind << " " << p_.plans[plan].access
         << " at cycle " << eng_.now()
         << " holds " << core.buffer << " of " << p_.capacity << " usable bytes";
      trace_.overflow = os.str();
      if (opt_.strict_capacity) throw SimError("buffer overflow: " + trace_.overflow);
    }
  }

  void release(std::size_t u, std::int64_t bytes) { cores_[u].buffer -= bytes; }

  void push_frame(std::size_t u, std::vector<std::int64_t> prefix) {
    Core& core = cores_[u];
    Frame fr;
    fr.f = static_cast<int>(core.stack.size());
    fr.iterations = fr.f == 0 ? 1 : inst_.trips[u][static_cast<std::size_t>(fr.f - 1)];
    fr.prefix = std::move(prefix);
    core.stack.push_back(std::move(fr));
    start_stage(u, core.stack.back().f);
  }

  std::vector<std::int64_t> iteration_vector(const Frame& fr, std::int64_t j) const {
    std::vector<std::int64_t> v = fr.prefix;
    if (fr.f > 0) v.push_back(j);
    return v;
  }

  bool covers(std::size_t member, const std::vector<std::int64_t>& v) const {
    for (std::size_t l = 0; l < v.size(); ++l) {
      if (v[l] >= inst_.trips[member][l]) return false;
    }
    return true;
  }

  void start_stage(std::size_t u, int f) {
    Frame& fr = cores_[u].stack[static_cast<std::size_t>(f)];
    const std::int64_t s = fr.stage;
    fr.a_done = fr.b_done = fr.storing = false;
    fr.stage_start = eng_.now();
    const std::int64_t j = s - 1;
    fr.b_has_work = j >= 0 && j < fr.iterations;
    const auto& loads = loads_at_[static_cast<std::size_t>(f)];
    const auto& stores = stores_at_[static_cast<std::size_t>(f)];
    fr.a_has_work = (!loads.empty() && s < fr.iterations) || (!stores.empty() && s - 2 >= 0 && s - 2 < fr.iterations);
    // Part B: compute of iteration s-1.
    if (fr.b_has_work) {
      for (auto p : stores) allocate(u, p_.plans[p].footprint, "output of", p);
      if (static_cast<std::size_t>(f) == p_.loops) {
        trace_.compute_busy += static_cast<double>(p_.body);
        eng_.at(eng_.now() + static_cast<double>(p_.body), 1, static_cast<std::int64_t>(u), [this, u, f] {
          record(p_.core_names[u], cores_[u].stack[static_cast<std::size_t>(f)].stage_start, "compute");
          part_b_done(u, f);
        });
      } else {
        push_frame(u, iteration_vector(cores_[u].stack[static_cast<std::size_t>(f)], j));
      }
    } else {
      fr.b_done = true;
      fr.b_end = eng_.now();
    }
    // The push above may have reallocated the stack.
    Frame& fa = cores_[u].stack[static_cast<std::size_t>(f)];
    start_loads(u, f, fa);
  }

  void start_loads(std::size_t u, int f, Frame& fr) {
    const std::int64_t s = fr.stage;
    fr.outstanding = 0;
    const auto& issue = loads_at_[static_cast<std::size_t>(f)];
    if (s >= fr.iterations || issue.empty()) {
      start_stores(u, f);
      return;
    }
    fr.outstanding = static_cast<int>(issue.size());
    fr.load_start = eng_.now();
    // Narrow captures keep the callback inside std::function's local buffer.
    const auto cu = static_cast<std::uint32_t>(u);
    const auto cf = static_cast<std::uint16_t>(f);
    for (auto p : issue) {
      allocate(u, p_.plans[p].footprint, "load of", p);
      issue_transfer(u, f, p, s, [this, cu, cf, cp = static_cast<std::uint16_t>(p)] {
        Frame& fr2 = cores_[cu].stack[cf];
        record(p_.core_names[cu], fr2.load_start, "load", p_.plans[cp].access);
        if (--fr2.outstanding == 0) start_stores(cu, cf);
      });
    }
  }

  void start_stores(std::size_t u, int f) {
    Frame& fr = cores_[u].stack[static_cast<std::size_t>(f)];
    fr.storing = true;
    const std::int64_t j = fr.stage - 2;
    const auto& issue = stores_at_[static_cast<std::size_t>(f)];
    if (j < 0 || j >= fr.iterations || issue.empty()) {
      part_a_done(u, f);
      return;
    }
    fr.outstanding = static_cast<int>(issue.size());
    fr.store_start = eng_.now();
    const auto cu = static_cast<std::uint32_t>(u);
    const auto cf = static_cast<std::uint16_t>(f);
    for (auto p : issue) {
      issue_transfer(u, f, p, j, [this, cu, cf, cp = static_cast<std::uint16_t>(p)] {
        Frame& fr2 = cores_[cu].stack[cf];
        record(p_.core_names[cu], fr2.store_start, "store", p_.plans[cp].access);
        release(cu, p_.plans[cp].footprint);
        if (--fr2.outstanding == 0) part_a_done(cu, cf);
      });
    }
  }

  // Transfer plan p for iteration j of frame f on core u.
  void issue_transfer(std::size_t u, int f, std::size_t p, std::int64_t j, std::function<void()> done) {
    const std::size_t t = xfer_[u][p];
    if (t == SIZE_MAX) throw SimError(p_.core_names[u] + " has no transfer for " + p_.plans[p].access);
    const Transfer& tr = inst_.transfers[t];
    if (tr.members.size() <= 1) {
      run_phases(t, 0, std::move(done));
      return;
    }
    auto key = std::make_pair(t, iteration_vector(cores_[u].stack[static_cast<std::size_t>(f)], j));
    const auto& v = key.second;
    auto it = rendezvous_.find(key);
    if (it == rendezvous_.end()) {
      Rendezvous rv;
      for (auto m : members_of(t)) {
        if (covers(m, v)) ++rv.expected;
      }
      it = rendezvous_.emplace(key, std::move(rv)).first;
    }
    it->second.arrived.emplace_back(u, f);
    waiting_[u * p_.plans.size() + p] = std::move(done);
    if (it->second.arrived.size() == it->second.expected) {
      auto arrived = std::move(it->second.arrived);
      rendezvous_.erase(it);
      run_phases(t, 0, [this, arrived, p] {
        for (const auto& [core, frame] : arrived) {
          (void)frame;
          auto cb = std::move(waiting_[core * p_.plans.size() + p]);
          cb();
        }
      });
    }
  }

  const std::vector<std::size_t>& members_of(std::size_t t) {
    auto& lin = members_lin_[t];
    if (lin.empty()) {
      for (const auto& m : inst_.transfers[t].members) lin.push_back(static_cast<std::size_t>(lin_of(m)));
    }
    return lin;
  }

  std::int64_t lin_of(const Index& core) const {
    // Cores are row-major over the grid; names are indexed the same way.
    auto it = lin_cache_.find(core);
    return it->second;
  }

  void run_phases(std::size_t t, std::size_t k, std::function<void()> done) {
    const Transfer& tr = inst_.transfers[t];
    if (k == tr.phases.size()) {
      done();
      return;
    }
    const Phase& ph = tr.phases[k];
    const PlanInfo& pl = p_.plans[tr.plan];
    if (k == 0) {
      trace_.dram_bytes += ph.bytes;
      trace_.tile_loads[pl.access] += ph.bytes / std::max<std::int64_t>(pl.tile_bytes, 1);
    } else {
      for (auto links : ph.links) trace_.noc_bytes[pl.stage_nets[k - 1]] += ph.bytes * links;
    }
    const std::size_t id = new_flight(t, k, ph.resources.size(), std::move(done));
    for (int r : ph.resources) {
      eng_.start_flow(res_[static_cast<std::size_t>(r)], static_cast<double>(ph.bytes),
                      [this, id, r] { flow_done(id, r); });
    }
  }

  // One phase of a transfer in flight: the flows still running and what to
  // do once the whole transfer has landed.
  struct Flight {
    std::size_t t = 0;
    std::size_t k = 0;
    std::size_t remaining = 0;
    double start = 0;
    std::function<void()> done;
  };

  std::size_t new_flight(std::size_t t, std::size_t k, std::size_t remaining, std::function<void()> done) {
    std::size_t id;
    if (free_flights_.empty()) {
      id = flights_.size();
      flights_.emplace_back();
    } else {
      id = free_flights_.back();
      free_flights_.pop_back();
    }
    flights_[id] = Flight{t, k, remaining, eng_.now(), std::move(done)};
    return id;
  }

  void flow_done(std::size_t id, int r) {
    Flight& fl = flights_[id];
    if (opt_.record_intervals) {
      trace_.intervals.push_back({inst_.resources[static_cast<std::size_t>(r)].name, fl.start, eng_.now(),
                                  p_.plans[inst_.transfers[fl.t].plan].access});
    }
    if (--fl.remaining > 0) return;
    const std::size_t t = fl.t;
    const std::size_t k = fl.k;
    auto done = std::move(fl.done);
    free_flights_.push_back(id);
    run_phases(t, k + 1, std::move(done));
  }

  void part_a_done(std::size_t u, int f) {
    Frame& fr = cores_[u].stack[static_cast<std::size_t>(f)];
    fr.a_done = true;
    fr.a_end = eng_.now();
    maybe_end_stage(u, f);
  }

  void part_b_done(std::size_t u, int f) {
    Frame& fr = cores_[u].stack[static_cast<std::size_t>(f)];
    fr.b_done = true;
    fr.b_end = eng_.now();
    // The compute of iteration s-1 no longer needs its inputs.
    for (auto p : loads_at_[static_cast<std::size_t>(f)]) release(u, p_.plans[p].footprint);
    maybe_end_stage(u, f);
  }

  void maybe_end_stage(std::size_t u, int f) {
    Core& core = cores_[u];
    Frame& fr = core.stack[static_cast<std::size_t>(f)];
    if (!fr.a_done || !fr.b_done) return;
    if (f == binding_level_) {
      if (fr.a_has_work) binding_a_ += fr.a_end - fr.stage_start;
      if (fr.b_has_work) binding_b_ += fr.b_end - fr.stage_start;
    }
    if (++fr.stage <= fr.iterations + 1) {
      start_stage(u, f);
      return;
    }
    core.stack.pop_back();
    if (f == 0) {
      core.finished = true;
      core.finish = eng_.now();
    } else {
      part_b_done(u, f - 1);
    }
  }

  std::string deadlock_report() const {
    std::ostringstream os;
    os << "deadlock at cycle " << eng_.now() << "; waiting broadcasts:";
    for (const auto& [key, rv] : rendezvous_) {
      const Transfer& tr = inst_.transfers[key.first];
      os << "\n  " << p_.plans[tr.plan].access << " from " << p_.core_names[static_cast<std::size_t>(lin_of(tr.issuer))]
         << " iteration (";
      for (std::size_t i = 0; i < key.second.size(); ++i) os << (i ? "," : "") << key.second[i];
      os << ") has " << rv.arrived.size() << "/" << rv.expected << ":";
      for (const auto& [core, frame] : rv.arrived) os << " " << p_.core_names[core];
    }
    for (std::size_t u = 0; u < cores_.size(); ++u) {
      if (!cores_[u].finished) os << "\n  " << p_.core_names[u] << " blocked at frame " << cores_[u].stack.size() - 1;
    }
    return os.str();
  }

 public:
  std::map<Index, std::int64_t> lin_cache_;

 private:
  const Program& p_;
  const Instantiation& inst_;
  SimOptions opt_;
  Engine eng_;
  std::vector<int> res_;
  std::vector<Core> cores_;
  std::vector<std::vector<std::size_t>> xfer_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> members_lin_;
  std::vector<Flight> flights_;
  std::vector<std::size_t> free_flights_;
  std::vector<std::vector<std::size_t>> loads_at_;   // plan indices per level
  std::vector<std::vector<std::size_t>> stores_at_;
  std::map<std::pair<std::size_t, std::vector<std::int64_t>>, Rendezvous> rendezvous_;
  std::vector<std::function<void()>> waiting_;  // by core * plans + plan
  SimTrace trace_;
  int binding_level_ = -1;
  double binding_a_ = 0;
  double binding_b_ = 0;
};

std::string core_name(const HardwareModel& hw, const Index& idx) {
  std::string out = hw.cores->name + "(";
  for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? "," : "") + std::to_string(idx[i]);
  return out + ")";
}

}  // namespace

SimTrace simulate(const ScheduleCandidate& c, const HardwareModel& hw, const SimOptions& options) {
  require_level(hw, AbstractionLevel::IntraCore, "simulation");
  const Instantiation inst = instantiate(c, hw);
  Program prog;
  prog.inst = &inst;
  prog.loops = c.nest->loops.size();
  prog.body = body_compute_time(c.nest->body, *hw.cores);
  prog.capacity = usable_local_capacity(hw, options.reserved_fraction);
  for (const auto& pl : c.plans) {
    PlanInfo info{pl.access, pl.direction, pl.hoist_level, pl.footprint_bytes, pl.tile_bytes, {}};
    for (const auto& st : pl.realization.stages) info.stage_nets.push_back(st.net);
    prog.plans.push_back(std::move(info));
  }
  for (std::int64_t lin = 0; lin < hw.num_cores(); ++lin) prog.core_names.push_back(core_name(hw, hw.core_from_linear(lin)));
  Simulator sim(prog, options);
  for (std::int64_t lin = 0; lin < hw.num_cores(); ++lin) sim.lin_cache_[hw.core_from_linear(lin)] = lin;
  return sim.run();
}

SimTrace simulate_uniform(std::int64_t iterations, std::int64_t t_load, std::int64_t t_compute,
                          std::int64_t t_store) {
  if (iterations < 1 || t_load < 0 || t_compute < 0 || t_store < 0) {
    throw InputError("uniform pipeline needs iterations >= 1 and non-negative times");
  }
  // One core, one loop, one load and one store per iteration, each on its
  // own unit-bandwidth resource so bytes equal cycles.
  Instantiation inst;
  inst.resources = {{ResourceKind::DramChannel, "load", "", Rational(1)},
                    {ResourceKind::DramChannel, "store", "", Rational(1)}};
  inst.transfers = {{0, 1, Direction::Load, {0}, {{0}}, {Phase{{0}, t_load, {0}}}, iterations},
                    {1, 1, Direction::Store, {0}, {{0}}, {Phase{{1}, t_store, {0}}}, iterations}};
  inst.active = {true};
  inst.trips = {{iterations}};
  inst.loads_at = {{{}, {0}}};
  inst.stores_at = {{{}, {1}}};
  Program prog;
  prog.inst = &inst;
  prog.loops = 1;
  prog.body = t_compute;
  prog.capacity = INT64_MAX;
  prog.plans = {{"in", Direction::Load, 1, 0, 1, {}}, {"out", Direction::Store, 1, 0, 1, {}}};
  prog.core_names = {"core(0)"};
  Simulator sim(prog, SimOptions{});
  sim.lin_cache_[{0}] = 0;
  return sim.run();
}

Comparison compare(const CostEstimate& est, const SimTrace& trace) {
  Comparison c;
  c.id = est.id;
  c.estimated = est.total;
  c.simulated = trace.makespan;
  const double diff = std::abs(static_cast<double>(est.total) - trace.makespan);
  c.relative_error = trace.makespan > 0 ? diff / trace.makespan : (est.total == 0 ? 0.0 : 1.0);
  c.estimated_binding = est.binding;
  c.simulated_binding = trace.binding;
  c.estimated_dram_bytes = est.traffic.dram_bytes;
  c.simulated_dram_bytes = trace.dram_bytes;
  return c;
}

double geomean_relative_error(const std::vector<Comparison>& rows) {
  if (rows.empty()) return 0;
  double sum = 0;
  for (const auto& r : rows) {
    if (r.simulated <= 0 || r.estimated <= 0) continue;
    sum += std::abs(std::log(static_cast<double>(r.estimated) / r.simulated));
  }
  return std::exp(sum / static_cast<double>(rows.size())) - 1.0;
}

Selection select_final(const std::vector<const ScheduleCandidate*>& topk, const HardwareModel& hw,
                       const SimOptions& options) {
  if (topk.empty()) throw InputError("final selection needs at least one candidate");
  Selection sel;
  for (std::size_t i = 0; i < topk.size(); ++i) {
    const CostEstimate est = estimate(*topk[i], hw);
    sel.table.push_back(compare(est, simulate(*topk[i], hw, options)));
    const auto& best = sel.table[sel.winner];
    const auto& cur = sel.table.back();
    if (cur.simulated < best.simulated || (cur.simulated == best.simulated && cur.id < best.id)) sel.winner = i;
  }
  return sel;
}

std::string trace_csv(const SimTrace& trace) {
  std::ostringstream os;
  os << "actor,start_cycle,end_cycle,tag\n";
  for (const auto& iv : trace.intervals) {
    os << '"' << iv.actor << "\"," << iv.start << "," << iv.end << "," << iv.tag << "\n";
  }
  return os.str();
}

}  // namespace dfmap
