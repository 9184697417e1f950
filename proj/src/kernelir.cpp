// SPDX-License-Identifier: Apache-2.0
#include "dfmap/kernelir.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dfmap/error.hpp"
#include "lexer.hpp"

namespace dfmap {

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Matmul: return "matmul";
    case OpKind::Vector: return "vec";
    case OpKind::Scalar: return "scalar";
  }
  return "?";
}

const IndexVar* TileKernel::var(std::string_view n) const {
  auto it = std::find_if(vars.begin(), vars.end(), [&](const IndexVar& v) { return v.name == n; });
  return it == vars.end() ? nullptr : &*it;
}

const TensorRef* TileKernel::tensor(std::string_view n) const {
  auto it = std::find_if(tensors.begin(), tensors.end(), [&](const TensorRef& t) { return t.name == n; });
  return it == tensors.end() ? nullptr : &*it;
}

const Access* TileKernel::access(std::string_view id) const {
  auto it = std::find_if(accesses.begin(), accesses.end(), [&](const Access& a) { return a.id == id; });
  return it == accesses.end() ? nullptr : &*it;
}

std::vector<const IndexVar*> TileKernel::grid_vars() const {
  std::vector<const IndexVar*> out;
  for (const auto& v : vars) {
    if (v.kind == VarKind::Grid) out.push_back(&v);
  }
  return out;
}

std::vector<const IndexVar*> TileKernel::seq_vars() const {
  std::vector<const IndexVar*> out;
  for (const auto& v : vars) {
    if (v.kind == VarKind::Sequential) out.push_back(&v);
  }
  return out;
}

std::int64_t TileKernel::tile_bytes(const Access& a) const {
  const TensorRef* t = tensor(a.tensor);
  std::int64_t n = t ? t->elem_bytes : 1;
  for (auto s : a.tile_shape) n *= s;
  return n;
}

namespace {

std::int64_t elements(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

// Fills result_shape and iteration_space of every op from its operands.
void derive_shapes(TileKernel& k) {
  std::map<std::string, std::vector<std::int64_t>> shapes;
  for (const auto& a : k.accesses) {
    if (a.direction == Direction::Load) shapes[a.id] = a.tile_shape;
  }
  for (auto& op : k.ops) {
    std::vector<std::vector<std::int64_t>> in;
    for (const auto& name : op.operands) {
      auto it = shapes.find(name);
      if (it == shapes.end()) throw InputError("op '" + op.id + "' uses '" + name + "' before it is defined");
      in.push_back(it->second);
    }
    if (op.kind == OpKind::Matmul) {
      if (in.size() != 2 || in[0].size() != 2 || in[1].size() != 2) {
        throw InputError("matmul '" + op.id + "' needs two rank-2 operands");
      }
      if (in[0][1] != in[1][0]) {
        throw InputError("matmul '" + op.id + "' inner dims do not match (" + std::to_string(in[0][1]) + " vs " +
                         std::to_string(in[1][0]) + ")");
      }
      op.result_shape = {in[0][0], in[1][1]};
      op.iteration_space = {in[0][0], in[0][1], in[1][1]};
    } else {
      if (in.empty()) throw InputError("op '" + op.id + "' has no operands");
      for (const auto& s : in) {
        if (s != in[0]) throw InputError("elementwise op '" + op.id + "' operand shapes differ");
      }
      op.result_shape = in[0];
      op.iteration_space = {elements(in[0])};
    }
    shapes[op.id] = op.result_shape;
  }
}

class KernelParser {
 public:
  explicit KernelParser(std::string_view text) : lex_(text) {}

  TileKernel run() {
    lex_.expect("kernel");
    k_.name = lex_.expect_ident();
    lex_.expect("{");
    while (!lex_.accept("}")) {
      if (lex_.accept(";")) continue;
      const detail::Token kw = lex_.peek();
      const std::string word = lex_.expect_ident();
      if (word == "grid" || word == "seq") {
        IndexVar v;
        v.kind = word == "grid" ? VarKind::Grid : VarKind::Sequential;
        v.name = fresh(lex_.peek());
        lex_.expect("=");
        const detail::Token t = lex_.peek();
        v.extent = lex_.expect_int();
        if (v.extent < 1) lex_.fail_at(t, "extent must be positive");
        var_names_.push_back(v.name);
        k_.vars.push_back(std::move(v));
      } else if (word == "param") {
        std::string name = lex_.expect_ident();
        lex_.expect("=");
        k_.params[name] = lex_.expect_int();
      } else if (word == "tensor") {
        TensorRef t;
        t.name = fresh(lex_.peek());
        lex_.expect("[");
        do {
          t.extents.push_back(lex_.expect_int());
        } while (lex_.accept(","));
        lex_.expect("]");
        lex_.expect("elem");
        lex_.expect("=");
        t.elem_bytes = lex_.expect_int();
        k_.tensors.push_back(std::move(t));
      } else if (word == "load") {
        Access a;
        a.direction = Direction::Load;
        a.id = fresh(lex_.peek());
        lex_.expect("=");
        tensor_ref(a);
        lex_.expect("tile");
        lex_.expect("(");
        do {
          a.tile_shape.push_back(lex_.expect_int());
        } while (lex_.accept(","));
        lex_.expect(")");
        values_.push_back(a.id);
        k_.accesses.push_back(std::move(a));
      } else if (word == "op") {
        TileOp op;
        op.id = fresh(lex_.peek());
        lex_.expect("=");
        const detail::Token ot = lex_.peek();
        const std::string kind = lex_.expect_ident();
        if (kind == "matmul") {
          op.kind = OpKind::Matmul;
        } else if (kind == "vec") {
          op.kind = OpKind::Vector;
        } else if (kind == "scalar") {
          op.kind = OpKind::Scalar;
        } else {
          lex_.fail_at(ot, "unknown op kind '" + kind + "'");
        }
        lex_.expect("(");
        do {
          const detail::Token vt = lex_.peek();
          std::string v = lex_.expect_ident();
          if (std::find(values_.begin(), values_.end(), v) == values_.end()) {
            lex_.fail_at(vt, "'" + v + "' used before definition");
          }
          op.operands.push_back(std::move(v));
        } while (lex_.accept(","));
        lex_.expect(")");
        values_.push_back(op.id);
        k_.ops.push_back(std::move(op));
      } else if (word == "store") {
        Access a;
        a.direction = Direction::Store;
        tensor_ref(a);
        a.id = "store_" + a.tensor + "_" + std::to_string(store_count_++);
        lex_.expect("=");
        const detail::Token vt = lex_.peek();
        a.value = lex_.expect_ident();
        if (std::find(values_.begin(), values_.end(), a.value) == values_.end()) {
          lex_.fail_at(vt, "'" + a.value + "' used before definition");
        }
        k_.accesses.push_back(std::move(a));
      } else {
        lex_.fail_at(kw, "unknown kernel statement '" + word + "'");
      }
    }
    if (!lex_.at_end()) lex_.fail("trailing input after kernel");
    return std::move(k_);
  }

 private:
  std::string fresh(const detail::Token& t) {
    std::string name = lex_.expect_ident();
    if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
      lex_.fail_at(t, "name '" + name + "' already declared");
    }
    names_.push_back(name);
    return name;
  }

  void tensor_ref(Access& a) {
    const detail::Token t = lex_.peek();
    a.tensor = lex_.expect_ident();
    if (!k_.tensor(a.tensor)) lex_.fail_at(t, "undeclared tensor '" + a.tensor + "'");
    lex_.expect("[");
    do {
      a.coords.push_back(detail::parse_affine(lex_, &var_names_));
    } while (lex_.accept(","));
    lex_.expect("]");
  }

  detail::Lexer lex_;
  TileKernel k_;
  std::vector<std::string> names_;
  std::vector<std::string> var_names_;
  std::vector<std::string> values_;
  int store_count_ = 0;
};

std::string coords_str(const std::vector<AffineExpr>& coords) {
  std::string out;
  for (std::size_t i = 0; i < coords.size(); ++i) out += (i ? ", " : "") + coords[i].str();
  return out;
}

template <typename T>
std::string list_str(const std::vector<T>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

}  // namespace

void check_kernel(const TileKernel& k) {
  if (k.grid_vars().empty() && !k.vars.empty() && k.seq_vars().size() == k.vars.size()) {
    // A purely sequential kernel is allowed; it simply runs on one core.
  }
  for (const auto& v : k.vars) {
    if (v.extent < 1) throw InputError("index var '" + v.name + "' needs a positive extent");
  }
  for (const auto& t : k.tensors) {
    if (t.extents.empty()) throw InputError("tensor '" + t.name + "' has rank 0");
    for (auto e : t.extents) {
      if (e < 1) throw InputError("tensor '" + t.name + "' has a non-positive extent");
    }
    if (t.elem_bytes != 1 && t.elem_bytes != 2 && t.elem_bytes != 4 && t.elem_bytes != 8) {
      throw InputError("tensor '" + t.name + "' element size must be 1, 2, 4 or 8 bytes");
    }
  }
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> ranges;
  for (const auto& v : k.vars) ranges[v.name] = {0, v.extent - 1};
  for (const auto& a : k.accesses) {
    const TensorRef* t = k.tensor(a.tensor);
    if (!t) throw InputError("access to undeclared tensor '" + a.tensor + "'");
    if (a.coords.size() != t->extents.size()) {
      throw InputError("access '" + a.id + "' has " + std::to_string(a.coords.size()) + " coords for rank-" +
                       std::to_string(t->extents.size()) + " tensor '" + t->name + "'");
    }
    if (a.direction == Direction::Load && a.tile_shape.size() != t->extents.size()) {
      throw InputError("load '" + a.id + "' tile rank does not match tensor '" + t->name + "'");
    }
    for (std::size_t d = 0; d < a.coords.size(); ++d) {
      for (const auto& name : a.coords[d].vars()) {
        if (!k.var(name)) throw InputError("access '" + a.id + "' uses undeclared var '" + name + "'");
      }
      const auto [lo, hi] = a.coords[d].bounds(ranges);
      if (lo < 0 || hi >= t->extents[d]) {
        throw InputError("access '" + a.id + "' reaches tile " + std::to_string(lo < 0 ? lo : hi) + " of dim " +
                         std::to_string(d) + " of '" + t->name + "' (extent " + std::to_string(t->extents[d]) + ")");
      }
    }
  }
  TileKernel copy = k;
  derive_shapes(copy);
  for (const auto& a : k.accesses) {
    if (a.direction != Direction::Store) continue;
    const TileOp* producer = nullptr;
    for (const auto& op : copy.ops) {
      if (op.id == a.value) producer = &op;
    }
    std::vector<std::int64_t> shape;
    if (producer) {
      shape = producer->result_shape;
    } else if (const Access* src = k.access(a.value); src && src->direction == Direction::Load) {
      shape = src->tile_shape;
    } else {
      throw InputError("store to '" + a.tensor + "' writes undefined value '" + a.value + "'");
    }
    if (!a.tile_shape.empty() && a.tile_shape != shape) {
      throw InputError("store to '" + a.tensor + "' tile shape does not match its value");
    }
  }
}

TileKernel normalize(const TileKernel& k) {
  TileKernel out = k;
  for (auto& a : out.accesses) {
    for (auto& c : a.coords) c = c + AffineExpr(0);
  }
  derive_shapes(out);
  for (auto& a : out.accesses) {
    if (a.direction != Direction::Store) continue;
    for (const auto& op : out.ops) {
      if (op.id == a.value) a.tile_shape = op.result_shape;
    }
    if (const Access* src = out.access(a.value); src && src->direction == Direction::Load) {
      a.tile_shape = src->tile_shape;
    }
  }
  return out;
}

TileKernel parse_kernel(std::string_view text) {
  TileKernel k = KernelParser(text).run();
  check_kernel(k);
  return normalize(k);
}

TileKernel load_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open kernel file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_kernel(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path);
  }
}

std::string print_kernel(const TileKernel& k) {
  std::ostringstream os;
  os << "kernel " << k.name << " {\n";
  for (const auto& [name, v] : k.params) os << "  param " << name << "=" << v << ";\n";
  for (const auto& v : k.vars) {
    os << "  " << (v.kind == VarKind::Grid ? "grid " : "seq ") << v.name << "=" << v.extent << ";\n";
  }
  for (const auto& t : k.tensors) os << "  tensor " << t.name << "[" << list_str(t.extents) << "] elem=" << t.elem_bytes << ";\n";
  // Statements in an order where every use follows its definition.
  for (const auto& a : k.accesses) {
    if (a.direction == Direction::Load) {
      os << "  load " << a.id << " = " << a.tensor << "[" << coords_str(a.coords) << "] tile("
         << list_str(a.tile_shape) << ");\n";
    }
  }
  for (const auto& op : k.ops) {
    os << "  op " << op.id << " = " << to_string(op.kind) << "(";
    for (std::size_t i = 0; i < op.operands.size(); ++i) os << (i ? "," : "") << op.operands[i];
    os << ");\n";
  }
  for (const auto& a : k.accesses) {
    if (a.direction == Direction::Store) {
      os << "  store " << a.tensor << "[" << coords_str(a.coords) << "] = " << a.value << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

TileKernel build_gemm(std::int64_t M, std::int64_t N, std::int64_t K, std::int64_t BM, std::int64_t BN,
                      std::int64_t BK, std::int64_t dtype_bytes) {
  if (BM <= 0 || BN <= 0 || BK <= 0 || M <= 0 || N <= 0 || K <= 0) throw InputError("GEMM sizes must be positive");
  if (M % BM || N % BN || K % BK) {
    throw InputError("GEMM " + std::to_string(M) + "x" + std::to_string(N) + "x" + std::to_string(K) +
                     " is not divisible by blocks " + std::to_string(BM) + "x" + std::to_string(BN) + "x" +
                     std::to_string(BK));
  }
  const std::int64_t tm = M / BM, tn = N / BN, tk = K / BK;
  TileKernel k;
  k.name = "gemm";
  k.params = {{"BM", BM}, {"BN", BN}, {"BK", BK}, {"M", M}, {"N", N}, {"K", K}};
  k.vars = {{"gm", tm, VarKind::Grid}, {"gn", tn, VarKind::Grid}, {"k", tk, VarKind::Sequential}};
  k.tensors = {{"A", {tm, tk}, dtype_bytes}, {"B", {tk, tn}, dtype_bytes}, {"C", {tm, tn}, dtype_bytes}};
  const auto gm = AffineExpr::var("gm"), gn = AffineExpr::var("gn"), kk = AffineExpr::var("k");
  k.accesses = {
      {"a", "A", {gm, kk}, {BM, BK}, Direction::Load, ""},
      {"b", "B", {kk, gn}, {BK, BN}, Direction::Load, ""},
      {"store_C_0", "C", {gm, gn}, {}, Direction::Store, "c"},
  };
  k.ops = {{"c", OpKind::Matmul, {"a", "b"}, {}, {}}};
  check_kernel(k);
  return normalize(k);
}

TileKernel build_flashattention(std::int64_t batch_heads, std::int64_t seqlen, std::int64_t head_dim,
                                std::int64_t block_q, std::int64_t block_kv, std::int64_t dtype_bytes) {
  if (batch_heads <= 0 || seqlen <= 0 || head_dim <= 0 || block_q <= 0 || block_kv <= 0) {
    throw InputError("attention sizes must be positive");
  }
  if (seqlen % block_q || seqlen % block_kv) {
    throw InputError("sequence length " + std::to_string(seqlen) + " is not divisible by blocks " +
                     std::to_string(block_q) + "/" + std::to_string(block_kv));
  }
  const std::int64_t nq = seqlen / block_q, nkv = seqlen / block_kv;
  TileKernel k;
  k.name = "flashattention";
  k.params = {{"BQ", block_q}, {"BKV", block_kv}, {"D", head_dim}, {"H", batch_heads}, {"S", seqlen}};
  k.vars = {{"h", batch_heads, VarKind::Grid}, {"gq", nq, VarKind::Grid}, {"kv", nkv, VarKind::Sequential}};
  k.tensors = {{"Q", {batch_heads, nq}, dtype_bytes},
               {"KT", {batch_heads, nkv}, dtype_bytes},
               {"V", {batch_heads, nkv}, dtype_bytes},
               {"O", {batch_heads, nq}, dtype_bytes}};
  const auto h = AffineExpr::var("h"), gq = AffineExpr::var("gq"), kv = AffineExpr::var("kv");
  k.accesses = {
      {"q", "Q", {h, gq}, {block_q, head_dim}, Direction::Load, ""},
      {"kt", "KT", {h, kv}, {head_dim, block_kv}, Direction::Load, ""},
      {"v", "V", {h, kv}, {block_kv, head_dim}, Direction::Load, ""},
      {"store_O_0", "O", {h, gq}, {}, Direction::Store, "acc"},
  };
  k.ops = {
      {"s", OpKind::Matmul, {"q", "kt"}, {}, {}},
      {"scaled", OpKind::Vector, {"s"}, {}, {}},
      {"rowmax", OpKind::Vector, {"scaled"}, {}, {}},
      {"p", OpKind::Vector, {"rowmax"}, {}, {}},
      {"pv", OpKind::Matmul, {"p", "v"}, {}, {}},
      {"acc", OpKind::Vector, {"pv"}, {}, {}},
  };
  check_kernel(k);
  return normalize(k);
}

std::set<std::string> index_dependence(const Access& a) {
  std::set<std::string> out;
  for (const auto& c : a.coords) {
    auto vs = c.vars();
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

std::int64_t kernel_flops(const TileKernel& k) {
  std::int64_t iterations = 1;
  for (const auto& v : k.vars) iterations *= v.extent;
  std::int64_t per_iter = 0;
  for (const auto& op : k.ops) {
    if (op.kind == OpKind::Matmul) {
      per_iter += 2 * op.iteration_space[0] * op.iteration_space[1] * op.iteration_space[2];
    } else {
      per_iter += op.iteration_space[0];
    }
  }
  return per_iter * iterations;
}

}  // namespace dfmap
