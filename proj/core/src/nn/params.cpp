#include "dapip/nn/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dapip/errors.hpp"

namespace dapip::nn {

Parameter& ParamStore::add(const std::string& name, Tensor init) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->grad = Tensor(init.shape());
  p->m = Tensor(init.shape());
  p->v = Tensor(init.shape());
  p->value = std::move(init);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParamStore::add_uniform(const std::string& name, std::span<const std::size_t> shape, double bound,
                                   Rng& rng) {
  Tensor t(shape);
  for (double& x : t.data()) x = rng.uniform(-bound, bound);
  return add(name, std::move(t));
}

Parameter& ParamStore::add_uniform(const std::string& name, std::initializer_list<std::size_t> shape,
                                   double bound, Rng& rng) {
  return add_uniform(name, std::span<const std::size_t>(shape.begin(), shape.size()), bound, rng);
}

Parameter& ParamStore::get(const std::string& name) {
  const auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter '" + name + "'");
  return *params_[it->second];
}

const Parameter& ParamStore::get(const std::string& name) const {
  return const_cast<ParamStore*>(this)->get(name);
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->grad.fill(0.0);
}

double ParamStore::grad_norm() const {
  double s = 0.0;
  for (const auto& p : params_) {
    for (double g : p->grad.data()) s += g * g;
  }
  return std::sqrt(s);
}

double adam_update(ParamStore& params, const AdamConfig& cfg) {
  const double norm = params.grad_norm();
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  const double scale = (cfg.clip > 0 && norm > cfg.clip) ? cfg.clip / norm : 1.0;
  const std::int64_t t = params.step() + 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    auto w = p.value.data();
    auto g = p.grad.data();
    auto m = p.m.data();
    auto v = p.v.data();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j] * scale;
      m[j] = cfg.beta1 * m[j] + (1 - cfg.beta1) * gj;
      v[j] = cfg.beta2 * v[j] + (1 - cfg.beta2) * gj * gj;
      w[j] -= cfg.lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.eps);
      g[j] = 0.0;
    }
  }
  params.set_step(t);
  return norm;
}

// ---------------------------------------------------------------------------
// Binary checkpoint. All integers are little-endian u64, doubles are IEEE
// binary64 little-endian, strings are a length followed by bytes.

namespace {

constexpr char kMagic[8] = {'D', 'A', 'P', 'I', 'P', 'C', 'K', '1'};
static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian hosts");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw IoError("cannot write checkpoint " + path.string());
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void tensor(const Tensor& t) { bytes(t.data().data(), t.size() * sizeof(double)); }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw IoError("cannot open checkpoint " + path.string());
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) fail("truncated file");
    offset_ += n;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    bytes(&v, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    if (n > (1u << 20)) fail("implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  void tensor(Tensor& t) { bytes(t.data().data(), t.size() * sizeof(double)); }
  [[noreturn]] void fail(const std::string& what) {
    // The location reported is the byte offset of the failed read.
    throw DataFormatError(path_.string(), offset_, what);
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  std::size_t offset_ = 0;
};

Checkpoint read_header(Reader& r) {
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) r.fail("not a dapip checkpoint");
  Checkpoint ck;
  const std::uint64_t n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string k = r.str();
    ck.meta[k] = r.str();
  }
  return ck;
}

}  // namespace

void save_checkpoint(const ParamStore& params, const Checkpoint& meta, const std::filesystem::path& path) {
  Writer w(path);
  w.bytes(kMagic, sizeof kMagic);
  w.u64(meta.meta.size());
  for (const auto& [k, v] : meta.meta) {
    w.str(k);
    w.str(v);
  }
  w.u64(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = params[i];
    w.str(p.name);
    w.u64(p.value.rank());
    for (std::size_t d : p.value.shape()) w.u64(d);
    w.tensor(p.value);
    w.tensor(p.m);
    w.tensor(p.v);
  }
  w.u64(static_cast<std::uint64_t>(params.step()));
  w.finish();
}

Checkpoint read_checkpoint_meta(const std::filesystem::path& path) {
  Reader r(path);
  return read_header(r);
}

Checkpoint load_checkpoint(ParamStore& params, const std::filesystem::path& path) {
  Reader r(path);
  Checkpoint ck = read_header(r);
  const std::uint64_t n = r.u64();
  if (n != params.size()) {
    throw ShapeMismatch("checkpoint has " + std::to_string(n) + " parameters, model has " +
                        std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    const std::string name = r.str();
    if (name != p.name) throw ShapeMismatch("checkpoint parameter '" + name + "' where '" + p.name + "' expected");
    const std::uint64_t rank = r.u64();
    if (rank > Tensor::kMaxRank) r.fail("bad rank");
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.u64();
    if (!std::equal(shape.begin(), shape.end(), p.value.shape().begin(), p.value.shape().end())) {
      throw ShapeMismatch("shape of '" + name + "' differs from the model");
    }
    r.tensor(p.value);
    r.tensor(p.m);
    r.tensor(p.v);
    p.grad.fill(0.0);
  }
  params.set_step(static_cast<std::int64_t>(r.u64()));
  return ck;
}

}  // namespace dapip::nn
