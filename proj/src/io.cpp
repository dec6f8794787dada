#include "hypersketch/io.hpp"

#include <array>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hypersketch/errors.hpp"

namespace hypersketch {

namespace {

constexpr char kMagic[8] = {'H', 'S', 'K', 'E', 'T', 'C', 'H', '1'};
constexpr std::uint16_t kVersion = 1;

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int b = 0; b < 8; ++b) c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
    table[i] = c;
  }
  return table;
}

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<std::byte>(v)); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const void* data, std::size_t len) {
    const auto* p = static_cast<const std::byte*>(data);
    bytes_.insert(bytes_.end(), p, p + len);
  }
  std::vector<std::byte> take() { return std::move(bytes_); }
  const std::vector<std::byte>& bytes() const { return bytes_; }

 private:
  std::vector<std::byte> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::byte>& bytes) : bytes_(bytes) {}
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(u8()) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void raw(void* dst, std::size_t len) {
    need(len);
    std::memcpy(dst, bytes_.data() + pos_, len);
    pos_ += len;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t len) {
    if (pos_ + len > bytes_.size()) throw DataIntegrityError("sketch file truncated");
  }
  const std::vector<std::byte>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed) {
  static const auto table = make_crc_table();
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  const auto* p = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void write_point_file(const std::string& path, const PointSet& points) {
  validate_point_set(points);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << points.n << ' ' << points.d << ' ' << mode_name(points.mode) << '\n';
  char buf[32];
  for (std::size_t i = 0; i < points.n; ++i) {
    for (std::size_t k = 0; k < points.d; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", points.data[i * points.d + k]);
      out << buf << (k + 1 == points.d ? '\n' : ' ');
    }
  }
  if (!out.good()) throw std::runtime_error("error writing " + path);
}

PointSet read_point_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ":1: missing header line");
  std::istringstream header(line);
  PointSet set;
  std::string mode;
  if (!(header >> set.n >> set.d >> mode)) {
    throw std::runtime_error(path + ":1: expected header \"n d mode\"");
  }
  set.mode = mode_from_name(mode);
  if (set.n == 0 || set.d == 0) throw std::runtime_error(path + ":1: n and d must be positive");
  set.data.reserve(set.n * set.d);
  for (std::size_t i = 0; i < set.n; ++i) {
    const std::size_t lineno = i + 2;
    if (!std::getline(in, line)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing point line");
    }
    std::istringstream row(line);
    for (std::size_t k = 0; k < set.d; ++k) {
      double v;
      if (!(row >> v)) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(set.d) + " coordinates");
      }
      set.data.push_back(v);
    }
    double extra;
    if (row >> extra) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": too many coordinates");
    }
  }
  set.provenance = "file:" + path;
  validate_point_set(set);
  return set;
}

std::vector<std::byte> serialize_sketch(const SketchBundle& bundle) {
  const CascadePlan& plan = bundle.plan;
  if (bundle.sketches.size() != plan.n) {
    throw std::invalid_argument("serialize_sketch: bundle has wrong sketch count");
  }
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(plan.mode));
  w.u64(plan.n);
  w.u64(plan.d);
  w.u16(static_cast<std::uint16_t>(plan.levels));
  w.f64(plan.epsilon);
  w.f64(plan.min_dist);
  w.f64(plan.r);
  w.f64(plan.min_sq_norm);
  w.u64(plan.master_seed);
  for (const auto dim : plan.dims) w.u64(dim);
  w.f64(plan.mode == Mode::Ball ? plan.norm_step : 0.0);
  for (const auto& sk : bundle.sketches) {
    if (sk.nbits() != plan.final_dim()) {
      throw std::invalid_argument("serialize_sketch: sketch width differs from the plan");
    }
    for (const std::uint64_t word : sk.words()) w.u64(word);
  }
  if (plan.mode == Mode::Ball) {
    if (bundle.quantized_norms.size() != plan.n) {
      throw std::invalid_argument("serialize_sketch: missing quantized norms");
    }
    for (const std::uint32_t idx : bundle.quantized_norms) w.u32(idx);
  }
  const std::uint32_t crc = crc32(w.bytes().data(), w.bytes().size());
  w.u32(crc);
  return w.take();
}

SketchBundle deserialize_sketch(const std::vector<std::byte>& bytes) {
  if (bytes.size() < sizeof(kMagic) + 4) throw DataIntegrityError("sketch file truncated");
  // CRC covers everything before the trailing 4 bytes.
  std::uint32_t trailer = 0;
  for (int i = 0; i < 4; ++i) {
    trailer |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(
                   bytes[bytes.size() - 4 + i]))
               << (8 * i);
  }
  const std::uint32_t actual = crc32(bytes.data(), bytes.size() - 4);
  if (trailer != actual) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "sketch file CRC mismatch (stored %08" PRIx32
                                    ", computed %08" PRIx32 ")",
                  trailer, actual);
    throw DataIntegrityError(buf);
  }

  Reader r(bytes);
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataIntegrityError("not a sketch file (bad magic)");
  }
  const std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw DataIntegrityError("unsupported sketch file version " + std::to_string(version));
  }

  SketchBundle bundle;
  CascadePlan& plan = bundle.plan;
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw DataIntegrityError("bad mode byte");
  plan.mode = static_cast<Mode>(mode);
  plan.n = r.u64();
  plan.d = r.u64();
  plan.levels = r.u16();
  plan.epsilon = r.f64();
  plan.min_dist = r.f64();
  plan.r = r.f64();
  plan.min_sq_norm = r.f64();
  plan.master_seed = r.u64();
  if (plan.levels < 1 || plan.n == 0) throw DataIntegrityError("bad header fields");
  plan.dims.resize(plan.levels);
  for (auto& dim : plan.dims) dim = r.u64();
  plan.norm_step = r.f64();
  plan.eps_working = working_epsilon(plan.mode, plan.epsilon);
  plan.delta = (plan.eps_working / std::numbers::sqrt2) *
               std::pow(std::numbers::sqrt2 / std::numbers::pi, plan.levels);

  const std::uint64_t n_bits = plan.final_dim();
  const std::uint64_t words = (n_bits + 63) / 64;
  bundle.sketches.reserve(plan.n);
  for (std::uint64_t i = 0; i < plan.n; ++i) {
    PackedSignVector sk(n_bits);
    r.raw(sk.word_data(), words * 8);
    bundle.sketches.push_back(std::move(sk));
  }
  if (plan.mode == Mode::Ball) {
    bundle.quantized_norms.resize(plan.n);
    for (auto& idx : bundle.quantized_norms) idx = r.u32();
  }
  if (r.pos() != bytes.size() - 4) {
    throw DataIntegrityError("sketch file has trailing bytes");
  }
  return bundle;
}

void write_sketch_file(const std::string& path, const SketchBundle& bundle) {
  const auto bytes = serialize_sketch(bundle);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) throw std::runtime_error("error writing " + path);
}

SketchBundle read_sketch_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in.good()) throw std::runtime_error("error reading " + path);
  return deserialize_sketch(bytes);
}

std::string plan_to_text(const CascadePlan& plan) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "mode = " << mode_name(plan.mode) << '\n';
  out << "n = " << plan.n << '\n';
  out << "d = " << plan.d << '\n';
  out << "epsilon = " << num(plan.epsilon) << '\n';
  out << "eps_working = " << num(plan.eps_working) << '\n';
  out << "min_dist = " << num(plan.min_dist) << '\n';
  out << "r = " << num(plan.r) << '\n';
  out << "min_sq_norm = " << num(plan.min_sq_norm) << '\n';
  out << "levels = " << plan.levels << '\n';
  out << "delta = " << num(plan.delta) << '\n';
  out << "dims =";
  for (const auto dim : plan.dims) out << ' ' << dim;
  out << '\n';
  out << "N = " << plan.final_dim() << '\n';
  out << "norm_step = " << num(plan.norm_step) << '\n';
  out << "norm_bits = " << norm_bits(plan) << '\n';
  out << "master_seed = " << plan.master_seed << '\n';
  out << "n_constant = " << num(plan.n_constant) << '\n';
  out << "bit_budget = " << bit_budget(plan) << '\n';
  if (plan.dims_saturated) out << "dims_saturated = true\n";
  return out.str();
}

}  // namespace hypersketch
